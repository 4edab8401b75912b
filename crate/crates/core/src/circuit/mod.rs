//! Syntactic circuits over a gate signature.
//!
//! A [`Circuit`] is a port-ordered wiring diagram: an ordered list of typed
//! input wires (the domain object), a list of gate nodes each consuming and
//! producing wires, and an ordered list of output wires (the codomain
//! object). Wires are *linear*: each is produced exactly once (by an input
//! port or a node) and consumed exactly once (by a node or an output port).
//!
//! Circuits form a symmetric monoidal category in the strictest possible
//! sense: objects are lists of wire types ([`WireObj`]), sequential
//! composition splices one diagram onto another's output ports, the tensor
//! is side-by-side placement, and the symmetry is a pure rewiring with no
//! nodes. Associativity and unit laws hold on the nose because objects are
//! flat lists. Equality of morphisms — equality of diagrams up to the
//! harmless reorderings of independent nodes — is decided by
//! [`Circuit::canonical_form`], which renumbers every circuit into a unique
//! normal form.
//!
//! Circuits say nothing about what gates *mean*; interpretations into
//! matrix-level channels live in [`crate::interp`].

mod canon;
mod json;

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from circuit construction, wiring, and parsing.
#[derive(Debug, Error)]
pub enum CircuitError {
    /// Malformed JSON or structurally impossible wiring in a parsed file.
    #[error("parse error: {0}")]
    ParseError(String),
    /// A gate name not present in the signature.
    #[error("unknown gate: {0}")]
    UnknownGate(String),
    /// Wiring that exists but is ill-typed or non-linear (wrong wire type,
    /// wire used twice, wire never consumed).
    #[error("ill-typed wiring: {0}")]
    IllTypedWiring(String),
    /// Composition of circuits whose boundary objects do not match.
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    /// A gate signature that violates its own ground rules.
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
}

/// The two wire kinds carried by circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WireType {
    Bit,
    Qubit,
}

impl fmt::Display for WireType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireType::Bit => write!(f, "BIT"),
            WireType::Qubit => write!(f, "QUBIT"),
        }
    }
}

/// A monoidal object: an ordered list of wire types. The unit object is the
/// empty list and the tensor is concatenation, so all monoidal structure
/// maps are identities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct WireObj(Vec<WireType>);

impl WireObj {
    pub fn new(types: impl Into<Vec<WireType>>) -> Self {
        WireObj(types.into())
    }

    /// The monoidal unit: no wires.
    pub fn unit() -> Self {
        WireObj(Vec::new())
    }

    pub fn bit() -> Self {
        WireObj(vec![WireType::Bit])
    }

    pub fn qubit() -> Self {
        WireObj(vec![WireType::Qubit])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn types(&self) -> &[WireType] {
        &self.0
    }

    /// Number of wires of one kind.
    pub fn count(&self, t: WireType) -> usize {
        self.0.iter().filter(|&&x| x == t).count()
    }

    /// Tensor of objects: concatenation.
    pub fn tensor(&self, other: &WireObj) -> WireObj {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        WireObj(v)
    }
}

impl fmt::Display for WireObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A gate's name and boundary types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateDecl {
    pub name: String,
    pub dom: WireObj,
    pub cod: WireObj,
}

impl GateDecl {
    pub fn new(name: impl Into<String>, dom: WireObj, cod: WireObj) -> Self {
        GateDecl {
            name: name.into(),
            dom,
            cod,
        }
    }
}

/// A gate signature: the generating gates circuits may mention.
///
/// Every signature must declare the two classical constants `zero` and
/// `one`, each of type `I -> BIT`; they are how classical information
/// enters a circuit and the execution layer depends on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    gates: BTreeMap<String, GateDecl>,
}

impl Signature {
    /// Builds a signature from declarations, rejecting duplicates and
    /// checking the `zero`/`one` ground rules.
    pub fn new(decls: impl IntoIterator<Item = GateDecl>) -> Result<Self, CircuitError> {
        let mut gates = BTreeMap::new();
        for d in decls {
            if gates.insert(d.name.clone(), d.clone()).is_some() {
                return Err(CircuitError::InvalidSignature(format!(
                    "duplicate gate {}",
                    d.name
                )));
            }
        }
        for name in ["zero", "one"] {
            match gates.get(name) {
                Some(d) if d.dom == WireObj::unit() && d.cod == WireObj::bit() => {}
                Some(_) => {
                    return Err(CircuitError::InvalidSignature(format!(
                        "gate {name} must have type I -> BIT"
                    )))
                }
                None => {
                    return Err(CircuitError::InvalidSignature(format!(
                        "signature must declare gate {name}: I -> BIT"
                    )))
                }
            }
        }
        Ok(Signature { gates })
    }

    pub fn get(&self, name: &str) -> Option<&GateDecl> {
        self.gates.get(name)
    }

    /// Like [`Signature::get`] but with the standard error.
    pub fn lookup(&self, name: &str) -> Result<&GateDecl, CircuitError> {
        self.gates
            .get(name)
            .ok_or_else(|| CircuitError::UnknownGate(name.to_string()))
    }

    pub fn decls(&self) -> impl Iterator<Item = &GateDecl> {
        self.gates.values()
    }
}

impl Default for Signature {
    /// The stock gate set: classical constants, state preparation, the
    /// usual single-qubit gates, CNOT, measurement, and discards.
    fn default() -> Self {
        use WireType::*;
        let q = WireObj::qubit();
        let b = WireObj::bit();
        let i = WireObj::unit();
        let qq = WireObj::new(vec![Qubit, Qubit]);
        Signature::new([
            GateDecl::new("zero", i.clone(), b.clone()),
            GateDecl::new("one", i.clone(), b.clone()),
            GateDecl::new("init", b.clone(), q.clone()),
            GateDecl::new("H", q.clone(), q.clone()),
            GateDecl::new("X", q.clone(), q.clone()),
            GateDecl::new("Z", q.clone(), q.clone()),
            GateDecl::new("S", q.clone(), q.clone()),
            GateDecl::new("Tg", q.clone(), q.clone()),
            GateDecl::new("CNOT", qq.clone(), qq),
            GateDecl::new("meas", q.clone(), b.clone()),
            GateDecl::new("discard_bit", b, i.clone()),
            GateDecl::new("discard_qubit", q, i),
        ])
        .expect("stock signature is well-formed")
    }
}

/// Wire identifier within one circuit. See [`Circuit`] for the numbering
/// convention.
pub type WireId = usize;

/// One gate occurrence: which gate, which wires it consumes (in the gate's
/// port order), which wires it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub gate: String,
    pub ins: Vec<WireId>,
    pub outs: Vec<WireId>,
}

/// A port-ordered wiring diagram; see the module docs.
///
/// Internally wire ids follow a fixed convention: input ports produce wires
/// `0..dom.len()`, and each node's output wires are allocated consecutively
/// in node-list order after all earlier wires. Nodes are listed in a valid
/// schedule (every input already produced). All constructors preserve this,
/// so two circuits built differently can still be compared after
/// [`Circuit::canonical_form`] renumbers them into the unique normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    dom: WireObj,
    cod: WireObj,
    nodes: Vec<Node>,
    out: Vec<WireId>,
}

impl Circuit {
    /// Identity diagram: wires pass straight through.
    pub fn identity(obj: WireObj) -> Self {
        let out = (0..obj.len()).collect();
        Circuit {
            dom: obj.clone(),
            cod: obj,
            nodes: Vec::new(),
            out,
        }
    }

    /// The symmetry `A * B -> B * A`: a pure rewiring.
    pub fn symmetry(a: &WireObj, b: &WireObj) -> Self {
        let out = (a.len()..a.len() + b.len()).chain(0..a.len()).collect();
        Circuit {
            dom: a.tensor(b),
            cod: b.tensor(a),
            nodes: Vec::new(),
            out,
        }
    }

    /// A pure rewiring sending input port `p` to output position
    /// `targets[p]`; `targets` must be a permutation of `0..obj.len()`.
    pub fn permutation(obj: &WireObj, targets: &[usize]) -> Result<Self, CircuitError> {
        if targets.len() != obj.len() {
            return Err(CircuitError::IllTypedWiring(format!(
                "permutation of {} wires got {} targets",
                obj.len(),
                targets.len()
            )));
        }
        let n = targets.len();
        let mut out = vec![0usize; n];
        let mut cod = vec![WireType::Bit; n];
        let mut seen = vec![false; n];
        for (p, &t) in targets.iter().enumerate() {
            if t >= n || seen[t] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "targets are not a permutation: position {t} missing or reused"
                )));
            }
            seen[t] = true;
            out[t] = p;
            cod[t] = obj.types()[p];
        }
        Ok(Circuit {
            dom: obj.clone(),
            cod: WireObj::new(cod),
            nodes: Vec::new(),
            out,
        })
    }

    /// A single gate as a circuit.
    pub fn lift_gate(sig: &Signature, name: &str) -> Result<Self, CircuitError> {
        let decl = sig.lookup(name)?;
        let d = decl.dom.len();
        let c = decl.cod.len();
        let node = Node {
            gate: decl.name.clone(),
            ins: (0..d).collect(),
            outs: (d..d + c).collect(),
        };
        Ok(Circuit {
            dom: decl.dom.clone(),
            cod: decl.cod.clone(),
            nodes: vec![node],
            out: (d..d + c).collect(),
        })
    }

    /// Sequential composition `self ; g` (first `self`, then `g`); the
    /// boundary objects must agree.
    pub fn compose(&self, g: &Circuit) -> Result<Self, CircuitError> {
        if self.cod != g.dom {
            return Err(CircuitError::ObjectMismatch(format!(
                "compose: codomain {} != domain {}",
                self.cod, g.dom
            )));
        }
        let wf = self.total_wires();
        let dg = g.dom.len();
        let remap = |w: WireId| if w < dg { self.out[w] } else { w - dg + wf };
        let mut nodes = self.nodes.clone();
        nodes.extend(g.nodes.iter().map(|n| Node {
            gate: n.gate.clone(),
            ins: n.ins.iter().map(|&w| remap(w)).collect(),
            outs: n.outs.iter().map(|&w| remap(w)).collect(),
        }));
        Ok(Circuit {
            dom: self.dom.clone(),
            cod: g.cod.clone(),
            nodes,
            out: g.out.iter().map(|&w| remap(w)).collect(),
        })
    }

    /// Parallel (side-by-side) composition `self * g`.
    pub fn tensor(&self, g: &Circuit) -> Self {
        let df = self.dom.len();
        let dg = g.dom.len();
        let internal_f = self.total_wires() - df;
        // self keeps its input wires; its internal wires shift up past g's
        // inputs. g's inputs sit after self's; its internal wires follow
        // self's internal block.
        let remap_f = |w: WireId| if w < df { w } else { w + dg };
        let remap_g = |w: WireId| if w < dg { w + df } else { w + df + internal_f };
        let mut nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| Node {
                gate: n.gate.clone(),
                ins: n.ins.iter().map(|&w| remap_f(w)).collect(),
                outs: n.outs.iter().map(|&w| remap_f(w)).collect(),
            })
            .collect();
        nodes.extend(g.nodes.iter().map(|n| Node {
            gate: n.gate.clone(),
            ins: n.ins.iter().map(|&w| remap_g(w)).collect(),
            outs: n.outs.iter().map(|&w| remap_g(w)).collect(),
        }));
        let out = self
            .out
            .iter()
            .map(|&w| remap_f(w))
            .chain(g.out.iter().map(|&w| remap_g(w)))
            .collect();
        Circuit {
            dom: self.dom.tensor(&g.dom),
            cod: self.cod.tensor(&g.cod),
            nodes,
            out,
        }
    }

    /// Appends one gate to the output boundary: `positions[k]` names the
    /// output port (index into the codomain) feeding the gate's `k`-th input
    /// port. The gate's outputs become the *first* output ports of the
    /// result, followed by the untouched ports in their old order.
    pub fn extend_with_gate(
        &self,
        decl: &GateDecl,
        positions: &[usize],
    ) -> Result<Self, CircuitError> {
        if positions.len() != decl.dom.len() {
            return Err(CircuitError::IllTypedWiring(format!(
                "gate {} takes {} wires, got {} positions",
                decl.name,
                decl.dom.len(),
                positions.len()
            )));
        }
        let mut seen = vec![false; self.cod.len()];
        for (k, &p) in positions.iter().enumerate() {
            if p >= self.cod.len() || seen[p] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "gate {}: output port {p} missing or reused",
                    decl.name
                )));
            }
            seen[p] = true;
            if self.cod.types()[p] != decl.dom.types()[k] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "gate {} port {k} wants {}, port {p} carries {}",
                    decl.name,
                    decl.dom.types()[k],
                    self.cod.types()[p]
                )));
            }
        }
        let next = self.total_wires();
        let node = Node {
            gate: decl.name.clone(),
            ins: positions.iter().map(|&p| self.out[p]).collect(),
            outs: (next..next + decl.cod.len()).collect(),
        };
        let mut out: Vec<WireId> = node.outs.clone();
        let mut cod: Vec<WireType> = decl.cod.types().to_vec();
        for (p, &w) in self.out.iter().enumerate() {
            if !seen[p] {
                out.push(w);
                cod.push(self.cod.types()[p]);
            }
        }
        let mut nodes = self.nodes.clone();
        nodes.push(node);
        Ok(Circuit {
            dom: self.dom.clone(),
            cod: WireObj::new(cod),
            nodes,
            out,
        })
    }

    pub fn dom(&self) -> &WireObj {
        &self.dom
    }

    pub fn cod(&self) -> &WireObj {
        &self.cod
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Output ports: which wire each codomain position carries.
    pub fn out(&self) -> &[WireId] {
        &self.out
    }

    /// Total number of wires, input ports included.
    pub fn total_wires(&self) -> usize {
        self.dom.len() + self.nodes.iter().map(|n| n.outs.len()).sum::<usize>()
    }

    /// Full well-formedness check against a signature: node schedule,
    /// linearity, the internal numbering convention, and port types.
    pub fn validate(&self, sig: &Signature) -> Result<(), CircuitError> {
        let total = self.total_wires();
        let mut types: Vec<Option<WireType>> = vec![None; total];
        for (i, t) in self.dom.types().iter().enumerate() {
            types[i] = Some(*t);
        }
        let mut consumed = vec![false; total];
        let mut next = self.dom.len();
        for n in &self.nodes {
            let decl = sig.lookup(&n.gate)?;
            if n.ins.len() != decl.dom.len() || n.outs.len() != decl.cod.len() {
                return Err(CircuitError::IllTypedWiring(format!(
                    "gate {} has arity {}->{}, node wires {}->{}",
                    n.gate,
                    decl.dom.len(),
                    decl.cod.len(),
                    n.ins.len(),
                    n.outs.len()
                )));
            }
            for (k, &w) in n.ins.iter().enumerate() {
                let t = types.get(w).copied().flatten().ok_or_else(|| {
                    CircuitError::IllTypedWiring(format!(
                        "gate {} reads unproduced wire {w}",
                        n.gate
                    ))
                })?;
                if consumed[w] {
                    return Err(CircuitError::IllTypedWiring(format!(
                        "wire {w} consumed twice (gate {})",
                        n.gate
                    )));
                }
                consumed[w] = true;
                if t != decl.dom.types()[k] {
                    return Err(CircuitError::IllTypedWiring(format!(
                        "gate {} port {k} wants {}, wire {w} carries {t}",
                        n.gate,
                        decl.dom.types()[k]
                    )));
                }
            }
            for (k, &w) in n.outs.iter().enumerate() {
                if w != next {
                    return Err(CircuitError::IllTypedWiring(format!(
                        "gate {} output wire {w} breaks the numbering convention (expected {next})",
                        n.gate
                    )));
                }
                types[w] = Some(decl.cod.types()[k]);
                next += 1;
            }
        }
        if self.out.len() != self.cod.len() {
            return Err(CircuitError::IllTypedWiring(format!(
                "output list has {} ports, codomain {}",
                self.out.len(),
                self.cod.len()
            )));
        }
        for (p, &w) in self.out.iter().enumerate() {
            let t = types.get(w).copied().flatten().ok_or_else(|| {
                CircuitError::IllTypedWiring(format!("output port {p} reads unproduced wire {w}"))
            })?;
            if consumed[w] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "wire {w} consumed twice (output port {p})"
                )));
            }
            consumed[w] = true;
            if t != self.cod.types()[p] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "output port {p} wants {}, wire {w} carries {t}",
                    self.cod.types()[p]
                )));
            }
        }
        if let Some(w) = consumed.iter().position(|&c| !c) {
            return Err(CircuitError::IllTypedWiring(format!(
                "wire {w} is never consumed"
            )));
        }
        Ok(())
    }

    /// Longest node chain from the inputs; identity-like circuits have
    /// depth 0.
    pub fn depth(&self) -> usize {
        self.node_layers().into_iter().max().unwrap_or(0)
    }

    /// Layer per node: 1 + the deepest layer producing one of its inputs,
    /// where input ports sit at layer 0. Shared by depth and normal form.
    fn node_layers(&self) -> Vec<usize> {
        let dom_len = self.dom.len();
        let mut wire_layer: BTreeMap<WireId, usize> = (0..dom_len).map(|w| (w, 0)).collect();
        let mut layers = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let layer = 1 + n.ins.iter().map(|w| wire_layer[w]).max().unwrap_or(0);
            for &w in &n.outs {
                wire_layer.insert(w, layer);
            }
            layers.push(layer);
        }
        layers
    }
}

impl fmt::Display for Circuit {
    /// One line per node, `gate [ins] -> [outs]`, plus the boundary.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {}", self.dom, self.cod)?;
        for n in &self.nodes {
            writeln!(f, "  {} {:?} -> {:?}", n.gate, n.ins, n.outs)?;
        }
        write!(f, "  out {:?}", self.out)
    }
}

/// Canonical-form equality: the decidable morphism equality of the circuit
/// category.
pub fn canonically_equal(a: &Circuit, b: &Circuit) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// Draws a random well-typed circuit over `sig`: a random typed domain of at
/// most `max_wires` wires followed by up to `max_gates` uniformly chosen
/// applicable gates at uniformly chosen ports. Used by the law harness to
/// sample morphisms.
pub fn random_circuit(
    sig: &Signature,
    rng: &mut impl Rng,
    max_wires: usize,
    max_gates: usize,
) -> Circuit {
    let dom_len = rng.random_range(0..=max_wires);
    let types: Vec<WireType> = (0..dom_len)
        .map(|_| {
            if rng.random_bool(0.5) {
                WireType::Bit
            } else {
                WireType::Qubit
            }
        })
        .collect();
    random_extension(sig, rng, WireObj::new(types), max_wires, max_gates)
}

/// Continues a circuit from a given domain: up to `max_gates` random
/// applicable gates, never exceeding `max_wires` parallel wires. Lets callers
/// draw composable pairs by growing the second circuit from the first one's
/// codomain.
pub fn random_extension(
    sig: &Signature,
    rng: &mut impl Rng,
    dom: WireObj,
    max_wires: usize,
    max_gates: usize,
) -> Circuit {
    let mut c = Circuit::identity(dom);
    let gate_count = rng.random_range(0..=max_gates);
    for _ in 0..gate_count {
        // A gate applies if its input types can be matched to distinct free
        // output ports and the result stays within the wire budget.
        let applicable: Vec<&GateDecl> = sig
            .decls()
            .filter(|d| {
                let wide_enough = [WireType::Bit, WireType::Qubit]
                    .iter()
                    .all(|&t| c.cod().count(t) >= d.dom.count(t));
                // wide_enough guarantees cod.len() >= d.dom.len(), so the
                // budget arithmetic below cannot underflow.
                wide_enough && c.cod().len() - d.dom.len() + d.cod.len() <= max_wires
            })
            .collect();
        let Some(decl) = applicable.choose(rng) else {
            break;
        };
        let mut positions = Vec::with_capacity(decl.dom.len());
        for &want in decl.dom.types() {
            let mut free: Vec<usize> = (0..c.cod().len())
                .filter(|&p| c.cod().types()[p] == want && !positions.contains(&p))
                .collect();
            free.shuffle(rng);
            positions.push(free[0]);
        }
        c = c
            .extend_with_gate(decl, &positions)
            .expect("chosen ports are well-typed");
    }
    c
}
