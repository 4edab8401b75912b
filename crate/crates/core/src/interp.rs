//! Interpreting circuits as channels.
//!
//! A [`GateInterp`] assigns every gate of a signature a vectorized channel
//! with the declared boundary, validated completely positive and
//! trace-preserving at load time. The two classical constants are pinned:
//! `zero` must mean the left classical injection and `one` the right one —
//! the execution layer's treatment of classical values starts from this.
//!
//! [`interpret_circuit`] extends the assignment to whole circuits by a
//! frontier sweep: walk the nodes in schedule order, keep the ordered list
//! of live wires, and for each node emit the wire permutation that brings
//! its inputs to the front followed by `gate (x) identity`. The result is
//! monoidal-functorial — identities to identities, composition to
//! composition, tensors to tensors, symmetries to permutation channels —
//! and those facts are checked over random circuits in the law harness.
//!
//! A [`GlobalElement`] pairs a circuit with its interpretation: the two
//! views of one morphism that the rest of the crate (boxing, execution)
//! passes around together.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateDecl, Signature, WireObj, WireType};
use crate::quantum::{
    self, compose_q, identity_q, is_cp, is_tp, permute_wires, tensor_q, unitary_channel, CMat,
    CqObject, QuantumError, Superop, DEFAULT_TOL,
};

/// Errors from building gate interpretations and interpreting circuits.
#[derive(Debug, Error)]
pub enum InterpError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    /// A signature gate with no channel assigned (and no stock default).
    #[error("missing interpretation for gate {0}")]
    MissingInterp(String),
    /// A gate channel that fails the CP/TP checks.
    #[error("gate {0} is not CPTP: {1}")]
    NotCptp(String, String),
    /// A gate channel whose boundary differs from the declaration, or a
    /// classical constant not mapped to its injection.
    #[error("bad interpretation for gate {0}: {1}")]
    BadInterp(String, String),
}

/// The object a wire list denotes.
pub fn wire_object(w: &WireObj) -> Result<CqObject, QuantumError> {
    CqObject::new(w.clone())
}

/// The stock channel for a stock gate name, if any.
fn stock_channel(decl: &GateDecl) -> Option<Superop> {
    use quantum::gates;
    let op = match decl.name.as_str() {
        "zero" => quantum::inj1(),
        "one" => quantum::inj2(),
        "init" => quantum::init_channel(),
        "H" => unitary_channel(&gates::h()).expect("stock unitary"),
        "X" => unitary_channel(&gates::x()).expect("stock unitary"),
        "Z" => unitary_channel(&gates::z()).expect("stock unitary"),
        "S" => unitary_channel(&gates::s()).expect("stock unitary"),
        "Tg" => unitary_channel(&gates::tg()).expect("stock unitary"),
        "CNOT" => unitary_channel(&gates::cnot()).expect("stock unitary"),
        "meas" => quantum::meas_channel(),
        "discard_bit" => quantum::discard_channel(WireType::Bit),
        "discard_qubit" => quantum::discard_channel(WireType::Qubit),
        _ => return None,
    };
    Some(op)
}

/// A complete, validated gate-to-channel table for one signature.
#[derive(Debug, Clone)]
pub struct GateInterp {
    table: BTreeMap<String, Superop>,
}

impl GateInterp {
    /// Builds and validates a table: every signature gate covered, every
    /// channel on the declared boundary and CPTP within `tol`, classical
    /// constants pinned to the injections.
    pub fn new(
        sig: &Signature,
        table: impl IntoIterator<Item = (String, Superop)>,
        tol: f64,
    ) -> Result<Self, InterpError> {
        let table: BTreeMap<String, Superop> = table.into_iter().collect();
        for decl in sig.decls() {
            let op = table
                .get(&decl.name)
                .ok_or_else(|| InterpError::MissingInterp(decl.name.clone()))?;
            let dom = wire_object(&decl.dom)?;
            let cod = wire_object(&decl.cod)?;
            if op.dom() != &dom || op.cod() != &cod {
                return Err(InterpError::BadInterp(
                    decl.name.clone(),
                    format!(
                        "channel is {} -> {}, declaration wants {} -> {}",
                        op.dom(),
                        op.cod(),
                        dom,
                        cod
                    ),
                ));
            }
            let cp = is_cp(op, tol);
            if !cp.pass {
                return Err(InterpError::NotCptp(
                    decl.name.clone(),
                    format!("min Choi eigenvalue {:.3e}", cp.min_choi_eigenvalue),
                ));
            }
            let tp = is_tp(op, tol);
            if !tp.pass {
                return Err(InterpError::NotCptp(
                    decl.name.clone(),
                    format!("trace deviation {:.3e}", tp.max_deviation),
                ));
            }
        }
        for (name, want) in [("zero", quantum::inj1()), ("one", quantum::inj2())] {
            if table[name].sup_distance(&want) > 0.0 {
                return Err(InterpError::BadInterp(
                    name.to_string(),
                    "classical constants must be the standard injections".to_string(),
                ));
            }
        }
        Ok(GateInterp { table })
    }

    /// The stock channels for a signature whose gates all have stock names.
    pub fn default_for(sig: &Signature) -> Result<Self, InterpError> {
        let mut table = BTreeMap::new();
        for decl in sig.decls() {
            let op =
                stock_channel(decl).ok_or_else(|| InterpError::MissingInterp(decl.name.clone()))?;
            table.insert(decl.name.clone(), op);
        }
        GateInterp::new(sig, table, DEFAULT_TOL)
    }

    /// Stock signature with stock channels.
    pub fn stock() -> (Signature, Self) {
        let sig = Signature::default();
        let gi = GateInterp::default_for(&sig).expect("stock channels are valid");
        (sig, gi)
    }

    pub fn get(&self, name: &str) -> Option<&Superop> {
        self.table.get(name)
    }

    fn lookup(&self, name: &str) -> Result<&Superop, InterpError> {
        self.table
            .get(name)
            .ok_or_else(|| InterpError::MissingInterp(name.to_string()))
    }
}

/// Interprets a circuit as a channel by the frontier sweep described in the
/// module docs. The result's boundary is the circuit's boundary.
pub fn interpret_circuit(gi: &GateInterp, c: &Circuit) -> Result<Superop, InterpError> {
    let dom_obj = wire_object(c.dom())?;
    let mut acc = identity_q(&dom_obj);
    let mut frontier: Vec<usize> = (0..c.dom().len()).collect();
    for node in c.nodes() {
        let gate_op = gi.lookup(&node.gate)?.clone();
        let arity = node.ins.len();
        // Permute the node's inputs to the front, in the node's port order;
        // the rest keep their relative order.
        let mut targets = vec![usize::MAX; frontier.len()];
        for (k, w) in node.ins.iter().enumerate() {
            let p = frontier
                .iter()
                .position(|fw| fw == w)
                .expect("circuit validity: node consumes live wires");
            targets[p] = k;
        }
        let mut next = arity;
        for t in targets.iter_mut() {
            if *t == usize::MAX {
                *t = next;
                next += 1;
            }
        }
        let perm = permute_wires(acc.cod(), &targets)?;
        acc = compose_q(&acc, &perm)?;
        let rest_types: Vec<WireType> = perm.cod().wires().types()[arity..].to_vec();
        let rest = CqObject::new(WireObj::new(rest_types))?;
        let layer = tensor_q(&gate_op, &identity_q(&rest))?;
        acc = compose_q(&acc, &layer)?;
        let mut new_frontier = node.outs.clone();
        new_frontier.extend(frontier.iter().filter(|w| !node.ins.contains(w)));
        frontier = new_frontier;
    }
    // Reorder the frontier into the declared output order.
    let targets: Vec<usize> = frontier
        .iter()
        .map(|w| {
            c.out()
                .iter()
                .position(|ow| ow == w)
                .expect("circuit validity: frontier wires are outputs")
        })
        .collect();
    let perm = permute_wires(acc.cod(), &targets)?;
    acc = compose_q(&acc, &perm)?;
    debug_assert_eq!(acc.cod(), &wire_object(c.cod())?);
    Ok(acc)
}

/// A circuit together with its interpretation — one morphism seen from both
/// runtimes. Constructors keep the pair consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalElement {
    circuit: Circuit,
    op: Superop,
}

impl GlobalElement {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn op(&self) -> &Superop {
        &self.op
    }

    /// How far the stored channel drifts from a fresh interpretation of the
    /// stored circuit; exactly zero for elements built by this module.
    pub fn consistency_deviation(&self, gi: &GateInterp) -> Result<f64, InterpError> {
        Ok(interpret_circuit(gi, &self.circuit)?.sup_distance(&self.op))
    }
}

/// The element of a circuit: pairs it with its interpretation.
pub fn element_of(gi: &GateInterp, c: &Circuit) -> Result<GlobalElement, InterpError> {
    let op = interpret_circuit(gi, c)?;
    Ok(GlobalElement {
        circuit: c.clone(),
        op,
    })
}

/// Identity element on an object.
pub fn id_element(obj: &WireObj) -> Result<GlobalElement, InterpError> {
    Ok(GlobalElement {
        circuit: Circuit::identity(obj.clone()),
        op: identity_q(&wire_object(obj)?),
    })
}

/// Sequential composition of elements, kept consistent on both sides by
/// functoriality.
pub fn compose_elements(
    f: &GlobalElement,
    g: &GlobalElement,
) -> Result<GlobalElement, InterpError> {
    Ok(GlobalElement {
        circuit: f.circuit.compose(&g.circuit)?,
        op: compose_q(&f.op, &g.op)?,
    })
}

/// Parallel composition of elements.
pub fn tensor_elements(f: &GlobalElement, g: &GlobalElement) -> Result<GlobalElement, InterpError> {
    Ok(GlobalElement {
        circuit: f.circuit.tensor(&g.circuit),
        op: tensor_q(&f.op, &g.op)?,
    })
}

/// Signature file format: a list of gate declarations, each optionally
/// carrying its channel. Stock-named gates may omit the payload; all others
/// must provide one.
///
/// ```json
/// [
///   {"name": "H", "dom": ["QUBIT"], "cod": ["QUBIT"]},
///   {"name": "sqrtX", "dom": ["QUBIT"], "cod": ["QUBIT"],
///    "interp": {"kind": "unitary", "entries": [[0.5, 0.5], [0.5, -0.5],
///                                              [0.5, -0.5], [0.5, 0.5]]}}
/// ]
/// ```
///
/// `entries` is flat row-major `[re, im]` pairs: a `2^q` unitary for
/// `kind: "unitary"` (square, qubit-only boundary), a full
/// `vecdim(cod) x vecdim(dom)` matrix for `kind: "superop"`.
pub fn load_signature(text: &str) -> Result<(Signature, GateInterp), InterpError> {
    #[derive(Deserialize)]
    struct EntryJson {
        name: String,
        dom: Vec<WireType>,
        cod: Vec<WireType>,
        #[serde(default)]
        interp: Option<PayloadJson>,
    }
    #[derive(Deserialize)]
    struct PayloadJson {
        kind: String,
        entries: Vec<(f64, f64)>,
    }

    let entries: Vec<EntryJson> =
        serde_json::from_str(text).map_err(|e| CircuitError::ParseError(e.to_string()))?;
    let decls: Vec<GateDecl> = entries
        .iter()
        .map(|e| {
            GateDecl::new(
                e.name.clone(),
                WireObj::new(e.dom.clone()),
                WireObj::new(e.cod.clone()),
            )
        })
        .collect();
    let sig = Signature::new(decls)?;
    let mut table = BTreeMap::new();
    for e in &entries {
        let decl = sig.lookup(&e.name)?.clone();
        let op = match &e.interp {
            None => {
                stock_channel(&decl).ok_or_else(|| InterpError::MissingInterp(e.name.clone()))?
            }
            Some(p) if p.kind == "unitary" => {
                if decl.dom != decl.cod || decl.dom.count(WireType::Bit) > 0 {
                    return Err(InterpError::BadInterp(
                        e.name.clone(),
                        "unitary payloads need a qubit-only boundary with dom == cod".to_string(),
                    ));
                }
                let d = 1usize << decl.dom.count(WireType::Qubit);
                let u = matrix_from_flat(d, d, &p.entries).ok_or_else(|| {
                    InterpError::BadInterp(
                        e.name.clone(),
                        format!("unitary wants {}x{d} entries", d),
                    )
                })?;
                unitary_channel(&u)
                    .map_err(|err| InterpError::BadInterp(e.name.clone(), err.to_string()))?
            }
            Some(p) if p.kind == "superop" => {
                let dom = wire_object(&decl.dom)?;
                let cod = wire_object(&decl.cod)?;
                let m =
                    matrix_from_flat(cod.vecdim(), dom.vecdim(), &p.entries).ok_or_else(|| {
                        InterpError::BadInterp(
                            e.name.clone(),
                            format!("superop wants {}x{} entries", cod.vecdim(), dom.vecdim()),
                        )
                    })?;
                Superop::new(dom, cod, m)?
            }
            Some(p) => {
                return Err(InterpError::BadInterp(
                    e.name.clone(),
                    format!("unknown payload kind {:?}", p.kind),
                ));
            }
        };
        table.insert(e.name.clone(), op);
    }
    let gi = GateInterp::new(&sig, table, DEFAULT_TOL)?;
    Ok((sig, gi))
}

fn matrix_from_flat(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Option<CMat> {
    if entries.len() != rows * cols {
        return None;
    }
    Some(CMat::from_fn(rows, cols, |i, j| {
        let (re, im) = entries[i * cols + j];
        num_complex::Complex64::new(re, im)
    }))
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::circuit::random_circuit;
    use crate::quantum::{gates, random::random_cq_state, sup_norm, CqState};

    fn stock() -> (Signature, GateInterp) {
        GateInterp::stock()
    }

    #[test]
    fn classical_constants_are_the_injections() {
        let (_, gi) = stock();
        assert!(gi.get("zero").unwrap().sup_distance(&quantum::inj1()) == 0.0);
        assert!(gi.get("one").unwrap().sup_distance(&quantum::inj2()) == 0.0);
    }

    #[test]
    fn identity_circuits_interpret_to_identity_channels() {
        let (_, gi) = stock();
        let obj = WireObj::new(vec![WireType::Qubit, WireType::Bit]);
        let op = interpret_circuit(&gi, &Circuit::identity(obj.clone())).unwrap();
        assert!(op.sup_distance(&identity_q(&wire_object(&obj).unwrap())) == 0.0);
    }

    #[test]
    fn single_gates_interpret_to_their_channels() {
        let (sig, gi) = stock();
        let c = Circuit::lift_gate(&sig, "H").unwrap();
        let op = interpret_circuit(&gi, &c).unwrap();
        assert!(op.sup_distance(&unitary_channel(&gates::h()).unwrap()) == 0.0);
    }

    #[test]
    fn symmetry_interprets_to_the_wire_permutation() {
        let (_, gi) = stock();
        let a = WireObj::new(vec![WireType::Qubit, WireType::Bit]);
        let b = WireObj::qubit();
        let c = Circuit::symmetry(&a, &b);
        let op = interpret_circuit(&gi, &c).unwrap();
        // a's wires move past b's single wire: 0,1 -> 1,2 and 2 -> 0.
        let want = permute_wires(&wire_object(c.dom()).unwrap(), &[1, 2, 0]).unwrap();
        assert!(op.sup_distance(&want) == 0.0);
    }

    #[test]
    fn interpretation_is_functorial_on_random_pairs() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 20 {
            let f = random_circuit(&sig, &mut rng, 3, 4);
            let g = random_circuit(&sig, &mut rng, 3, 4);
            if f.cod() != g.dom() {
                continue;
            }
            checked += 1;
            let seq = f.compose(&g).unwrap();
            let lhs = interpret_circuit(&gi, &seq).unwrap();
            let rhs = compose_q(
                &interpret_circuit(&gi, &f).unwrap(),
                &interpret_circuit(&gi, &g).unwrap(),
            )
            .unwrap();
            assert!(lhs.sup_distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn interpretation_respects_tensor_on_random_pairs() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let f = random_circuit(&sig, &mut rng, 2, 3);
            let g = random_circuit(&sig, &mut rng, 2, 3);
            let lhs = interpret_circuit(&gi, &f.tensor(&g)).unwrap();
            let rhs = tensor_q(
                &interpret_circuit(&gi, &f).unwrap(),
                &interpret_circuit(&gi, &g).unwrap(),
            )
            .unwrap();
            assert!(lhs.sup_distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn bell_pair_circuit_produces_the_bell_state() {
        let (sig, gi) = stock();
        let zero = Circuit::lift_gate(&sig, "zero").unwrap();
        let init = Circuit::lift_gate(&sig, "init").unwrap();
        let h = Circuit::lift_gate(&sig, "H").unwrap();
        let cnot = Circuit::lift_gate(&sig, "CNOT").unwrap();
        let idq = Circuit::identity(WireObj::qubit());
        let fresh = zero.compose(&init).unwrap();
        let circuit = fresh
            .tensor(&fresh)
            .compose(&h.tensor(&idq))
            .unwrap()
            .compose(&cnot)
            .unwrap();
        let op = interpret_circuit(&gi, &circuit).unwrap();
        let out = op.apply(&CqState::scalar_one()).unwrap();
        // (|00> + |11>)/sqrt(2) as a density matrix: quarters at the
        // corners.
        let mut bell = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = num_complex::Complex64::new(0.5, 0.0);
        }
        assert!(sup_norm(&(out.block(0).unwrap() - bell)) < 1e-12);
    }

    #[test]
    fn elements_stay_consistent_under_composition() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 10 {
            let f = random_circuit(&sig, &mut rng, 3, 4);
            let g = random_circuit(&sig, &mut rng, 3, 4);
            if f.cod() != g.dom() {
                continue;
            }
            checked += 1;
            let fg = compose_elements(&element_of(&gi, &f).unwrap(), &element_of(&gi, &g).unwrap())
                .unwrap();
            assert!(fg.consistency_deviation(&gi).unwrap() < 1e-12);
        }
    }

    #[test]
    fn interpreted_circuits_act_on_states() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..10 {
            let c = random_circuit(&sig, &mut rng, 3, 5);
            let op = interpret_circuit(&gi, &c).unwrap();
            let s = random_cq_state(&mut rng, op.dom());
            let out = op.apply(&s).unwrap();
            out.validate(1e-9).unwrap();
            assert!(out.is_normalized(1e-9), "CPTP channels preserve trace");
        }
    }

    #[test]
    fn signature_files_load_stock_and_custom_gates() {
        let text = r#"[
            {"name": "zero", "dom": [], "cod": ["BIT"]},
            {"name": "one", "dom": [], "cod": ["BIT"]},
            {"name": "H", "dom": ["QUBIT"], "cod": ["QUBIT"]},
            {"name": "sqrtX", "dom": ["QUBIT"], "cod": ["QUBIT"],
             "interp": {"kind": "unitary",
                        "entries": [[0.5, 0.5], [0.5, -0.5],
                                    [0.5, -0.5], [0.5, 0.5]]}},
            {"name": "dephase", "dom": ["QUBIT"], "cod": ["QUBIT"],
             "interp": {"kind": "superop",
                        "entries": [[1,0],[0,0],[0,0],[0,0],
                                    [0,0],[0,0],[0,0],[0,0],
                                    [0,0],[0,0],[0,0],[0,0],
                                    [0,0],[0,0],[0,0],[1,0]]}}
        ]"#;
        let (sig, gi) = load_signature(text).unwrap();
        assert!(sig.get("sqrtX").is_some());
        // sqrtX twice is X.
        let s = Circuit::lift_gate(&sig, "sqrtX").unwrap();
        let twice = s.compose(&s).unwrap();
        let op = interpret_circuit(&gi, &twice).unwrap();
        assert!(op.sup_distance(&unitary_channel(&gates::x()).unwrap()) < 1e-12);
        // The dephasing channel kills off-diagonals.
        let op = gi.get("dephase").unwrap();
        assert!(is_cp(op, 1e-9).pass);
        assert!(is_tp(op, 1e-9).pass);
    }

    #[test]
    fn signature_files_reject_bad_payloads() {
        // Unknown gate with no payload.
        let missing = r#"[
            {"name": "zero", "dom": [], "cod": ["BIT"]},
            {"name": "one", "dom": [], "cod": ["BIT"]},
            {"name": "mystery", "dom": ["QUBIT"], "cod": ["QUBIT"]}
        ]"#;
        assert!(matches!(
            load_signature(missing),
            Err(InterpError::MissingInterp(_))
        ));
        // Non-CPTP superop payload (doubles the trace).
        let bad = r#"[
            {"name": "zero", "dom": [], "cod": ["BIT"]},
            {"name": "one", "dom": [], "cod": ["BIT"]},
            {"name": "dbl", "dom": [], "cod": [],
             "interp": {"kind": "superop", "entries": [[2, 0]]}}
        ]"#;
        assert!(matches!(
            load_signature(bad),
            Err(InterpError::NotCptp(_, _))
        ));
        // Unitary payload that is not unitary.
        let skew = r#"[
            {"name": "zero", "dom": [], "cod": ["BIT"]},
            {"name": "one", "dom": [], "cod": ["BIT"]},
            {"name": "skew", "dom": ["QUBIT"], "cod": ["QUBIT"],
             "interp": {"kind": "unitary",
                        "entries": [[1,0],[1,0],[0,0],[1,0]]}}
        ]"#;
        assert!(matches!(
            load_signature(skew),
            Err(InterpError::BadInterp(_, _))
        ));
    }
}
