//! The execution layer: branching computations over classical outcomes.
//!
//! A map *into a branching computation* is, concretely, just a channel —
//! that collapse is the load-bearing fact of the whole design, so this
//! module stores [`KleisliMap`]s directly as [`Superop`]s and delegates
//! their composition, tensor, and convex combination to the channel
//! algebra. Three embeddings relate the runtimes:
//!
//! * [`embed_psi`] sends a circuit to its [`GlobalElement`] (circuit plus
//!   channel, kept in lock-step);
//! * [`embed_phi`] wraps a raw channel as a Kleisli map;
//! * [`eta_E`] forgets an element's circuit half. The square
//!   `eta_E(embed_psi(c)) = embed_phi(J(c))` commutes exactly, and the law
//!   harness checks it on random circuits.
//!
//! [`box_element`]/[`unbox`] reify an element as a first-class value (the
//! circuit canonicalized so boxing is injective on normal forms) and open
//! it back up.
//!
//! The dynamic part lives in [`Computation`]: a finite convex combination
//! of [`Branch`]es, each carrying the probability of its history of lifted
//! measurement outcomes, the circuit generated so far on that branch, and
//! the normalized state of the still-live wires. [`dyn_lift`] consumes a
//! bit wire, splitting every branch on its value: measurement outcomes
//! become parameters that later circuit generation can inspect. The
//! submodule [`program`](crate::exec::program) runs a small language whose
//! programs do exactly that.

pub mod program;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Signature, WireObj, WireType};
use crate::interp::{
    element_of, interpret_circuit, wire_object, GateInterp, GlobalElement, InterpError,
};
use crate::quantum::{
    compose_q, convex_sum, decompose_bit_at, sup_norm, tensor_q, ConvexWeights, CqState,
    QuantumError, Superop,
};

pub use program::{run, Program, Stmt};

/// Probability below which a measurement branch is dropped: outcomes that
/// cannot occur have no continuation to define.
pub const PRUNE_TOL: f64 = 1e-12;

/// Errors from Kleisli plumbing, branching computations, and programs.
#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    /// A name used out of scope, rebound while live, or missing.
    #[error("scope error: {0}")]
    ScopeError(String),
    /// A wire consumed twice, or left unconsumed where it must not be.
    #[error("linearity error: {0}")]
    LinearityError(String),
    /// Dynamic lifting inside a boxed body: the box must denote one fixed
    /// circuit, but lifting makes the continuation depend on a run-time
    /// outcome.
    #[error("dynamic lifting inside a boxed body: {0}")]
    DynLiftInsideBox(String),
    /// A branch has no live wire with this name.
    #[error("unknown wire: {0}")]
    UnknownWire(String),
    /// Lifting a wire that does not carry a bit.
    #[error("not a bit wire: {0}")]
    NotABit(String),
    /// Malformed program text.
    #[error("program parse error: {0}")]
    ParseError(String),
}

// ---------------------------------------------------------------------------
// Kleisli maps
// ---------------------------------------------------------------------------

/// A map into a branching computation, stored as the channel it collapses
/// to. The wire-typed boundary is kept alongside for interface checking.
#[derive(Debug, Clone, PartialEq)]
pub struct KleisliMap {
    dom: WireObj,
    cod: WireObj,
    op: Superop,
}

impl KleisliMap {
    pub fn dom(&self) -> &WireObj {
        &self.dom
    }

    pub fn cod(&self) -> &WireObj {
        &self.cod
    }

    pub fn op(&self) -> &Superop {
        &self.op
    }

    pub fn sup_distance(&self, other: &KleisliMap) -> f64 {
        self.op.sup_distance(&other.op)
    }
}

/// Embeds a circuit as an element: the circuit together with its channel.
pub fn embed_psi(gi: &GateInterp, c: &Circuit) -> Result<GlobalElement, ExecError> {
    Ok(element_of(gi, c)?)
}

/// Embeds a channel as a Kleisli map, unchanged: on channels, "return the
/// branching computation" is the trivial one-branch computation, so the
/// embedding is the identity on the matrix.
pub fn embed_phi(f: Superop) -> KleisliMap {
    let dom = f.dom().wires().clone();
    let cod = f.cod().wires().clone();
    KleisliMap { dom, cod, op: f }
}

/// Forgets an element's circuit half, returning its channel as a Kleisli
/// map. Equal to [`embed_phi`] after interpretation, exactly — the square
/// relating the two embeddings commutes by construction.
#[allow(non_snake_case)] // the capital E names the embedding it is the unit of
pub fn eta_E(e: &GlobalElement) -> KleisliMap {
    embed_phi(e.op().clone())
}

/// The identity Kleisli map on an object.
pub fn kleisli_id(obj: &WireObj) -> Result<KleisliMap, ExecError> {
    Ok(embed_phi(crate::quantum::identity_q(&wire_object(obj)?)))
}

/// Kleisli composition; delegates to channel composition.
pub fn kleisli_compose(k1: &KleisliMap, k2: &KleisliMap) -> Result<KleisliMap, ExecError> {
    Ok(embed_phi(compose_q(&k1.op, &k2.op)?))
}

/// Kleisli tensor; delegates to the channel tensor.
pub fn kleisli_tensor(k1: &KleisliMap, k2: &KleisliMap) -> Result<KleisliMap, ExecError> {
    Ok(embed_phi(tensor_q(&k1.op, &k2.op)?))
}

/// Convex combination of Kleisli maps with common boundary.
pub fn kleisli_convex(ws: &ConvexWeights, ks: &[KleisliMap]) -> Result<KleisliMap, ExecError> {
    let ops: Vec<Superop> = ks.iter().map(|k| k.op.clone()).collect();
    Ok(embed_phi(convex_sum(ws, &ops)?))
}

// ---------------------------------------------------------------------------
// Boxing
// ---------------------------------------------------------------------------

/// A circuit reified as a first-class value: an element whose circuit is in
/// canonical form, so boxed values compare by what they denote rather than
/// how they were presented.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxedCircuit {
    element: GlobalElement,
}

impl BoxedCircuit {
    pub fn element(&self) -> &GlobalElement {
        &self.element
    }
}

/// Boxes an element, canonicalizing its circuit. The channel half is kept
/// bit-for-bit, so [`unbox`] returns an element equal to the input up to
/// canonical form of the circuit.
pub fn box_element(gi: &GateInterp, e: &GlobalElement) -> Result<BoxedCircuit, ExecError> {
    let canon = e.circuit().canonical_form();
    Ok(BoxedCircuit {
        element: element_of(gi, &canon)?,
    })
}

/// Opens a boxed circuit back into an element.
pub fn unbox(b: &BoxedCircuit) -> GlobalElement {
    b.element.clone()
}

/// Turns a boolean parameter into a one-node circuit producing that bit:
/// `false` is the left classical constant, `true` the right one.
pub fn init_map(gi: &GateInterp, sig: &Signature, b: bool) -> Result<GlobalElement, ExecError> {
    let gate = if b { "one" } else { "zero" };
    Ok(element_of(gi, &Circuit::lift_gate(sig, gate)?)?)
}

// ---------------------------------------------------------------------------
// Branching computations
// ---------------------------------------------------------------------------

/// One branch of a computation: the probability of reaching it, the lifted
/// measurement outcomes that select it, the circuit generated so far, the
/// normalized state of the live wires, and the name-to-slot map for them.
///
/// Layout convention: the trace's outputs are the live wires first (slot
/// order, matching `state`), then the already-lifted bits in lift order.
/// The lifted bits stay outputs of the trace — the generated circuit really
/// did produce them — but the state no longer carries them: their values
/// have become the `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub prob: f64,
    pub params: Vec<bool>,
    pub trace: Circuit,
    pub state: CqState,
    pub env: BTreeMap<String, usize>,
}

impl Branch {
    /// A fresh single branch over an element applied to nothing: the trace
    /// is the element's circuit (which must start from the empty object),
    /// the state its channel applied to the trivial state, with live wires
    /// named by `names` in output order.
    pub fn from_element(e: &GlobalElement, names: &[&str]) -> Result<Branch, ExecError> {
        if !e.circuit().dom().is_empty() {
            return Err(ExecError::ScopeError(
                "branches trace closed circuits (empty domain)".to_string(),
            ));
        }
        if names.len() != e.circuit().cod().len() {
            return Err(ExecError::ScopeError(format!(
                "{} names for {} output wires",
                names.len(),
                e.circuit().cod().len()
            )));
        }
        let state = e.op().apply(&CqState::scalar_one())?;
        let env = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), i))
            .collect();
        let b = Branch {
            prob: 1.0,
            params: Vec::new(),
            trace: e.circuit().clone(),
            state,
            env,
        };
        b.validate(crate::quantum::DEFAULT_TOL)?;
        Ok(b)
    }

    /// Checks the layout invariants: probability in (0, 1], live wires a
    /// prefix of the trace outputs matching the state's object, lifted
    /// bits a suffix matching `params`, slots a bijection.
    pub fn validate(&self, tol: f64) -> Result<(), ExecError> {
        if !(self.prob > 0.0 && self.prob <= 1.0 + tol) {
            return Err(ExecError::ScopeError(format!(
                "branch probability {} outside (0, 1]",
                self.prob
            )));
        }
        let cod = self.trace.cod().types();
        let live = self.env.len();
        if live + self.params.len() != cod.len() {
            return Err(ExecError::ScopeError(format!(
                "{} live + {} lifted wires, but the trace has {} outputs",
                live,
                self.params.len(),
                cod.len()
            )));
        }
        if self.state.obj().wires().types() != &cod[..live] {
            return Err(ExecError::ScopeError(
                "state object differs from the live prefix of the trace".to_string(),
            ));
        }
        if cod[live..].iter().any(|t| *t != WireType::Bit) {
            return Err(ExecError::NotABit(
                "lifted suffix must be all bits".to_string(),
            ));
        }
        let mut seen = vec![false; live];
        for (name, &s) in &self.env {
            if s >= live || seen[s] {
                return Err(ExecError::ScopeError(format!(
                    "wire {name} maps to slot {s}, which is out of range or reused"
                )));
            }
            seen[s] = true;
        }
        self.state.validate(tol)?;
        Ok(())
    }

    /// The live wire names in slot order.
    pub fn live_names(&self) -> Vec<&str> {
        let mut v: Vec<(&str, usize)> = self.env.iter().map(|(n, &s)| (n.as_str(), s)).collect();
        v.sort_by_key(|&(_, s)| s);
        v.into_iter().map(|(n, _)| n).collect()
    }

    /// Splits this branch on the named bit wire: for each outcome that can
    /// occur, a child with the outcome appended to `params`, the
    /// probability multiplied in, the wire moved out of the live set, and
    /// the state conditioned on the outcome.
    pub fn lift(&self, wire: &str) -> Result<Vec<Branch>, ExecError> {
        let slot = *self
            .env
            .get(wire)
            .ok_or_else(|| ExecError::UnknownWire(wire.to_string()))?;
        match self.state.obj().wires().types().get(slot) {
            Some(WireType::Bit) => {}
            _ => return Err(ExecError::NotABit(wire.to_string())),
        }
        let dec = decompose_bit_at(&self.state, slot, PRUNE_TOL)?;
        // Move the lifted wire from the live prefix to the end of the
        // trace's outputs, keeping everything else in order.
        let n = self.trace.cod().len();
        let targets: Vec<usize> = (0..n)
            .map(|p| {
                if p == slot {
                    n - 1
                } else if p > slot {
                    p - 1
                } else {
                    p
                }
            })
            .collect();
        let trace = self
            .trace
            .compose(&Circuit::permutation(self.trace.cod(), &targets)?)?;
        let mut env = self.env.clone();
        env.remove(wire);
        for s in env.values_mut() {
            if *s > slot {
                *s -= 1;
            }
        }
        let mut children = Vec::new();
        for (value, idx) in [(false, 0), (true, 1)] {
            let Some(state) = dec.branch[idx].clone() else {
                continue;
            };
            let mut params = self.params.clone();
            params.push(value);
            children.push(Branch {
                prob: self.prob * dec.p[idx],
                params,
                trace: trace.clone(),
                state,
                env: env.clone(),
            });
        }
        Ok(children)
    }
}

/// A finite convex combination of branches — the result of running a
/// program with dynamic lifting, exactly (no sampling).
#[derive(Debug, Clone, PartialEq)]
pub struct Computation {
    branches: Vec<Branch>,
}

impl Computation {
    /// A single-branch computation.
    pub fn single(b: Branch) -> Computation {
        Computation { branches: vec![b] }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Total probability deviation from 1.
    pub fn prob_deviation(&self) -> f64 {
        (self.branches.iter().map(|b| b.prob).sum::<f64>() - 1.0).abs()
    }

    /// Checks the aggregate invariants: probabilities sum to 1 within
    /// `tol`, every branch is well-formed, and the params histories are
    /// the leaves of a branching tree (none a prefix of another).
    pub fn validate(&self, tol: f64) -> Result<(), ExecError> {
        if self.prob_deviation() > tol {
            return Err(ExecError::ScopeError(format!(
                "branch probabilities sum to 1{:+e}",
                self.prob_deviation()
            )));
        }
        for b in &self.branches {
            b.validate(tol)?;
        }
        for (i, a) in self.branches.iter().enumerate() {
            for b in self.branches.iter().skip(i + 1) {
                let k = a.params.len().min(b.params.len());
                if a.params[..k] == b.params[..k] {
                    return Err(ExecError::ScopeError(format!(
                        "branch histories {:?} and {:?} overlap",
                        a.params, b.params
                    )));
                }
            }
        }
        Ok(())
    }

    /// The probability-weighted sum of the branch states. All branches
    /// must hold states on a common object.
    pub fn aggregate_state(&self) -> Result<CqState, ExecError> {
        let first = self
            .branches
            .first()
            .ok_or_else(|| ExecError::ScopeError("no branches".to_string()))?;
        let obj = first.state.obj().clone();
        let mut acc = first.state.to_vec() * num_complex::Complex64::from(first.prob);
        for b in &self.branches[1..] {
            if b.state.obj() != &obj {
                return Err(ExecError::Quantum(QuantumError::ObjectMismatch(format!(
                    "branch states on {} vs {}",
                    b.state.obj(),
                    obj
                ))));
            }
            acc += b.state.to_vec() * num_complex::Complex64::from(b.prob);
        }
        Ok(CqState::from_vec(obj, &acc)?)
    }

    /// Draws `shots` param histories from the branch distribution — a
    /// demonstration convenience; the semantics itself is exact.
    pub fn sample(&self, rng: &mut impl rand::Rng, shots: usize) -> BTreeMap<Vec<bool>, usize> {
        let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for _ in 0..shots {
            let mut r: f64 = rng.random_range(0.0..1.0);
            let mut chosen = self.branches.last().expect("non-empty computation");
            for b in &self.branches {
                if r < b.prob {
                    chosen = b;
                    break;
                }
                r -= b.prob;
            }
            *counts.entry(chosen.params.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Serializes as `{"branches": [{prob, params, circuit, state}]}` in
    /// deterministic (history-lexicographic) order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "branches": self
                .branches
                .iter()
                .map(|b| {
                    serde_json::json!({
                        "prob": b.prob,
                        "params": b.params,
                        "circuit": b.trace.to_json(),
                        "state": b.state.to_json(),
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// Splits every branch of a computation on its bit wire named `wire`,
/// turning that wire's run-time value into a parameter. Children keep the
/// parent's order, `false` before `true`, so histories stay lexicographic.
pub fn dyn_lift(comp: &Computation, wire: &str) -> Result<Computation, ExecError> {
    let mut branches = Vec::new();
    for b in &comp.branches {
        branches.extend(b.lift(wire)?);
    }
    Ok(Computation { branches })
}

/// How far a branch's two runtimes have drifted apart: interpret the trace
/// circuit, feed it the trivial initial state, condition on the recorded
/// outcome history, and compare against the branch's own probability and
/// state. Zero-deviation means the generation-time and execution-time
/// views agree.
pub fn branch_consistency_deviation(gi: &GateInterp, b: &Branch) -> Result<f64, ExecError> {
    let op = interpret_circuit(gi, &b.trace)?;
    let mut s = op.apply(&CqState::scalar_one())?;
    let live = b.env.len();
    let mut p_acc = 1.0;
    for &want in &b.params {
        // The earliest-lifted bit sits immediately after the live prefix;
        // conditioning removes it and shifts the rest down.
        let dec = decompose_bit_at(&s, live, PRUNE_TOL)?;
        let idx = want as usize;
        match &dec.branch[idx] {
            Some(next) => {
                p_acc *= dec.p[idx];
                s = next.clone();
            }
            None => return Ok(b.prob),
        }
    }
    let state_dev = sup_norm(&(s.to_vec() - b.state.to_vec()));
    Ok(state_dev.max((p_acc - b.prob).abs()))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::circuit::random_circuit;
    use crate::interp::id_element;
    use crate::quantum::{meas_channel, random::random_cptp, CMat, CqObject, DEFAULT_TOL};

    fn stock() -> (Signature, GateInterp) {
        GateInterp::stock()
    }

    #[test]
    fn embedding_square_commutes_exactly() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let c = random_circuit(&sig, &mut rng, 3, 5);
            let via_psi = eta_E(&embed_psi(&gi, &c).unwrap());
            let via_phi = embed_phi(interpret_circuit(&gi, &c).unwrap());
            assert!(via_psi.sup_distance(&via_phi) == 0.0);
        }
    }

    #[test]
    fn circuit_embedding_is_injective_on_canonical_forms() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let circuits: Vec<Circuit> = (0..12)
            .map(|_| random_circuit(&sig, &mut rng, 3, 4))
            .collect();
        for i in 0..circuits.len() {
            for j in i + 1..circuits.len() {
                if !crate::circuit::canonically_equal(&circuits[i], &circuits[j]) {
                    let a = embed_psi(&gi, &circuits[i]).unwrap();
                    let b = embed_psi(&gi, &circuits[j]).unwrap();
                    assert!(
                        !crate::circuit::canonically_equal(a.circuit(), b.circuit()),
                        "distinct circuits must give distinct elements"
                    );
                }
            }
        }
    }

    #[test]
    fn kleisli_unit_laws_hold() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let c = random_circuit(&sig, &mut rng, 3, 4);
            let k = eta_E(&embed_psi(&gi, &c).unwrap());
            let pre = kleisli_compose(&kleisli_id(k.dom()).unwrap(), &k).unwrap();
            let post = kleisli_compose(&k, &kleisli_id(k.cod()).unwrap()).unwrap();
            assert!(pre.sup_distance(&k) < 1e-14);
            assert!(post.sup_distance(&k) < 1e-14);
        }
    }

    #[test]
    fn kleisli_composition_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let f = embed_phi(random_cptp(&mut rng, 1, 2));
            let g = embed_phi(random_cptp(&mut rng, 2, 1));
            let h = embed_phi(random_cptp(&mut rng, 1, 1));
            let lhs = kleisli_compose(&kleisli_compose(&f, &g).unwrap(), &h).unwrap();
            let rhs = kleisli_compose(&f, &kleisli_compose(&g, &h).unwrap()).unwrap();
            assert!(lhs.sup_distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn channel_embedding_is_linear_over_convex_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..10 {
            let f = random_cptp(&mut rng, 1, 1);
            let g = random_cptp(&mut rng, 1, 1);
            let ws = ConvexWeights::new([0.3, 0.7], DEFAULT_TOL).unwrap();
            let direct = embed_phi(convex_sum(&ws, &[f.clone(), g.clone()]).unwrap());
            let pieces = kleisli_convex(&ws, &[embed_phi(f), embed_phi(g)]).unwrap();
            assert!(direct.sup_distance(&pieces) == 0.0);
        }
    }

    #[test]
    fn joint_measurement_is_the_tensor_of_measurements() {
        // Oracle: the two-qubit measurement channel written out directly in
        // the block layout — classical outcome (c1 c2) reads off the
        // diagonal of the two-qubit density matrix.
        let meas2 = {
            let dom = CqObject::new(WireObj::new(vec![WireType::Qubit, WireType::Qubit])).unwrap();
            let cod = CqObject::new(WireObj::new(vec![WireType::Bit, WireType::Bit])).unwrap();
            let mut m = CMat::zeros(cod.vecdim(), dom.vecdim());
            for c in 0..4 {
                let row = cod.index(c, 0, 0);
                let col = dom.index(0, c, c);
                m[(row, col)] = num_complex::Complex64::new(1.0, 0.0);
            }
            Superop::new(dom, cod, m).unwrap()
        };
        let k = kleisli_tensor(&embed_phi(meas_channel()), &embed_phi(meas_channel())).unwrap();
        assert!(k.op().sup_distance(&meas2) == 0.0);
    }

    #[test]
    fn box_unbox_round_trips() {
        let (sig, gi) = stock();
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let id = id_element(&WireObj::qubit()).unwrap();
        let back = unbox(&box_element(&gi, &id).unwrap());
        assert!(crate::circuit::canonically_equal(
            back.circuit(),
            id.circuit()
        ));
        assert!(back.op().sup_distance(id.op()) == 0.0);
        for _ in 0..20 {
            let c = random_circuit(&sig, &mut rng, 3, 5);
            let e = embed_psi(&gi, &c).unwrap();
            let back = unbox(&box_element(&gi, &e).unwrap());
            assert!(crate::circuit::canonically_equal(
                back.circuit(),
                e.circuit()
            ));
            assert!(back.op().sup_distance(e.op()) < 1e-10);
        }
    }

    #[test]
    fn boxing_identifies_presentations_of_the_same_diagram() {
        let (sig, gi) = stock();
        // H on one wire and X on another, listed in either order.
        let h = Circuit::lift_gate(&sig, "H").unwrap();
        let x = Circuit::lift_gate(&sig, "X").unwrap();
        let idq = Circuit::identity(WireObj::qubit());
        let a = h.tensor(&idq).compose(&idq.tensor(&x)).unwrap();
        let b = idq.tensor(&x).compose(&h.tensor(&idq)).unwrap();
        assert_ne!(a, b, "the presentations differ as listings");
        let ba = box_element(&gi, &embed_psi(&gi, &a).unwrap()).unwrap();
        let bb = box_element(&gi, &embed_psi(&gi, &b).unwrap()).unwrap();
        assert_eq!(ba.element().circuit(), bb.element().circuit());
    }

    #[test]
    fn init_map_produces_the_injections() {
        let (sig, gi) = stock();
        let zero = init_map(&gi, &sig, false).unwrap();
        let one = init_map(&gi, &sig, true).unwrap();
        assert!(zero.op().sup_distance(&crate::quantum::inj1()) == 0.0);
        assert!(one.op().sup_distance(&crate::quantum::inj2()) == 0.0);
        assert_eq!(zero.circuit().nodes().len(), 1);
        assert_eq!(one.circuit().nodes().len(), 1);
    }

    #[test]
    fn lifting_a_constant_bit_is_the_unit() {
        let (sig, gi) = stock();
        for b in [false, true] {
            let e = init_map(&gi, &sig, b).unwrap();
            let comp = Computation::single(Branch::from_element(&e, &["c"]).unwrap());
            let lifted = dyn_lift(&comp, "c").unwrap();
            assert_eq!(lifted.branches().len(), 1);
            let only = &lifted.branches()[0];
            assert_eq!(only.prob, 1.0, "the surviving outcome is certain");
            assert_eq!(only.params, vec![b]);
            assert!(only.env.is_empty());
            assert!(only.state.obj().wires().is_empty());
            assert!(branch_consistency_deviation(&gi, only).unwrap() == 0.0);
        }
    }

    #[test]
    fn lifting_a_fair_coin_splits_evenly() {
        let (sig, gi) = stock();
        let circuit = Circuit::lift_gate(&sig, "zero")
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "init").unwrap())
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "H").unwrap())
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "meas").unwrap())
            .unwrap();
        let e = embed_psi(&gi, &circuit).unwrap();
        let comp = Computation::single(Branch::from_element(&e, &["m"]).unwrap());
        let lifted = dyn_lift(&comp, "m").unwrap();
        assert_eq!(lifted.branches().len(), 2);
        for (b, want) in lifted.branches().iter().zip([false, true]) {
            assert!((b.prob - 0.5).abs() < 1e-12);
            assert_eq!(b.params, vec![want]);
            assert!(branch_consistency_deviation(&gi, b).unwrap() < 1e-12);
        }
        lifted.validate(DEFAULT_TOL).unwrap();
    }

    #[test]
    fn branches_reject_open_circuits_and_bad_wires() {
        let (sig, gi) = stock();
        let open = id_element(&WireObj::qubit()).unwrap();
        assert!(matches!(
            Branch::from_element(&open, &["q"]),
            Err(ExecError::ScopeError(_))
        ));
        let e = embed_psi(
            &gi,
            &Circuit::lift_gate(&sig, "zero")
                .unwrap()
                .compose(&Circuit::lift_gate(&sig, "init").unwrap())
                .unwrap(),
        )
        .unwrap();
        let comp = Computation::single(Branch::from_element(&e, &["q"]).unwrap());
        assert!(matches!(
            dyn_lift(&comp, "nope"),
            Err(ExecError::UnknownWire(_))
        ));
        assert!(matches!(dyn_lift(&comp, "q"), Err(ExecError::NotABit(_))));
    }

    #[test]
    fn computations_validate_history_consistency() {
        let (sig, gi) = stock();
        let e = init_map(&gi, &sig, false).unwrap();
        let b = Branch::from_element(&e, &["c"]).unwrap();
        let mut lifted = dyn_lift(&Computation::single(b), "c").unwrap();
        // Corrupt: duplicate the single branch so histories overlap.
        let dup = lifted.branches()[0].clone();
        lifted.branches.push(dup);
        assert!(lifted.validate(DEFAULT_TOL).is_err());
    }

    #[test]
    fn aggregate_state_recombines_the_coin() {
        let (sig, gi) = stock();
        let circuit = Circuit::lift_gate(&sig, "zero")
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "init").unwrap())
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "H").unwrap())
            .unwrap()
            .compose(&Circuit::lift_gate(&sig, "meas").unwrap())
            .unwrap();
        let e = embed_psi(&gi, &circuit).unwrap();
        let before = e.op().apply(&CqState::scalar_one()).unwrap();
        let branch = Branch::from_element(&e, &["m"]).unwrap();
        let lifted = dyn_lift(&Computation::single(branch), "m").unwrap();
        // Re-initializing each branch's parameter as a bit and averaging
        // recovers the pre-lift state.
        let mut acc = CMat::zeros(2, 1).column(0).into_owned();
        for b in lifted.branches() {
            let bit = init_map(&gi, &sig, b.params[0]).unwrap();
            let s = bit.op().apply(&CqState::scalar_one()).unwrap();
            acc += s.to_vec() * num_complex::Complex64::from(b.prob);
        }
        assert!(sup_norm(&(acc - before.to_vec())) < 1e-12);
    }
}
