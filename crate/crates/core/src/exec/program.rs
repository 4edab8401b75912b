//! A small circuit-generation language with dynamic lifting.
//!
//! Programs build circuits statement by statement; measurement is just a
//! gate, but [`Stmt::DynLift`] takes a bit *wire* and turns its run-time
//! value into a boolean *parameter*, splitting the computation into one
//! branch per outcome. Later statements may inspect parameters
//! ([`Stmt::If`], [`Stmt::NewFromParam`]) — measurement outcomes steering
//! the generation of the rest of the circuit.
//!
//! [`Stmt::Box`] evaluates a sub-program in a fresh, circuit-only context
//! and binds the result as a first-class boxed circuit; boxed bodies may
//! measure (a gate like any other) but must not dynamically lift, since a
//! box denotes one fixed circuit while lifting makes the continuation
//! depend on an outcome. The ban is enforced statically.
//!
//! Execution ([`run`]) is exact: every reachable outcome history becomes a
//! [`Branch`] carrying its probability, generated circuit, and conditioned
//! state. Nothing is sampled; [`Computation::sample`] exists for
//! demonstration only.
//!
//! Program texts are JSON: `{"body": [{"op": "new", ...}, ...]}` with one
//! object per statement, tagged by `"op"`.

use std::collections::{BTreeMap, BTreeSet};
use std::slice::from_ref;

use serde::{Deserialize, Serialize};

use super::{box_element, BoxedCircuit, Branch, Computation, ExecError};
use crate::circuit::{Circuit, Signature, WireObj, WireType};
use crate::interp::{element_of, GateInterp};
use crate::quantum::{identity_q, permute_wires, tensor_q, CqObject, CqState, Superop};

/// One input wire of a boxed sub-program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxInput {
    pub wire: String,
    #[serde(rename = "type")]
    pub wire_type: WireType,
}

/// A program statement. Wire names are linear: each binding is consumed
/// exactly once. Parameter names are ordinary immutable bindings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Stmt {
    /// Binds a fresh wire holding a constant: a bit via the classical
    /// constants, or a qubit prepared through an `init: BIT -> QUBIT`
    /// gate (the stock signature has one).
    New {
        wire: String,
        #[serde(rename = "type")]
        wire_type: WireType,
        #[serde(default)]
        value: bool,
    },
    /// Binds a fresh bit wire holding a boolean parameter's value — the
    /// bridge from parameters back to states.
    NewFromParam { wire: String, param: String },
    /// Applies a signature gate. `outs` names the produced wires; it may
    /// be omitted when the gate has as many outputs as inputs, in which
    /// case the input names are reused.
    Gate {
        name: String,
        #[serde(default)]
        ins: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outs: Option<Vec<String>>,
    },
    /// Sugar for the `meas` gate: consumes a qubit, binds the outcome
    /// bit (same name unless `out` is given).
    Measure {
        wire: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        out: Option<String>,
    },
    /// Consumes a bit wire and binds its value as a boolean parameter,
    /// splitting the computation per outcome.
    #[serde(rename = "dynlift")]
    DynLift { wire: String, param: String },
    /// Runs one arm or the other according to a parameter. Both arms must
    /// leave the same bindings in scope.
    If {
        param: String,
        then: Vec<Stmt>,
        #[serde(rename = "else", default)]
        else_: Vec<Stmt>,
    },
    /// Evaluates `body` as a circuit from the declared `inputs` and binds
    /// it to `name`. The body must end with a `return` and must not
    /// dynamically lift.
    Box {
        name: String,
        inputs: Vec<BoxInput>,
        body: Vec<Stmt>,
    },
    /// Splices a boxed circuit into the one under construction.
    ApplyBoxed {
        name: String,
        ins: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outs: Option<Vec<String>>,
    },
    /// Ends a body, fixing its output wires in order. Must consume every
    /// live wire, and must be the final statement.
    Return { wires: Vec<String> },
}

/// A program: a statement body ending in `return`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn from_json_str(text: &str) -> Result<Program, ExecError> {
        serde_json::from_str(text).map_err(|e| ExecError::ParseError(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("programs serialize")
    }

    /// Static checks: names well-scoped, wires used linearly, both arms of
    /// every conditional leaving identical bindings, every body ending in
    /// `return`, and no dynamic lifting inside boxed bodies.
    pub fn check(&self, sig: &Signature) -> Result<(), ExecError> {
        let mut scope = Scope {
            wires: BTreeMap::new(),
            params: BTreeSet::new(),
            boxes: BTreeMap::new(),
            in_box: false,
        };
        check_block(&self.body, sig, &mut scope, BlockKind::Body)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Static checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
struct Scope {
    wires: BTreeMap<String, WireType>,
    params: BTreeSet<String>,
    boxes: BTreeMap<String, (Vec<WireType>, Vec<WireType>)>,
    in_box: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum BlockKind {
    /// A program or box body: must end with `return`.
    Body,
    /// A conditional arm: `return` is not allowed.
    IfArm,
}

fn resolve_outs(
    what: &str,
    cod_len: usize,
    ins: &[String],
    outs: &Option<Vec<String>>,
) -> Result<Vec<String>, ExecError> {
    match outs {
        Some(v) if v.len() == cod_len => Ok(v.clone()),
        Some(v) => Err(ExecError::ScopeError(format!(
            "{what} produces {cod_len} wires but {} output names were given",
            v.len()
        ))),
        None if ins.len() == cod_len => Ok(ins.to_vec()),
        None => Err(ExecError::ScopeError(format!(
            "{what} takes {} wires and produces {cod_len}; name the outputs explicitly",
            ins.len()
        ))),
    }
}

/// Checks that `ins` are live with the given types and pairwise distinct,
/// then rebinds `outs`; mirrors the runtime's environment update.
fn check_application(
    scope: &mut Scope,
    what: &str,
    dom: &[WireType],
    cod: &[WireType],
    ins: &[String],
    outs: &[String],
) -> Result<(), ExecError> {
    if ins.len() != dom.len() {
        return Err(ExecError::ScopeError(format!(
            "{what} takes {} wires, got {}",
            dom.len(),
            ins.len()
        )));
    }
    let mut taken = BTreeSet::new();
    for (k, name) in ins.iter().enumerate() {
        if !taken.insert(name) {
            return Err(ExecError::LinearityError(format!(
                "{what} consumes wire {name} twice"
            )));
        }
        match scope.wires.get(name) {
            None => return Err(ExecError::UnknownWire(name.clone())),
            Some(t) if *t != dom[k] => {
                return Err(ExecError::ScopeError(format!(
                    "{what} wants {} on port {k}, wire {name} carries {t}",
                    dom[k]
                )));
            }
            Some(_) => {}
        }
    }
    for name in ins {
        scope.wires.remove(name);
    }
    for (k, name) in outs.iter().enumerate() {
        if scope.wires.insert(name.clone(), cod[k]).is_some() {
            return Err(ExecError::ScopeError(format!(
                "{what} rebinds wire {name} while it is still live"
            )));
        }
    }
    Ok(())
}

fn check_new_wire(scope: &mut Scope, wire: &str, t: WireType) -> Result<(), ExecError> {
    if scope.wires.insert(wire.to_string(), t).is_some() {
        return Err(ExecError::ScopeError(format!(
            "wire {wire} is already live"
        )));
    }
    Ok(())
}

fn check_block(
    stmts: &[Stmt],
    sig: &Signature,
    scope: &mut Scope,
    kind: BlockKind,
) -> Result<Option<Vec<WireType>>, ExecError> {
    for (i, stmt) in stmts.iter().enumerate() {
        let last = i + 1 == stmts.len();
        match stmt {
            Stmt::New {
                wire, wire_type, ..
            } => {
                if *wire_type == WireType::Qubit {
                    let d = sig.lookup("init")?;
                    if d.dom.types() != [WireType::Bit] || d.cod.types() != [WireType::Qubit] {
                        return Err(ExecError::ScopeError(
                            "creating a qubit needs an init: BIT -> QUBIT gate".to_string(),
                        ));
                    }
                }
                check_new_wire(scope, wire, *wire_type)?;
            }
            Stmt::NewFromParam { wire, param } => {
                if !scope.params.contains(param) {
                    return Err(ExecError::ScopeError(format!("unknown parameter {param}")));
                }
                check_new_wire(scope, wire, WireType::Bit)?;
            }
            Stmt::Gate { name, ins, outs } => {
                let decl = sig.lookup(name)?.clone();
                let outs = resolve_outs(name, decl.cod.len(), ins, outs)?;
                check_application(scope, name, decl.dom.types(), decl.cod.types(), ins, &outs)?;
            }
            Stmt::Measure { wire, out } => {
                let decl = sig.lookup("meas")?;
                if decl.dom.types() != [WireType::Qubit] || decl.cod.types() != [WireType::Bit] {
                    return Err(ExecError::ScopeError(
                        "measure needs a meas: QUBIT -> BIT gate".to_string(),
                    ));
                }
                let ins = vec![wire.clone()];
                let outs = vec![out.clone().unwrap_or_else(|| wire.clone())];
                check_application(
                    scope,
                    "measure",
                    &[WireType::Qubit],
                    &[WireType::Bit],
                    &ins,
                    &outs,
                )?;
            }
            Stmt::DynLift { wire, param } => {
                if scope.in_box {
                    return Err(ExecError::DynLiftInsideBox(format!(
                        "lifting wire {wire} into parameter {param}"
                    )));
                }
                match scope.wires.get(wire) {
                    None => return Err(ExecError::UnknownWire(wire.clone())),
                    Some(WireType::Bit) => {}
                    Some(t) => {
                        return Err(ExecError::NotABit(format!("wire {wire} carries {t}")));
                    }
                }
                if !scope.params.insert(param.clone()) {
                    return Err(ExecError::ScopeError(format!(
                        "parameter {param} is already bound"
                    )));
                }
                scope.wires.remove(wire);
            }
            Stmt::If { param, then, else_ } => {
                if !scope.params.contains(param) {
                    return Err(ExecError::ScopeError(format!("unknown parameter {param}")));
                }
                let mut s_then = scope.clone();
                check_block(then, sig, &mut s_then, BlockKind::IfArm)?;
                let mut s_else = scope.clone();
                check_block(else_, sig, &mut s_else, BlockKind::IfArm)?;
                if s_then != s_else {
                    return Err(ExecError::ScopeError(format!(
                        "the arms of the conditional on {param} leave different bindings"
                    )));
                }
                *scope = s_then;
            }
            Stmt::Box { name, inputs, body } => {
                let mut names = BTreeSet::new();
                for inp in inputs {
                    if !names.insert(&inp.wire) {
                        return Err(ExecError::ScopeError(format!(
                            "box {name} declares input {} twice",
                            inp.wire
                        )));
                    }
                }
                let mut inner = Scope {
                    wires: inputs
                        .iter()
                        .map(|i| (i.wire.clone(), i.wire_type))
                        .collect(),
                    params: scope.params.clone(),
                    boxes: scope.boxes.clone(),
                    in_box: true,
                };
                let ret = check_block(body, sig, &mut inner, BlockKind::Body)?
                    .expect("body blocks return their output types");
                let dom: Vec<WireType> = inputs.iter().map(|i| i.wire_type).collect();
                if scope.boxes.insert(name.clone(), (dom, ret)).is_some() {
                    return Err(ExecError::ScopeError(format!(
                        "boxed circuit {name} is already bound"
                    )));
                }
            }
            Stmt::ApplyBoxed { name, ins, outs } => {
                let (dom, cod) = scope
                    .boxes
                    .get(name)
                    .ok_or_else(|| ExecError::ScopeError(format!("unknown boxed circuit {name}")))?
                    .clone();
                let outs = resolve_outs(name, cod.len(), ins, outs)?;
                check_application(scope, name, &dom, &cod, ins, &outs)?;
            }
            Stmt::Return { wires } => {
                if kind == BlockKind::IfArm {
                    return Err(ExecError::ScopeError(
                        "return inside a conditional arm".to_string(),
                    ));
                }
                if !last {
                    return Err(ExecError::ScopeError(
                        "return must be the final statement".to_string(),
                    ));
                }
                let mut types = Vec::new();
                let mut taken = BTreeSet::new();
                for w in wires {
                    if !taken.insert(w) {
                        return Err(ExecError::LinearityError(format!(
                            "return consumes wire {w} twice"
                        )));
                    }
                    match scope.wires.remove(w) {
                        Some(t) => types.push(t),
                        None => return Err(ExecError::UnknownWire(w.clone())),
                    }
                }
                if !scope.wires.is_empty() {
                    let left: Vec<&str> = scope.wires.keys().map(String::as_str).collect();
                    return Err(ExecError::LinearityError(format!(
                        "wires left unconsumed at return: {}",
                        left.join(", ")
                    )));
                }
                return Ok(Some(types));
            }
        }
    }
    match kind {
        BlockKind::Body => Err(ExecError::ScopeError(
            "body must end with return".to_string(),
        )),
        BlockKind::IfArm => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Consumes `ins` from the circuit's outputs and splices in `sub`
/// (permuting the inputs to the front, in argument order), returning the
/// extended circuit and the updated name-to-slot map with `outs` bound at
/// the front.
fn extend_circuit(
    circuit: &Circuit,
    env: &BTreeMap<String, usize>,
    sub: &Circuit,
    ins: &[String],
    outs: &[String],
) -> Result<(Circuit, BTreeMap<String, usize>), ExecError> {
    let slots = resolve_slots(env, ins)?;
    let n = circuit.cod().len();
    let arity = slots.len();
    let mut targets = vec![usize::MAX; n];
    for (k, &s) in slots.iter().enumerate() {
        targets[s] = k;
    }
    let mut next = arity;
    for t in targets.iter_mut() {
        if *t == usize::MAX {
            *t = next;
            next += 1;
        }
    }
    let perm = Circuit::permutation(circuit.cod(), &targets)?;
    let rest = WireObj::new(perm.cod().types()[arity..].to_vec());
    let step = sub.tensor(&Circuit::identity(rest));
    let extended = circuit.compose(&perm)?.compose(&step)?;

    let arg_names: BTreeSet<&String> = ins.iter().collect();
    let mut survivors: Vec<(&String, usize)> = env
        .iter()
        .filter(|(name, _)| !arg_names.contains(name))
        .map(|(name, &s)| (name, s))
        .collect();
    survivors.sort_by_key(|&(_, s)| s);
    let mut new_env = BTreeMap::new();
    for (k, name) in outs.iter().enumerate() {
        if new_env.insert(name.clone(), k).is_some() {
            return Err(ExecError::ScopeError(format!(
                "output wire {name} bound twice"
            )));
        }
    }
    for (rank, (name, _)) in survivors.into_iter().enumerate() {
        if new_env.insert(name.clone(), outs.len() + rank).is_some() {
            return Err(ExecError::ScopeError(format!(
                "wire {name} rebound while still live"
            )));
        }
    }
    Ok((extended, new_env))
}

fn resolve_slots(env: &BTreeMap<String, usize>, ins: &[String]) -> Result<Vec<usize>, ExecError> {
    let mut seen = BTreeSet::new();
    ins.iter()
        .map(|name| {
            if !seen.insert(name) {
                return Err(ExecError::LinearityError(format!(
                    "wire {name} consumed twice"
                )));
            }
            env.get(name)
                .copied()
                .ok_or_else(|| ExecError::UnknownWire(name.clone()))
        })
        .collect()
}

/// Applies a channel to the named live wires of a state: inputs permuted
/// to the front, `op (x) identity` applied, outputs left at the front.
fn apply_op_to_state(state: &CqState, slots: &[usize], op: &Superop) -> Result<CqState, ExecError> {
    let n = state.obj().wires().len();
    let arity = slots.len();
    let mut targets = vec![usize::MAX; n];
    for (k, &s) in slots.iter().enumerate() {
        targets[s] = k;
    }
    let mut next = arity;
    for t in targets.iter_mut() {
        if *t == usize::MAX {
            *t = next;
            next += 1;
        }
    }
    let perm = permute_wires(state.obj(), &targets)?;
    let moved = perm.apply(state)?;
    let rest = WireObj::new(moved.obj().wires().types()[arity..].to_vec());
    let layer = tensor_q(op, &identity_q(&CqObject::new(rest)?))?;
    Ok(layer.apply(&moved)?)
}

/// A branch plus the run-time bindings the public [`Branch`] does not
/// carry: parameter values and boxed circuits.
#[derive(Debug, Clone)]
struct RunBranch {
    b: Branch,
    param_env: BTreeMap<String, bool>,
    boxed: BTreeMap<String, BoxedCircuit>,
}

impl RunBranch {
    fn apply(
        &mut self,
        sub: &Circuit,
        op: &Superop,
        ins: &[String],
        outs: &[String],
    ) -> Result<(), ExecError> {
        let slots = resolve_slots(&self.b.env, ins)?;
        let (trace, env) = extend_circuit(&self.b.trace, &self.b.env, sub, ins, outs)?;
        let state = apply_op_to_state(&self.b.state, &slots, op)?;
        self.b.trace = trace;
        self.b.env = env;
        self.b.state = state;
        Ok(())
    }

    fn apply_gate(
        &mut self,
        gi: &GateInterp,
        sig: &Signature,
        name: &str,
        ins: &[String],
        outs: &[String],
    ) -> Result<(), ExecError> {
        let sub = Circuit::lift_gate(sig, name)?;
        let op = gi
            .get(name)
            .ok_or_else(|| crate::interp::InterpError::MissingInterp(name.to_string()))?
            .clone();
        self.apply(&sub, &op, ins, outs)
    }
}

const CONST_GATE: [&str; 2] = ["zero", "one"];

fn run_block(
    gi: &GateInterp,
    sig: &Signature,
    stmts: &[Stmt],
    mut branches: Vec<RunBranch>,
) -> Result<Vec<RunBranch>, ExecError> {
    for stmt in stmts {
        match stmt {
            Stmt::New {
                wire,
                wire_type,
                value,
            } => {
                for rb in &mut branches {
                    rb.apply_gate(gi, sig, CONST_GATE[*value as usize], &[], from_ref(wire))?;
                    if *wire_type == WireType::Qubit {
                        rb.apply_gate(gi, sig, "init", from_ref(wire), from_ref(wire))?;
                    }
                }
            }
            Stmt::NewFromParam { wire, param } => {
                for rb in &mut branches {
                    let value = *rb.param_env.get(param).ok_or_else(|| {
                        ExecError::ScopeError(format!("unknown parameter {param}"))
                    })?;
                    rb.apply_gate(gi, sig, CONST_GATE[value as usize], &[], from_ref(wire))?;
                }
            }
            Stmt::Gate { name, ins, outs } => {
                let decl = sig.lookup(name)?.clone();
                let outs = resolve_outs(name, decl.cod.len(), ins, outs)?;
                for rb in &mut branches {
                    rb.apply_gate(gi, sig, name, ins, &outs)?;
                }
            }
            Stmt::Measure { wire, out } => {
                let ins = vec![wire.clone()];
                let outs = vec![out.clone().unwrap_or_else(|| wire.clone())];
                for rb in &mut branches {
                    rb.apply_gate(gi, sig, "meas", &ins, &outs)?;
                }
            }
            Stmt::DynLift { wire, param } => {
                let mut next = Vec::new();
                for rb in branches {
                    for child in rb.b.lift(wire)? {
                        let mut param_env = rb.param_env.clone();
                        param_env.insert(
                            param.clone(),
                            *child.params.last().expect("lift appends an outcome"),
                        );
                        next.push(RunBranch {
                            b: child,
                            param_env,
                            boxed: rb.boxed.clone(),
                        });
                    }
                }
                branches = next;
            }
            Stmt::If { param, then, else_ } => {
                let mut next = Vec::new();
                for rb in branches {
                    let value = *rb.param_env.get(param).ok_or_else(|| {
                        ExecError::ScopeError(format!("unknown parameter {param}"))
                    })?;
                    let arm = if value { then } else { else_ };
                    next.extend(run_block(gi, sig, arm, vec![rb])?);
                }
                branches = next;
            }
            Stmt::Box { name, inputs, body } => {
                for rb in &mut branches {
                    let circuit = eval_box_body(gi, sig, inputs, body, &rb.param_env, &rb.boxed)?;
                    let boxed = box_element(gi, &element_of(gi, &circuit)?)?;
                    rb.boxed.insert(name.clone(), boxed);
                }
            }
            Stmt::ApplyBoxed { name, ins, outs } => {
                for rb in &mut branches {
                    let boxed = rb
                        .boxed
                        .get(name)
                        .ok_or_else(|| {
                            ExecError::ScopeError(format!("unknown boxed circuit {name}"))
                        })?
                        .clone();
                    let e = boxed.element();
                    let outs = resolve_outs(name, e.circuit().cod().len(), ins, outs)?;
                    rb.apply(e.circuit(), e.op(), ins, &outs)?;
                }
            }
            Stmt::Return { .. } => {
                return Err(ExecError::ScopeError(
                    "return must be the final statement".to_string(),
                ));
            }
        }
    }
    Ok(branches)
}

/// A circuit under construction inside a boxed body: no state, no
/// branching — enclosing parameters and boxed circuits are readable.
struct BoxCtx<'a> {
    circuit: Circuit,
    env: BTreeMap<String, usize>,
    params: &'a BTreeMap<String, bool>,
    boxes: BTreeMap<String, BoxedCircuit>,
}

impl BoxCtx<'_> {
    fn gate(
        &mut self,
        sig: &Signature,
        name: &str,
        ins: &[String],
        outs: &[String],
    ) -> Result<(), ExecError> {
        let sub = Circuit::lift_gate(sig, name)?;
        let (c, e) = extend_circuit(&self.circuit, &self.env, &sub, ins, outs)?;
        self.circuit = c;
        self.env = e;
        Ok(())
    }

    fn walk(
        &mut self,
        gi: &GateInterp,
        sig: &Signature,
        stmts: &[Stmt],
    ) -> Result<Option<Circuit>, ExecError> {
        for stmt in stmts {
            match stmt {
                Stmt::New {
                    wire,
                    wire_type,
                    value,
                } => {
                    self.gate(sig, CONST_GATE[*value as usize], &[], from_ref(wire))?;
                    if *wire_type == WireType::Qubit {
                        self.gate(sig, "init", from_ref(wire), from_ref(wire))?;
                    }
                }
                Stmt::NewFromParam { wire, param } => {
                    let value = *self.params.get(param).ok_or_else(|| {
                        ExecError::ScopeError(format!("unknown parameter {param}"))
                    })?;
                    self.gate(sig, CONST_GATE[value as usize], &[], from_ref(wire))?;
                }
                Stmt::Gate { name, ins, outs } => {
                    let decl = sig.lookup(name)?.clone();
                    let outs = resolve_outs(name, decl.cod.len(), ins, outs)?;
                    self.gate(sig, name, ins, &outs)?;
                }
                Stmt::Measure { wire, out } => {
                    let ins = vec![wire.clone()];
                    let outs = vec![out.clone().unwrap_or_else(|| wire.clone())];
                    self.gate(sig, "meas", &ins, &outs)?;
                }
                Stmt::DynLift { wire, param } => {
                    return Err(ExecError::DynLiftInsideBox(format!(
                        "lifting wire {wire} into parameter {param}"
                    )));
                }
                Stmt::If { param, then, else_ } => {
                    let value = *self.params.get(param).ok_or_else(|| {
                        ExecError::ScopeError(format!("unknown parameter {param}"))
                    })?;
                    let arm = if value { then } else { else_ };
                    let done = self.walk(gi, sig, arm)?;
                    debug_assert!(done.is_none(), "no return inside conditional arms");
                }
                Stmt::Box { name, inputs, body } => {
                    let sub = eval_box_body(gi, sig, inputs, body, self.params, &self.boxes)?;
                    let boxed = box_element(gi, &element_of(gi, &sub)?)?;
                    self.boxes.insert(name.clone(), boxed);
                }
                Stmt::ApplyBoxed { name, ins, outs } => {
                    let boxed = self
                        .boxes
                        .get(name)
                        .ok_or_else(|| {
                            ExecError::ScopeError(format!("unknown boxed circuit {name}"))
                        })?
                        .clone();
                    let sub = boxed.element().circuit();
                    let outs = resolve_outs(name, sub.cod().len(), ins, outs)?;
                    let (c, e) = extend_circuit(&self.circuit, &self.env, sub, ins, &outs)?;
                    self.circuit = c;
                    self.env = e;
                }
                Stmt::Return { wires } => {
                    let slots = resolve_slots(&self.env, wires)?;
                    if slots.len() != self.env.len() {
                        return Err(ExecError::LinearityError(
                            "return must consume every live wire".to_string(),
                        ));
                    }
                    let mut targets = vec![usize::MAX; self.env.len()];
                    for (i, &s) in slots.iter().enumerate() {
                        targets[s] = i;
                    }
                    let perm = Circuit::permutation(self.circuit.cod(), &targets)?;
                    return Ok(Some(self.circuit.compose(&perm)?));
                }
            }
        }
        Ok(None)
    }
}

/// Evaluates a box body as a pure circuit from the declared inputs.
fn eval_box_body(
    gi: &GateInterp,
    sig: &Signature,
    inputs: &[BoxInput],
    body: &[Stmt],
    params: &BTreeMap<String, bool>,
    boxes: &BTreeMap<String, BoxedCircuit>,
) -> Result<Circuit, ExecError> {
    let dom = WireObj::new(inputs.iter().map(|i| i.wire_type).collect::<Vec<_>>());
    let mut ctx = BoxCtx {
        circuit: Circuit::identity(dom),
        env: inputs
            .iter()
            .enumerate()
            .map(|(k, i)| (i.wire.clone(), k))
            .collect(),
        params,
        boxes: boxes.clone(),
    };
    match ctx.walk(gi, sig, body)? {
        Some(finished) => Ok(finished),
        None => Err(ExecError::ScopeError(
            "body must end with return".to_string(),
        )),
    }
}

/// Runs a program exactly: the result enumerates every reachable outcome
/// history with its probability, generated circuit, and conditioned state.
/// Branches are ordered lexicographically by history.
pub fn run(gi: &GateInterp, sig: &Signature, p: &Program) -> Result<Computation, ExecError> {
    p.check(sig)?;
    let Some(Stmt::Return { wires }) = p.body.last() else {
        return Err(ExecError::ScopeError(
            "body must end with return".to_string(),
        ));
    };
    let init = RunBranch {
        b: Branch {
            prob: 1.0,
            params: Vec::new(),
            trace: Circuit::identity(WireObj::unit()),
            state: CqState::scalar_one(),
            env: BTreeMap::new(),
        },
        param_env: BTreeMap::new(),
        boxed: BTreeMap::new(),
    };
    let mut branches = run_block(gi, sig, &p.body[..p.body.len() - 1], vec![init])?;
    for rb in &mut branches {
        // Reorder the live wires into the declared output order; lifted
        // bits stay behind them.
        let slots = resolve_slots(&rb.b.env, wires)?;
        if slots.len() != rb.b.env.len() {
            return Err(ExecError::LinearityError(
                "return must consume every live wire".to_string(),
            ));
        }
        let n = rb.b.trace.cod().len();
        let live = rb.b.env.len();
        let mut targets: Vec<usize> = (0..n).collect();
        for (i, &s) in slots.iter().enumerate() {
            targets[s] = i;
        }
        let perm = Circuit::permutation(rb.b.trace.cod(), &targets)?;
        rb.b.trace = rb.b.trace.compose(&perm)?;
        let state_targets = &targets[..live];
        let sperm = permute_wires(rb.b.state.obj(), state_targets)?;
        rb.b.state = sperm.apply(&rb.b.state)?;
        rb.b.env = wires
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
    }
    let mut out: Vec<Branch> = branches.into_iter().map(|rb| rb.b).collect();
    out.sort_by(|a, b| a.params.cmp(&b.params));
    let comp = Computation { branches: out };
    comp.validate(crate::quantum::DEFAULT_TOL)?;
    Ok(comp)
}
