//! JSON wire format for circuits.
//!
//! ```json
//! {
//!   "dom": ["QUBIT"],
//!   "cod": ["BIT"],
//!   "nodes": [{"gate": "meas", "in": [0], "out": [1]}],
//!   "out": [1]
//! }
//! ```
//!
//! Input ports implicitly carry wire ids `0..dom.len()`; node outputs may
//! use any fresh ids, and nodes must be listed in a runnable order (inputs
//! already produced). Parsing renumbers everything into the internal
//! convention, so round-tripping a hand-written file may rewrite its ids
//! while leaving the circuit equal. Serialization always emits the internal
//! ids and is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Node, Signature, WireId, WireType};

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    dom: Vec<WireType>,
    cod: Vec<WireType>,
    nodes: Vec<NodeJson>,
    out: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    gate: String,
    #[serde(rename = "in")]
    ins: Vec<u64>,
    #[serde(rename = "out")]
    outs: Vec<u64>,
}

impl Circuit {
    /// The circuit as a JSON value in the wire format above.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = CircuitJson {
            dom: self.dom.types().to_vec(),
            cod: self.cod.types().to_vec(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    gate: n.gate.clone(),
                    ins: n.ins.iter().map(|&w| w as u64).collect(),
                    outs: n.outs.iter().map(|&w| w as u64).collect(),
                })
                .collect(),
            out: self.out.iter().map(|&w| w as u64).collect(),
        };
        serde_json::to_value(doc).expect("circuit serialization is infallible")
    }

    /// Pretty-printed form of [`Circuit::to_json`].
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("valid JSON value")
    }

    /// Parses and validates the wire format, renumbering ids into the
    /// internal convention. The signature supplies gate arities and types.
    pub fn from_json(sig: &Signature, v: &serde_json::Value) -> Result<Self, CircuitError> {
        let doc: CircuitJson = serde_json::from_value(v.clone())
            .map_err(|e| CircuitError::ParseError(e.to_string()))?;
        let dom = super::WireObj::new(doc.dom);
        let cod = super::WireObj::new(doc.cod);

        // File id -> (internal id, type, consumed flag).
        struct Slot {
            id: WireId,
            ty: WireType,
            consumed: bool,
        }
        let mut slots: BTreeMap<u64, Slot> = BTreeMap::new();
        for (i, &ty) in dom.types().iter().enumerate() {
            slots.insert(
                i as u64,
                Slot {
                    id: i,
                    ty,
                    consumed: false,
                },
            );
        }
        let mut next: WireId = dom.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(doc.nodes.len());
        for n in &doc.nodes {
            let decl = sig.lookup(&n.gate)?;
            if n.ins.len() != decl.dom.len() || n.outs.len() != decl.cod.len() {
                return Err(CircuitError::IllTypedWiring(format!(
                    "gate {} declared {}->{}, node lists {}->{} wires",
                    n.gate,
                    decl.dom.len(),
                    decl.cod.len(),
                    n.ins.len(),
                    n.outs.len()
                )));
            }
            let mut ins = Vec::with_capacity(n.ins.len());
            for (k, w) in n.ins.iter().enumerate() {
                let slot = slots.get_mut(w).ok_or_else(|| {
                    CircuitError::ParseError(format!(
                        "gate {} reads wire {w} before it is produced",
                        n.gate
                    ))
                })?;
                if slot.consumed {
                    return Err(CircuitError::IllTypedWiring(format!(
                        "wire {w} consumed twice"
                    )));
                }
                if slot.ty != decl.dom.types()[k] {
                    return Err(CircuitError::IllTypedWiring(format!(
                        "gate {} port {k} wants {}, wire {w} carries {}",
                        n.gate,
                        decl.dom.types()[k],
                        slot.ty
                    )));
                }
                slot.consumed = true;
                ins.push(slot.id);
            }
            let mut outs = Vec::with_capacity(n.outs.len());
            for (k, w) in n.outs.iter().enumerate() {
                if slots.contains_key(w) {
                    return Err(CircuitError::ParseError(format!("wire {w} produced twice")));
                }
                slots.insert(
                    *w,
                    Slot {
                        id: next,
                        ty: decl.cod.types()[k],
                        consumed: false,
                    },
                );
                outs.push(next);
                next += 1;
            }
            nodes.push(Node {
                gate: n.gate.clone(),
                ins,
                outs,
            });
        }
        let mut out = Vec::with_capacity(doc.out.len());
        if doc.out.len() != cod.len() {
            return Err(CircuitError::IllTypedWiring(format!(
                "output list has {} ports, codomain {}",
                doc.out.len(),
                cod.len()
            )));
        }
        for (p, w) in doc.out.iter().enumerate() {
            let slot = slots.get_mut(w).ok_or_else(|| {
                CircuitError::ParseError(format!("output port {p} reads unknown wire {w}"))
            })?;
            if slot.consumed {
                return Err(CircuitError::IllTypedWiring(format!(
                    "wire {w} consumed twice"
                )));
            }
            if slot.ty != cod.types()[p] {
                return Err(CircuitError::IllTypedWiring(format!(
                    "output port {p} wants {}, wire {w} carries {}",
                    cod.types()[p],
                    slot.ty
                )));
            }
            slot.consumed = true;
            out.push(slot.id);
        }
        if let Some((w, _)) = slots.iter().find(|(_, s)| !s.consumed) {
            return Err(CircuitError::IllTypedWiring(format!(
                "wire {w} is never consumed"
            )));
        }
        let c = Circuit {
            dom,
            cod,
            nodes,
            out,
        };
        debug_assert!(c.validate(sig).is_ok(), "normalized circuit re-validates");
        Ok(c)
    }

    /// [`Circuit::from_json`] on raw text.
    pub fn from_json_str(sig: &Signature, text: &str) -> Result<Self, CircuitError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CircuitError::ParseError(e.to_string()))?;
        Circuit::from_json(sig, &v)
    }
}
