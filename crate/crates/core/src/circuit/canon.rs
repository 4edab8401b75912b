//! Canonical normal form for circuits.
//!
//! Two circuits denote the same morphism exactly when they differ only by
//! reordering independent nodes (the interchange of disjoint gates) and by
//! wire renumbering. [`Circuit::canonical_form`] quotients both out:
//!
//! 1. each node is assigned its *layer*, the longest chain of nodes from the
//!    input ports to it — interchange never moves a node across layers;
//! 2. within a layer, nodes are ordered by the smallest renumbered wire they
//!    consume. Same-layer nodes consume disjoint wire sets, so this is a
//!    strict order for every node that has inputs;
//! 3. nodes with *no* inputs (classical constants such as `zero`) are
//!    ordered by a downstream fingerprint — gate name plus, per output
//!    port, the consumer's fingerprint and input-port index, bottoming out
//!    at codomain positions. Two inputless nodes in a layer with equal
//!    fingerprints have disjoint, isomorphic downstream cones (a shared
//!    consumer node would show up as differing port indices), so either
//!    ordering renumbers to the identical circuit and the residual tie is
//!    harmless;
//! 4. wires are renumbered in the resulting order.
//!
//! The output is a well-formed [`Circuit`] with the same boundary, and it is
//! equal (plain `==`) for any two presentations of the same morphism.
//! Fingerprints unfold the dag toward the outputs, so deeply reconvergent
//! graphs could in principle pay an exponential cost; at the circuit depths
//! used here it is negligible.

use std::collections::BTreeMap;

use super::{Circuit, Node, WireId};

/// Downstream fingerprint of a node: presentation-invariant because it only
/// mentions gate names, port indices, and codomain positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Finger {
    gate: String,
    ports: Vec<PortTarget>,
}

/// Where one output wire goes: into another node's numbered input port, or
/// to a codomain position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum PortTarget {
    Cod(usize),
    Node(Box<Finger>, usize),
}

#[derive(Clone, Copy)]
enum Consumer {
    Node(usize, usize),
    Cod(usize),
}

impl Circuit {
    /// Renumbers the circuit into its unique normal form; see the module
    /// docs. Presentations that differ only by interchange and renumbering
    /// map to equal values.
    pub fn canonical_form(&self) -> Circuit {
        let dom_len = self.dom.len();
        let total = self.total_wires();

        let mut consumer: Vec<Option<Consumer>> = vec![None; total];
        for (i, n) in self.nodes.iter().enumerate() {
            for (q, &w) in n.ins.iter().enumerate() {
                consumer[w] = Some(Consumer::Node(i, q));
            }
        }
        for (p, &w) in self.out.iter().enumerate() {
            consumer[w] = Some(Consumer::Cod(p));
        }

        // Consumers appear later in the schedule, so a reverse sweep has
        // every consumer's fingerprint ready when its producer needs it.
        let mut fingers: Vec<Option<Finger>> = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate().rev() {
            let ports = n
                .outs
                .iter()
                .map(|&w| match consumer[w].expect("every wire is consumed") {
                    Consumer::Cod(p) => PortTarget::Cod(p),
                    Consumer::Node(m, q) => PortTarget::Node(
                        Box::new(fingers[m].clone().expect("consumer fingerprint computed")),
                        q,
                    ),
                })
                .collect();
            fingers[i] = Some(Finger {
                gate: n.gate.clone(),
                ports,
            });
        }

        let layers = self.node_layers();
        let mut by_layer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in layers.iter().enumerate() {
            by_layer.entry(l).or_default().push(i);
        }

        let mut new_id: Vec<Option<WireId>> = vec![None; total];
        for (w, slot) in new_id.iter_mut().enumerate().take(dom_len) {
            *slot = Some(w);
        }
        let mut next = dom_len;
        let mut order: Vec<usize> = Vec::with_capacity(self.nodes.len());
        for (_, mut group) in by_layer {
            group.sort_by(|&a, &b| {
                let min_in = |i: usize| {
                    self.nodes[i]
                        .ins
                        .iter()
                        .map(|&w| new_id[w].expect("input wire renumbered in an earlier layer"))
                        .min()
                        .unwrap_or(usize::MAX)
                };
                (min_in(a), fingers[a].as_ref()).cmp(&(min_in(b), fingers[b].as_ref()))
            });
            for &i in &group {
                for &w in &self.nodes[i].outs {
                    new_id[w] = Some(next);
                    next += 1;
                }
                order.push(i);
            }
        }

        let renum = |w: WireId| new_id[w].expect("every wire renumbered");
        let nodes = order
            .iter()
            .map(|&i| {
                let n = &self.nodes[i];
                Node {
                    gate: n.gate.clone(),
                    ins: n.ins.iter().map(|&w| renum(w)).collect(),
                    outs: n.outs.iter().map(|&w| renum(w)).collect(),
                }
            })
            .collect();
        Circuit {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            nodes,
            out: self.out.iter().map(|&w| renum(w)).collect(),
        }
    }
}
