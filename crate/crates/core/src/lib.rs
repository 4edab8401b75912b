//! Two-runtime semantics for quantum circuit programs.
//!
//! This crate models a circuit language with *dynamic lifting* — programs
//! that measure qubits mid-run and branch on the outcome — by keeping two
//! runtimes side by side and checking that they agree:
//!
//! * a **syntactic runtime**: circuits as port-ordered wiring diagrams over a
//!   gate signature, composed sequentially and in parallel ([`circuit`]);
//! * a **semantic runtime**: classical/quantum (cq) states and the
//!   completely positive trace-preserving maps that act on them, in
//!   vectorized matrix form ([`quantum`]).
//!
//! The two are connected by a structure-preserving interpretation
//! ([`interp`]), and the branching behaviour of measurement is organized by a
//! small amount of category-style algebra:
//!
//! * [`biset`] — two-stage sets `(X0, X1, f: X1 -> X0)` with a monad that
//!   collapses the second stage into the first; this is the shape of
//!   "a static stage mapping into a dynamic stage", and all of its laws are
//!   checked by exhaustive enumeration at small sizes;
//! * [`exec`] — boxed circuits, Kleisli-style maps whose codomain is
//!   "branching over classical outcomes", and an exact (probability-tree)
//!   interpreter for programs with dynamic lifting;
//! * [`laws`] — a harness that checks every algebraic law the model relies
//!   on (monad and strength laws, convex-combination axioms, functoriality,
//!   box/unbox round-trips, measurement triangles) on enumerated or randomly
//!   sampled instances, reporting worst-case deviations against explicit
//!   tolerances.
//!
//! Everything is finite-dimensional and deterministic: random instances are
//! drawn from a seeded generator, and serialized outputs are stable across
//! runs given the same inputs, seed, and tolerances.

pub mod biset;
pub mod circuit;
pub mod exec;
pub mod interp;
pub mod laws;
pub mod quantum;

pub use biset::{Biset, BisetError, BisetMap, Label};
pub use circuit::{Circuit, CircuitError, GateDecl, Signature, WireId, WireObj, WireType};
pub use exec::{BoxedCircuit, Branch, Computation, ExecError, KleisliMap, Program, Stmt};
pub use interp::{GateInterp, GlobalElement, InterpError};
pub use laws::{LawConfig, LawError, LawReport, Mutation};
pub use quantum::{CqObject, CqState, QuantumError, Superop};
