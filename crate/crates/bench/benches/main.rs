//! Benchmarks for the hot paths: circuit normalization, channel
//! interpretation, channel algebra, and full program execution with
//! branching.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twotime_core::circuit::random_circuit;
use twotime_core::exec::{run, Program};
use twotime_core::interp::{interpret_circuit, GateInterp};
use twotime_core::quantum::random::random_cptp;
use twotime_core::quantum::{compose_q, tensor_q};

const TELEPORT: &str = r#"{"body": [
    {"op": "new", "wire": "r", "type": "QUBIT"},
    {"op": "new", "wire": "p", "type": "QUBIT"},
    {"op": "gate", "name": "H", "ins": ["r"]},
    {"op": "gate", "name": "CNOT", "ins": ["r", "p"]},
    {"op": "new", "wire": "a", "type": "QUBIT"},
    {"op": "new", "wire": "b", "type": "QUBIT"},
    {"op": "gate", "name": "H", "ins": ["a"]},
    {"op": "gate", "name": "CNOT", "ins": ["a", "b"]},
    {"op": "gate", "name": "CNOT", "ins": ["p", "a"]},
    {"op": "gate", "name": "H", "ins": ["p"]},
    {"op": "measure", "wire": "p", "out": "m1"},
    {"op": "measure", "wire": "a", "out": "m2"},
    {"op": "dynlift", "wire": "m1", "param": "x"},
    {"op": "dynlift", "wire": "m2", "param": "y"},
    {"op": "if", "param": "y",
     "then": [{"op": "gate", "name": "X", "ins": ["b"]}], "else": []},
    {"op": "if", "param": "x",
     "then": [{"op": "gate", "name": "Z", "ins": ["b"]}], "else": []},
    {"op": "return", "wires": ["r", "b"]}
]}"#;

fn bench_canonical_form(c: &mut Criterion) {
    let (sig, _) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let circuit = random_circuit(&sig, &mut rng, 6, 24);
    c.bench_function("canonical_form/6-wire 24-gate circuit", |b| {
        b.iter(|| black_box(&circuit).canonical_form())
    });
}

fn bench_interpret_circuit(c: &mut Criterion) {
    let (sig, gi) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let circuit = random_circuit(&sig, &mut rng, 4, 12);
    c.bench_function("interpret_circuit/4-wire 12-gate circuit", |b| {
        b.iter(|| interpret_circuit(&gi, black_box(&circuit)).unwrap())
    });
}

fn bench_channel_algebra(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_cptp(&mut rng, 2, 2);
    let g = random_cptp(&mut rng, 2, 2);
    c.bench_function("compose_q/two-qubit channels", |b| {
        b.iter(|| compose_q(black_box(&f), black_box(&g)).unwrap())
    });
    let h = random_cptp(&mut rng, 1, 1);
    let k = random_cptp(&mut rng, 1, 1);
    c.bench_function("tensor_q/single-qubit channels", |b| {
        b.iter(|| tensor_q(black_box(&h), black_box(&k)).unwrap())
    });
}

fn bench_run_teleport(c: &mut Criterion) {
    let (sig, gi) = GateInterp::stock();
    let program = Program::from_json_str(TELEPORT).unwrap();
    c.bench_function("run/teleportation with two lifted corrections", |b| {
        b.iter(|| run(&gi, &sig, black_box(&program)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_canonical_form,
    bench_interpret_circuit,
    bench_channel_algebra,
    bench_run_teleport
);
criterion_main!(benches);
