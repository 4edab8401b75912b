//! Release gate: one test per acceptance criterion, each printing a
//! single pass/fail line (run with `--nocapture` to see them on success;
//! cargo's own per-test lines carry the same verdicts). Tolerances and
//! instance counts are pinned here on purpose — loosening them is a
//! semantic change, not a tuning knob.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twotime_core::circuit::{WireObj, WireType};
use twotime_core::exec::{branch_consistency_deviation, run, Program};
use twotime_core::interp::GateInterp;
use twotime_core::laws::{check_by_name, LawConfig, Mutation};
use twotime_core::quantum::random::random_cq_state;
use twotime_core::quantum::{decompose_bit_state, sup_norm, CqObject};

/// Quantum teleportation with both corrections driven by lifted
/// measurement outcomes; the payload is half of an entangled pair so the
/// aggregate output certifies the whole channel.
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

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{criterion}: {} ({detail})",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_biset_diagrams_hold_exactly_on_small_carriers() {
    let start = Instant::now();
    let report = check_by_name("biset_monad", &LawConfig::default()).unwrap();
    let elapsed = start.elapsed();
    verdict(
        "1. biset monad/strength/commutativity exact on carriers <= 3, under 10 s",
        report.pass && report.max_deviation == 0.0 && elapsed.as_secs_f64() < 10.0,
        &format!(
            "{} instances, max deviation {:e}, {:.2} s",
            report.instances,
            report.max_deviation,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_convexity_axioms_hold_on_200_instances_per_axiom() {
    let config = LawConfig::default();
    assert!(config.convex_instances >= 200, "pinned instance count");
    let start = Instant::now();
    let report = check_by_name("convex_axioms", &config).unwrap();
    let elapsed = start.elapsed();
    verdict(
        "2. convex axioms within 1e-12 on >= 200 instances per axiom, under 30 s",
        report.pass
            && report.tolerance == 1e-12
            && report.instances >= 4 * 200
            && elapsed.as_secs_f64() < 30.0,
        &format!(
            "{} observations, max deviation {:e}, {:.2} s",
            report.instances,
            report.max_deviation,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_03_branching_characterization_holds_both_ways() {
    let config = LawConfig::default();
    assert!(
        config.convex2_forward_instances >= 50,
        "pinned instance count"
    );
    assert!(
        config.convex2_backward_instances >= 100,
        "pinned instance count"
    );
    let forward = check_by_name("convex2_forward", &config).unwrap();
    let backward = check_by_name("convex2_backward", &config).unwrap();
    verdict(
        "3. bit-point diagrams (50 draws) and factored composite (100 pairs) within 1e-10",
        forward.pass && forward.tolerance == 1e-10 && backward.pass && backward.tolerance == 1e-10,
        &format!(
            "forward max deviation {:e} on {}, backward max deviation {:e} on {}",
            forward.max_deviation, forward.instances, backward.max_deviation, backward.instances
        ),
    );
}

#[test]
fn criterion_04_embedding_square_commutes_bitwise() {
    let config = LawConfig::default();
    assert!(config.condition_f_circuits >= 100, "pinned instance count");
    assert_eq!(config.condition_f_max_wires, 4);
    assert_eq!(config.condition_f_max_gates, 8);
    let start = Instant::now();
    let report = check_by_name("condition_f", &config).unwrap();
    let elapsed = start.elapsed();
    verdict(
        "4. circuit embedding then lift equals interpret then embed, deviation 0, under 60 s",
        report.pass && report.max_deviation == 0.0 && elapsed.as_secs_f64() < 60.0,
        &format!(
            "{} circuits, max deviation {:e}, {:.2} s",
            report.instances,
            report.max_deviation,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_05_lifting_a_fresh_constant_is_the_unit() {
    let report = check_by_name("dynlift_triangle", &LawConfig::default()).unwrap();
    verdict(
        "5. lifting a freshly prepared bit returns that boolean exactly, both values",
        report.pass && report.max_deviation == 0.0,
        &format!(
            "{} instances, max deviation {:e}",
            report.instances, report.max_deviation
        ),
    );
}

#[test]
fn criterion_06_bit_decomposition_round_trips_and_is_unique() {
    use WireType::{Bit, Qubit};
    // Every companion object with at most two qubits and one extra bit.
    let rests: Vec<Vec<WireType>> = vec![
        vec![],
        vec![Qubit],
        vec![Bit],
        vec![Qubit, Qubit],
        vec![Qubit, Bit],
        vec![Bit, Qubit],
        vec![Qubit, Qubit, Bit],
        vec![Qubit, Bit, Qubit],
        vec![Bit, Qubit, Qubit],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(LawConfig::default().seed);
    let mut instances = 0usize;
    let mut worst_round_trip = 0.0f64;
    let mut worst_uniqueness = 0.0f64;
    for rest in &rests {
        let mut types = vec![Bit];
        types.extend_from_slice(rest);
        let obj = CqObject::new(WireObj::new(types)).unwrap();
        for _ in 0..12 {
            let s = random_cq_state(&mut rng, &obj);
            let dec = decompose_bit_state(&s, 1e-9).unwrap();
            let back = dec.recompose().unwrap();
            worst_round_trip = worst_round_trip.max(sup_norm(&(back.to_vec() - s.to_vec())));
            // Splitting the reassembled state must recover the same
            // probabilities and branch states — nothing else reassembles
            // to it.
            let again = decompose_bit_state(&back, 1e-9).unwrap();
            for b in 0..2 {
                worst_uniqueness = worst_uniqueness.max((again.p[b] - dec.p[b]).abs());
                if let (Some(x), Some(y)) = (&dec.branch[b], &again.branch[b]) {
                    worst_uniqueness = worst_uniqueness.max(sup_norm(&(x.to_vec() - y.to_vec())));
                } else {
                    assert_eq!(
                        dec.branch[b].is_some(),
                        again.branch[b].is_some(),
                        "branch {b} must survive both splits"
                    );
                }
            }
            instances += 1;
        }
    }
    verdict(
        "6. split-then-reassemble within 1e-12 and unique within 1e-10, companions up to 2 qubits + 1 bit",
        worst_round_trip <= 1e-12 && worst_uniqueness <= 1e-10,
        &format!(
            "{instances} states, worst round trip {worst_round_trip:e}, worst uniqueness gap {worst_uniqueness:e}"
        ),
    );
}

#[test]
fn criterion_07_execution_composition_is_bilinear() {
    let config = LawConfig::default();
    assert!(config.bilinearity_triples >= 100, "pinned instance count");
    let report = check_by_name("kleisli_bilinearity", &config).unwrap();
    verdict(
        "7. composition of execution maps is bilinear over convex mixtures within 1e-12",
        report.pass && report.tolerance == 1e-12,
        &format!(
            "{} triples, max deviation {:e}",
            report.instances, report.max_deviation
        ),
    );
}

#[test]
fn criterion_08_boxing_round_trips_on_50_elements() {
    let config = LawConfig::default();
    assert!(config.box_unbox_instances >= 50, "pinned instance count");
    let report = check_by_name("box_unbox", &config).unwrap();
    verdict(
        "8. box then unbox returns the element: circuits canonically equal, channels within 1e-10",
        report.pass && report.tolerance == 1e-10,
        &format!(
            "{} elements, max deviation {:e}",
            report.instances, report.max_deviation
        ),
    );
}

#[test]
fn criterion_09_teleportation_with_lifted_corrections() {
    let (sig, gi) = GateInterp::stock();
    let program = Program::from_json_str(TELEPORT).unwrap();
    let comp = run(&gi, &sig, &program).unwrap();

    let four_branches = comp.branches().len() == 4;
    let mut worst_prob = 0.0f64;
    let mut worst_consistency = 0.0f64;
    for b in comp.branches() {
        worst_prob = worst_prob.max((b.prob - 0.25).abs());
        worst_consistency = worst_consistency.max(branch_consistency_deviation(&gi, b).unwrap());
    }

    // The reference qubit bypassed the protocol, so the aggregate over
    // (reference, output) reproduces the original maximally entangled
    // pair exactly when the teleported channel is the identity.
    let agg = comp.aggregate_state().unwrap();
    let mut bell = DMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[(i, j)] = Complex64::new(0.5, 0.0);
    }
    let channel_gap = sup_norm(&(agg.block(0).unwrap() - bell));

    verdict(
        "9. teleportation: four branches at 0.25 +- 1e-10, aggregate channel identity within 1e-9, branches self-consistent",
        four_branches
            && worst_prob <= 1e-10
            && channel_gap <= 1e-9
            && worst_consistency <= 1e-9,
        &format!(
            "{} branches, worst probability gap {worst_prob:e}, channel gap {channel_gap:e}, worst branch drift {worst_consistency:e}",
            comp.branches().len()
        ),
    );
}

#[test]
fn criterion_10_every_documented_mutation_fails_its_suite() {
    let mutations = Mutation::all();
    assert!(mutations.len() >= 5, "at least five documented mutations");
    let mut caught = 0usize;
    let mut lines = Vec::new();
    for m in &mutations {
        let report = m.check(&LawConfig::default()).unwrap();
        let failed = !report.pass && report.counterexample.is_some();
        if failed {
            caught += 1;
        }
        lines.push(format!(
            "{} -> {} ({})",
            m.description(),
            if failed { "caught" } else { "MISSED" },
            report.law
        ));
    }
    verdict(
        "10. every documented fault injection makes its law suite fail",
        caught == mutations.len(),
        &format!("{caught}/{} caught; {}", mutations.len(), lines.join("; ")),
    );
}
