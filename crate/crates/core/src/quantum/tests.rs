use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random::{haar_unitary, random_cptp, random_cq_state};
use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn qubit_state(block: CMat) -> CqState {
    CqState::new(CqObject::qubit(), [(0, block)]).unwrap()
}

fn ket0_density() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

fn plus_density() -> CMat {
    CMat::from_element(2, 2, c(0.5, 0.0))
}

#[test]
fn vectorization_roundtrips() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for types in [
        vec![WireType::Qubit],
        vec![WireType::Bit, WireType::Qubit],
        vec![WireType::Qubit, WireType::Bit, WireType::Qubit],
    ] {
        let obj = CqObject::new(WireObj::new(types)).unwrap();
        let s = random_cq_state(&mut rng, &obj);
        let back = CqState::from_vec(obj, &s.to_vec()).unwrap();
        assert!(s.sup_distance(&back) == 0.0);
    }
}

#[test]
fn hadamard_squares_to_the_identity_channel() {
    let h = unitary_channel(&gates::h()).unwrap();
    let hh = compose_q(&h, &h).unwrap();
    assert!(hh.sup_distance(&identity_q(&CqObject::qubit())) < 1e-12);
}

#[test]
fn mixture_of_h_and_x_matches_direct_density_algebra() {
    // Apply 0.5 H + 0.5 X to |0><0| and compare against the density-matrix
    // arithmetic done directly on 2x2 blocks.
    let h = unitary_channel(&gates::h()).unwrap();
    let x = unitary_channel(&gates::x()).unwrap();
    let w = ConvexWeights::new([0.5, 0.5], 1e-12).unwrap();
    let mix = convex_sum(&w, &[h, x]).unwrap();
    let got = mix.apply(&qubit_state(ket0_density())).unwrap();

    let rho = ket0_density();
    let expect = (gates::h() * &rho * gates::h().adjoint()
        + gates::x() * &rho * gates::x().adjoint())
    .scale(0.5);
    assert!(sup_norm(&(got.block(0).unwrap() - expect)) < 1e-12);
    assert!(got.validate(1e-9).is_ok());
}

#[test]
fn measurement_of_plus_state_is_a_fair_coin() {
    let meas = meas_channel();
    let out = meas.apply(&qubit_state(plus_density())).unwrap();
    assert!((out.block(0).unwrap()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((out.block(1).unwrap()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
}

#[test]
fn measure_after_prepare_is_the_classical_identity() {
    let round = compose_q(&init_channel(), &meas_channel()).unwrap();
    assert!(round.sup_distance(&identity_q(&CqObject::bit())) == 0.0);
}

#[test]
fn discarding_a_prepared_qubit_discards_the_bit() {
    let lhs = compose_q(&init_channel(), &discard_channel(WireType::Qubit)).unwrap();
    assert!(lhs.sup_distance(&discard_channel(WireType::Bit)) == 0.0);
}

#[test]
fn unitary_channel_rejects_non_unitaries() {
    let not_u = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(
        unitary_channel(&not_u),
        Err(QuantumError::NotUnitary(_))
    ));
    let odd = CMat::identity(3, 3);
    assert!(matches!(
        unitary_channel(&odd),
        Err(QuantumError::NotUnitary(_))
    ));
}

#[test]
fn stock_channels_are_cptp() {
    let tol = 1e-9;
    let mut channels = vec![
        unitary_channel(&gates::h()).unwrap(),
        unitary_channel(&gates::x()).unwrap(),
        unitary_channel(&gates::z()).unwrap(),
        unitary_channel(&gates::s()).unwrap(),
        unitary_channel(&gates::tg()).unwrap(),
        unitary_channel(&gates::cnot()).unwrap(),
        meas_channel(),
        init_channel(),
        discard_channel(WireType::Bit),
        discard_channel(WireType::Qubit),
        inj1(),
        inj2(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        channels.push(random_cptp(&mut rng, 1, 1));
        channels.push(random_cptp(&mut rng, 2, 1));
    }
    for ch in &channels {
        let cp = is_cp(ch, tol);
        let tp = is_tp(ch, tol);
        assert!(cp.pass, "CP failed: min eig {}", cp.min_choi_eigenvalue);
        assert!(tp.pass, "TP failed: deviation {}", tp.max_deviation);
    }
}

#[test]
fn transpose_map_fails_cp_but_passes_tp() {
    // The qubit transpose rho -> rho^T, the textbook positive-but-not-CP
    // map.
    let mut mat = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            mat[(i * 2 + j, j * 2 + i)] = c(1.0, 0.0);
        }
    }
    let theta = Superop::new(CqObject::qubit(), CqObject::qubit(), mat).unwrap();
    assert!(is_tp(&theta, 1e-9).pass);
    let cp = is_cp(&theta, 1e-9);
    assert!(!cp.pass);
    assert!(cp.min_choi_eigenvalue < -0.4);
}

#[test]
fn scaled_identity_fails_tp() {
    let mut double = identity_q(&CqObject::qubit());
    double.mat = double.mat.scale(2.0);
    assert!(is_cp(&double, 1e-9).pass);
    let tp = is_tp(&double, 1e-9);
    assert!(!tp.pass);
    assert!((tp.max_deviation - 1.0).abs() < 1e-12);
}

#[test]
fn copair_of_swapped_injections_flips_a_classical_bit() {
    let flip = copair_bit(&inj2(), &inj1()).unwrap();
    let zero_bit = CqState::new(
        CqObject::bit(),
        [(0, CMat::from_element(1, 1, c(1.0, 0.0)))],
    )
    .unwrap();
    let out = flip.apply(&zero_bit).unwrap();
    assert!(out.block(0).is_none());
    assert!((out.block(1).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() == 0.0);
}

#[test]
fn copair_after_injection_selects_the_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let f = random_cptp(&mut rng, 1, 1);
        let g = random_cptp(&mut rng, 1, 1);
        let pair = copair_bit(&f, &g).unwrap();
        let idq = identity_q(&CqObject::qubit());
        let left = compose_q(&tensor_q(&inj1(), &idq).unwrap(), &pair).unwrap();
        let right = compose_q(&tensor_q(&inj2(), &idq).unwrap(), &pair).unwrap();
        assert!(left.sup_distance(&f) < 1e-12);
        assert!(right.sup_distance(&g) < 1e-12);
    }
}

#[test]
fn distribute_is_a_self_inverse_permutation() {
    let a = CqObject::new(WireObj::new(vec![WireType::Qubit, WireType::Bit])).unwrap();
    let d = distribute(&a).unwrap();
    let d_inv = distribute_inv(&a).unwrap();
    let round = compose_q(&d, &d_inv).unwrap();
    assert!(round.sup_distance(&identity_q(d.dom())) < 1e-14);

    // A state supported on bit 0 occupies exactly the first summand.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rest = random_cq_state(&mut rng, &a);
    let mut blocks: Vec<(usize, CMat)> = rest.blocks().map(|(c, m)| (c, m.clone())).collect();
    blocks.retain(|(cidx, _)| *cidx < a.classical_count());
    let s = CqState::new(d.dom().clone(), blocks).unwrap();
    let v = compose_q(&d, &identity_q(d.cod()))
        .unwrap()
        .apply(&s)
        .unwrap()
        .to_vec();
    let half = a.vecdim();
    for k in half..2 * half {
        assert_eq!(v[k], c(0.0, 0.0));
    }
}

#[test]
fn bit_decompositions_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for types in [
        vec![WireType::Bit, WireType::Qubit],
        vec![WireType::Bit, WireType::Bit, WireType::Qubit],
        vec![WireType::Bit, WireType::Qubit, WireType::Qubit],
    ] {
        let obj = CqObject::new(WireObj::new(types)).unwrap();
        for _ in 0..20 {
            let s = random_cq_state(&mut rng, &obj);
            let d = decompose_bit_state(&s, 1e-9).unwrap();
            assert!((d.p[0] + d.p[1] - 1.0).abs() < 1e-12);
            let back = d.recompose().unwrap();
            assert!(
                s.sup_distance(&back) < 1e-12,
                "roundtrip distance too large"
            );
        }
    }
}

#[test]
fn decomposition_of_a_definite_bit_has_one_branch() {
    let obj = CqObject::new(WireObj::new(vec![WireType::Bit, WireType::Qubit])).unwrap();
    // bit fixed to 0 (classical index high bit 0), arbitrary qubit part
    let s = CqState::new(obj, [(0, plus_density())]).unwrap();
    let d = decompose_bit_state(&s, 1e-9).unwrap();
    assert_eq!(d.p[0], 1.0);
    assert_eq!(d.p[1], 0.0);
    assert!(d.branch[0].is_some());
    assert!(d.branch[1].is_none());
}

#[test]
fn decompose_rejects_non_bits_and_unnormalized_states() {
    let s = qubit_state(plus_density());
    assert!(matches!(
        decompose_bit_state(&s, 1e-9),
        Err(QuantumError::NotABit(_))
    ));
    let obj = CqObject::new(WireObj::new(vec![WireType::Bit])).unwrap();
    let sub = CqState::new(obj, [(0, CMat::from_element(1, 1, c(0.25, 0.0)))]).unwrap();
    assert!(matches!(
        decompose_bit_state(&sub, 1e-9),
        Err(QuantumError::NotAState(_))
    ));
}

#[test]
fn decompose_handles_interior_bit_positions() {
    // On BIT * BIT, block 0b01 means first bit 0, second bit 1; splitting
    // the second wire must find outcome 1 and remainder block 0.
    let obj = CqObject::new(WireObj::new(vec![WireType::Bit, WireType::Bit])).unwrap();
    let s = CqState::new(obj, [(0b01, CMat::from_element(1, 1, c(1.0, 0.0)))]).unwrap();
    let d = decompose_bit_at(&s, 1, 1e-9).unwrap();
    assert_eq!(d.p, [0.0, 1.0]);
    let rest = d.branch[1].as_ref().unwrap();
    assert!(rest.block(0).is_some());
}

#[test]
fn wire_permutation_swaps_qubits() {
    let qq = CqObject::new(WireObj::new(vec![WireType::Qubit, WireType::Qubit])).unwrap();
    let swap = permute_wires(&qq, &[1, 0]).unwrap();
    // |01><01| (row index 1) must become |10><10| (row index 2).
    let mut block = CMat::zeros(4, 4);
    block[(1, 1)] = c(1.0, 0.0);
    let s = CqState::new(qq, [(0, block)]).unwrap();
    let out = swap.apply(&s).unwrap();
    assert_eq!(out.block(0).unwrap()[(2, 2)], c(1.0, 0.0));
    assert_eq!(out.block(0).unwrap()[(1, 1)], c(0.0, 0.0));
}

#[test]
fn wire_permutations_compose_to_identity() {
    let obj = CqObject::new(WireObj::new(vec![
        WireType::Bit,
        WireType::Qubit,
        WireType::Bit,
        WireType::Qubit,
    ]))
    .unwrap();
    let targets = [2, 0, 3, 1];
    let fwd = permute_wires(&obj, &targets).unwrap();
    let mut inverse = [0usize; 4];
    for (i, &t) in targets.iter().enumerate() {
        inverse[t] = i;
    }
    let back = permute_wires(fwd.cod(), &inverse).unwrap();
    let round = compose_q(&fwd, &back).unwrap();
    assert!(round.sup_distance(&identity_q(&obj)) == 0.0);
}

#[test]
fn tensor_of_unitary_channels_matches_the_kronecker_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let u = haar_unitary(&mut rng, 2);
        let v = haar_unitary(&mut rng, 2);
        let lhs = tensor_q(&unitary_channel(&u).unwrap(), &unitary_channel(&v).unwrap()).unwrap();
        let rhs = unitary_channel(&u.kronecker(&v)).unwrap();
        assert!(lhs.sup_distance(&rhs) < 1e-12);
    }
}

#[test]
fn haar_unitaries_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [2, 4, 8] {
        let u = haar_unitary(&mut rng, dim);
        let dev = sup_norm(&(u.adjoint() * &u - DMatrix::identity(dim, dim)));
        assert!(dev < 1e-10, "dim {dim}: deviation {dev}");
    }
}

#[test]
fn object_guard_rejects_eleven_wires() {
    let wires = WireObj::new(vec![WireType::Bit; 11]);
    assert!(matches!(
        CqObject::new(wires),
        Err(QuantumError::TooManyWires {
            wires: 11,
            limit: 10
        })
    ));
}

#[test]
fn convex_weights_are_validated() {
    assert!(ConvexWeights::new([0.5, 0.5], 1e-12).is_ok());
    assert!(matches!(
        ConvexWeights::new([0.7, 0.7], 1e-12),
        Err(QuantumError::WeightMismatch(_))
    ));
    assert!(matches!(
        ConvexWeights::new([-0.1, 1.1], 1e-12),
        Err(QuantumError::WeightMismatch(_))
    ));
    let w = ConvexWeights::new([0.3, 0.7], 1e-12).unwrap();
    let f = identity_q(&CqObject::qubit());
    assert!(matches!(
        convex_sum(&w, &[f]),
        Err(QuantumError::WeightMismatch(_))
    ));
}

#[test]
fn state_json_roundtrips() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let obj = CqObject::new(WireObj::new(vec![WireType::Bit, WireType::Qubit])).unwrap();
    let s = random_cq_state(&mut rng, &obj);
    let back = CqState::from_json(&s.to_json()).unwrap();
    assert!(s.sup_distance(&back) == 0.0);
}

#[test]
fn superop_json_roundtrips() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_cptp(&mut rng, 2, 1);
    let back = Superop::from_json(&f.to_json()).unwrap();
    assert!(f.sup_distance(&back) == 0.0);
    assert!(matches!(
        Superop::from_json(
            &serde_json::json!({"dom": [], "cod": [], "shape": [2, 2], "entries": []})
        ),
        Err(QuantumError::ObjectMismatch(_))
    ));
}

#[test]
fn states_validate_positivity_and_trace() {
    let good = qubit_state(plus_density());
    assert!(good.validate(1e-9).is_ok());
    let neg = qubit_state(CMat::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
    ));
    assert!(matches!(
        neg.validate(1e-9),
        Err(QuantumError::NotAState(_))
    ));
    let heavy = qubit_state(ket0_density().scale(3.0));
    assert!(matches!(
        heavy.validate(1e-9),
        Err(QuantumError::NotAState(_))
    ));
}
