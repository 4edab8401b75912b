//! Seeded random states and channels for the law harness.
//!
//! Everything takes an explicit `Rng`, so all sampled instances are
//! reproducible from the seed recorded in law reports.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{CMat, CqObject, CqState, Superop, WireObj, WireType};

/// Standard normal via Box–Muller (avoids pulling in a distributions
/// crate for one function).
fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Complex64::new(gauss(rng), gauss(rng)))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// standard phase correction from the diagonal of `R`.
pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> CMat {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Random CPTP map between qubit-only objects, by the isometric-dilation
/// construction: take the first `2^q_in` columns of a Haar unitary on
/// system-plus-environment, then trace out the environment. CPTP by
/// construction; genuinely scrambled for law sampling.
pub fn random_cptp(rng: &mut impl Rng, q_in: usize, q_out: usize) -> Superop {
    let din = 1 << q_in;
    let dout = 1 << q_out;
    let denv = din.max(2); // dout * denv >= din, with room to scramble
    let u = haar_unitary(rng, dout * denv);
    // Kraus operators K_m[o, i] = U[o * denv + m, i].
    let kraus: Vec<CMat> = (0..denv)
        .map(|m| CMat::from_fn(dout, din, |o, i| u[(o * denv + m, i)]))
        .collect();
    let mut mat = CMat::zeros(dout * dout, din * din);
    for k in &kraus {
        for i in 0..dout {
            for j in 0..dout {
                for a in 0..din {
                    for b in 0..din {
                        mat[(i * dout + j, a * din + b)] += k[(i, a)] * k[(j, b)].conj();
                    }
                }
            }
        }
    }
    let dom = CqObject::new(WireObj::new(vec![WireType::Qubit; q_in])).expect("small object");
    let cod = CqObject::new(WireObj::new(vec![WireType::Qubit; q_out])).expect("small object");
    Superop::new(dom, cod, mat).expect("dimensions line up by construction")
}

/// Random density matrix `G G^dag / tr`.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> CMat {
    let g = gaussian_matrix(rng, dim, dim);
    let rho = &g * g.adjoint();
    let t = rho.trace().re;
    rho.scale(1.0 / t)
}

/// Random normalized cq state on an arbitrary object: random classical
/// weights, random density per block.
pub fn random_cq_state(rng: &mut impl Rng, obj: &CqObject) -> CqState {
    let n = obj.classical_count();
    let mut weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let qd = obj.qdim();
    let blocks = weights
        .iter()
        .enumerate()
        .map(|(c, &w)| (c, random_density(rng, qd).scale(w)));
    CqState::new(obj.clone(), blocks).expect("block shapes match by construction")
}
