//! Law-checking harness: every algebraic claim the crate's structures rest
//! on, turned into a runnable check that produces a [`LawReport`].
//!
//! The checks fall into three groups:
//!
//! * **Exhaustive, exact** — the staged-set monad diagrams over every biset
//!   with small carriers ([`check_biset_monad`]), strict monoidal coherence
//!   of circuits ([`check_coherence`]), the execution-layer compatibility
//!   square ([`check_condition_f`]), and the single-bit lifting triangle
//!   ([`check_dynlift_triangle`]). These demand deviation exactly zero.
//! * **Randomized, numerical** — convexity of channels
//!   ([`check_convex_axioms`]), the characterization of probabilistic
//!   branching through bit states ([`check_convex2_forward`],
//!   [`check_convex2_backward`]), bilinearity of execution-map composition
//!   ([`check_kleisli_bilinearity`]), boxing round-trips
//!   ([`check_box_unbox`]), and functoriality of circuit interpretation
//!   ([`check_functor_J`]). These compare channels in the sup norm against
//!   pinned tolerances, drawing instances from a seeded generator so every
//!   report is reproducible from its recorded seed.
//! * **Mutation sensitivity** — [`Mutation`] re-runs a suite with a
//!   deliberate fault injected. A healthy harness must *fail* every mutated
//!   run; a mutation that slips through would mean the corresponding check
//!   has no teeth.
//!
//! [`run_all`] executes the whole battery with a [`LawConfig`];
//! [`check_by_name`] resolves a single suite by its registry name (the
//! strings in [`law_names`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::biset::{
    compose, costrength_s, enumerate_bisets, identity, map_t, monad_t, mult_mu, product,
    product_map, strength_t, unit_eta, Biset, BisetError, BisetMap, Label,
};
use crate::circuit::{
    canonically_equal, random_circuit, random_extension, Circuit, CircuitError, WireObj, WireType,
};
use crate::exec::{
    box_element, dyn_lift, embed_phi, embed_psi, eta_E, init_map, kleisli_compose, kleisli_convex,
    unbox, Branch, Computation, ExecError,
};
use crate::interp::{element_of, interpret_circuit, wire_object, GateInterp, InterpError};
use crate::quantum::gates;
use crate::quantum::{
    compose_q, convex_sum, copair_bit, identity_q, inj1, inj2, permute_wires, random::random_cptp,
    tensor_q, unitary_channel, ConvexWeights, CqObject, QuantumError, Superop,
};

/// Errors from the law harness itself (as opposed to law *violations*,
/// which are reported through [`LawReport::pass`]).
#[derive(Debug, Error)]
pub enum LawError {
    /// A registry lookup used a name that [`law_names`] does not list.
    #[error("unknown law: {name} (known: {known})", name = .0, known = law_names().join(", "))]
    UnknownLaw(String),
    /// The biset sweep was asked for carriers large enough to make the
    /// exhaustive enumeration explode.
    #[error("carrier bound {0} too large for exhaustive checking (max 4)")]
    CarrierTooLarge(usize),
    /// A check tripped over a biset-layer error while building diagrams.
    #[error(transparent)]
    Biset(#[from] BisetError),
    /// A check tripped over a circuit-layer error while building diagrams.
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    /// A check tripped over a channel-layer error while building diagrams.
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    /// A check tripped over an interpretation error while building diagrams.
    #[error(transparent)]
    Interp(#[from] InterpError),
    /// A check tripped over an execution-layer error while building diagrams.
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// The outcome of one law suite: how many diagram instances were checked,
/// the worst deviation seen, the tolerance it was held to, and — when the
/// suite fails — a description of the worst offending instance.
///
/// Invariant: `pass` holds exactly when `max_deviation <= tolerance`.
/// Exhaustive structural checks use tolerance `0.0` and report mismatches
/// as deviation `1.0`. `seed` is the generator seed the instances were
/// drawn from (`0` for deterministic sweeps), so re-running the same check
/// with the same seed reproduces the report.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: String,
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub counterexample: Option<String>,
}

/// Instance counts, size bounds, and the seed for a full harness run. The
/// defaults are the battery the acceptance suite runs.
#[derive(Debug, Clone)]
pub struct LawConfig {
    /// Seed for every randomized suite.
    pub seed: u64,
    /// Carrier bound for the exhaustive biset sweep.
    pub max_carrier: usize,
    /// Random instances per convexity axiom.
    pub convex_instances: usize,
    /// Random instances for the branching characterization, forward side.
    pub convex2_forward_instances: usize,
    /// Random channel pairs for the branching characterization, backward side.
    pub convex2_backward_instances: usize,
    /// Random circuits for the execution-compatibility square.
    pub condition_f_circuits: usize,
    /// Wire bound for those circuits.
    pub condition_f_max_wires: usize,
    /// Gate bound for those circuits.
    pub condition_f_max_gates: usize,
    /// Random triples for bilinearity of execution-map composition.
    pub bilinearity_triples: usize,
    /// Random circuits for boxing round-trips.
    pub box_unbox_instances: usize,
    /// Random instances per functoriality family.
    pub functor_instances: usize,
    /// Wire bound for the coherence sweep's objects.
    pub coherence_max_wires: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 7,
            max_carrier: 3,
            convex_instances: 200,
            convex2_forward_instances: 50,
            convex2_backward_instances: 100,
            condition_f_circuits: 100,
            condition_f_max_wires: 4,
            condition_f_max_gates: 8,
            bilinearity_triples: 100,
            box_unbox_instances: 50,
            functor_instances: 100,
            coherence_max_wires: 3,
        }
    }
}

/// Accumulates diagram instances for one report, keeping the witness of the
/// worst violation.
struct Probe {
    law: String,
    tolerance: f64,
    seed: u64,
    instances: usize,
    max_deviation: f64,
    counterexample: Option<String>,
}

impl Probe {
    fn new(law: impl Into<String>, tolerance: f64, seed: u64) -> Probe {
        Probe {
            law: law.into(),
            tolerance,
            seed,
            instances: 0,
            max_deviation: 0.0,
            counterexample: None,
        }
    }

    fn observe(&mut self, deviation: f64, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if deviation > self.max_deviation {
            self.max_deviation = deviation;
            if deviation > self.tolerance {
                self.counterexample = Some(witness());
            }
        }
    }

    fn finish(self) -> LawReport {
        LawReport {
            law: self.law,
            instances: self.instances,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
            pass: self.max_deviation <= self.tolerance,
            seed: self.seed,
            counterexample: self.counterexample,
        }
    }
}

/// Structural distance between biset maps: 0 when equal, 1 otherwise.
fn map_deviation(a: &BisetMap, b: &BisetMap) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

/// Structural distance between circuits: 0 when literally equal.
fn circuit_deviation(a: &Circuit, b: &Circuit) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

fn biset_desc(x: &Biset) -> String {
    let leg: Vec<String> = x.leg().iter().map(|(k, v)| format!("{k}->{v}")).collect();
    format!(
        "({} finished / {} running; leg {{{}}})",
        x.carrier0().len(),
        x.carrier1().len(),
        leg.join(", ")
    )
}

/// Reassociates a triple label `((a, b), c)` to `(a, (b, c))` — the
/// associativity isomorphism applied pointwise.
fn reassoc(l: &Label) -> Label {
    match l {
        Label::Pair(xy, c) => match &**xy {
            Label::Pair(a, b) => {
                Label::pair((**a).clone(), Label::pair((**b).clone(), (**c).clone()))
            }
            other => unreachable!("left factor of a triple is a pair, found {other}"),
        },
        other => unreachable!("triple carrier holds pairs, found {other}"),
    }
}

/// Looks a label up in one stage table of a map.
fn stage_lookup<'a>(m: &'a BisetMap, l: &Label, finished: bool) -> Option<&'a Label> {
    if finished {
        m.h0().get(l)
    } else {
        m.h1().get(l)
    }
}

/// Threads a label through a chain of maps at one stage, by reference.
fn thread<'a>(start: &'a Label, maps: &'a [&'a BisetMap], finished: bool) -> Option<&'a Label> {
    let mut cur = start;
    for m in maps {
        cur = stage_lookup(m, cur, finished)?;
    }
    Some(cur)
}

/// Pointwise deviation between two parallel chains of maps: 0 when the
/// chains are well-typed, share endpoints, and agree on every label at both
/// stages; 1 otherwise. Evaluating through the stage tables avoids
/// materializing the composites, which keeps the exhaustive sweeps fast.
fn chain_deviation(lhs: &[&BisetMap], rhs: &[&BisetMap]) -> f64 {
    fn typed(chain: &[&BisetMap]) -> bool {
        chain.windows(2).all(|w| w[0].dst() == w[1].src())
    }
    let (Some(l_first), Some(l_last)) = (lhs.first(), lhs.last()) else {
        return 1.0;
    };
    let (Some(r_first), Some(r_last)) = (rhs.first(), rhs.last()) else {
        return 1.0;
    };
    if !typed(lhs) || !typed(rhs) || l_first.src() != r_first.src() || l_last.dst() != r_last.dst()
    {
        return 1.0;
    }
    let src = l_first.src();
    for finished in [true, false] {
        let labels = if finished {
            src.carrier0()
        } else {
            src.carrier1()
        };
        for l in labels {
            match (thread(l, lhs, finished), thread(l, rhs, finished)) {
                (Some(a), Some(b)) if a == b => {}
                _ => return 1.0,
            }
        }
    }
    0.0
}

/// Pointwise deviation of the strength-associativity pentagon on `(X, Y, Z)`
/// given the three strengths it mentions: reassociating and then applying
/// strength twice must match applying strength at the product and
/// reassociating inside the monad.
fn pentagon_deviation(
    x: &Biset,
    y: &Biset,
    z: &Biset,
    t_yz: &BisetMap,
    t_xy_z: &BisetMap,
    t_x_yz: &BisetMap,
) -> f64 {
    for finished in [true, false] {
        let (xs, ys) = if finished {
            (x.carrier0(), y.carrier0())
        } else {
            (x.carrier1(), y.carrier1())
        };
        // Both carriers of T Z are Z's finished carrier.
        for a in xs {
            for b in ys {
                for c in z.carrier0() {
                    let inner = Label::pair(b.clone(), c.clone());
                    let Some(t_bc) = stage_lookup(t_yz, &inner, finished) else {
                        return 1.0;
                    };
                    let nested = Label::pair(a.clone(), t_bc.clone());
                    let Some(path_1) = stage_lookup(t_x_yz, &nested, finished) else {
                        return 1.0;
                    };
                    let flat = Label::pair(Label::pair(a.clone(), b.clone()), c.clone());
                    let Some(raw) = stage_lookup(t_xy_z, &flat, finished) else {
                        return 1.0;
                    };
                    if *path_1 != reassoc(raw) {
                        return 1.0;
                    }
                }
            }
        }
    }
    0.0
}

/// The unit isomorphism `1 x X -> X`, projecting away the terminal factor.
fn left_unitor(x: &Biset) -> BisetMap {
    fn second(l: &Label) -> Label {
        match l {
            Label::Pair(_, b) => (**b).clone(),
            other => unreachable!("unit-product carrier holds pairs, found {other}"),
        }
    }
    let src = product(&Biset::terminal(), x);
    BisetMap::from_fns(&src, x, second, second)
}

/// Checks every monad, strength, and commutativity diagram for the staged-set
/// monad, exhaustively over all bisets with carriers of at most `max_carrier`
/// elements. All diagrams must commute on the nose (deviation 0).
///
/// Single- and pair-indexed diagrams sweep the full pool in every position.
/// The triple-indexed strength-associativity pentagon sweeps every triple
/// over the carriers-at-most-2 subpool plus every triple over the full pool
/// that draws at most two distinct bisets — so each pool member still meets
/// every other in every position, while the full cubic sweep (which adds
/// only relabelings of these shapes) is avoided to keep the run fast.
pub fn check_biset_monad(max_carrier: usize) -> Result<LawReport, LawError> {
    if max_carrier > 4 {
        return Err(LawError::CarrierTooLarge(max_carrier));
    }
    let pool = enumerate_bisets(max_carrier);
    let mut probe = Probe::new("biset_monad", 0.0, 0);

    // Derived structure shared across diagrams, built once per pool member.
    let t_pool: Vec<Biset> = pool.iter().map(monad_t).collect();
    let etas: Vec<BisetMap> = pool.iter().map(unit_eta).collect();
    let mus: Vec<BisetMap> = pool.iter().map(mult_mu).collect();
    let ids: Vec<BisetMap> = pool.iter().map(identity).collect();

    for x in &pool {
        let tx = monad_t(x);
        let id_tx = identity(&tx);
        let mu = mult_mu(x);
        // Left unit: collapsing a freshly restaged computation is a no-op.
        let left = compose(&unit_eta(&tx), &mu)?;
        probe.observe(map_deviation(&left, &id_tx), || {
            format!("monad left unit at X = {}", biset_desc(x))
        });
        // Right unit: restaging inside and collapsing is a no-op.
        let right = compose(&map_t(&unit_eta(x)), &mu)?;
        probe.observe(map_deviation(&right, &id_tx), || {
            format!("monad right unit at X = {}", biset_desc(x))
        });
        // Associativity: the two ways to collapse three stages agree.
        let assoc_outer = compose(&mult_mu(&tx), &mu)?;
        let assoc_inner = compose(&map_t(&mu), &mu)?;
        probe.observe(map_deviation(&assoc_outer, &assoc_inner), || {
            format!("monad associativity at X = {}", biset_desc(x))
        });
        // Strength respects the unit object: T(unitor) . t = unitor.
        let via_strength = compose(&strength_t(&Biset::terminal(), x), &map_t(&left_unitor(x)))?;
        probe.observe(map_deviation(&via_strength, &left_unitor(&tx)), || {
            format!("strength unitor at X = {}", biset_desc(x))
        });
    }

    // Pair-indexed diagrams, evaluated pointwise; the products and
    // strengths are kept for the pentagon sweep below.
    let mut prods = std::collections::BTreeMap::new();
    let mut strengths = std::collections::BTreeMap::new();
    for (i, x) in pool.iter().enumerate() {
        for (j, y) in pool.iter().enumerate() {
            let t = strength_t(x, y);
            let xy = product(x, y);
            // Strength unit: strength after a pointwise unit is the unit.
            let idx_eta = product_map(&ids[i], &etas[j]);
            let eta_xy = unit_eta(&xy);
            probe.observe(chain_deviation(&[&idx_eta, &t], &[&eta_xy]), || {
                format!(
                    "strength unit at X = {}, Y = {}",
                    biset_desc(x),
                    biset_desc(y)
                )
            });
            // Strength multiplication: strength commutes with collapsing.
            let idx_mu = product_map(&ids[i], &mus[j]);
            let t_x_ty = strength_t(x, &t_pool[j]);
            let t_of_t = map_t(&t);
            let mu_xy = mult_mu(&xy);
            probe.observe(
                chain_deviation(&[&idx_mu, &t], &[&t_x_ty, &t_of_t, &mu_xy]),
                || {
                    format!(
                        "strength multiplication at X = {}, Y = {}",
                        biset_desc(x),
                        biset_desc(y)
                    )
                },
            );
            // Commutativity: strength-then-costrength and costrength-then-
            // strength collapse to the same map TX x TY -> T(X x Y).
            let t_tx_y = strength_t(&t_pool[i], y);
            let t_of_s = map_t(&costrength_s(x, y));
            let s_x_ty = costrength_s(x, &t_pool[j]);
            probe.observe(
                chain_deviation(&[&t_tx_y, &t_of_s, &mu_xy], &[&s_x_ty, &t_of_t, &mu_xy]),
                || {
                    format!(
                        "commutativity at X = {}, Y = {}",
                        biset_desc(x),
                        biset_desc(y)
                    )
                },
            );
            prods.insert((i, j), xy);
            strengths.insert((i, j), t);
        }
    }

    // Pentagon triples: the small cube plus all patterns with at most two
    // distinct pool members.
    let small: Vec<usize> = (0..pool.len())
        .filter(|&i| pool[i].carrier0().len() <= 2 && pool[i].carrier1().len() <= 2)
        .collect();
    let mut triples = std::collections::BTreeSet::new();
    for &a in &small {
        for &b in &small {
            for &c in &small {
                triples.insert((a, b, c));
            }
        }
    }
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            triples.insert((i, i, j));
            triples.insert((i, j, i));
            triples.insert((j, i, i));
        }
    }
    for &(a, b, c) in &triples {
        let (x, y, z) = (&pool[a], &pool[b], &pool[c]);
        // Strength associativity: reassociating before a nested strength
        // matches strength at the product followed by reassociating inside.
        let t_xy_z = strength_t(&prods[&(a, b)], z);
        let t_x_yz = strength_t(x, &prods[&(b, c)]);
        probe.observe(
            pentagon_deviation(x, y, z, &strengths[&(b, c)], &t_xy_z, &t_x_yz),
            || {
                format!(
                    "strength pentagon at X = {}, Y = {}, Z = {}",
                    biset_desc(x),
                    biset_desc(y),
                    biset_desc(z)
                )
            },
        );
    }

    Ok(probe.finish())
}

fn weights2(p: f64, q: f64) -> Result<ConvexWeights, QuantumError> {
    ConvexWeights::new([p, q], 1e-9)
}

/// Draws `(a, b, c, d)` on the probability simplex with every grouping
/// denominator bounded away from zero, so the redistribution axiom's
/// provisos hold.
fn simplex4(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let mut cuts = [
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
        ];
        cuts.sort_by(f64::total_cmp);
        let w = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
        let ok = [w[0] + w[1], w[2] + w[3], w[0] + w[2], w[1] + w[3]]
            .iter()
            .all(|&s| s > 1e-3);
        if ok {
            return w;
        }
    }
}

/// Checks the convex-combination axioms for channels on `instances_per_axiom`
/// random CPTP maps per axiom: idempotence on equal summands, commutativity,
/// dropping a zero weight, and regrouping a four-way combination both ways.
pub fn check_convex_axioms(instances_per_axiom: usize, seed: u64) -> Result<LawReport, LawError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("convex_axioms", 1e-12, seed);
    for k in 0..instances_per_axiom {
        let q_in = rng.random_range(0..=2);
        let q_out = rng.random_range(0..=2);
        let x = random_cptp(&mut rng, q_in, q_out);
        let y = random_cptp(&mut rng, q_in, q_out);
        let p: f64 = rng.random_range(0.0..=1.0);
        let q = 1.0 - p;

        // (a) p.x + q.x = x
        let same = convex_sum(&weights2(p, q)?, &[x.clone(), x.clone()])?;
        probe.observe(same.sup_distance(&x), || {
            format!("idempotence: instance {k}, p = {p}, {q_in} -> {q_out} qubits")
        });

        // (b) p.x + q.y = q.y + p.x
        let forward = convex_sum(&weights2(p, q)?, &[x.clone(), y.clone()])?;
        let backward = convex_sum(&weights2(q, p)?, &[y.clone(), x.clone()])?;
        probe.observe(forward.sup_distance(&backward), || {
            format!("commutativity: instance {k}, p = {p}, {q_in} -> {q_out} qubits")
        });

        // (c) 0.x + 1.y = y
        let dropped = convex_sum(&weights2(0.0, 1.0)?, &[x.clone(), y.clone()])?;
        probe.observe(dropped.sup_distance(&y), || {
            format!("zero-weight drop: instance {k}, {q_in} -> {q_out} qubits")
        });

        // (d) regrouping: combining rows first or columns first agrees.
        let [a, b, c, d] = simplex4(&mut rng);
        let z = random_cptp(&mut rng, q_in, q_out);
        let w = random_cptp(&mut rng, q_in, q_out);
        let row_first = convex_sum(
            &weights2(a + b, c + d)?,
            &[
                convex_sum(
                    &weights2(a / (a + b), b / (a + b))?,
                    &[x.clone(), y.clone()],
                )?,
                convex_sum(
                    &weights2(c / (c + d), d / (c + d))?,
                    &[z.clone(), w.clone()],
                )?,
            ],
        )?;
        let col_first = convex_sum(
            &weights2(a + c, b + d)?,
            &[
                convex_sum(&weights2(a / (a + c), c / (a + c))?, &[x, z])?,
                convex_sum(&weights2(b / (b + d), d / (b + d))?, &[y, w])?,
            ],
        )?;
        probe.observe(row_first.sup_distance(&col_first), || {
            format!("regrouping: instance {k}, weights [{a}, {b}, {c}, {d}]")
        });
    }
    Ok(probe.finish())
}

/// The bit state with outcome probabilities `(p, q)`: the convex combination
/// `p . inj1 + q . inj2` as a channel from the empty object to one bit.
fn bit_point(p: f64, q: f64) -> Result<Superop, QuantumError> {
    convex_sum(&weights2(p, q)?, &[inj1(), inj2()])
}

/// Joins two bit states `h, k` into a channel `BIT -> BIT (x) BIT` that
/// selects `h` under the first injection and `k` under the second, each
/// tagged with the branch it came from.
fn join_points(h: &Superop, k: &Superop) -> Result<Superop, QuantumError> {
    let id_bit = identity_q(&CqObject::bit());
    let left = compose_q(h, &tensor_q(&inj1(), &id_bit)?)?;
    let right = compose_q(k, &tensor_q(&inj2(), &id_bit)?)?;
    copair_bit(&left, &right)
}

/// Checks the diagrams characterizing bit states as probability pairs:
/// collapsing a bit state with the codiagonal is the identity scalar,
/// swapping injections swaps the pair, the pair `(0, 1)` is exactly the
/// second injection, and regrouping a two-stage bit state through the
/// four-way shuffle isomorphism matches the regrouped pair.
pub fn check_convex2_forward(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("convex2_forward", 1e-10, seed);
    let unit = CqObject::unit();
    let id_unit = identity_q(&unit);
    let codiagonal = copair_bit(&id_unit, &id_unit)?;
    let swap_injections = copair_bit(&inj2(), &inj1())?;

    for k in 0..instances {
        let p: f64 = rng.random_range(0.0..=1.0);
        let q = 1.0 - p;
        let point = bit_point(p, q)?;

        // Codiagonal collapse: [id, id] . <p, q> = id.
        let collapsed = compose_q(&point, &codiagonal)?;
        probe.observe(collapsed.sup_distance(&id_unit), || {
            format!("codiagonal collapse: instance {k}, p = {p}")
        });

        // Injection swap: [inj2, inj1] . <p, q> = <q, p>.
        let swapped = compose_q(&point, &swap_injections)?;
        probe.observe(swapped.sup_distance(&bit_point(q, p)?), || {
            format!("injection swap: instance {k}, p = {p}")
        });

        // Degenerate pair: <0, 1> = inj2.
        probe.observe(bit_point(0.0, 1.0)?.sup_distance(&inj2()), || {
            "degenerate pair <0, 1> differs from the second injection".to_string()
        });

        // Regrouping square: staging (a, b | c, d) then shuffling the two
        // bits matches staging (a, c | b, d) directly.
        let [a, b, c, d] = simplex4(&mut rng);
        let staged_rows = compose_q(
            &bit_point(a + b, c + d)?,
            &join_points(
                &bit_point(a / (a + b), b / (a + b))?,
                &bit_point(c / (c + d), d / (c + d))?,
            )?,
        )?;
        let shuffle = permute_wires(staged_rows.cod(), &[1, 0])?;
        let staged_cols = compose_q(
            &bit_point(a + c, b + d)?,
            &join_points(
                &bit_point(a / (a + c), c / (a + c))?,
                &bit_point(b / (b + d), d / (b + d))?,
            )?,
        )?;
        probe.observe(
            compose_q(&staged_rows, &shuffle)?.sup_distance(&staged_cols),
            || format!("regrouping square: instance {k}, weights [{a}, {b}, {c}, {d}]"),
        );
    }
    Ok(probe.finish())
}

/// Checks that a convex combination of channels factors through a bit state:
/// tensoring the input with `<p, q>`, moving the bit to the front, and
/// branching on it with the copairing of the summands reproduces the
/// combination itself.
pub fn check_convex2_backward(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("convex2_backward", 1e-10, seed);
    for k in 0..instances {
        let q_in = rng.random_range(0..=2);
        let q_out = rng.random_range(0..=2);
        let f = random_cptp(&mut rng, q_in, q_out);
        let g = random_cptp(&mut rng, q_in, q_out);
        let p: f64 = rng.random_range(0.0..=1.0);
        let q = 1.0 - p;

        let deviation = backward_composite_deviation(&f, &g, p, q)?;
        probe.observe(deviation, || {
            format!("factoring through a bit: instance {k}, p = {p}, {q_in} -> {q_out} qubits")
        });
    }
    Ok(probe.finish())
}

/// Builds the five-step factoring composite for `p.f + q.g` and returns its
/// sup-distance from the direct convex combination.
fn backward_composite_deviation(f: &Superop, g: &Superop, p: f64, q: f64) -> Result<f64, LawError> {
    // A -> A (x) BIT: adjoin the bit state (the unit isomorphisms on either
    // side are literal identities in this presentation).
    let adjoin = tensor_q(&identity_q(f.dom()), &bit_point(p, q)?)?;
    // A (x) BIT -> BIT (x) A: distribute by moving the bit to the front.
    let n = f.dom().wires().len();
    let mut targets: Vec<usize> = (1..=n).collect();
    targets.push(0);
    let to_front = permute_wires(adjoin.cod(), &targets)?;
    // BIT (x) A -> B: branch on the bit.
    let branch = copair_bit(f, g)?;
    let composite = compose_q(&compose_q(&adjoin, &to_front)?, &branch)?;
    let direct = convex_sum(&weights2(p, q)?, &[f.clone(), g.clone()])?;
    Ok(composite.sup_distance(&direct))
}

/// Checks that the two embeddings into execution maps agree on circuits:
/// taking a circuit to its element and then to an execution map is the same
/// map as interpreting it and embedding the channel. The two sides must be
/// bitwise identical (deviation exactly 0).
pub fn check_condition_f(
    circuits: usize,
    max_wires: usize,
    max_gates: usize,
    seed: u64,
) -> Result<LawReport, LawError> {
    let (sig, gi) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("condition_f", 0.0, seed);

    let mut fixed = vec![Circuit::identity(WireObj::new(vec![]))];
    fixed.push(Circuit::identity(WireObj::new(vec![WireType::Qubit])));
    fixed.push(Circuit::identity(WireObj::new(vec![
        WireType::Bit,
        WireType::Qubit,
    ])));
    for c in fixed
        .into_iter()
        .chain((0..circuits).map(|_| random_circuit(&sig, &mut rng, max_wires, max_gates)))
    {
        let via_element = eta_E(&embed_psi(&gi, &c)?);
        let via_channel = embed_phi(interpret_circuit(&gi, &c)?);
        probe.observe(via_element.sup_distance(&via_channel), || {
            format!("embedding square differs on circuit {}", c.to_json())
        });
    }
    Ok(probe.finish())
}

/// Checks the single-bit lifting triangle for both bit values: preparing a
/// known bit and immediately lifting it yields exactly one branch with
/// probability one, the matching parameter, and a trace whose fresh
/// interpretation reproduces the branch data on the nose.
pub fn check_dynlift_triangle() -> Result<LawReport, LawError> {
    dynlift_triangle_run(false)
}

/// Shared body for [`check_dynlift_triangle`] and its mutation: when
/// `swap_injections` is set, the branch is prepared with the *opposite* bit,
/// which must make the check fail.
fn dynlift_triangle_run(swap_injections: bool) -> Result<LawReport, LawError> {
    let (sig, gi) = GateInterp::stock();
    let law = if swap_injections {
        "dynlift_triangle[mutated:swap_init_injections]"
    } else {
        "dynlift_triangle"
    };
    let mut probe = Probe::new(law, 0.0, 0);
    for expect in [false, true] {
        let prepared = if swap_injections { !expect } else { expect };
        let element = init_map(&gi, &sig, prepared)?;
        let start = Branch::from_element(&element, &["w"])?;
        let lifted = dyn_lift(&Computation::single(start), "w")?;

        if lifted.branches().len() != 1 {
            probe.observe(1.0, || {
                format!(
                    "lifting a prepared {expect} split into {} branches",
                    lifted.branches().len()
                )
            });
            continue;
        }
        let branch = &lifted.branches()[0];
        probe.observe((branch.prob - 1.0).abs(), || {
            format!(
                "lifting a prepared {expect} had probability {}",
                branch.prob
            )
        });
        probe.observe(if branch.params == [expect] { 0.0 } else { 1.0 }, || {
            format!(
                "lifting a prepared {expect} recorded parameters {:?}",
                branch.params
            )
        });
        let consistency = crate::exec::branch_consistency_deviation(&gi, branch)?;
        probe.observe(consistency, || {
            format!("lifted branch for {expect} disagrees with its trace by {consistency}")
        });
    }
    Ok(probe.finish())
}

/// Checks that composition of execution maps is bilinear over convex
/// combinations: mixing before or after composing (on either side) gives
/// the same map.
pub fn check_kleisli_bilinearity(triples: usize, seed: u64) -> Result<LawReport, LawError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("kleisli_bilinearity", 1e-12, seed);
    for k in 0..triples {
        let (qa, qb, qc, qd) = (
            rng.random_range(0..=1),
            rng.random_range(0..=2),
            rng.random_range(0..=2),
            rng.random_range(0..=1),
        );
        let e = embed_phi(random_cptp(&mut rng, qa, qb));
        let f = embed_phi(random_cptp(&mut rng, qb, qc));
        let g = embed_phi(random_cptp(&mut rng, qb, qc));
        let h = embed_phi(random_cptp(&mut rng, qc, qd));
        let p: f64 = rng.random_range(0.0..=1.0);
        let ws = weights2(p, 1.0 - p)?;
        let mixed = kleisli_convex(&ws, &[f.clone(), g.clone()])?;

        let pre_mixed = kleisli_compose(&e, &mixed)?;
        let pre_split = kleisli_convex(&ws, &[kleisli_compose(&e, &f)?, kleisli_compose(&e, &g)?])?;
        probe.observe(pre_mixed.sup_distance(&pre_split), || {
            format!("precomposition: instance {k}, p = {p}, qubits {qa}/{qb}/{qc}")
        });

        let post_mixed = kleisli_compose(&mixed, &h)?;
        let post_split =
            kleisli_convex(&ws, &[kleisli_compose(&f, &h)?, kleisli_compose(&g, &h)?])?;
        probe.observe(post_mixed.sup_distance(&post_split), || {
            format!("postcomposition: instance {k}, p = {p}, qubits {qb}/{qc}/{qd}")
        });
    }
    Ok(probe.finish())
}

/// Checks that boxing an element and unboxing it returns the same element:
/// the circuits agree up to canonical form and the channels agree in sup
/// norm.
pub fn check_box_unbox(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    let (sig, gi) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("box_unbox", 1e-10, seed);
    for k in 0..instances {
        let c = random_circuit(&sig, &mut rng, 3, 6);
        let element = element_of(&gi, &c)?;
        let reopened = unbox(&box_element(&gi, &element)?);
        probe.observe(
            if canonically_equal(reopened.circuit(), element.circuit()) {
                0.0
            } else {
                1.0
            },
            || {
                format!(
                    "instance {k}: unboxed circuit not canonically equal to {}",
                    c.to_json()
                )
            },
        );
        probe.observe(reopened.op().sup_distance(element.op()), || {
            format!(
                "instance {k}: unboxed channel drifted for circuit {}",
                c.to_json()
            )
        });
    }
    Ok(probe.finish())
}

/// Checks that circuit interpretation is a symmetric monoidal functor on
/// random instances: identities, composition, tensor, and symmetries all
/// match their channel-level counterparts.
#[allow(non_snake_case)]
pub fn check_functor_J(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    functor_run(instances, seed, false)
}

/// Shared body for [`check_functor_J`] and its mutation: when
/// `reverse_compose` is set, the channel-level composite is built the wrong
/// way round, which must make the check fail.
fn functor_run(instances: usize, seed: u64, reverse_compose: bool) -> Result<LawReport, LawError> {
    let (sig, gi) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let law = if reverse_compose {
        "functor_j[mutated:reverse_compose]"
    } else {
        "functor_j"
    };
    let mut probe = Probe::new(law, 1e-10, seed);

    // How far the (possibly mutated) channel composite is from the
    // interpreted composite; a boundary mismatch counts as a full miss.
    let mut composition_deviation = |f: &Circuit, g: &Circuit| -> Result<(), LawError> {
        let whole = interpret_circuit(&gi, &f.compose(g)?)?;
        let jf = interpret_circuit(&gi, f)?;
        let jg = interpret_circuit(&gi, g)?;
        let stitched = if reverse_compose {
            compose_q(&jg, &jf)
        } else {
            compose_q(&jf, &jg)
        };
        let deviation = match stitched {
            Ok(op) => whole.sup_distance(&op),
            Err(_) => 1.0,
        };
        probe.observe(deviation, || {
            format!(
                "composition: J(f;g) vs stitched channels for f = {}",
                f.to_json()
            )
        });
        Ok(())
    };

    // A deterministic composable pair first, so the mutated run fails even
    // if the random draws happen to commute.
    let h = Circuit::lift_gate(&sig, "H")?;
    let x = Circuit::lift_gate(&sig, "X")?;
    composition_deviation(&h, &x)?;

    for _ in 0..instances {
        let f = random_circuit(&sig, &mut rng, 3, 5);
        let g = random_extension(&sig, &mut rng, f.cod().clone(), 3, 5);
        composition_deviation(&f, &g)?;
    }

    if !reverse_compose {
        for k in 0..instances {
            // Tensor: interpreting a side-by-side circuit matches the tensor
            // of the interpretations.
            let f = random_circuit(&sig, &mut rng, 2, 4);
            let g = random_circuit(&sig, &mut rng, 2, 4);
            let whole = interpret_circuit(&gi, &f.tensor(&g))?;
            let split = tensor_q(&interpret_circuit(&gi, &f)?, &interpret_circuit(&gi, &g)?)?;
            probe.observe(whole.sup_distance(&split), || {
                format!("tensor: instance {k}, f = {}", f.to_json())
            });

            // Identity: J(id) is the identity channel.
            let obj = random_object(&mut rng, 3);
            let j_id = interpret_circuit(&gi, &Circuit::identity(obj.clone()))?;
            probe.observe(j_id.sup_distance(&identity_q(&wire_object(&obj)?)), || {
                format!("identity: instance {k} on {:?}", obj.types())
            });

            // Symmetry: J(swap) is the wire permutation channel.
            let a = random_object(&mut rng, 2);
            let b = random_object(&mut rng, 2);
            let j_swap = interpret_circuit(&gi, &Circuit::symmetry(&a, &b))?;
            let targets: Vec<usize> = (0..a.len())
                .map(|i| b.len() + i)
                .chain(0..b.len())
                .collect();
            let direct = permute_wires(&wire_object(&a.tensor(&b))?, &targets)?;
            probe.observe(j_swap.sup_distance(&direct), || {
                format!(
                    "symmetry: instance {k} on {:?} | {:?}",
                    a.types(),
                    b.types()
                )
            });
        }
    }
    Ok(probe.finish())
}

fn random_object(rng: &mut impl Rng, max_wires: usize) -> WireObj {
    let len = rng.random_range(0..=max_wires);
    WireObj::new(
        (0..len)
            .map(|_| {
                if rng.random_bool(0.5) {
                    WireType::Bit
                } else {
                    WireType::Qubit
                }
            })
            .collect::<Vec<_>>(),
    )
}

/// Every wire object with at most `max_wires` wires, over both wire types.
fn all_objects(max_wires: usize) -> Vec<WireObj> {
    let mut out = vec![WireObj::new(vec![])];
    let mut layer = vec![vec![]];
    for _ in 0..max_wires {
        let mut next = Vec::new();
        for base in &layer {
            for t in [WireType::Bit, WireType::Qubit] {
                let mut types: Vec<WireType> = base.clone();
                types.push(t);
                out.push(WireObj::new(types.clone()));
                next.push(types);
            }
        }
        layer = next;
    }
    out
}

/// Checks that the circuit category is *strictly* monoidal: identities,
/// unitors, and associators are literal equalities of circuits, symmetries
/// are involutive and satisfy the hexagon on the nose, and naturality and
/// interchange hold up to canonical form.
pub fn check_coherence(max_wires: usize) -> Result<LawReport, LawError> {
    let (sig, _) = GateInterp::stock();
    let mut probe = Probe::new("coherence", 0.0, 0);
    let objects = all_objects(max_wires);
    let unit = WireObj::new(vec![]);

    for a in &objects {
        // Tensoring with the unit object changes nothing, literally.
        let id_a = Circuit::identity(a.clone());
        probe.observe(
            circuit_deviation(&id_a.tensor(&Circuit::identity(unit.clone())), &id_a),
            || format!("right unitor on identity at {:?}", a.types()),
        );
        probe.observe(
            circuit_deviation(&Circuit::identity(unit.clone()).tensor(&id_a), &id_a),
            || format!("left unitor on identity at {:?}", a.types()),
        );
        // Swapping with the unit object is the identity.
        probe.observe(
            circuit_deviation(&Circuit::symmetry(a, &unit), &id_a),
            || format!("unit symmetry at {:?}", a.types()),
        );
    }

    for a in &objects {
        for b in &objects {
            // Identities tensor to identities.
            let joint = Circuit::identity(a.clone()).tensor(&Circuit::identity(b.clone()));
            probe.observe(
                circuit_deviation(&joint, &Circuit::identity(a.tensor(b))),
                || format!("identity tensor at {:?} | {:?}", a.types(), b.types()),
            );
            // Symmetries are involutive.
            let round_trip = Circuit::symmetry(a, b).compose(&Circuit::symmetry(b, a))?;
            probe.observe(
                circuit_deviation(&round_trip, &Circuit::identity(a.tensor(b))),
                || format!("symmetry involution at {:?} | {:?}", a.types(), b.types()),
            );
        }
    }

    for a in &objects {
        for b in &objects {
            for c in &objects {
                // Hexagon: swapping past a tensor equals swapping past each
                // factor in turn. Strictness makes it a literal equality.
                let direct = Circuit::symmetry(a, &b.tensor(c));
                let stepwise = Circuit::symmetry(a, b)
                    .tensor(&Circuit::identity(c.clone()))
                    .compose(&Circuit::identity(b.clone()).tensor(&Circuit::symmetry(a, c)))?;
                probe.observe(circuit_deviation(&direct, &stepwise), || {
                    format!(
                        "hexagon at {:?} | {:?} | {:?}",
                        a.types(),
                        b.types(),
                        c.types()
                    )
                });
            }
        }
    }

    // Gate-level checks: unitors on single gates, naturality of symmetry,
    // and interchange, the latter two up to canonical form.
    let decls: Vec<_> = sig.decls().collect();
    for d in &decls {
        let f = Circuit::lift_gate(&sig, &d.name)?;
        probe.observe(
            circuit_deviation(&f.tensor(&Circuit::identity(unit.clone())), &f),
            || format!("right unitor on gate {}", d.name),
        );
        probe.observe(
            circuit_deviation(&Circuit::identity(unit.clone()).tensor(&f), &f),
            || format!("left unitor on gate {}", d.name),
        );
    }
    for d1 in &decls {
        for d2 in &decls {
            let f = Circuit::lift_gate(&sig, &d1.name)?;
            let g = Circuit::lift_gate(&sig, &d2.name)?;
            // Naturality: running the gates and then swapping equals
            // swapping and then running them on the other side.
            let before = f.tensor(&g).compose(&Circuit::symmetry(f.cod(), g.cod()))?;
            let after = Circuit::symmetry(f.dom(), g.dom()).compose(&g.tensor(&f))?;
            probe.observe(
                if canonically_equal(&before, &after) {
                    0.0
                } else {
                    1.0
                },
                || format!("symmetry naturality for {} | {}", d1.name, d2.name),
            );
        }
    }
    // Interchange on qubit-unary gates: sequencing then tensoring equals
    // tensoring then sequencing.
    let unary = ["H", "X", "Z", "S", "Tg"];
    for a in unary {
        for b in unary {
            let f = Circuit::lift_gate(&sig, a)?;
            let f2 = Circuit::lift_gate(&sig, b)?;
            let g = Circuit::lift_gate(&sig, b)?;
            let g2 = Circuit::lift_gate(&sig, a)?;
            let seq_first = f.compose(&f2)?.tensor(&g.compose(&g2)?);
            let tensor_first = f.tensor(&g).compose(&f2.tensor(&g2))?;
            probe.observe(
                if canonically_equal(&seq_first, &tensor_first) {
                    0.0
                } else {
                    1.0
                },
                || format!("interchange for {a};{b} | {b};{a}"),
            );
        }
    }

    Ok(probe.finish())
}

/// Registry names for [`check_by_name`], in the order [`run_all`] runs them.
pub fn law_names() -> Vec<String> {
    [
        "biset_monad",
        "convex_axioms",
        "convex2_forward",
        "convex2_backward",
        "condition_f",
        "dynlift_triangle",
        "kleisli_bilinearity",
        "box_unbox",
        "functor_j",
        "coherence",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Runs the suite registered under `name` with sizes from `config`.
pub fn check_by_name(name: &str, config: &LawConfig) -> Result<LawReport, LawError> {
    match name {
        "biset_monad" => check_biset_monad(config.max_carrier),
        "convex_axioms" => check_convex_axioms(config.convex_instances, config.seed),
        "convex2_forward" => check_convex2_forward(config.convex2_forward_instances, config.seed),
        "convex2_backward" => {
            check_convex2_backward(config.convex2_backward_instances, config.seed)
        }
        "condition_f" => check_condition_f(
            config.condition_f_circuits,
            config.condition_f_max_wires,
            config.condition_f_max_gates,
            config.seed,
        ),
        "dynlift_triangle" => check_dynlift_triangle(),
        "kleisli_bilinearity" => check_kleisli_bilinearity(config.bilinearity_triples, config.seed),
        "box_unbox" => check_box_unbox(config.box_unbox_instances, config.seed),
        "functor_j" => check_functor_J(config.functor_instances, config.seed),
        "coherence" => check_coherence(config.coherence_max_wires),
        other => Err(LawError::UnknownLaw(other.to_string())),
    }
}

/// Runs every registered suite with sizes from `config`, in registry order.
pub fn run_all(config: &LawConfig) -> Result<Vec<LawReport>, LawError> {
    law_names()
        .iter()
        .map(|n| check_by_name(n, config))
        .collect()
}

/// A deliberate fault injected into one suite to demonstrate the harness
/// can fail. Every mutation's report must come back with `pass == false`;
/// [`Mutation::check`] runs the targeted suite with the fault in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Replaces the strength's running stage with a map that forgets where
    /// the first component was heading, collapsing it to an arbitrary
    /// finished label instead of its leg target. Breaks the strength-unit
    /// diagram of `biset_monad`.
    CorruptBisetStrength,
    /// Prepares the *opposite* bit before lifting, so the recorded
    /// parameter contradicts the prepared value. Breaks `dynlift_triangle`.
    SwapInitInjections,
    /// Builds the bit state for a convex combination with its weights
    /// swapped, so the factored channel favors the wrong summand. Breaks
    /// `convex2_backward`.
    SkewConvexWeights,
    /// Stitches interpreted channels in the wrong order when checking
    /// composition. Breaks `functor_j`.
    ReverseComposeInJ,
    /// Nudges one matrix entry of the unboxed channel, so the round trip no
    /// longer returns the element it started from. Breaks `box_unbox`.
    PerturbUnbox,
}

impl Mutation {
    /// All documented mutations, in a fixed order.
    pub fn all() -> [Mutation; 5] {
        [
            Mutation::CorruptBisetStrength,
            Mutation::SwapInitInjections,
            Mutation::SkewConvexWeights,
            Mutation::ReverseComposeInJ,
            Mutation::PerturbUnbox,
        ]
    }

    /// Registry name of the suite this mutation is designed to break.
    pub fn target_law(&self) -> &'static str {
        match self {
            Mutation::CorruptBisetStrength => "biset_monad",
            Mutation::SwapInitInjections => "dynlift_triangle",
            Mutation::SkewConvexWeights => "convex2_backward",
            Mutation::ReverseComposeInJ => "functor_j",
            Mutation::PerturbUnbox => "box_unbox",
        }
    }

    /// One-line description of the injected fault.
    pub fn description(&self) -> &'static str {
        match self {
            Mutation::CorruptBisetStrength => "strength forgets the leg of its first component",
            Mutation::SwapInitInjections => "bit preparation swaps false and true",
            Mutation::SkewConvexWeights => "factoring bit state swaps its weights",
            Mutation::ReverseComposeInJ => "channel composition stitched in reverse",
            Mutation::PerturbUnbox => "unboxed channel perturbed by 1e-6",
        }
    }

    /// Runs the targeted suite with the fault injected. The returned report
    /// must fail; a passing report means the targeted check is toothless.
    pub fn check(&self, config: &LawConfig) -> Result<LawReport, LawError> {
        match self {
            Mutation::CorruptBisetStrength => corrupted_strength_run(config.max_carrier.min(2)),
            Mutation::SwapInitInjections => dynlift_triangle_run(true),
            Mutation::SkewConvexWeights => skewed_backward_run(20, config.seed),
            Mutation::ReverseComposeInJ => {
                functor_run(config.functor_instances.min(20), config.seed, true)
            }
            Mutation::PerturbUnbox => perturbed_unbox_run(20, config.seed),
        }
    }
}

/// The strength-unit sweep with a corrupted strength: the running stage
/// sends every pair to an arbitrary finished label of the first factor
/// instead of the leg target.
fn corrupted_strength_run(max_carrier: usize) -> Result<LawReport, LawError> {
    let pool = enumerate_bisets(max_carrier);
    let mut probe = Probe::new("biset_monad[mutated:corrupt_strength]", 0.0, 0);
    for x in &pool {
        for y in &pool {
            let honest = strength_t(x, y);
            let corrupted = match x.carrier0().iter().next().cloned() {
                Some(anchor) => {
                    BisetMap::from_fns(honest.src(), honest.dst(), Label::clone, |l| match l {
                        Label::Pair(_, b) => Label::pair(anchor.clone(), (**b).clone()),
                        other => unreachable!("product carrier holds pairs, found {other}"),
                    })
                }
                None => honest,
            };
            let lhs = compose(&product_map(&identity(x), &unit_eta(y)), &corrupted)?;
            probe.observe(map_deviation(&lhs, &unit_eta(&product(x, y))), || {
                format!(
                    "strength unit at X = {}, Y = {}",
                    biset_desc(x),
                    biset_desc(y)
                )
            });
        }
    }
    Ok(probe.finish())
}

/// The backward factoring sweep with the bit state's weights swapped, on a
/// channel pair far enough apart that the skew must show.
fn skewed_backward_run(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("convex2_backward[mutated:skew_weights]", 1e-10, seed);
    let f = identity_q(&CqObject::qubit());
    let g = unitary_channel(&gates::x())?;
    for k in 0..instances {
        // Keep the weights visibly asymmetric so the swap cannot hide.
        let p: f64 = rng.random_range(0.0..=0.35);
        let q = 1.0 - p;

        let adjoin = tensor_q(&identity_q(f.dom()), &bit_point(q, p)?)?;
        let to_front = permute_wires(adjoin.cod(), &[1, 0])?;
        let branch = copair_bit(&f, &g)?;
        let composite = compose_q(&compose_q(&adjoin, &to_front)?, &branch)?;
        let direct = convex_sum(&weights2(p, q)?, &[f.clone(), g.clone()])?;
        probe.observe(composite.sup_distance(&direct), || {
            format!("skewed factoring: instance {k}, p = {p}")
        });
    }
    Ok(probe.finish())
}

/// The boxing round-trip with the unboxed channel perturbed in one entry.
fn perturbed_unbox_run(instances: usize, seed: u64) -> Result<LawReport, LawError> {
    let (sig, gi) = GateInterp::stock();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = Probe::new("box_unbox[mutated:perturb_unbox]", 1e-10, seed);
    for k in 0..instances {
        let c = random_circuit(&sig, &mut rng, 3, 6);
        let element = element_of(&gi, &c)?;
        let reopened = unbox(&box_element(&gi, &element)?);
        let mut mat = reopened.op().mat().clone();
        mat[(0, 0)] += 1e-6;
        let perturbed = Superop::new(
            reopened.op().dom().clone(),
            reopened.op().cod().clone(),
            mat,
        )?;
        probe.observe(perturbed.sup_distance(element.op()), || {
            format!("instance {k}: perturbed unbox for circuit {}", c.to_json())
        });
    }
    Ok(probe.finish())
}
