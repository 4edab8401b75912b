//! Two-stage sets and the stage-collapsing monad.
//!
//! A [`Biset`] is a triple `(X0, X1, f)` of two finite carriers and a *leg*
//! `f: X1 -> X0`. Read `X1` as labels available while a computation is still
//! running (parameters) and `X0` as labels available once it has finished
//! (states); the leg says which finished label each running label becomes.
//! A [`BisetMap`] is a pair of functions, one per stage, that commutes with
//! the legs.
//!
//! The category of bisets has finite products, coproducts, and exponentials
//! (all computed here by direct enumeration), and carries a strong monad
//! `T(X0, X1, f) = (X0, X0, id)` that forgets the running stage and restarts
//! it from the finished one. Its unit re-indexes a running label along the
//! leg; its multiplication is the identity. [`strength_t`] and
//! [`costrength_s`] let the monad slide past products, and the two slides
//! agree after collapsing — the monad is commutative. Every one of these
//! facts is a finite equation between maps and is checked exhaustively in
//! the law harness at small carrier sizes.
//!
//! Everything here is exact: carriers are ordered label sets, maps are
//! lookup tables, and equality of maps is literal equality of tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Default cap on carrier sizes accepted by [`exponential`]: the carrier of
/// an exponential grows like `|B0|^|A0|`, so unguarded calls could blow up.
pub const DEFAULT_CARRIER_LIMIT: usize = 4;

/// Errors from biset construction and map validation.
#[derive(Debug, Error)]
pub enum BisetError {
    /// A map's lookup table is not total on its stated domain, lands outside
    /// its stated codomain, or two maps are composed at different objects.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    /// A carrier exceeds the size limit for an enumeration-backed operation.
    #[error("carrier of size {size} exceeds limit {limit}")]
    CarrierTooLarge { size: usize, limit: usize },
}

/// Element labels for biset carriers.
///
/// Structured variants keep the elements of derived objects self-describing:
/// a pair in a product remembers its components, an element of a coproduct
/// remembers its side, and an element of an exponential carries the actual
/// lookup table(s) of the function it denotes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// The unique element of the terminal biset.
    Unit,
    /// A named atom.
    Atom(String),
    /// An element of a product carrier.
    Pair(Box<Label>, Box<Label>),
    /// A left injection into a coproduct carrier.
    Inl(Box<Label>),
    /// A right injection into a coproduct carrier.
    Inr(Box<Label>),
    /// The graph of a function, sorted by key; used by exponentials.
    Table(Vec<(Label, Label)>),
}

impl Label {
    /// Named atom, the workhorse constructor for concrete carriers.
    pub fn atom(name: impl Into<String>) -> Self {
        Label::Atom(name.into())
    }

    /// Pair label for product carriers.
    pub fn pair(a: Label, b: Label) -> Self {
        Label::Pair(Box::new(a), Box::new(b))
    }

    /// Graph-of-function label for exponential carriers.
    pub fn table(map: &BTreeMap<Label, Label>) -> Self {
        Label::Table(map.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit => write!(f, "*"),
            Label::Atom(s) => write!(f, "{s}"),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
            Label::Inl(x) => write!(f, "inl({x})"),
            Label::Inr(x) => write!(f, "inr({x})"),
            Label::Table(rows) => {
                write!(f, "{{")?;
                for (i, (k, v)) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}->{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// A two-stage set: carriers `X0`, `X1` and a total leg `X1 -> X0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biset {
    carrier0: BTreeSet<Label>,
    carrier1: BTreeSet<Label>,
    leg: BTreeMap<Label, Label>,
}

impl Biset {
    /// Builds a biset, checking that `leg` is a total function
    /// `carrier1 -> carrier0`.
    pub fn new(
        carrier0: impl IntoIterator<Item = Label>,
        carrier1: impl IntoIterator<Item = Label>,
        leg: impl IntoIterator<Item = (Label, Label)>,
    ) -> Result<Self, BisetError> {
        let carrier0: BTreeSet<Label> = carrier0.into_iter().collect();
        let carrier1: BTreeSet<Label> = carrier1.into_iter().collect();
        let leg: BTreeMap<Label, Label> = leg.into_iter().collect();
        check_total(&leg, &carrier1, &carrier0, "leg")?;
        Ok(Biset {
            carrier0,
            carrier1,
            leg,
        })
    }

    /// The empty biset `(0, 0)`, initial for maps out of it.
    pub fn initial() -> Self {
        Biset {
            carrier0: BTreeSet::new(),
            carrier1: BTreeSet::new(),
            leg: BTreeMap::new(),
        }
    }

    /// The one-point biset `(1, 1, id)`, terminal for maps into it.
    pub fn terminal() -> Self {
        let one: BTreeSet<Label> = [Label::Unit].into();
        let leg = [(Label::Unit, Label::Unit)].into();
        Biset {
            carrier0: one.clone(),
            carrier1: one,
            leg,
        }
    }

    /// Convenience constructor over numbered atoms: carrier0 is
    /// `x0..x{n0-1}`, carrier1 is `a0..a{n1-1}`, and `leg[i]` gives the
    /// carrier0 index that `a{i}` maps to.
    pub fn atoms(n0: usize, leg: &[usize]) -> Result<Self, BisetError> {
        let carrier0: Vec<Label> = (0..n0).map(|i| Label::atom(format!("x{i}"))).collect();
        let carrier1: Vec<Label> = (0..leg.len())
            .map(|i| Label::atom(format!("a{i}")))
            .collect();
        let mut table = Vec::new();
        for (i, &j) in leg.iter().enumerate() {
            let target = carrier0.get(j).cloned().ok_or_else(|| {
                BisetError::DomainMismatch(format!(
                    "leg index {j} out of range for carrier of {n0}"
                ))
            })?;
            table.push((carrier1[i].clone(), target));
        }
        Biset::new(carrier0, carrier1, table)
    }

    /// Finished-stage carrier.
    pub fn carrier0(&self) -> &BTreeSet<Label> {
        &self.carrier0
    }

    /// Running-stage carrier.
    pub fn carrier1(&self) -> &BTreeSet<Label> {
        &self.carrier1
    }

    /// The leg as a lookup table.
    pub fn leg(&self) -> &BTreeMap<Label, Label> {
        &self.leg
    }

    /// Leg applied to one running-stage label.
    pub fn leg_of(&self, x: &Label) -> Option<&Label> {
        self.leg.get(x)
    }
}

/// A stage-wise map of bisets: `h0` on finished labels, `h1` on running
/// labels. It is *valid* when the square with the two legs commutes; see
/// [`validate_map`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisetMap {
    src: Biset,
    dst: Biset,
    h0: BTreeMap<Label, Label>,
    h1: BTreeMap<Label, Label>,
}

impl BisetMap {
    /// Packs the data of a map without checking anything; run
    /// [`validate_map`] to test totality and the commuting square.
    pub fn new(
        src: Biset,
        dst: Biset,
        h0: impl IntoIterator<Item = (Label, Label)>,
        h1: impl IntoIterator<Item = (Label, Label)>,
    ) -> Self {
        BisetMap {
            src,
            dst,
            h0: h0.into_iter().collect(),
            h1: h1.into_iter().collect(),
        }
    }

    /// Builds a map by applying stage functions to every source label.
    pub fn from_fns(
        src: &Biset,
        dst: &Biset,
        f0: impl Fn(&Label) -> Label,
        f1: impl Fn(&Label) -> Label,
    ) -> Self {
        let h0 = src.carrier0.iter().map(|x| (x.clone(), f0(x))).collect();
        let h1 = src.carrier1.iter().map(|x| (x.clone(), f1(x))).collect();
        BisetMap {
            src: src.clone(),
            dst: dst.clone(),
            h0,
            h1,
        }
    }

    pub fn src(&self) -> &Biset {
        &self.src
    }

    pub fn dst(&self) -> &Biset {
        &self.dst
    }

    /// Finished-stage component.
    pub fn h0(&self) -> &BTreeMap<Label, Label> {
        &self.h0
    }

    /// Running-stage component.
    pub fn h1(&self) -> &BTreeMap<Label, Label> {
        &self.h1
    }

    /// Totality and the commuting square; method form of [`validate_map`].
    pub fn validate(&self) -> Result<bool, BisetError> {
        validate_map(self)
    }
}

fn check_total(
    table: &BTreeMap<Label, Label>,
    dom: &BTreeSet<Label>,
    cod: &BTreeSet<Label>,
    what: &str,
) -> Result<(), BisetError> {
    if table.len() != dom.len() || !table.keys().all(|k| dom.contains(k)) {
        return Err(BisetError::DomainMismatch(format!(
            "{what} is not total: defined on {} of {} labels",
            table.keys().filter(|k| dom.contains(k)).count(),
            dom.len()
        )));
    }
    for (k, v) in table {
        if !cod.contains(v) {
            return Err(BisetError::DomainMismatch(format!(
                "{what} sends {k} to {v}, outside the codomain"
            )));
        }
    }
    Ok(())
}

/// Checks that a map's two components are total with the right codomains
/// (errors otherwise) and returns whether the leg square commutes:
/// `dst.leg(h1(x)) == h0(src.leg(x))` for every running label `x`.
pub fn validate_map(m: &BisetMap) -> Result<bool, BisetError> {
    check_total(&m.h0, &m.src.carrier0, &m.dst.carrier0, "h0")?;
    check_total(&m.h1, &m.src.carrier1, &m.dst.carrier1, "h1")?;
    for (x1, x0) in &m.src.leg {
        let via_h1 = &m.dst.leg[&m.h1[x1]];
        let via_h0 = &m.h0[x0];
        if via_h1 != via_h0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Identity map on a biset.
pub fn identity(a: &Biset) -> BisetMap {
    BisetMap::from_fns(a, a, Label::clone, Label::clone)
}

/// Stage-wise composition `g . f` for `f: A -> B`, `g: B -> C`.
pub fn compose(f: &BisetMap, g: &BisetMap) -> Result<BisetMap, BisetError> {
    if f.dst != g.src {
        return Err(BisetError::DomainMismatch(
            "compose: middle objects differ".to_string(),
        ));
    }
    let h0 =
        f.h0.iter()
            .map(|(k, v)| (k.clone(), g.h0[v].clone()))
            .collect();
    let h1 =
        f.h1.iter()
            .map(|(k, v)| (k.clone(), g.h1[v].clone()))
            .collect();
    Ok(BisetMap {
        src: f.src.clone(),
        dst: g.dst.clone(),
        h0,
        h1,
    })
}

/// Binary product: carriers of pairs, leg acting component-wise.
pub fn product(a: &Biset, b: &Biset) -> Biset {
    let carrier0: BTreeSet<Label> = a
        .carrier0
        .iter()
        .flat_map(|x| {
            b.carrier0
                .iter()
                .map(move |y| Label::pair(x.clone(), y.clone()))
        })
        .collect();
    let carrier1: BTreeSet<Label> = a
        .carrier1
        .iter()
        .flat_map(|x| {
            b.carrier1
                .iter()
                .map(move |y| Label::pair(x.clone(), y.clone()))
        })
        .collect();
    let leg = a
        .carrier1
        .iter()
        .flat_map(|x| {
            b.carrier1.iter().map(move |y| {
                (
                    Label::pair(x.clone(), y.clone()),
                    Label::pair(a.leg[x].clone(), b.leg[y].clone()),
                )
            })
        })
        .collect();
    Biset {
        carrier0,
        carrier1,
        leg,
    }
}

/// Product of maps, `f x g`, acting component-wise on pair labels.
pub fn product_map(f: &BisetMap, g: &BisetMap) -> BisetMap {
    let src = product(&f.src, &g.src);
    let dst = product(&f.dst, &g.dst);
    let split = |l: &Label| -> (Label, Label) {
        match l {
            Label::Pair(a, b) => ((**a).clone(), (**b).clone()),
            other => unreachable!("product carrier holds pairs, found {other}"),
        }
    };
    BisetMap::from_fns(
        &src,
        &dst,
        |l| {
            let (x, y) = split(l);
            Label::pair(f.h0[&x].clone(), g.h0[&y].clone())
        },
        |l| {
            let (x, y) = split(l);
            Label::pair(f.h1[&x].clone(), g.h1[&y].clone())
        },
    )
}

/// Binary coproduct: disjoint union via `inl`/`inr` labels, leg acting under
/// the injections.
pub fn coproduct(a: &Biset, b: &Biset) -> Biset {
    let inl = |l: &Label| Label::Inl(Box::new(l.clone()));
    let inr = |l: &Label| Label::Inr(Box::new(l.clone()));
    let carrier0: BTreeSet<Label> = a
        .carrier0
        .iter()
        .map(inl)
        .chain(b.carrier0.iter().map(inr))
        .collect();
    let carrier1: BTreeSet<Label> = a
        .carrier1
        .iter()
        .map(inl)
        .chain(b.carrier1.iter().map(inr))
        .collect();
    let leg = a
        .carrier1
        .iter()
        .map(|x| (inl(x), inl(&a.leg[x])))
        .chain(b.carrier1.iter().map(|y| (inr(y), inr(&b.leg[y]))))
        .collect();
    Biset {
        carrier0,
        carrier1,
        leg,
    }
}

/// All functions `dom -> cod` as lookup tables (one empty table if `dom` is
/// empty, none if `cod` is empty but `dom` is not).
pub fn all_functions(dom: &BTreeSet<Label>, cod: &BTreeSet<Label>) -> Vec<BTreeMap<Label, Label>> {
    let keys: Vec<&Label> = dom.iter().collect();
    let vals: Vec<&Label> = cod.iter().collect();
    if keys.is_empty() {
        return vec![BTreeMap::new()];
    }
    if vals.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; keys.len()];
    loop {
        out.push(
            keys.iter()
                .zip(&idx)
                .map(|(k, &i)| ((*k).clone(), vals[i].clone()))
                .collect(),
        );
        // odometer increment over value choices
        let mut pos = 0;
        loop {
            if pos == keys.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < vals.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Every valid map `a -> b`, by enumerating stage functions and filtering
/// through [`validate_map`]. Exponential carriers and the law harness both
/// lean on this.
pub fn hom_set(a: &Biset, b: &Biset) -> Vec<BisetMap> {
    let mut out = Vec::new();
    for h0 in all_functions(&a.carrier0, &b.carrier0) {
        for h1 in all_functions(&a.carrier1, &b.carrier1) {
            let m = BisetMap {
                src: a.clone(),
                dst: b.clone(),
                h0: h0.clone(),
                h1,
            };
            if validate_map(&m).expect("enumerated maps are total") {
                out.push(m);
            }
        }
    }
    out
}

/// Exponential `a => b` with the default carrier cap; see
/// [`exponential_with_limit`].
pub fn exponential(a: &Biset, b: &Biset) -> Result<Biset, BisetError> {
    exponential_with_limit(a, b, DEFAULT_CARRIER_LIMIT)
}

/// Exponential object `a => b`: finished stage is *all* functions between
/// finished carriers, running stage is the valid maps `a -> b`, and the leg
/// projects a map to its finished-stage component. Currying
/// `Hom(P x A, B) ~ Hom(P, A => B)` is checked exhaustively in tests.
///
/// Errors with [`BisetError::CarrierTooLarge`] if any input carrier exceeds
/// `limit`, since the enumeration grows exponentially.
pub fn exponential_with_limit(a: &Biset, b: &Biset, limit: usize) -> Result<Biset, BisetError> {
    for size in [
        a.carrier0.len(),
        a.carrier1.len(),
        b.carrier0.len(),
        b.carrier1.len(),
    ] {
        if size > limit {
            return Err(BisetError::CarrierTooLarge { size, limit });
        }
    }
    let carrier0: BTreeSet<Label> = all_functions(&a.carrier0, &b.carrier0)
        .iter()
        .map(Label::table)
        .collect();
    let maps = hom_set(a, b);
    let mut carrier1 = BTreeSet::new();
    let mut leg = BTreeMap::new();
    for m in &maps {
        let l = Label::pair(Label::table(&m.h0), Label::table(&m.h1));
        leg.insert(l.clone(), Label::table(&m.h0));
        carrier1.insert(l);
    }
    Ok(Biset {
        carrier0,
        carrier1,
        leg,
    })
}

/// The monad on objects: `T(X0, X1, f) = (X0, X0, id)` — forget the running
/// stage and restart it from the finished carrier.
pub fn monad_t(a: &Biset) -> Biset {
    let leg = a.carrier0.iter().map(|x| (x.clone(), x.clone())).collect();
    Biset {
        carrier0: a.carrier0.clone(),
        carrier1: a.carrier0.clone(),
        leg,
    }
}

/// The monad on maps: both stages of `T(m)` act by `m`'s finished-stage
/// component.
pub fn map_t(m: &BisetMap) -> BisetMap {
    BisetMap {
        src: monad_t(&m.src),
        dst: monad_t(&m.dst),
        h0: m.h0.clone(),
        h1: m.h0.clone(),
    }
}

/// Monad unit `A -> T A`: identity on finished labels, the leg on running
/// labels (a running label restarts as the finished label it was heading
/// toward).
pub fn unit_eta(a: &Biset) -> BisetMap {
    BisetMap {
        src: a.clone(),
        dst: monad_t(a),
        h0: a.carrier0.iter().map(|x| (x.clone(), x.clone())).collect(),
        h1: a.leg.clone(),
    }
}

/// Monad multiplication `T T A -> T A`. Since `T T A` and `T A` share the
/// same carriers, both components are identities; the content is in the
/// typing, and the monad laws are checked in the law harness.
pub fn mult_mu(a: &Biset) -> BisetMap {
    let ta = monad_t(a);
    identity(&ta)
}

/// Tensorial strength `A x T B -> T (A x B)`: the finished stage is the
/// identity, and a running pair `(x1, y)` collapses its first component
/// along the leg of `A`.
pub fn strength_t(a: &Biset, b: &Biset) -> BisetMap {
    let src = product(a, &monad_t(b));
    let dst = monad_t(&product(a, b));
    BisetMap::from_fns(&src, &dst, Label::clone, |l| match l {
        Label::Pair(x1, y) => Label::pair(a.leg[x1].clone(), (**y).clone()),
        other => unreachable!("product carrier holds pairs, found {other}"),
    })
}

/// Costrength `T A x B -> T (A x B)`, the mirror image of [`strength_t`]:
/// a running pair collapses its *second* component along the leg of `B`.
pub fn costrength_s(a: &Biset, b: &Biset) -> BisetMap {
    let src = product(&monad_t(a), b);
    let dst = monad_t(&product(a, b));
    BisetMap::from_fns(&src, &dst, Label::clone, |l| match l {
        Label::Pair(x, y1) => Label::pair((**x).clone(), b.leg[y1].clone()),
        other => unreachable!("product carrier holds pairs, found {other}"),
    })
}

/// Every biset whose carriers have at most `max_size` elements, over
/// numbered atom labels. The law harness quantifies over this list.
pub fn enumerate_bisets(max_size: usize) -> Vec<Biset> {
    let mut out = Vec::new();
    for n0 in 0..=max_size {
        for n1 in 0..=max_size {
            if n0 == 0 && n1 > 0 {
                continue; // no total leg into an empty carrier
            }
            let mut leg = vec![0usize; n1];
            'legs: loop {
                out.push(Biset::atoms(n0, &leg).expect("indices in range"));
                // odometer over all n0^n1 leg choices
                let mut pos = 0;
                loop {
                    if pos == n1 {
                        break 'legs;
                    }
                    leg[pos] += 1;
                    if leg[pos] < n0 {
                        break;
                    }
                    leg[pos] = 0;
                    pos += 1;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_one_biset() -> Biset {
        // ({0,1}, {a}, a -> 0) written over atom labels x0, x1 / a0
        Biset::atoms(2, &[0]).unwrap()
    }

    #[test]
    fn identity_is_valid() {
        let a = two_one_biset();
        assert!(validate_map(&identity(&a)).unwrap());
    }

    #[test]
    fn constant_map_to_singleton_is_valid() {
        // src = ({0,1}, {a}, a -> 0), dst = ({x}, {y}, y -> x),
        // h0 constant, h1 constant: the square commutes.
        let src = two_one_biset();
        let dst = Biset::atoms(1, &[0]).unwrap();
        let m = BisetMap::from_fns(&src, &dst, |_| Label::atom("x0"), |_| Label::atom("a0"));
        assert!(validate_map(&m).unwrap());
    }

    #[test]
    fn mismatched_legs_fail_validation() {
        // Same carriers, legs disagree (a -> first element vs a -> second);
        // identity components cannot commute with both.
        let src = Biset::atoms(2, &[0]).unwrap();
        let dst = Biset::atoms(2, &[1]).unwrap();
        let m = BisetMap::from_fns(&src, &dst, Label::clone, Label::clone);
        assert!(!validate_map(&m).unwrap());
    }

    #[test]
    fn non_total_map_is_a_domain_error() {
        let a = two_one_biset();
        let m = BisetMap::new(a.clone(), a, [], []);
        assert!(matches!(m.validate(), Err(BisetError::DomainMismatch(_))));
    }

    #[test]
    fn product_carrier_sizes_multiply() {
        let a = Biset::atoms(2, &[0, 1]).unwrap(); // |A0| = |A1| = 2
        let b = Biset::atoms(3, &[0, 2, 1]).unwrap(); // |B0| = |B1| = 3
        let p = product(&a, &b);
        assert_eq!(p.carrier0().len(), 6);
        assert_eq!(p.carrier1().len(), 6);
    }

    /// Two bisets are isomorphic when some pair of maps composes to the
    /// identity both ways; at test sizes, search the hom sets directly.
    fn exists_iso(a: &Biset, b: &Biset) -> bool {
        let fwd = hom_set(a, b);
        let bwd = hom_set(b, a);
        fwd.iter().any(|f| {
            bwd.iter().any(|g| {
                compose(f, g).unwrap() == identity(a) && compose(g, f).unwrap() == identity(b)
            })
        })
    }

    #[test]
    fn terminal_is_a_product_unit() {
        let a = Biset::atoms(2, &[0, 1]).unwrap();
        assert!(exists_iso(&product(&a, &Biset::terminal()), &a));
    }

    #[test]
    fn initial_is_a_coproduct_unit() {
        let a = Biset::atoms(2, &[1]).unwrap();
        assert!(exists_iso(&coproduct(&a, &Biset::initial()), &a));
    }

    #[test]
    fn exponential_of_running_example() {
        // A = ({0,1}, {a}, a -> 0), B = ({x}, {y}, y -> x): one function
        // between the finished carriers and one valid map, so (1, 1).
        let a = two_one_biset();
        let b = Biset::atoms(1, &[0]).unwrap();
        let e = exponential(&a, &b).unwrap();
        assert_eq!(e.carrier0().len(), 1);
        assert_eq!(e.carrier1().len(), 1);
    }

    #[test]
    fn exponential_contains_identity_element() {
        let a = two_one_biset();
        let e = exponential(&a, &a).unwrap();
        let id = identity(&a);
        let label = Label::pair(Label::table(id.h0()), Label::table(id.h1()));
        assert!(e.carrier1().contains(&label));
        assert_eq!(e.leg_of(&label), Some(&Label::table(id.h0())));
    }

    #[test]
    fn exponential_guards_carrier_size() {
        let big = Biset::atoms(5, &[]).unwrap();
        let one = Biset::terminal();
        assert!(matches!(
            exponential(&big, &one),
            Err(BisetError::CarrierTooLarge { size: 5, limit: 4 })
        ));
    }

    #[test]
    fn currying_bijection_exhaustive_at_size_two() {
        // |Hom(P x A, B)| == |Hom(P, A => B)| for every triple of bisets
        // with carriers of size <= 2 (11 objects, 1331 triples).
        let all = enumerate_bisets(2);
        assert_eq!(all.len(), 11);
        for p in &all {
            for a in &all {
                for b in &all {
                    let lhs = hom_set(&product(p, a), b).len();
                    let rhs = hom_set(p, &exponential(a, b).unwrap()).len();
                    assert_eq!(lhs, rhs, "currying failed at P={p:?} A={a:?} B={b:?}");
                }
            }
        }
    }

    #[test]
    fn unit_reindexes_along_the_leg() {
        // On ({0,1}, {a}, a -> 0) the unit's running component sends a to 0.
        let a = two_one_biset();
        let eta = unit_eta(&a);
        assert!(validate_map(&eta).unwrap());
        assert_eq!(eta.h1()[&Label::atom("a0")], Label::atom("x0"));
    }

    #[test]
    fn monad_components_are_valid_maps() {
        for a in enumerate_bisets(2) {
            assert!(validate_map(&unit_eta(&a)).unwrap());
            assert!(validate_map(&mult_mu(&a)).unwrap());
            for b in enumerate_bisets(2) {
                assert!(validate_map(&strength_t(&a, &b)).unwrap());
                assert!(validate_map(&costrength_s(&a, &b)).unwrap());
            }
        }
    }

    #[test]
    fn unit_laws_hold_at_size_two() {
        for a in enumerate_bisets(2) {
            let ta = monad_t(&a);
            let mu = mult_mu(&a);
            // mu . T(eta) = id and mu . eta_T = id on T A.
            let t_eta = map_t(&unit_eta(&a));
            let eta_at_ta = unit_eta(&ta);
            assert_eq!(compose(&t_eta, &mu).unwrap(), identity(&ta));
            assert_eq!(compose(&eta_at_ta, &mu).unwrap(), identity(&ta));
        }
    }

    #[test]
    fn enumeration_counts_match_closed_form() {
        // sum over n0, n1 <= 3 of n0^n1 (empty-carrier cases included).
        assert_eq!(enumerate_bisets(3).len(), 60);
    }

    #[test]
    fn compose_rejects_mismatched_middles() {
        let a = two_one_biset();
        let b = Biset::atoms(1, &[0]).unwrap();
        let f = BisetMap::from_fns(&a, &b, |_| Label::atom("x0"), |_| Label::atom("a0"));
        let g = identity(&a);
        assert!(matches!(
            compose(&f, &g),
            Err(BisetError::DomainMismatch(_))
        ));
    }
}
