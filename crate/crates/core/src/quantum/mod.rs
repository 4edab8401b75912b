//! Classical/quantum states and the superoperators that act on them.
//!
//! An object is a typed wire list ([`CqObject`] wraps [`WireObj`]): `b` bit
//! wires and `q` qubit wires carry the space of `2^b` blocks of `2^q x 2^q`
//! density matrices. A [`CqState`] stores those blocks sparsely, keyed by
//! the classical index; a [`Superop`] is an arbitrary linear map between the
//! *vectorized* spaces, with complete positivity and trace preservation as
//! checkable properties ([`is_cp`], [`is_tp`]) rather than construction-time
//! requirements — the law harness needs to represent wrong maps too.
//!
//! Vectorization convention, fixed once and used everywhere:
//!
//! * the classical index reads the bit wires in wire order as a binary
//!   number, first wire most significant;
//! * likewise the row/column indices read the qubit wires in wire order;
//! * a state vectorizes block-by-block, each block row-major:
//!   `index(c, i, j) = c * 4^q + i * 2^q + j`.
//!
//! Under this convention the tensor of objects is wire concatenation, and
//! for a leading bit wire the vector space of `BIT * A` is literally
//! `vec(A) (+) vec(A)` — the direct-sum re-blocking ([`distribute`]) is the
//! identity permutation, and case analysis on a leading bit ([`copair_bit`])
//! is column concatenation. Convex combination of channels is entrywise
//! ([`convex_sum`]), and measurement branching is [`decompose_bit_state`],
//! which splits off one bit wire into its two weighted outcome states.

pub mod random;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{WireObj, WireType};

/// Dense complex matrix, the working representation for blocks, unitaries,
/// and vectorized superoperators.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector, the vectorized form of a state.
pub type CVec = DVector<Complex64>;

/// Largest entry magnitude of a complex matrix or vector — the sup norm all
/// deviation reporting uses.
pub fn sup_norm<R, C, S>(m: &nalgebra::Matrix<Complex64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::storage::Storage<Complex64, R, C>,
{
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Default numerical tolerance for validity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hard cap on wires per object: vectorized dimensions grow as
/// `2^b * 4^q`, so ten wires is already a 1M x 1M superoperator worst case.
pub const MAX_WIRES: usize = 10;

/// Errors from state and superoperator construction and use.
#[derive(Debug, Error)]
pub enum QuantumError {
    /// Boundary objects or matrix shapes do not line up.
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    /// A claimed state fails its invariants (block shape, positivity,
    /// trace).
    #[error("not a state: {0}")]
    NotAState(String),
    /// A matrix claimed unitary is not (or has a non-power-of-two size).
    #[error("not unitary: {0}")]
    NotUnitary(String),
    /// Convex weights out of range, not summing to one, or of the wrong
    /// length.
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    /// An object exceeding the dimension guard.
    #[error("{wires} wires exceed the {limit}-wire guard")]
    TooManyWires { wires: usize, limit: usize },
    /// A wire expected to be classical is not.
    #[error("not a bit wire: {0}")]
    NotABit(String),
}

/// A classical/quantum object: a typed wire list plus derived dimensions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CqObject {
    wires: WireObj,
}

impl CqObject {
    /// Wraps a wire list, enforcing the [`MAX_WIRES`] dimension guard.
    pub fn new(wires: WireObj) -> Result<Self, QuantumError> {
        if wires.len() > MAX_WIRES {
            return Err(QuantumError::TooManyWires {
                wires: wires.len(),
                limit: MAX_WIRES,
            });
        }
        Ok(CqObject { wires })
    }

    /// The monoidal unit: no wires, one-dimensional vectorization.
    pub fn unit() -> Self {
        CqObject {
            wires: WireObj::unit(),
        }
    }

    pub fn bit() -> Self {
        CqObject {
            wires: WireObj::bit(),
        }
    }

    pub fn qubit() -> Self {
        CqObject {
            wires: WireObj::qubit(),
        }
    }

    pub fn wires(&self) -> &WireObj {
        &self.wires
    }

    pub fn bits(&self) -> usize {
        self.wires.count(WireType::Bit)
    }

    pub fn qubits(&self) -> usize {
        self.wires.count(WireType::Qubit)
    }

    /// Number of classical blocks, `2^bits`.
    pub fn classical_count(&self) -> usize {
        1 << self.bits()
    }

    /// Block edge length, `2^qubits`.
    pub fn qdim(&self) -> usize {
        1 << self.qubits()
    }

    /// Vectorized dimension, `2^bits * 4^qubits`.
    pub fn vecdim(&self) -> usize {
        self.classical_count() * self.qdim() * self.qdim()
    }

    /// Tensor of objects: wire concatenation.
    pub fn tensor(&self, other: &CqObject) -> Result<Self, QuantumError> {
        CqObject::new(self.wires.tensor(&other.wires))
    }

    /// Flat index of block entry `(i, j)` of block `c`.
    pub fn index(&self, c: usize, i: usize, j: usize) -> usize {
        let qd = self.qdim();
        c * qd * qd + i * qd + j
    }

    /// Inverse of [`CqObject::index`].
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let qd = self.qdim();
        (idx / (qd * qd), (idx / qd) % qd, idx % qd)
    }
}

impl fmt::Display for CqObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.wires.fmt(f)
    }
}

/// A cq state: sparse blocks over the classical index, each a `qdim x qdim`
/// complex matrix; absent blocks are zero. Validity (positivity, trace) is
/// checked by [`CqState::validate`], not enforced on every constructor,
/// because intermediate arithmetic routinely passes through non-states.
#[derive(Debug, Clone, PartialEq)]
pub struct CqState {
    obj: CqObject,
    blocks: BTreeMap<usize, CMat>,
}

impl CqState {
    /// Packs blocks after checking shapes and classical-index range.
    pub fn new(
        obj: CqObject,
        blocks: impl IntoIterator<Item = (usize, CMat)>,
    ) -> Result<Self, QuantumError> {
        let qd = obj.qdim();
        let mut map = BTreeMap::new();
        for (c, m) in blocks {
            if c >= obj.classical_count() {
                return Err(QuantumError::NotAState(format!(
                    "classical index {c} out of range for {} blocks",
                    obj.classical_count()
                )));
            }
            if m.nrows() != qd || m.ncols() != qd {
                return Err(QuantumError::NotAState(format!(
                    "block {c} is {}x{}, object wants {qd}x{qd}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            map.insert(c, m);
        }
        Ok(CqState { obj, blocks: map })
    }

    /// The scalar state `1` on the unit object — the starting point of
    /// every closed program.
    pub fn scalar_one() -> Self {
        CqState {
            obj: CqObject::unit(),
            blocks: [(0, CMat::from_element(1, 1, Complex64::new(1.0, 0.0)))].into(),
        }
    }

    pub fn obj(&self) -> &CqObject {
        &self.obj
    }

    pub fn block(&self, c: usize) -> Option<&CMat> {
        self.blocks.get(&c)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, &CMat)> {
        self.blocks.iter().map(|(&c, m)| (c, m))
    }

    /// Sum of block traces (real part; the imaginary part is a validity
    /// deviation, not mass).
    pub fn total_trace(&self) -> f64 {
        self.blocks.values().map(|m| m.trace().re).sum()
    }

    /// Whether the state is normalized to total trace one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total_trace() - 1.0).abs() <= tol
    }

    /// Checks the state invariants within `tol`: Hermitian PSD blocks and
    /// total trace at most one (subnormalized branches are legal states).
    pub fn validate(&self, tol: f64) -> Result<(), QuantumError> {
        for (&c, m) in &self.blocks {
            let herm_dev = sup_norm(&(m - m.adjoint()));
            if herm_dev > tol {
                return Err(QuantumError::NotAState(format!(
                    "block {c} is not Hermitian (deviation {herm_dev:.3e})"
                )));
            }
            let herm = (m + m.adjoint()).scale(0.5);
            let min_eig = herm
                .symmetric_eigenvalues()
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            if min_eig < -tol {
                return Err(QuantumError::NotAState(format!(
                    "block {c} has negative eigenvalue {min_eig:.3e}"
                )));
            }
        }
        let t = self.total_trace();
        if t > 1.0 + tol {
            return Err(QuantumError::NotAState(format!(
                "total trace {t} exceeds one"
            )));
        }
        Ok(())
    }

    /// The state as a vector in the fixed layout.
    pub fn to_vec(&self) -> CVec {
        let mut v = CVec::zeros(self.obj.vecdim());
        let qd = self.obj.qdim();
        for (&c, m) in &self.blocks {
            for i in 0..qd {
                for j in 0..qd {
                    v[self.obj.index(c, i, j)] = m[(i, j)];
                }
            }
        }
        v
    }

    /// Rebuilds a state from a vector, dropping all-zero blocks.
    pub fn from_vec(obj: CqObject, v: &CVec) -> Result<Self, QuantumError> {
        if v.len() != obj.vecdim() {
            return Err(QuantumError::ObjectMismatch(format!(
                "vector length {} vs vecdim {}",
                v.len(),
                obj.vecdim()
            )));
        }
        let qd = obj.qdim();
        let mut blocks = BTreeMap::new();
        for c in 0..obj.classical_count() {
            let m = CMat::from_fn(qd, qd, |i, j| v[obj.index(c, i, j)]);
            if sup_norm(&m) > 0.0 {
                blocks.insert(c, m);
            }
        }
        Ok(CqState { obj, blocks })
    }

    /// Largest entrywise difference between two states on the same object
    /// (infinite if the objects differ).
    pub fn sup_distance(&self, other: &CqState) -> f64 {
        if self.obj != other.obj {
            return f64::INFINITY;
        }
        sup_norm(&(self.to_vec() - other.to_vec()))
    }

    /// JSON form: wire list plus blocks keyed by classical bitstring, each a
    /// flat row-major list of `[re, im]` pairs. Zero blocks are omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let bits = self.obj.bits();
        let doc = StateJson {
            wires: self.obj.wires().types().to_vec(),
            blocks: self
                .blocks
                .iter()
                .map(|(&c, m)| (bitstring(c, bits), entries_of(m)))
                .collect(),
        };
        serde_json::to_value(doc).expect("state serialization is infallible")
    }

    /// Parses the JSON form produced by [`CqState::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Result<Self, QuantumError> {
        let doc: StateJson = serde_json::from_value(v.clone())
            .map_err(|e| QuantumError::NotAState(format!("parse: {e}")))?;
        let obj = CqObject::new(WireObj::new(doc.wires))?;
        let qd = obj.qdim();
        let mut blocks = Vec::new();
        for (key, entries) in doc.blocks {
            let c = parse_bitstring(&key, obj.bits())
                .ok_or_else(|| QuantumError::NotAState(format!("bad block key {key:?}")))?;
            let m = matrix_from_entries(qd, qd, &entries).ok_or_else(|| {
                QuantumError::NotAState(format!("block {key:?} has wrong entry count"))
            })?;
            blocks.push((c, m));
        }
        CqState::new(obj, blocks)
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    wires: Vec<WireType>,
    blocks: BTreeMap<String, Vec<(f64, f64)>>,
}

fn bitstring(c: usize, bits: usize) -> String {
    (0..bits)
        .map(|k| {
            if (c >> (bits - 1 - k)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn parse_bitstring(s: &str, bits: usize) -> Option<usize> {
    if s.len() != bits || !s.chars().all(|ch| ch == '0' || ch == '1') {
        return None;
    }
    Some(
        s.chars()
            .fold(0, |acc, ch| (acc << 1) | usize::from(ch == '1')),
    )
}

fn entries_of(m: &CMat) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push((m[(i, j)].re, m[(i, j)].im));
        }
    }
    out
}

fn matrix_from_entries(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Option<CMat> {
    if entries.len() != rows * cols {
        return None;
    }
    Some(CMat::from_fn(rows, cols, |i, j| {
        let (re, im) = entries[i * cols + j];
        Complex64::new(re, im)
    }))
}

/// A linear map between vectorized cq spaces. CP/TP are properties to
/// check, not invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Superop {
    dom: CqObject,
    cod: CqObject,
    mat: CMat,
}

impl Superop {
    /// Packs a matrix after checking its shape against the objects.
    pub fn new(dom: CqObject, cod: CqObject, mat: CMat) -> Result<Self, QuantumError> {
        if mat.nrows() != cod.vecdim() || mat.ncols() != dom.vecdim() {
            return Err(QuantumError::ObjectMismatch(format!(
                "matrix is {}x{}, objects want {}x{}",
                mat.nrows(),
                mat.ncols(),
                cod.vecdim(),
                dom.vecdim()
            )));
        }
        Ok(Superop { dom, cod, mat })
    }

    pub fn dom(&self) -> &CqObject {
        &self.dom
    }

    pub fn cod(&self) -> &CqObject {
        &self.cod
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// Largest entrywise difference on the same boundary (infinite
    /// otherwise, so it never passes a tolerance by accident).
    pub fn sup_distance(&self, other: &Superop) -> f64 {
        if self.dom != other.dom || self.cod != other.cod {
            return f64::INFINITY;
        }
        sup_norm(&(&self.mat - &other.mat))
    }

    /// Applies the map to a state.
    pub fn apply(&self, s: &CqState) -> Result<CqState, QuantumError> {
        if s.obj() != &self.dom {
            return Err(QuantumError::ObjectMismatch(format!(
                "state on {}, map from {}",
                s.obj(),
                self.dom
            )));
        }
        CqState::from_vec(self.cod.clone(), &(&self.mat * s.to_vec()))
    }

    /// Matrix-dump JSON: boundary objects, shape, flat row-major entries.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = SuperopJson {
            dom: self.dom.wires().types().to_vec(),
            cod: self.cod.wires().types().to_vec(),
            shape: (self.mat.nrows(), self.mat.ncols()),
            entries: entries_of(&self.mat),
        };
        serde_json::to_value(doc).expect("superoperator serialization is infallible")
    }

    /// Parses the JSON form produced by [`Superop::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Result<Self, QuantumError> {
        let doc: SuperopJson = serde_json::from_value(v.clone())
            .map_err(|e| QuantumError::ObjectMismatch(format!("parse: {e}")))?;
        let dom = CqObject::new(WireObj::new(doc.dom))?;
        let cod = CqObject::new(WireObj::new(doc.cod))?;
        if doc.shape != (cod.vecdim(), dom.vecdim()) {
            return Err(QuantumError::ObjectMismatch(format!(
                "shape {:?} vs objects {}x{}",
                doc.shape,
                cod.vecdim(),
                dom.vecdim()
            )));
        }
        let mat = matrix_from_entries(doc.shape.0, doc.shape.1, &doc.entries)
            .ok_or_else(|| QuantumError::ObjectMismatch("wrong entry count".to_string()))?;
        Superop::new(dom, cod, mat)
    }
}

#[derive(Serialize, Deserialize)]
struct SuperopJson {
    dom: Vec<WireType>,
    cod: Vec<WireType>,
    shape: (usize, usize),
    entries: Vec<(f64, f64)>,
}

/// Identity map on an object.
pub fn identity_q(obj: &CqObject) -> Superop {
    Superop {
        dom: obj.clone(),
        cod: obj.clone(),
        mat: CMat::identity(obj.vecdim(), obj.vecdim()),
    }
}

/// Sequential composition `f ; g` (first `f: A -> B`, then `g: B -> C`).
pub fn compose_q(f: &Superop, g: &Superop) -> Result<Superop, QuantumError> {
    if f.cod != g.dom {
        return Err(QuantumError::ObjectMismatch(format!(
            "compose: codomain {} != domain {}",
            f.cod, g.dom
        )));
    }
    Ok(Superop {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        mat: &g.mat * &f.mat,
    })
}

/// Combines indices of two objects into the index of their tensor: bits
/// concatenate, row indices concatenate, column indices concatenate.
fn combine_index(a: &CqObject, b: &CqObject, ia: usize, ib: usize) -> usize {
    let (ca, ra, la) = a.unindex(ia);
    let (cb, rb, lb) = b.unindex(ib);
    let c = (ca << b.bits()) | cb;
    let r = (ra << b.qubits()) | rb;
    let l = (la << b.qubits()) | lb;
    let ab_qd = a.qdim() * b.qdim();
    c * ab_qd * ab_qd + r * ab_qd + l
}

/// Parallel composition `f * g` acting on the tensor of the boundaries.
pub fn tensor_q(f: &Superop, g: &Superop) -> Result<Superop, QuantumError> {
    let dom = f.dom.tensor(&g.dom)?;
    let cod = f.cod.tensor(&g.cod)?;
    let mut mat = CMat::zeros(cod.vecdim(), dom.vecdim());
    for rf in 0..f.cod.vecdim() {
        for rg in 0..g.cod.vecdim() {
            let row = combine_index(&f.cod, &g.cod, rf, rg);
            for cf in 0..f.dom.vecdim() {
                for cg in 0..g.dom.vecdim() {
                    let col = combine_index(&f.dom, &g.dom, cf, cg);
                    mat[(row, col)] = f.mat[(rf, cf)] * g.mat[(rg, cg)];
                }
            }
        }
    }
    Ok(Superop { dom, cod, mat })
}

/// Left injection `I -> BIT`: the scalar becomes classical value 0.
pub fn inj1() -> Superop {
    let mut mat = CMat::zeros(2, 1);
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    Superop {
        dom: CqObject::unit(),
        cod: CqObject::bit(),
        mat,
    }
}

/// Right injection `I -> BIT`: the scalar becomes classical value 1.
pub fn inj2() -> Superop {
    let mut mat = CMat::zeros(2, 1);
    mat[(1, 0)] = Complex64::new(1.0, 0.0);
    Superop {
        dom: CqObject::unit(),
        cod: CqObject::bit(),
        mat,
    }
}

/// Case analysis on a leading bit: `[f, g]: BIT * A -> C` runs `f` on the
/// bit-0 blocks and `g` on the bit-1 blocks. With the fixed layout this is
/// exactly horizontal concatenation of the two matrices.
pub fn copair_bit(f: &Superop, g: &Superop) -> Result<Superop, QuantumError> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(QuantumError::ObjectMismatch(format!(
            "copair: branches {}->{} vs {}->{}",
            f.dom, f.cod, g.dom, g.cod
        )));
    }
    let dom = CqObject::bit().tensor(&f.dom)?;
    let half = f.dom.vecdim();
    let mut mat = CMat::zeros(f.cod.vecdim(), 2 * half);
    mat.view_mut((0, 0), (f.cod.vecdim(), half))
        .copy_from(&f.mat);
    mat.view_mut((0, half), (f.cod.vecdim(), half))
        .copy_from(&g.mat);
    Ok(Superop {
        dom,
        cod: f.cod.clone(),
        mat,
    })
}

/// The re-blocking isomorphism `BIT * A -> A (+) A`. The fixed layout puts
/// the leading bit in the most significant classical position, so the
/// vector space of `BIT * A` already *is* the direct sum — first half
/// bit 0, second half bit 1 — and the isomorphism is the identity matrix.
/// It exists as a named map so that direct-sum reasoning has an explicit
/// witness with an inverse.
pub fn distribute(a: &CqObject) -> Result<Superop, QuantumError> {
    let obj = CqObject::bit().tensor(a)?;
    Ok(identity_q(&obj))
}

/// Inverse of [`distribute`]; the same identity permutation.
pub fn distribute_inv(a: &CqObject) -> Result<Superop, QuantumError> {
    distribute(a)
}

/// Validated convex weights: entries in `[0, 1]` summing to one within
/// `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexWeights(Vec<f64>);

impl ConvexWeights {
    pub fn new(ws: impl Into<Vec<f64>>, tol: f64) -> Result<Self, QuantumError> {
        let ws = ws.into();
        for &w in &ws {
            if !(0.0..=1.0 + tol).contains(&w) || !w.is_finite() {
                return Err(QuantumError::WeightMismatch(format!(
                    "weight {w} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = ws.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(QuantumError::WeightMismatch(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(ConvexWeights(ws))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Entrywise convex combination of same-boundary maps.
pub fn convex_sum(ws: &ConvexWeights, fs: &[Superop]) -> Result<Superop, QuantumError> {
    if ws.len() != fs.len() || fs.is_empty() {
        return Err(QuantumError::WeightMismatch(format!(
            "{} weights for {} maps",
            ws.len(),
            fs.len()
        )));
    }
    let first = &fs[0];
    let mut mat = CMat::zeros(first.cod.vecdim(), first.dom.vecdim());
    for (w, f) in ws.values().iter().zip(fs) {
        if f.dom != first.dom || f.cod != first.cod {
            return Err(QuantumError::ObjectMismatch(
                "convex_sum: mixed boundaries".to_string(),
            ));
        }
        mat += f.mat.scale(*w);
    }
    Ok(Superop {
        dom: first.dom.clone(),
        cod: first.cod.clone(),
        mat,
    })
}

/// Outcome of splitting one bit wire out of a normalized state: the two
/// outcome probabilities and, for each outcome of probability above the
/// tolerance, the normalized remainder state on the object without that
/// wire.
#[derive(Debug, Clone)]
pub struct BitDecomposition {
    pub p: [f64; 2],
    pub branch: [Option<CqState>; 2],
    rest: CqObject,
}

impl BitDecomposition {
    /// The object the branch states live on.
    pub fn rest_obj(&self) -> &CqObject {
        &self.rest
    }

    /// Reassembles `sum_b p_b * (value b (x) branch_b)` as a state on
    /// `BIT * rest`; inverse to [`decompose_bit_state`] (checked to
    /// tight tolerance in the law tests).
    pub fn recompose(&self) -> Result<CqState, QuantumError> {
        let obj = CqObject::bit().tensor(&self.rest)?;
        let mut blocks: BTreeMap<usize, CMat> = BTreeMap::new();
        for b in 0..2 {
            let Some(state) = &self.branch[b] else {
                continue;
            };
            for (c, m) in state.blocks() {
                blocks.insert((b << self.rest.bits()) | c, m.scale(self.p[b]));
            }
        }
        CqState::new(obj, blocks)
    }
}

/// Splits the *leading* bit wire of a normalized state; see
/// [`decompose_bit_at`].
pub fn decompose_bit_state(s: &CqState, tol: f64) -> Result<BitDecomposition, QuantumError> {
    decompose_bit_at(s, 0, tol)
}

/// Splits the bit wire at `pos` out of a normalized state: marginal
/// probabilities from the block traces, normalized remainder per outcome.
/// Outcomes with probability at most `tol` are dropped (branch `None`).
pub fn decompose_bit_at(
    s: &CqState,
    pos: usize,
    tol: f64,
) -> Result<BitDecomposition, QuantumError> {
    let obj = s.obj();
    match obj.wires().types().get(pos) {
        Some(WireType::Bit) => {}
        Some(t) => {
            return Err(QuantumError::NotABit(format!("wire {pos} carries {t}")));
        }
        None => {
            return Err(QuantumError::NotABit(format!(
                "wire {pos} out of range for {obj}"
            )));
        }
    }
    if !s.is_normalized(tol) {
        return Err(QuantumError::NotAState(format!(
            "decomposition needs a normalized state, trace is {}",
            s.total_trace()
        )));
    }
    // Bits after `pos` occupy the low classical digits.
    let shift = obj.wires().types()[pos + 1..]
        .iter()
        .filter(|&&t| t == WireType::Bit)
        .count();
    let rest_wires: Vec<WireType> = obj
        .wires()
        .types()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != pos)
        .map(|(_, &t)| t)
        .collect();
    let rest = CqObject::new(WireObj::new(rest_wires))?;
    let mut p = [0.0; 2];
    let mut raw: [BTreeMap<usize, CMat>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for (c, m) in s.blocks() {
        let b = (c >> shift) & 1;
        let rest_c = ((c >> (shift + 1)) << shift) | (c & ((1 << shift) - 1));
        p[b] += m.trace().re;
        raw[b].insert(rest_c, m.clone());
    }
    let mut branch: [Option<CqState>; 2] = [None, None];
    for b in 0..2 {
        if p[b] > tol {
            let scaled = raw[b].iter().map(|(&c, m)| (c, m.scale(1.0 / p[b])));
            branch[b] = Some(CqState::new(rest.clone(), scaled)?);
        }
    }
    Ok(BitDecomposition { p, branch, rest })
}

/// Complete-positivity report: worst Choi-block eigenvalue and hermiticity
/// deviation across all classical block pairs.
#[derive(Debug, Clone, Copy)]
pub struct CpReport {
    pub pass: bool,
    pub min_choi_eigenvalue: f64,
    pub hermiticity_deviation: f64,
}

/// A cq map is completely positive exactly when, for every pair of
/// classical indices `(c_out, c_in)`, the Choi matrix of that block is PSD;
/// the output classical index block-diagonalizes the full Choi matrix, so
/// checking blocks separately is equivalent and much smaller.
pub fn is_cp(f: &Superop, tol: f64) -> CpReport {
    let (qo, qi) = (f.cod.qdim(), f.dom.qdim());
    let mut min_eig = f64::INFINITY;
    let mut herm_dev: f64 = 0.0;
    for c_out in 0..f.cod.classical_count() {
        for c_in in 0..f.dom.classical_count() {
            // Choi[(i,k), (j,l)] = mat[(c_out,i,j), (c_in,k,l)]
            let choi = CMat::from_fn(qo * qi, qo * qi, |row, col| {
                let (i, k) = (row / qi, row % qi);
                let (j, l) = (col / qi, col % qi);
                f.mat[(f.cod.index(c_out, i, j), f.dom.index(c_in, k, l))]
            });
            herm_dev = herm_dev.max(sup_norm(&(&choi - choi.adjoint())));
            let herm = (&choi + choi.adjoint()).scale(0.5);
            let eigs = herm.symmetric_eigenvalues();
            min_eig = eigs.iter().fold(min_eig, |a, &b| a.min(b));
        }
    }
    CpReport {
        pass: min_eig >= -tol && herm_dev <= tol,
        min_choi_eigenvalue: min_eig,
        hermiticity_deviation: herm_dev,
    }
}

/// Trace-preservation report: worst deviation of the pulled-back trace
/// functional from the input trace functional.
#[derive(Debug, Clone, Copy)]
pub struct TpReport {
    pub pass: bool,
    pub max_deviation: f64,
}

/// A cq map preserves trace exactly when the trace of the output equals the
/// trace of the input on every matrix unit of the domain.
pub fn is_tp(f: &Superop, tol: f64) -> TpReport {
    let (qo, qi) = (f.cod.qdim(), f.dom.qdim());
    let mut dev: f64 = 0.0;
    for c_in in 0..f.dom.classical_count() {
        for k in 0..qi {
            for l in 0..qi {
                let mut total = Complex64::new(0.0, 0.0);
                for c_out in 0..f.cod.classical_count() {
                    for i in 0..qo {
                        total += f.mat[(f.cod.index(c_out, i, i), f.dom.index(c_in, k, l))];
                    }
                }
                let want = if k == l { 1.0 } else { 0.0 };
                dev = dev.max((total - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    TpReport {
        pass: dev <= tol,
        max_deviation: dev,
    }
}

/// Conjugation channel of a unitary on `q` qubits (checked unitary within
/// [`DEFAULT_TOL`]): `rho -> U rho U^dag`.
pub fn unitary_channel(u: &CMat) -> Result<Superop, QuantumError> {
    unitary_channel_tol(u, DEFAULT_TOL)
}

/// [`unitary_channel`] with an explicit tolerance.
pub fn unitary_channel_tol(u: &CMat, tol: f64) -> Result<Superop, QuantumError> {
    let d = u.nrows();
    if u.ncols() != d || !d.is_power_of_two() {
        return Err(QuantumError::NotUnitary(format!(
            "matrix is {}x{}, want a square power-of-two size",
            u.nrows(),
            u.ncols()
        )));
    }
    let dev = sup_norm(&(u.adjoint() * u - CMat::identity(d, d)));
    if dev > tol {
        return Err(QuantumError::NotUnitary(format!(
            "U^dag U deviates from identity by {dev:.3e}"
        )));
    }
    let q = d.trailing_zeros() as usize;
    let obj = CqObject::new(WireObj::new(vec![WireType::Qubit; q]))?;
    let mut mat = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    mat[(i * d + j, k * d + l)] = u[(i, k)] * u[(j, l)].conj();
                }
            }
        }
    }
    Ok(Superop {
        dom: obj.clone(),
        cod: obj,
        mat,
    })
}

/// Computational-basis measurement `QUBIT -> BIT`: keeps the diagonal as
/// two classical blocks.
pub fn meas_channel() -> Superop {
    let mut mat = CMat::zeros(2, 4);
    mat[(0, 0)] = Complex64::new(1.0, 0.0); // <0|rho|0>
    mat[(1, 3)] = Complex64::new(1.0, 0.0); // <1|rho|1>
    Superop {
        dom: CqObject::qubit(),
        cod: CqObject::bit(),
        mat,
    }
}

/// Classical-controlled preparation `BIT -> QUBIT`: block `c` becomes
/// `p_c |c><c|`.
pub fn init_channel() -> Superop {
    let mut mat = CMat::zeros(4, 2);
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    mat[(3, 1)] = Complex64::new(1.0, 0.0);
    Superop {
        dom: CqObject::bit(),
        cod: CqObject::qubit(),
        mat,
    }
}

/// Discards one wire: summing blocks for a bit, trace for a qubit.
pub fn discard_channel(t: WireType) -> Superop {
    match t {
        WireType::Bit => {
            let mat =
                CMat::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
            Superop {
                dom: CqObject::bit(),
                cod: CqObject::unit(),
                mat,
            }
        }
        WireType::Qubit => {
            let mut mat = CMat::zeros(1, 4);
            mat[(0, 0)] = Complex64::new(1.0, 0.0);
            mat[(0, 3)] = Complex64::new(1.0, 0.0);
            Superop {
                dom: CqObject::qubit(),
                cod: CqObject::unit(),
                mat,
            }
        }
    }
}

/// The channel permuting wires: wire `i` of the domain moves to position
/// `targets[i]`. A pure relabeling of classical digits and qubit factors.
pub fn permute_wires(dom: &CqObject, targets: &[usize]) -> Result<Superop, QuantumError> {
    let n = dom.wires().len();
    if targets.len() != n {
        return Err(QuantumError::ObjectMismatch(format!(
            "{} targets for {n} wires",
            targets.len()
        )));
    }
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n || seen[t] {
            return Err(QuantumError::ObjectMismatch(format!(
                "bad target list {targets:?}"
            )));
        }
        seen[t] = true;
    }
    let mut cod_types = vec![WireType::Bit; n];
    for (i, &t) in targets.iter().enumerate() {
        cod_types[t] = dom.wires().types()[i];
    }
    let cod = CqObject::new(WireObj::new(cod_types))?;

    // Rank of each wire among its own kind, domain and codomain.
    let ranks = |obj: &CqObject| -> Vec<usize> {
        let mut bit_rank = 0;
        let mut qubit_rank = 0;
        obj.wires()
            .types()
            .iter()
            .map(|&t| match t {
                WireType::Bit => {
                    bit_rank += 1;
                    bit_rank - 1
                }
                WireType::Qubit => {
                    qubit_rank += 1;
                    qubit_rank - 1
                }
            })
            .collect()
    };
    let dom_rank = ranks(dom);
    let cod_rank = ranks(&cod);
    let (b, q) = (dom.bits(), dom.qubits());

    let mut mat = CMat::zeros(cod.vecdim(), dom.vecdim());
    for col in 0..dom.vecdim() {
        let (c, i, j) = dom.unindex(col);
        let (mut c2, mut i2, mut j2) = (0usize, 0usize, 0usize);
        for (w, &t) in dom.wires().types().iter().enumerate() {
            let tgt = targets[w];
            match t {
                WireType::Bit => {
                    let digit = (c >> (b - 1 - dom_rank[w])) & 1;
                    c2 |= digit << (b - 1 - cod_rank[tgt]);
                }
                WireType::Qubit => {
                    let di = (i >> (q - 1 - dom_rank[w])) & 1;
                    let dj = (j >> (q - 1 - dom_rank[w])) & 1;
                    i2 |= di << (q - 1 - cod_rank[tgt]);
                    j2 |= dj << (q - 1 - cod_rank[tgt]);
                }
            }
        }
        mat[(cod.index(c2, i2, j2), col)] = Complex64::new(1.0, 0.0);
    }
    Ok(Superop {
        dom: dom.clone(),
        cod,
        mat,
    })
}

/// Stock gate unitaries.
pub mod gates {
    use super::CMat;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn h() -> CMat {
        CMat::from_row_slice(
            2,
            2,
            &[
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
                c(-FRAC_1_SQRT_2, 0.0),
            ],
        )
    }

    pub fn x() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn z() -> CMat {
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn s() -> CMat {
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
    }

    /// The pi/8 gate (named `Tg` in signatures to keep `T` free).
    pub fn tg() -> CMat {
        let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase])
    }

    /// Controlled-NOT, first wire control.
    pub fn cnot() -> CMat {
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 3)] = c(1.0, 0.0);
        m[(3, 2)] = c(1.0, 0.0);
        m
    }
}

#[cfg(test)]
mod tests;
