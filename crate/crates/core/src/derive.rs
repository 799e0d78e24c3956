//! Designs derived from the q-matroid of a q-Steiner system S(t, k, n; q),
//! and automorphism groups inside GL(n, q).
//!
//! In that q-matroid every subspace of dimension at most t is independent, a
//! (t+1)-space is a circuit exactly when it lies in a block, and a
//! (t+2)-space is a circuit exactly when none of its (t+1)-subspaces lies in
//! a block. Three families of fixed dimension therefore arise:
//!
//! | kind             | block dim | λ                                                   |
//! |------------------|-----------|-----------------------------------------------------|
//! | `independent_t1` | t + 1     | (q^{n-t} - q^{k-t}) / (q - 1)                       |
//! | `circuit_t1`     | t + 1     | [k-t, 1]_q                                          |
//! | `circuit_t2`     | t + 2     | q^{k-t} [n-k,1]_q ([n-t-1,1]_q - [k-t,1]_q [t+1,1]_q) / (q + 1) |
//!
//! [`derive_design`] builds each family by filtering the Grassmannian.
//!
//! Maps act on row vectors, `v ↦ v M`, so "apply A then B" is the product
//! `A B`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{induced_rank, supplementary_design, Design, SteinerSystem};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{pack, packed, Grassmannian, Matrix, Subspace};
use crate::qcount::{gaussian_binomial, DesignParams};
use crate::{par, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubspaceClass {
    Independent,
    Circuit,
    DependentNonCircuit,
}

impl fmt::Display for SubspaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubspaceClass::Independent => "independent",
            SubspaceClass::Circuit => "circuit",
            SubspaceClass::DependentNonCircuit => "dependent",
        })
    }
}

/// Class and rank of `a` in the q-matroid of `s`, read off from block
/// containment.
pub fn classify_subspace(s: &SteinerSystem, a: &Subspace) -> (SubspaceClass, usize) {
    let t = s.t();
    let rank = induced_rank(s, a);
    let class = match a.dim() {
        d if d <= t => SubspaceClass::Independent,
        d if d == t + 1 => {
            if s.in_some_block(a) {
                SubspaceClass::Circuit
            } else {
                SubspaceClass::Independent
            }
        }
        d if d == t + 2 => {
            if a.subspaces(t + 1).iter().all(|x| !s.in_some_block(x)) {
                SubspaceClass::Circuit
            } else {
                SubspaceClass::DependentNonCircuit
            }
        }
        _ => SubspaceClass::DependentNonCircuit,
    };
    (class, rank)
}

fn q_big(q: u64) -> BigUint {
    BigUint::from(q)
}

fn check_steiner_shape(p: &DesignParams) -> Result<()> {
    p.validate()?;
    if p.lambda != BigUint::one() {
        return Err(Error::InvalidParameters(format!("{p} is not a Steiner system (λ ≠ 1)")));
    }
    Ok(())
}

/// λ of the (t+1)-dimensional independent spaces.
pub fn lambda_independent(p: &DesignParams) -> Result<BigUint> {
    check_steiner_shape(p)?;
    if !(p.t < p.k && p.k < p.n) {
        return Err(Error::InvalidParameters(format!("need t < k < n, got {p}")));
    }
    let q = q_big(p.q);
    let num = Pow::pow(&q, p.n - p.t) - Pow::pow(&q, p.k - p.t);
    let (quot, rem) = num.div_rem(&(q - 1u32));
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// λ of the (t+1)-dimensional circuits.
pub fn lambda_circuit_t1(p: &DesignParams) -> Result<BigUint> {
    check_steiner_shape(p)?;
    if p.t >= p.k {
        return Err(Error::InvalidParameters(format!("need t < k, got {p}")));
    }
    Ok(gaussian_binomial(p.k - p.t, 1, p.q))
}

/// λ of the (t+2)-dimensional circuits. Fails on a negative value or an
/// inexact division by q + 1.
pub fn lambda_circuit_t2(p: &DesignParams) -> Result<BigUint> {
    check_steiner_shape(p)?;
    if p.t + 2 > p.n || p.t >= p.k {
        return Err(Error::InvalidParameters(format!("need t < k and t + 2 <= n, got {p}")));
    }
    let g1 = |m: u64| BigInt::from(gaussian_binomial(m, 1, p.q));
    let (t, k, n, q) = (p.t, p.k, p.n, p.q);
    let paren = g1(n - t - 1) - g1(k - t) * g1(t + 1);
    let num = BigInt::from(Pow::pow(&q_big(q), k - t)) * g1(n - k) * paren;
    let (quot, rem) = num.div_rem(&BigInt::from(q + 1));
    if !rem.is_zero() {
        return Err(Error::InvalidParameters(format!("λ for {p}: division by q + 1 is not exact")));
    }
    if quot.is_negative() {
        return Err(Error::InvalidParameters(format!("λ for {p} is negative")));
    }
    Ok(quot.to_biguint().expect("nonnegative"))
}

/// Number of blocks of a t-(n, d, λ; q) design: λ [n, t]_q / [d, t]_q.
pub fn block_count(lambda: &BigUint, n: u64, t: u64, d: u64, q: u64) -> Result<BigUint> {
    let (quot, rem) = (lambda * gaussian_binomial(n, t, q)).div_rem(&gaussian_binomial(d, t, q));
    if !rem.is_zero() {
        return Err(Error::InvalidParameters("block count is not an integer".into()));
    }
    Ok(quot)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedKind {
    IndependentT1,
    CircuitT1,
    CircuitT2,
}

impl DerivedKind {
    pub const ALL: [DerivedKind; 3] = [DerivedKind::IndependentT1, DerivedKind::CircuitT1, DerivedKind::CircuitT2];

    pub fn tag(self) -> &'static str {
        match self {
            DerivedKind::IndependentT1 => "independent_t1",
            DerivedKind::CircuitT1 => "circuit_t1",
            DerivedKind::CircuitT2 => "circuit_t2",
        }
    }

    pub fn block_dim(self, t: usize) -> usize {
        match self {
            DerivedKind::IndependentT1 | DerivedKind::CircuitT1 => t + 1,
            DerivedKind::CircuitT2 => t + 2,
        }
    }

    pub fn lambda(self, p: &DesignParams) -> Result<BigUint> {
        match self {
            DerivedKind::IndependentT1 => lambda_independent(p),
            DerivedKind::CircuitT1 => lambda_circuit_t1(p),
            DerivedKind::CircuitT2 => lambda_circuit_t2(p),
        }
    }

    fn wanted(self) -> SubspaceClass {
        match self {
            DerivedKind::IndependentT1 => SubspaceClass::Independent,
            DerivedKind::CircuitT1 | DerivedKind::CircuitT2 => SubspaceClass::Circuit,
        }
    }
}

impl fmt::Display for DerivedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DerivedKind {
    type Err = Error;

    /// Accepts the tags and the short forms `independent`, `circuit-t1`, `circuit-t2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "independent_t1" | "independent" => Ok(DerivedKind::IndependentT1),
            "circuit_t1" => Ok(DerivedKind::CircuitT1),
            "circuit_t2" => Ok(DerivedKind::CircuitT2),
            _ => Err(Error::InvalidParameters(format!("unknown derived kind {s:?}"))),
        }
    }
}

/// The subspaces of the kind's dimension that have the kind's class, as a
/// design with λ from the matching calculator. Verification is left to the
/// caller.
pub fn derive_design(s: &SteinerSystem, kind: DerivedKind, limits: &Limits) -> Result<Design> {
    let p = s.params();
    let lambda = kind.lambda(p)?;
    let d = kind.block_dim(s.t());
    let g = Grassmannian::new(s.field(), s.n(), d)?;
    limits.check_subspaces(g.len() as u64)?;
    let wanted = kind.wanted();
    let blocks: Vec<Subspace> = par::map_range(g.len(), |i| {
        let a = g.get(i);
        (classify_subspace(s, &a).0 == wanted).then_some(a)
    })
    .into_iter()
    .flatten()
    .collect();
    Design::new(s.field(), DesignParams::new(p.t, p.n, d as u64, lambda, p.q)?, blocks)
}

/// Whether the independent-space design is the supplementary design of the
/// (t+1)-circuit design, as block sets.
pub fn check_supplementary_remark(s: &SteinerSystem, limits: &Limits) -> Result<bool> {
    let ind = derive_design(s, DerivedKind::IndependentT1, limits)?;
    let c1 = derive_design(s, DerivedKind::CircuitT1, limits)?;
    Ok(supplementary_design(&c1, limits)?.blocks() == ind.blocks())
}

/// An invertible n x n matrix acting on subspaces by `v ↦ v M`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatticeMap {
    matrix: Matrix,
    bits: Option<Vec<u64>>,
}

impl fmt::Debug for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeMap({:?})", self.matrix)
    }
}

impl LatticeMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", matrix.rows(), matrix.cols())));
        }
        if !matrix.is_invertible() {
            return Err(Error::InvalidParameters("matrix is not invertible".into()));
        }
        Ok(LatticeMap::from_invertible(matrix))
    }

    fn from_invertible(matrix: Matrix) -> Self {
        let bits = packed(matrix.field(), matrix.rows()).then(|| matrix.to_rows().iter().map(|r| pack(r)).collect());
        LatticeMap { matrix, bits }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        LatticeMap::from_invertible(Matrix::identity(field, n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, s: &Subspace) -> Subspace {
        match (&self.bits, s.bits()) {
            (Some(rows), Some(_)) => s.image_bits(rows),
            _ => s.image(&self.matrix).expect("dimensions checked"),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LatticeMap) -> LatticeMap {
        LatticeMap::from_invertible(self.matrix.mul(&other.matrix).expect("same shape"))
    }

    pub fn inverse(&self) -> LatticeMap {
        LatticeMap::from_invertible(self.matrix.inverse().expect("invertible"))
    }
}

/// Whether `phi` maps the block set onto itself.
pub fn is_automorphism(phi: &LatticeMap, d: &Design) -> Result<bool> {
    if phi.dim() != d.n() {
        return Err(Error::AmbientMismatch { left: d.n(), right: phi.dim() });
    }
    if phi.matrix.field() != d.field() {
        return Err(Error::FieldMismatch { left: d.field().q(), right: phi.matrix.field().q() });
    }
    Ok(preserves(phi, d))
}

fn preserves(phi: &LatticeMap, d: &Design) -> bool {
    d.blocks().iter().all(|b| d.has_block(&phi.apply(b)))
}

/// |GL(n, q)|, or `None` on overflow.
pub fn gl_order(n: usize, q: u64) -> Option<u64> {
    let qn = q.checked_pow(n as u32)?;
    (0..n).try_fold(1u64, |acc, i| acc.checked_mul(qn - q.checked_pow(i as u32)?))
}

fn vector_of(q: u64, n: usize, mut code: u64) -> Vec<u16> {
    let mut v = vec![0u16; n];
    for x in v.iter_mut().rev() {
        *x = (code % q) as u16;
        code /= q;
    }
    v
}

/// The matrices of GL(n, q) preserving a design.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    elements: Vec<Matrix>,
    set: HashSet<Matrix>,
}

impl AutomorphismGroup {
    fn from_elements(mut elements: Vec<Matrix>) -> Self {
        elements.sort_by(|a, b| a.data().cmp(b.data()));
        let set = elements.iter().cloned().collect();
        AutomorphismGroup { elements, set }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements in lexicographic order of their entries.
    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.set.contains(m)
    }

    pub fn matrix_set(&self) -> &HashSet<Matrix> {
        &self.set
    }

    /// A product or inverse that falls outside the set. All pairs are tried
    /// when |G|^2 <= 10^7; otherwise 10^4 pairs drawn from `seed`.
    pub fn closure_violation(&self, seed: u64) -> Option<Matrix> {
        let g = &self.elements;
        if g.is_empty() {
            return None;
        }
        let inv = par::find_first(g.len(), |i| {
            let m = g[i].inverse().expect("invertible");
            (!self.set.contains(&m)).then_some(m)
        });
        if inv.is_some() {
            return inv;
        }
        let total = (g.len() as u64).saturating_mul(g.len() as u64);
        let pairs: Vec<(usize, usize)> = if total <= 10_000_000 {
            (0..g.len()).flat_map(|i| (0..g.len()).map(move |j| (i, j))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10_000).map(|_| (rng.gen_range(0..g.len()), rng.gen_range(0..g.len()))).collect()
        };
        par::find_first(pairs.len(), |p| {
            let (i, j) = pairs[p];
            let m = g[i].mul(&g[j]).expect("same shape");
            (!self.set.contains(&m)).then_some(m)
        })
    }
}

/// All matrices of GL(n, q) preserving `d`, by depth-first search over rows.
/// A partial matrix is abandoned as soon as a block inside the span of the
/// first coordinates is mapped off the design. Fails when |GL(n, q)|
/// exceeds `limits.max_group_order`, or if the result is not closed under
/// products and inverses.
pub fn automorphism_group(d: &Design, limits: &Limits) -> Result<AutomorphismGroup> {
    let n = d.n();
    let field = d.field().clone();
    let q = field.q() as u64;
    let order = gl_order(n, q).ok_or(Error::OutOfRange { what: "|GL(n, q)|", value: n as i64 })?;
    if order > limits.max_group_order {
        return Err(Error::BoundExceeded { count: order.to_string(), bound: limits.max_group_order });
    }
    let vectors = q.pow(n as u32);
    // blocks living in span(e_0, ..., e_{r-1}), checkable once r rows are fixed
    let settled: Vec<Vec<&Subspace>> = (0..=n)
        .map(|r| {
            d.blocks()
                .iter()
                .filter(|b| b.rows().iter().all(|row| row[r..].iter().all(|&x| x == 0)))
                .filter(|b| b.rows().iter().any(|row| r > 0 && row[r - 1] != 0))
                .collect()
        })
        .collect();
    let per_first = par::map_range(vectors as usize - 1, |i| {
        let first = vector_of(q, n, i as u64 + 1);
        let mut out = Vec::new();
        let mut rows = vec![first];
        search(&field, n, q, vectors, d, &settled, &mut rows, &mut out);
        out
    });
    let group = AutomorphismGroup::from_elements(per_first.into_iter().flatten().collect());
    if let Some(m) = group.closure_violation(0) {
        return Err(Error::Verification(format!("automorphisms not closed under composition: {m:?}")));
    }
    Ok(group)
}

#[allow(clippy::too_many_arguments)]
fn search(
    field: &FieldSpec,
    n: usize,
    q: u64,
    vectors: u64,
    d: &Design,
    settled: &[Vec<&Subspace>],
    rows: &mut Vec<Vec<u16>>,
    out: &mut Vec<Matrix>,
) {
    let r = rows.len();
    let partial = Matrix::from_rows(field, rows).expect("well formed");
    let image = |b: &Subspace| {
        let imgs: Vec<Vec<u16>> = b.rows().iter().map(|v| partial.apply_row(&v[..r])).collect();
        Subspace::span(field, n, &imgs).expect("well formed")
    };
    if !settled[r].iter().all(|b| d.has_block(&image(b))) {
        return;
    }
    if r == n {
        out.push(partial);
        return;
    }
    let span = Subspace::span(field, n, rows).expect("well formed");
    for code in 1..vectors {
        let v = vector_of(q, n, code);
        if span.contains_vector(&v) {
            continue;
        }
        rows.push(v);
        search(field, n, q, vectors, d, settled, rows, out);
        rows.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransferOutcome {
    Equal,
    /// The lexicographically first matrix in exactly one of the two groups.
    Differ(Matrix),
    /// The derived design is empty, outside the scope of the comparison.
    NotApplicable,
}

impl TransferOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            TransferOutcome::Equal => "equal",
            TransferOutcome::Differ(_) => "differ",
            TransferOutcome::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AutTransferReport {
    pub group: AutomorphismGroup,
    pub independent_t1: TransferOutcome,
    pub circuit_t1: TransferOutcome,
    pub circuit_t2: TransferOutcome,
    /// Aut(D) against Aut of the supplementary design of D, D the independent-space design.
    pub supplementary: TransferOutcome,
}

impl AutTransferReport {
    pub fn passed(&self) -> bool {
        [&self.independent_t1, &self.circuit_t1, &self.circuit_t2, &self.supplementary]
            .iter()
            .all(|o| !matches!(o, TransferOutcome::Differ(_)))
    }
}

fn compare(a: &AutomorphismGroup, b: &AutomorphismGroup) -> TransferOutcome {
    let first = a
        .elements()
        .iter()
        .filter(|m| !b.contains(m))
        .chain(b.elements().iter().filter(|m| !a.contains(m)))
        .min_by(|x, y| x.data().cmp(y.data()));
    match first {
        None => TransferOutcome::Equal,
        Some(m) => TransferOutcome::Differ(m.clone()),
    }
}

/// Compares Aut(S) with the automorphism groups of the derived designs, as
/// sets of matrices, and Aut(D) with Aut of its supplementary design for the
/// independent-space design D. Empty derived designs are not compared.
pub fn check_aut_transfer(s: &SteinerSystem, limits: &Limits) -> Result<AutTransferReport> {
    let group = automorphism_group(s.design(), limits)?;
    let mut outcomes = Vec::new();
    let mut independent = None;
    for kind in DerivedKind::ALL {
        let d = derive_design(s, kind, limits)?;
        if d.is_empty() {
            outcomes.push(TransferOutcome::NotApplicable);
            continue;
        }
        let g = automorphism_group(&d, limits)?;
        outcomes.push(compare(&group, &g));
        if kind == DerivedKind::IndependentT1 {
            independent = Some((d, g));
        }
    }
    let supplementary = match independent {
        Some((d, g)) => {
            let sup = supplementary_design(&d, limits)?;
            if sup.is_empty() {
                TransferOutcome::NotApplicable
            } else {
                compare(&g, &automorphism_group(&sup, limits)?)
            }
        }
        None => TransferOutcome::NotApplicable,
    };
    let mut it = outcomes.into_iter();
    Ok(AutTransferReport {
        group,
        independent_t1: it.next().expect("three kinds"),
        circuit_t1: it.next().expect("three kinds"),
        circuit_t2: it.next().expect("three kinds"),
        supplementary,
    })
}

fn collapse(ext: &FieldSpec, k: usize, v: &[u16]) -> Vec<u16> {
    let p = ext.p() as u16;
    v.chunks(k)
        .map(|c| c.iter().rev().fold(0u16, |acc, &d| acc * p + d))
        .collect()
}

fn expand(ext: &FieldSpec, k: usize, w: &[u16]) -> Vec<u16> {
    let p = ext.p() as u16;
    w.iter()
        .flat_map(|&x| {
            let mut r = x;
            (0..k).map(move |_| {
                let d = r % p;
                r /= p;
                d
            })
        })
        .collect()
}

/// The matrix over F_p of an F_p-linear map on (F_{p^k})^{n/k}, in the
/// coordinates used by [`crate::design::desarguesian_spread`].
fn matrix_of(field: &FieldSpec, ext: &FieldSpec, n: usize, k: usize, f: impl Fn(&[u16]) -> Vec<u16>) -> Matrix {
    let rows: Vec<Vec<u16>> = (0..n)
        .map(|j| {
            let mut e = vec![0u16; n];
            e[j] = 1;
            expand(ext, k, &f(&collapse(ext, k, &e)))
        })
        .collect();
    Matrix::from_rows(field, &rows).expect("well formed")
}

/// Generators of maps preserving the Desarguesian spread S(1, k, n; p):
/// multiplication of the first coordinate by a primitive element, the
/// Frobenius map on every coordinate, and, when n/k >= 2, a coordinate swap
/// and the addition of the first coordinate to the second.
pub fn spread_stabilizer_generators(n: usize, k: usize, field: &FieldSpec) -> Result<Vec<LatticeMap>> {
    if k == 0 || n % k != 0 || !field.is_prime_field() {
        return Err(Error::InvalidParameters(format!("need k | n over a prime field, got n = {n}, k = {k}")));
    }
    let ext = FieldSpec::new(field.p(), k as u32)?;
    let m = n / k;
    let w = ext.primitive_element();
    let p = field.p() as u64;
    let mut mats = vec![
        matrix_of(field, &ext, n, k, |x| {
            let mut y = x.to_vec();
            y[0] = ext.mul(w, y[0]);
            y
        }),
        matrix_of(field, &ext, n, k, |x| x.iter().map(|&a| ext.pow(a, p)).collect()),
    ];
    if m >= 2 {
        mats.push(matrix_of(field, &ext, n, k, |x| {
            let mut y = x.to_vec();
            y.swap(0, 1);
            y
        }));
        mats.push(matrix_of(field, &ext, n, k, |x| {
            let mut y = x.to_vec();
            y[1] = ext.add(y[1], y[0]);
            y
        }));
    }
    mats.into_iter().map(LatticeMap::new).collect()
}

/// The transvections `v ↦ v (I + E_{ij})`, i ≠ j.
pub fn transvections(n: usize, field: &FieldSpec) -> Vec<LatticeMap> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = Matrix::identity(field, n);
                m.set(i, j, 1);
                out.push(LatticeMap::from_invertible(m));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledTransferReport {
    pub samples: u64,
    /// Samples that preserve the first design.
    pub preserving: u64,
    /// A sampled map preserving exactly one of the two designs.
    pub mismatch: Option<Matrix>,
}

impl SampledTransferReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares automorphism verdicts for `a` and `b` on random words of length
/// 1 to 8. Half of the words use `preserving` only, the rest mix in `others`.
pub fn sampled_aut_transfer(
    a: &Design,
    b: &Design,
    preserving: &[LatticeMap],
    others: &[LatticeMap],
    samples: u64,
    seed: u64,
) -> Result<SampledTransferReport> {
    if preserving.is_empty() || a.n() != b.n() {
        return Err(Error::InvalidParameters("need generators and designs on the same ambient".into()));
    }
    let mixed: Vec<&LatticeMap> = preserving.iter().chain(others).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<LatticeMap> = (0..samples)
        .map(|s| {
            let len = rng.gen_range(1..=8);
            let mut m = LatticeMap::identity(a.field(), a.n());
            for _ in 0..len {
                let g = if s % 2 == 0 { &preserving[rng.gen_range(0..preserving.len())] } else { mixed[rng.gen_range(0..mixed.len())] };
                m = m.then(g);
            }
            m
        })
        .collect();
    if let Some(w) = words.first() {
        is_automorphism(w, a)?;
        is_automorphism(w, b)?;
    }
    let verdicts = par::map_slice(&words, |w| (preserves(w, a), preserves(w, b)));
    let preserving_count = verdicts.iter().filter(|v| v.0).count() as u64;
    let mismatch = verdicts.iter().position(|(x, y)| x != y).map(|i| words[i].matrix.clone());
    Ok(SampledTransferReport { samples, preserving: preserving_count, mismatch })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitCountReport {
    pub t_spaces: u64,
    /// Distinct values of N(A) observed.
    pub n_values: BTreeSet<u64>,
    /// Distinct values of λ(A), the number of (t+2)-circuits through A.
    pub lambda_values: BTreeSet<u64>,
    /// A t-space with N(A) ≠ (q + 1) λ(A).
    pub failure: Option<(Subspace, u64, u64)>,
}

impl CircuitCountReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// For every t-space A, counts the pairs (I, C) with A ⊆ I ⊆ C, I an
/// independent (t+1)-space and C a (t+2)-circuit, and checks the count
/// against (q + 1) times the number of (t+2)-circuits through A.
pub fn check_circuit_count_identity(s: &SteinerSystem, limits: &Limits) -> Result<CircuitCountReport> {
    let t = s.t();
    if t + 2 > s.n() {
        return Err(Error::InvalidParameters(format!("t + 2 exceeds n for {}", s.params())));
    }
    let g = Grassmannian::new(s.field(), s.n(), t)?;
    limits.check_subspaces(g.len() as u64)?;
    let q = s.field().q() as u64;
    let is_c2 = |c: &Subspace| classify_subspace(s, c).0 == SubspaceClass::Circuit;
    let rows = par::map_range(g.len(), |i| {
        let a = g.get(i);
        let mut n_a = 0u64;
        for ind in a.superspaces(t + 1).expect("t < n") {
            if classify_subspace(s, &ind).0 != SubspaceClass::Independent {
                continue;
            }
            n_a += ind.superspaces(t + 2).expect("t + 2 <= n").iter().filter(|c| is_c2(c)).count() as u64;
        }
        let lam = a.superspaces(t + 2).expect("t + 2 <= n").iter().filter(|c| is_c2(c)).count() as u64;
        (a, n_a, lam)
    });
    let failure = rows.iter().find(|(_, n_a, lam)| *n_a != (q + 1) * lam).cloned();
    Ok(CircuitCountReport {
        t_spaces: g.len() as u64,
        n_values: rows.iter().map(|r| r.1).collect(),
        lambda_values: rows.iter().map(|r| r.2).collect(),
        failure,
    })
}

/// The closed form of N(A): q^{k-t} [n-k,1]_q ([n-t-1,1]_q - [t+1,1]_q [k-t,1]_q).
pub fn circuit_pair_count(p: &DesignParams) -> Result<BigInt> {
    check_steiner_shape(p)?;
    if p.t + 2 > p.n || p.t >= p.k {
        return Err(Error::InvalidParameters(format!("need t < k and t + 2 <= n, got {p}")));
    }
    let g1 = |m: u64| BigInt::from(gaussian_binomial(m, 1, p.q));
    Ok(BigInt::from(Pow::pow(&q_big(p.q), p.k - p.t))
        * g1(p.n - p.k)
        * (g1(p.n - p.t - 1) - g1(p.t + 1) * g1(p.k - p.t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{desarguesian_spread, induced_rank_oracle, verify_design};
    use crate::qmatroid::{is_circuit, is_independent};

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    fn spread(n: usize, k: usize) -> SteinerSystem {
        desarguesian_spread(n, k, &f2(), &Limits::default()).unwrap()
    }

    fn sts(n: u64, q: u64) -> DesignParams {
        DesignParams::steiner(2, 3, n, q).unwrap()
    }

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_independent(&sts(7, 2)).unwrap(), b(30));
        assert_eq!(lambda_independent(&sts(13, 2)).unwrap(), b(2046));
        let s136 = DesignParams::steiner(1, 3, 6, 2).unwrap();
        assert_eq!(lambda_independent(&s136).unwrap(), b(28));
        assert_eq!(lambda_circuit_t1(&sts(13, 2)).unwrap(), b(1));
        assert_eq!(lambda_circuit_t1(&s136).unwrap(), b(3));
        assert_eq!(lambda_circuit_t1(&DesignParams::steiner(2, 4, 9, 3).unwrap()).unwrap(), b(4));
        assert_eq!(lambda_circuit_t2(&sts(13, 2)).unwrap(), b(692_912));
        let t2: Vec<_> = [2, 3, 4, 5].iter().map(|&q| lambda_circuit_t2(&sts(7, q)).unwrap()).collect();
        assert_eq!(t2, vec![b(80), b(810), b(4352), b(16250)]);
        assert_eq!(lambda_circuit_t2(&DesignParams::steiner(1, 2, 4, 2).unwrap()).unwrap(), b(0));
        assert_eq!(lambda_circuit_t2(&s136).unwrap(), b(56));
        assert!(lambda_independent(&DesignParams::new(2, 7, 3, 2u32, 2).unwrap()).is_err());
    }

    #[test]
    fn block_counts() {
        let l = lambda_independent(&sts(13, 2)).unwrap();
        assert_eq!(block_count(&l, 13, 2, 3, 2).unwrap(), b(3_267_963_270));
        let l = lambda_independent(&sts(7, 2)).unwrap();
        assert_eq!(block_count(&l, 7, 2, 3, 2).unwrap(), b(11_430));
    }

    #[test]
    fn kinds_parse() {
        for k in DerivedKind::ALL {
            assert_eq!(k.tag().parse::<DerivedKind>().unwrap(), k);
        }
        assert_eq!("circuit-t2".parse::<DerivedKind>().unwrap(), DerivedKind::CircuitT2);
        assert_eq!("independent".parse::<DerivedKind>().unwrap(), DerivedKind::IndependentT1);
        assert!("circuit".parse::<DerivedKind>().is_err());
    }

    #[test]
    fn derived_designs_of_small_spread() {
        let lim = Limits::default();
        let s = spread(4, 2);
        let ind = derive_design(&s, DerivedKind::IndependentT1, &lim).unwrap();
        assert_eq!(ind.len(), 30);
        assert!(verify_design(&ind, &lim).unwrap().passed());
        assert_eq!(ind, supplementary_design(s.design(), &lim).unwrap());
        let c1 = derive_design(&s, DerivedKind::CircuitT1, &lim).unwrap();
        assert_eq!(c1.blocks(), s.blocks());
        let c2 = derive_design(&s, DerivedKind::CircuitT2, &lim).unwrap();
        assert!(c2.is_empty());
        assert!(verify_design(&c2, &lim).unwrap().passed());
        assert!(check_supplementary_remark(&s, &lim).unwrap());
    }

    #[test]
    fn classification_matches_generic_oracle() {
        let lim = Limits::default();
        for s in [spread(4, 2)] {
            let m = induced_rank_oracle(&s);
            for a in crate::linalg::all_subspaces(s.field(), s.n(), &lim).unwrap() {
                let (class, rank) = classify_subspace(&s, &a);
                assert_eq!(rank, m.rank(&a));
                assert_eq!(class == SubspaceClass::Independent, is_independent(&m, &a), "{a}");
                assert_eq!(class == SubspaceClass::Circuit, is_circuit(&m, &a), "{a}");
            }
        }
    }

    #[test]
    fn lattice_maps() {
        let f = f2();
        let singular = Matrix::from_rows(&f, &[[1, 1], [1, 1]]).unwrap();
        assert!(LatticeMap::new(singular).is_err());
        let m = LatticeMap::new(Matrix::from_rows(&f, &[[1, 1], [0, 1]]).unwrap()).unwrap();
        let x = Subspace::span(&f, 2, &[[1, 0]]).unwrap();
        assert_eq!(m.apply(&x), Subspace::span(&f, 2, &[[1, 1]]).unwrap());
        assert_eq!(m.then(&m.inverse()), LatticeMap::identity(&f, 2));
        // the packed and dense paths agree
        let f3 = FieldSpec::new(3, 1).unwrap();
        let m3 = LatticeMap::new(Matrix::from_rows(&f3, &[[1, 2], [0, 1]]).unwrap()).unwrap();
        let y = Subspace::span(&f3, 2, &[[1, 0]]).unwrap();
        assert_eq!(m3.apply(&y), Subspace::span(&f3, 2, &[[1, 2]]).unwrap());
    }

    #[test]
    fn automorphism_examples() {
        let lim = Limits::default();
        let s = spread(4, 2);
        let id = LatticeMap::identity(&f2(), 4);
        assert!(is_automorphism(&id, &s).unwrap());
        for g in spread_stabilizer_generators(4, 2, &f2()).unwrap() {
            assert!(is_automorphism(&g, &s).unwrap());
        }
        assert!(transvections(4, &f2()).iter().any(|t| !is_automorphism(t, &s).unwrap()));
        assert!(is_automorphism(&LatticeMap::identity(&f2(), 3), &s).is_err());
        let full = Design::complete(&f2(), 3, 1, 2, &lim).unwrap();
        assert_eq!(automorphism_group(&full, &lim).unwrap().order(), 168);
        let empty = Design::new(&f2(), DesignParams::new(1, 3, 2, 0u32, 2).unwrap(), vec![]).unwrap();
        assert_eq!(automorphism_group(&empty, &lim).unwrap().order(), 168);
        let tight = Limits { max_group_order: 100, ..lim };
        assert!(matches!(automorphism_group(&full, &tight), Err(Error::BoundExceeded { .. })));
        assert_eq!(gl_order(4, 2), Some(20160));
    }

    #[test]
    fn spread_stabilizer_order() {
        let lim = Limits::default();
        let s = spread(4, 2);
        let g = automorphism_group(&s, &lim).unwrap();
        // ΓL(2, 4): |GL(2, 4)| times the Frobenius
        assert_eq!(g.order(), 360);
        assert!(g.closure_violation(1).is_none());
    }

    #[test]
    fn circuit_counts_closed_form() {
        let p = DesignParams::steiner(1, 3, 6, 2).unwrap();
        assert_eq!(circuit_pair_count(&p).unwrap(), BigInt::from(168));
        assert_eq!(circuit_pair_count(&sts(7, 2)).unwrap(), BigInt::from(240));
    }
}
