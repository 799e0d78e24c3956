//! Rank oracles and the q-matroid axioms.
//!
//! A [`RankOracle`] is any deterministic function from subspaces of F_q^n to
//! nonnegative integers. [`check_rank_axioms`] decides whether it is a
//! q-matroid:
//!
//! - (R1) `0 <= r(A) <= dim A`
//! - (R2) `A ⊆ B` implies `r(A) <= r(B)`
//! - (R3) `r(A + B) + r(A ∩ B) <= r(A) + r(B)`
//!
//! The representable construction reads the generator `G` as a k x n matrix
//! over F_{q^m} and sets `r(A) = rank(G Yᵀ)`, where the rows of `Y` are the
//! canonical basis of `A`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{Grassmannian, Matrix, Subspace};
use crate::{par, Limits};

type RankFn = dyn Fn(&Subspace) -> usize + Send + Sync;

/// A rank function on the subspaces of F_q^n.
#[derive(Clone)]
pub struct RankOracle {
    field: FieldSpec,
    n: usize,
    name: String,
    rank: Arc<RankFn>,
    memo: Option<Arc<RwLock<HashMap<Subspace, usize>>>>,
    lines: Arc<OnceLock<Vec<Subspace>>>,
}

impl fmt::Debug for RankOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RankOracle({} on {}^{})", self.name, self.field, self.n)
    }
}

impl RankOracle {
    pub fn new<F>(field: &FieldSpec, n: usize, name: impl Into<String>, rank: F) -> Self
    where
        F: Fn(&Subspace) -> usize + Send + Sync + 'static,
    {
        RankOracle {
            field: field.clone(),
            n,
            name: name.into(),
            rank: Arc::new(rank),
            memo: None,
            lines: Arc::new(OnceLock::new()),
        }
    }

    /// Caches rank values by canonical subspace.
    pub fn memoized(mut self) -> Self {
        self.memo = Some(Arc::new(RwLock::new(HashMap::new())));
        self
    }

    /// U_{k,n}: `r(A) = min(dim A, k)`.
    pub fn uniform(field: &FieldSpec, n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::OutOfRange { what: "uniform rank k > n", value: k as i64 });
        }
        Ok(RankOracle::new(field, n, format!("U_{{{k},{n}}}"), move |a| uniform_rank(k, a)))
    }

    /// The free q-matroid, `r(A) = dim A`.
    pub fn free(field: &FieldSpec, n: usize) -> Self {
        RankOracle::new(field, n, "free", |a| a.dim())
    }

    /// The q-matroid of a k x n matrix over F_{q^m}, on subspaces of F_q^n.
    /// The base field must be prime.
    pub fn representable(g: &Matrix, base: &FieldSpec) -> Result<Self> {
        if !base.is_prime_field() || g.field().p() != base.p() {
            return Err(Error::InvalidParameters(format!(
                "representable matroids need a prime base field of the same characteristic, got {} over {}",
                g.field(),
                base
            )));
        }
        let g = g.clone();
        let name = format!("representable {}x{} over {}", g.rows(), g.cols(), g.field());
        let n = g.cols();
        Ok(RankOracle::new(base, n, name, move |a| {
            representable_rank(&g, a).expect("ambient checked by the oracle")
        }))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// r(A). Panics if `a` lives in a different ambient space.
    pub fn rank(&self, a: &Subspace) -> usize {
        assert!(
            a.ambient_dim() == self.n && a.field() == &self.field,
            "subspace of {}^{} passed to an oracle on {}^{}",
            a.field(),
            a.ambient_dim(),
            self.field,
            self.n
        );
        let Some(memo) = &self.memo else {
            return (self.rank)(a);
        };
        if let Some(&r) = memo.read().expect("memo lock").get(a) {
            return r;
        }
        let r = (self.rank)(a);
        memo.write().expect("memo lock").insert(a.clone(), r);
        r
    }

    pub fn try_rank(&self, a: &Subspace) -> Result<usize> {
        if a.ambient_dim() != self.n {
            return Err(Error::AmbientMismatch { left: self.n, right: a.ambient_dim() });
        }
        if a.field() != &self.field {
            return Err(Error::FieldMismatch { left: self.field.q(), right: a.field().q() });
        }
        Ok(self.rank(a))
    }

    /// The 1-dimensional subspaces of E, in canonical order.
    pub fn lines(&self) -> &[Subspace] {
        self.lines.get_or_init(|| Grassmannian::new(&self.field, self.n, 1).map(|g| g.to_vec()).unwrap_or_default())
    }

    pub fn full_space(&self) -> Subspace {
        Subspace::full(&self.field, self.n)
    }
}

pub fn uniform_rank(k: usize, a: &Subspace) -> usize {
    a.dim().min(k)
}

/// `rank(G Yᵀ)` over the field of `G`, where `Y` is the basis matrix of `a`.
pub fn representable_rank(g: &Matrix, a: &Subspace) -> Result<usize> {
    if a.ambient_dim() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "generator has {} columns but the subspace lives in dimension {}",
            g.cols(),
            a.ambient_dim()
        )));
    }
    if a.is_zero() {
        return Ok(0);
    }
    let y = a.basis_matrix();
    let y = if y.field() == g.field() { y } else { y.lift_to(g.field())? };
    Ok(g.mul(&y.transpose())?.rank())
}

pub fn is_independent(m: &RankOracle, a: &Subspace) -> bool {
    m.rank(a) == a.dim()
}

/// Dependent, with every hyperplane of `c` independent.
pub fn is_circuit(m: &RankOracle, c: &Subspace) -> bool {
    !is_independent(m, c) && c.hyperplanes().iter().all(|h| is_independent(m, h))
}

/// Every line outside `f` raises the rank.
pub fn is_flat(m: &RankOracle, f: &Subspace) -> bool {
    if f.is_full() {
        return true;
    }
    let r = m.rank(f);
    m.lines().iter().filter(|x| !f.includes(x)).all(|x| m.rank(&f.join(x)) > r)
}

/// The smallest flat containing `a`, as `a` plus every line that does not
/// raise its rank. Fails if the result is not a flat of the same rank, which
/// can only happen when the oracle violates the axioms.
pub fn closure(m: &RankOracle, a: &Subspace) -> Result<Subspace> {
    let r = m.rank(a);
    let mut f = a.clone();
    for x in m.lines() {
        if !f.includes(x) && m.rank(&a.join(x)) == r {
            f = f.join(x);
        }
    }
    if m.rank(&f) != r || !is_flat(m, &f) {
        return Err(Error::NotAMatroid(format!("closure of {a} is not a flat of rank {r}")));
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankAxiom {
    R1,
    R2,
    R3,
}

impl fmt::Display for RankAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankAxiom::R1 => "R1",
            RankAxiom::R2 => "R2",
            RankAxiom::R3 => "R3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankViolation {
    pub axiom: RankAxiom,
    pub a: Subspace,
    pub b: Option<Subspace>,
    pub detail: String,
}

impl fmt::Display for RankViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) fails at A = [{}]", self.axiom, self.a)?;
        if let Some(b) = &self.b {
            write!(f, ", B = [{b}]")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankAxiomReport {
    pub violation: Option<RankViolation>,
    /// Subspaces on which (R1) was checked.
    pub subspaces: u64,
    /// Pairs on which (R2) and (R3) were checked.
    pub pairs: u64,
}

impl RankAxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn check_r1(a: &Subspace, r: usize) -> Option<RankViolation> {
    (r > a.dim()).then(|| RankViolation {
        axiom: RankAxiom::R1,
        a: a.clone(),
        b: None,
        detail: format!("r(A) = {r} exceeds dim A = {}", a.dim()),
    })
}

/// (R2) in both directions and (R3) for one pair, given a rank lookup.
fn check_pair(a: &Subspace, b: &Subspace, rank: impl Fn(&Subspace) -> usize) -> Option<RankViolation> {
    let (ra, rb) = (rank(a), rank(b));
    for (x, y, rx, ry) in [(a, b, ra, rb), (b, a, rb, ra)] {
        if y.includes(x) && rx > ry {
            return Some(RankViolation {
                axiom: RankAxiom::R2,
                a: x.clone(),
                b: Some(y.clone()),
                detail: format!("A ⊆ B but r(A) = {rx} > r(B) = {ry}"),
            });
        }
    }
    let (rs, ri) = (rank(&a.join(b)), rank(&a.meet(b)));
    (rs + ri > ra + rb).then(|| RankViolation {
        axiom: RankAxiom::R3,
        a: a.clone(),
        b: Some(b.clone()),
        detail: format!("r(A+B) + r(A∩B) = {rs} + {ri} > r(A) + r(B) = {ra} + {rb}"),
    })
}

fn all_subspaces_indexed(m: &RankOracle, limits: &Limits) -> Result<Vec<Subspace>> {
    crate::linalg::all_subspaces(&m.field, m.n, limits)
}

/// Checks (R1) on every subspace and (R2), (R3) on every unordered pair.
/// The first violation in enumeration order is reported.
pub fn check_rank_axioms(m: &RankOracle, limits: &Limits) -> Result<RankAxiomReport> {
    let all = all_subspaces_indexed(m, limits)?;
    let ranks = par::map_slice(&all, |a| m.rank(a));
    let count = all.len() as u64;
    if let Some(v) = all.iter().zip(&ranks).find_map(|(a, &r)| check_r1(a, r)) {
        return Ok(RankAxiomReport { violation: Some(v), subspaces: count, pairs: 0 });
    }
    let index: HashMap<&Subspace, usize> = all.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let lookup = |s: &Subspace| ranks[index[s]];
    let violation = par::find_first(all.len(), |i| {
        all[i..].iter().find_map(|b| check_pair(&all[i], b, lookup))
    });
    Ok(RankAxiomReport { violation, subspaces: count, pairs: count * (count + 1) / 2 })
}

/// Parameters for [`check_rank_axioms_sampled`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSampling {
    /// Every pair of subspaces of dimension at most this is checked.
    pub max_pair_dim: usize,
    /// Additional uniformly random pairs of arbitrary subspaces.
    pub random_pairs: u64,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        PairSampling { max_pair_dim: 3, random_pairs: 100_000, seed: 0x5eed }
    }
}

/// Uniform sampler over all subspaces of F_q^n.
struct SubspaceSampler {
    grs: Vec<Grassmannian>,
    total: u64,
}

impl SubspaceSampler {
    fn new(field: &FieldSpec, n: usize) -> Result<Self> {
        let grs = (0..=n).map(|k| Grassmannian::new(field, n, k)).collect::<Result<Vec<_>>>()?;
        let total = grs.iter().try_fold(0u64, |acc, g| acc.checked_add(g.len() as u64));
        let total = total.ok_or(Error::OutOfRange { what: "number of subspaces", value: n as i64 })?;
        Ok(SubspaceSampler { grs, total })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Subspace {
        let mut i = rng.gen_range(0..self.total);
        for g in &self.grs {
            if i < g.len() as u64 {
                return g.get(i as usize);
            }
            i -= g.len() as u64;
        }
        unreachable!("index below total")
    }
}

/// (R1)–(R3) on all pairs of low-dimensional subspaces plus random pairs,
/// for ambients too large for the exhaustive sweep. Deterministic in `seed`.
pub fn check_rank_axioms_sampled(m: &RankOracle, sampling: &PairSampling, limits: &Limits) -> Result<RankAxiomReport> {
    let low = crate::linalg::subspaces_up_to(&m.field, m.n, sampling.max_pair_dim, limits)?;
    let ranks = par::map_slice(&low, |a| m.rank(a));
    if let Some(v) = low.iter().zip(&ranks).find_map(|(a, &r)| check_r1(a, r)) {
        return Ok(RankAxiomReport { violation: Some(v), subspaces: low.len() as u64, pairs: 0 });
    }
    let rank = |s: &Subspace| m.rank(s);
    let violation = par::find_first(low.len(), |i| low[i..].iter().find_map(|b| check_pair(&low[i], b, rank)));
    let low_pairs = (low.len() as u64) * (low.len() as u64 + 1) / 2;
    if violation.is_some() {
        return Ok(RankAxiomReport { violation, subspaces: low.len() as u64, pairs: low_pairs });
    }
    let sampler = SubspaceSampler::new(&m.field, m.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let pairs: Vec<(Subspace, Subspace)> =
        (0..sampling.random_pairs).map(|_| (sampler.sample(&mut rng), sampler.sample(&mut rng))).collect();
    let violation = par::find_first(pairs.len(), |i| {
        let (a, b) = &pairs[i];
        check_r1(a, m.rank(a)).or_else(|| check_r1(b, m.rank(b))).or_else(|| check_pair(a, b, rank))
    });
    Ok(RankAxiomReport {
        violation,
        subspaces: low.len() as u64 + 2 * sampling.random_pairs,
        pairs: low_pairs + sampling.random_pairs,
    })
}
