//! Subspace designs, Desarguesian spreads, and the q-matroid of a q-Steiner
//! system.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::flats::{flats_from_rank, FlatFamily};
use crate::linalg::{Grassmannian, Subspace};
use crate::qcount::{dual_params, gaussian_binomial, supplementary_params, DesignParams};
use crate::qmatroid::RankOracle;
use crate::{par, Limits};

/// A t-(n, k, λ; q) design: k-dimensional blocks in canonical order, with a
/// hash index for membership. Construction checks the block shapes only;
/// [`verify_design`] checks the λ condition.
#[derive(Clone)]
pub struct Design {
    field: FieldSpec,
    params: DesignParams,
    blocks: Arc<Vec<Subspace>>,
    index: Arc<HashSet<Subspace>>,
}

impl fmt::Debug for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Design({}, {} blocks)", self.params, self.blocks.len())
    }
}

impl PartialEq for Design {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.blocks == other.blocks
    }
}

impl Eq for Design {}

impl Design {
    pub fn new(field: &FieldSpec, params: DesignParams, mut blocks: Vec<Subspace>) -> Result<Self> {
        params.validate()?;
        if field.q() as u64 != params.q {
            return Err(Error::FieldMismatch { left: field.q(), right: params.q as u32 });
        }
        for b in &blocks {
            if b.ambient_dim() as u64 != params.n {
                return Err(Error::AmbientMismatch { left: params.n as usize, right: b.ambient_dim() });
            }
            if b.field() != field {
                return Err(Error::FieldMismatch { left: field.q(), right: b.field().q() });
            }
            if b.dim() as u64 != params.k {
                return Err(Error::InvalidParameters(format!(
                    "block [{b}] has dimension {}, expected k = {}",
                    b.dim(),
                    params.k
                )));
            }
        }
        blocks.sort();
        if let Some(w) = blocks.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters(format!("repeated block [{}]", w[0])));
        }
        let index = blocks.iter().cloned().collect();
        Ok(Design { field: field.clone(), params, blocks: Arc::new(blocks), index: Arc::new(index) })
    }

    /// All k-subspaces of F_q^n, a t-(n, k, [n-t, k-t]_q; q) design.
    pub fn complete(field: &FieldSpec, n: usize, t: usize, k: usize, limits: &Limits) -> Result<Self> {
        let g = Grassmannian::new(field, n, k)?;
        limits.check_subspaces(g.len() as u64)?;
        let q = field.q() as u64;
        let lambda = gaussian_binomial((n - t) as u64, k.saturating_sub(t) as u64, q);
        Design::new(field, DesignParams::new(t as u64, n as u64, k as u64, lambda, q)?, g.to_vec())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn params(&self) -> &DesignParams {
        &self.params
    }

    pub fn blocks(&self) -> &[Subspace] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn n(&self) -> usize {
        self.params.n as usize
    }

    pub fn t(&self) -> usize {
        self.params.t as usize
    }

    pub fn k(&self) -> usize {
        self.params.k as usize
    }

    pub fn has_block(&self, s: &Subspace) -> bool {
        self.index.contains(s)
    }

    /// Whether some block contains `a`.
    pub fn in_some_block(&self, a: &Subspace) -> bool {
        match a.dim().cmp(&self.k()) {
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.has_block(a),
            std::cmp::Ordering::Less => self.blocks.iter().any(|b| b.includes(a)),
        }
    }

    pub fn block_set(&self) -> &HashSet<Subspace> {
        &self.index
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStrategy {
    /// For each t-space, look up its k-dimensional superspaces in the index.
    Superspaces,
    /// Count the t-subspaces of each block.
    BlockScan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignReport {
    pub strategy: VerifyStrategy,
    pub t_subspaces: u64,
    /// First t-space in canonical order whose block count differs from λ.
    pub failure: Option<(Subspace, u64)>,
}

impl DesignReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn saturating_u128(x: BigUint) -> u128 {
    x.to_u128().unwrap_or(u128::MAX)
}

pub fn choose_strategy(d: &Design) -> VerifyStrategy {
    let p = &d.params;
    let n_t = saturating_u128(gaussian_binomial(p.n, p.t, p.q));
    let per_t = saturating_u128(gaussian_binomial(p.n - p.t, p.k - p.t, p.q));
    let per_block = saturating_u128(gaussian_binomial(p.k, p.t, p.q));
    let superspaces = n_t.saturating_mul(per_t);
    let scan = (d.len() as u128).saturating_mul(per_block).saturating_add(n_t);
    if superspaces <= scan {
        VerifyStrategy::Superspaces
    } else {
        VerifyStrategy::BlockScan
    }
}

/// Checks that every t-subspace lies in exactly λ blocks.
pub fn verify_design(d: &Design, limits: &Limits) -> Result<DesignReport> {
    verify_design_with(d, choose_strategy(d), limits)
}

pub fn verify_design_with(d: &Design, strategy: VerifyStrategy, limits: &Limits) -> Result<DesignReport> {
    let g = Grassmannian::new(&d.field, d.n(), d.t())?;
    limits.check_subspaces(g.len() as u64)?;
    let lambda = d.params.lambda.to_u64();
    let failure = match strategy {
        VerifyStrategy::Superspaces => par::find_first(g.len(), |i| {
            let t = g.get(i);
            let count = t.superspaces(d.k()).expect("t <= k").iter().filter(|s| d.has_block(s)).count() as u64;
            (Some(count) != lambda).then_some((t, count))
        }),
        VerifyStrategy::BlockScan => {
            let per_block = par::map_slice(&d.blocks, |b| b.subspaces(d.t()));
            let mut counts: HashMap<Subspace, u64> = HashMap::new();
            for t in per_block.into_iter().flatten() {
                *counts.entry(t).or_default() += 1;
            }
            par::find_first(g.len(), |i| {
                let t = g.get(i);
                let count = counts.get(&t).copied().unwrap_or(0);
                (Some(count) != lambda).then_some((t, count))
            })
        }
    };
    Ok(DesignReport { strategy, t_subspaces: g.len() as u64, failure })
}

/// The k-subspaces that are not blocks.
pub fn supplementary_design(d: &Design, limits: &Limits) -> Result<Design> {
    let g = Grassmannian::new(&d.field, d.n(), d.k())?;
    limits.check_subspaces(g.len() as u64)?;
    let blocks: Vec<Subspace> = par::map_range(g.len(), |i| {
        let s = g.get(i);
        (!d.has_block(&s)).then_some(s)
    })
    .into_iter()
    .flatten()
    .collect();
    Design::new(&d.field, supplementary_params(&d.params)?, blocks)
}

/// The orthogonal complements of the blocks.
pub fn dual_design(d: &Design) -> Result<Design> {
    let params = dual_params(&d.params)?;
    let blocks = par::map_slice(&d.blocks, |b| b.orthogonal());
    Design::new(&d.field, params, blocks)
}

/// A design with λ = 1 that has passed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerSystem(Design);

impl SteinerSystem {
    pub fn new(d: Design, limits: &Limits) -> Result<Self> {
        if d.params.lambda != BigUint::from(1u32) {
            return Err(Error::InvalidParameters(format!("λ = {} is not 1", d.params.lambda)));
        }
        let report = verify_design(&d, limits)?;
        if let Some((t, c)) = report.failure {
            return Err(Error::Verification(format!("t-space [{t}] lies in {c} blocks")));
        }
        Ok(SteinerSystem(d))
    }

    pub fn design(&self) -> &Design {
        &self.0
    }

    pub fn into_design(self) -> Design {
        self.0
    }
}

impl Deref for SteinerSystem {
    type Target = Design;

    fn deref(&self) -> &Design {
        &self.0
    }
}

fn digits(p: u32, k: usize, mut repr: u32) -> impl Iterator<Item = u16> {
    (0..k).map(move |_| {
        let d = (repr % p) as u16;
        repr /= p;
        d
    })
}

/// The spread of F_q^n (q prime) obtained from the points of the projective
/// space over F_{q^k}: each 1-dimensional F_{q^k}-subspace of (F_{q^k})^{n/k}
/// becomes a k-dimensional F_q-subspace by expanding coordinates in the
/// polynomial basis of F_{q^k}.
pub fn desarguesian_spread(n: usize, k: usize, field: &FieldSpec, limits: &Limits) -> Result<SteinerSystem> {
    if k == 0 || n == 0 || n % k != 0 {
        return Err(Error::InvalidParameters(format!("spread needs k | n, got n = {n}, k = {k}")));
    }
    if !field.is_prime_field() {
        return Err(Error::InvalidParameters(format!("spreads are built over prime fields only, got {field}")));
    }
    let p = field.p();
    let ext = FieldSpec::new(p, k as u32)?;
    let big_q = ext.q();
    let m = n / k;
    let count = (big_q as u64).checked_pow(m as u32).map(|v| (v - 1) / (big_q as u64 - 1));
    match count {
        Some(c) => limits.check_subspaces(c)?,
        None => return Err(Error::OutOfRange { what: "spread size", value: n as i64 }),
    }
    // normalised points: first nonzero coordinate equal to 1
    let mut blocks = Vec::new();
    for lead in 0..m {
        let tail = m - lead - 1;
        for code in 0..(big_q as u64).pow(tail as u32) {
            let mut point = vec![0u16; m];
            point[lead] = 1;
            let mut c = code;
            for slot in point[lead + 1..].iter_mut().rev() {
                *slot = (c % big_q as u64) as u16;
                c /= big_q as u64;
            }
            let mut basis = Vec::with_capacity(k);
            let mut scalar = 1u16;
            for _ in 0..k {
                let v: Vec<u16> =
                    point.iter().flat_map(|&x| digits(p, k, ext.mul(scalar, x) as u32)).collect();
                basis.push(v);
                scalar = ext.mul(scalar, p as u16);
            }
            blocks.push(Subspace::span(field, n, &basis)?);
        }
    }
    let params = DesignParams::steiner(1, k as u64, n as u64, field.q() as u64)?;
    SteinerSystem::new(Design::new(field, params, blocks)?, limits)
}

/// The flats of the q-matroid of a Steiner system: E, the blocks, and every
/// subspace of dimension below t.
pub fn induced_flat_family(s: &SteinerSystem) -> FlatFamily {
    let d = s.design().clone();
    FlatFamily::from_predicate(s.field(), s.n(), move |f| f.is_full() || d.has_block(f) || f.dim() < d.t())
}

/// dim A up to t, then t inside a block and t + 1 outside.
pub fn induced_rank(s: &SteinerSystem, a: &Subspace) -> usize {
    let t = s.t();
    if a.dim() <= t {
        a.dim()
    } else if s.in_some_block(a) {
        t
    } else {
        t + 1
    }
}

pub fn induced_rank_oracle(s: &SteinerSystem) -> RankOracle {
    let s2 = s.clone();
    RankOracle::new(s.field(), s.n(), format!("induced by {}", s.params()), move |a| induced_rank(&s2, a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QpmdReport {
    /// rank -> dimensions of the flats of that rank.
    pub dims_by_rank: BTreeMap<usize, BTreeSet<usize>>,
    /// Two flats of equal rank and different dimension.
    pub violation: Option<(Subspace, Subspace)>,
}

impl QpmdReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Whether all flats of equal rank have equal dimension.
pub fn is_qpmd(m: &RankOracle, limits: &Limits) -> Result<QpmdReport> {
    let flats = flats_from_rank(m, limits)?.members(limits)?;
    let mut first_of: BTreeMap<usize, &Subspace> = BTreeMap::new();
    let mut dims_by_rank: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut violation = None;
    for f in &flats {
        let r = m.rank(f);
        dims_by_rank.entry(r).or_default().insert(f.dim());
        let first = *first_of.entry(r).or_insert(f);
        if violation.is_none() && first.dim() != f.dim() {
            violation = Some((first.clone(), f.clone()));
        }
    }
    Ok(QpmdReport { dims_by_rank, violation })
}

/// Blocks containing `i` and meeting `j` trivially.
pub fn intersection_count(d: &Design, i: &Subspace, j: &Subspace) -> u64 {
    d.blocks().iter().filter(|b| b.includes(i) && b.meet(j).is_zero()).count() as u64
}

/// The set of values of [`intersection_count`] over all pairs of an
/// i-space and a j-space meeting trivially. A singleton confirms that λ_{i,j}
/// is well defined.
pub fn exhaustive_intersection_counts(d: &Design, i: usize, j: usize, limits: &Limits) -> Result<BTreeSet<u64>> {
    let gi = Grassmannian::new(d.field(), d.n(), i)?;
    let gj = Grassmannian::new(d.field(), d.n(), j)?;
    limits.check_subspaces(gi.len() as u64 + gj.len() as u64)?;
    let js = gj.to_vec();
    let per_i = par::map_range(gi.len(), |a| {
        let is = gi.get(a);
        js.iter().filter(|jj| jj.meet(&is).is_zero()).map(|jj| intersection_count(d, &is, jj)).collect::<BTreeSet<_>>()
    });
    Ok(per_i.into_iter().flatten().collect())
}
