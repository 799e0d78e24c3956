//! Families of flats and the flats/rank correspondence.
//!
//! A [`FlatFamily`] is either an explicit list of subspaces or a membership
//! predicate. [`check_flat_axioms`] tests
//!
//! - (F1) `E` is a member,
//! - (F2) members are closed under intersection,
//! - (F3) for every member `F` and line `x ⊄ F`, exactly one member covering
//!   `F` contains `x`,
//!
//! and [`FlatFamily::validate`] turns a passing family into [`Flats`], which
//! carries the cover relation and answers lattice and rank queries.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{Grassmannian, Subspace};
use crate::qmatroid::{is_flat, RankOracle};
use crate::{par, Limits};

type Predicate = dyn Fn(&Subspace) -> bool + Send + Sync;

#[derive(Clone)]
enum Presentation {
    Explicit(Vec<Subspace>),
    Predicate(Arc<Predicate>),
}

/// A family of subspaces of F_q^n proposed as the flats of a q-matroid.
#[derive(Clone)]
pub struct FlatFamily {
    field: FieldSpec,
    n: usize,
    presentation: Presentation,
}

impl fmt::Debug for FlatFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.presentation {
            Presentation::Explicit(m) => write!(f, "FlatFamily({}^{}, {} members)", self.field, self.n, m.len()),
            Presentation::Predicate(_) => write!(f, "FlatFamily({}^{}, predicate)", self.field, self.n),
        }
    }
}

impl FlatFamily {
    /// An explicit family. Duplicates are removed; members are kept in canonical order.
    pub fn explicit(field: &FieldSpec, n: usize, mut members: Vec<Subspace>) -> Result<Self> {
        for m in &members {
            if m.ambient_dim() != n {
                return Err(Error::AmbientMismatch { left: n, right: m.ambient_dim() });
            }
            if m.field() != field {
                return Err(Error::FieldMismatch { left: field.q(), right: m.field().q() });
            }
        }
        members.sort();
        members.dedup();
        Ok(FlatFamily { field: field.clone(), n, presentation: Presentation::Explicit(members) })
    }

    /// A family given by a membership test.
    pub fn from_predicate<P>(field: &FieldSpec, n: usize, pred: P) -> Self
    where
        P: Fn(&Subspace) -> bool + Send + Sync + 'static,
    {
        FlatFamily { field: field.clone(), n, presentation: Presentation::Predicate(Arc::new(pred)) }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        match &self.presentation {
            Presentation::Explicit(m) => m.binary_search(s).is_ok(),
            Presentation::Predicate(p) => s.ambient_dim() == self.n && p(s),
        }
    }

    /// Members of dimension at most `max_dim`, in canonical order.
    pub fn members_up_to(&self, max_dim: usize, limits: &Limits) -> Result<Vec<Subspace>> {
        match &self.presentation {
            Presentation::Explicit(m) => Ok(m.iter().filter(|s| s.dim() <= max_dim).cloned().collect()),
            Presentation::Predicate(p) => {
                let mut out = Vec::new();
                let mut seen: u64 = 0;
                for k in 0..=max_dim.min(self.n) {
                    let g = Grassmannian::new(&self.field, self.n, k)?;
                    seen = seen.saturating_add(g.len() as u64);
                    limits.check_subspaces(seen)?;
                    let pred = p.clone();
                    out.extend(par::map_range(g.len(), |i| {
                        let s = g.get(i);
                        pred(&s).then_some(s)
                    })
                    .into_iter()
                    .flatten());
                }
                Ok(out)
            }
        }
    }

    pub fn members(&self, limits: &Limits) -> Result<Vec<Subspace>> {
        self.members_up_to(self.n, limits)
    }

    /// Checks (F1)–(F3) and builds the lattice.
    pub fn validate(&self, limits: &Limits) -> Result<Flats> {
        let lattice = Lattice::new(&self.field, self.n, self.members(limits)?);
        if let Some(v) = lattice.flat_axiom_violation() {
            return Err(Error::FlatAxioms(v.to_string()));
        }
        Ok(Flats::from_lattice(lattice))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlatAxiom {
    F1,
    F2,
    F3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatViolation {
    pub axiom: FlatAxiom,
    pub witnesses: Vec<Subspace>,
    pub detail: String,
}

impl fmt::Display for FlatViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) {}", self.axiom, self.detail)?;
        for w in &self.witnesses {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatAxiomReport {
    pub members: usize,
    pub violation: Option<FlatViolation>,
}

impl FlatAxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn check_flat_axioms(family: &FlatFamily, limits: &Limits) -> Result<FlatAxiomReport> {
    let lattice = Lattice::new(&family.field, family.n, family.members(limits)?);
    Ok(FlatAxiomReport { members: lattice.members.len(), violation: lattice.flat_axiom_violation() })
}

/// Members, their index, and the cover relation, without any axioms assumed.
#[derive(Debug, Clone)]
struct Lattice {
    field: FieldSpec,
    n: usize,
    members: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
    /// upper[i]: members covering members[i].
    upper: Vec<Vec<usize>>,
    lines: Vec<Subspace>,
}

impl Lattice {
    fn new(field: &FieldSpec, n: usize, mut members: Vec<Subspace>) -> Self {
        members.sort();
        members.dedup();
        let index = members.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let upper = par::map_range(members.len(), |i| {
            let above: Vec<usize> =
                (0..members.len()).filter(|&j| members[j].dim() > members[i].dim() && members[j].includes(&members[i])).collect();
            above
                .iter()
                .copied()
                .filter(|&j| {
                    !above.iter().any(|&k| members[k].dim() < members[j].dim() && members[j].includes(&members[k]))
                })
                .collect()
        });
        let lines = Grassmannian::new(field, n, 1).map(|g| g.to_vec()).unwrap_or_default();
        Lattice { field: field.clone(), n, members, index, upper, lines }
    }

    fn flat_axiom_violation(&self) -> Option<FlatViolation> {
        let full = Subspace::full(&self.field, self.n);
        if !self.index.contains_key(&full) {
            return Some(FlatViolation {
                axiom: FlatAxiom::F1,
                witnesses: vec![full],
                detail: "E is not a member".into(),
            });
        }
        let m = &self.members;
        let f2 = par::find_first(m.len(), |i| {
            m[i + 1..].iter().find_map(|b| {
                let c = m[i].meet(b);
                (!self.index.contains_key(&c)).then(|| FlatViolation {
                    axiom: FlatAxiom::F2,
                    witnesses: vec![m[i].clone(), b.clone(), c.clone()],
                    detail: "intersection of two members is not a member".into(),
                })
            })
        });
        if f2.is_some() {
            return f2;
        }
        par::find_first(m.len(), |i| {
            self.lines.iter().filter(|x| !m[i].includes(x)).find_map(|x| {
                let hits: Vec<&Subspace> = self.upper[i].iter().map(|&j| &m[j]).filter(|c| c.includes(x)).collect();
                (hits.len() != 1).then(|| {
                    let mut witnesses = vec![m[i].clone(), x.clone()];
                    witnesses.extend(hits.iter().map(|s| (*s).clone()));
                    FlatViolation {
                        axiom: FlatAxiom::F3,
                        witnesses,
                        detail: format!("{} covering members contain the line, expected exactly 1", hits.len()),
                    }
                })
            })
        })
    }
}

/// Which end of the canonical order the greedy rank computation draws lines from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineOrder {
    #[default]
    Canonical,
    Reverse,
}

/// A family that satisfies (F1)–(F3), with its lattice structure.
#[derive(Debug, Clone)]
pub struct Flats {
    lattice: Arc<Lattice>,
    bottom: usize,
}

impl Flats {
    fn from_lattice(lattice: Lattice) -> Self {
        let zero = Subspace::zero(&lattice.field, lattice.n);
        let bottom_space = meet_of_members_containing(&lattice.members, &zero, &lattice.field, lattice.n);
        let bottom = lattice.index[&bottom_space];
        Flats { lattice: Arc::new(lattice), bottom }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.lattice.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.lattice.n
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[Subspace] {
        &self.lattice.members
    }

    pub fn len(&self) -> usize {
        self.lattice.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.members.is_empty()
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.lattice.index.contains_key(s)
    }

    pub fn bottom(&self) -> &Subspace {
        &self.lattice.members[self.bottom]
    }

    fn idx(&self, s: &Subspace) -> Result<usize> {
        self.lattice.index.get(s).copied().ok_or_else(|| Error::NotAMember(s.to_string()))
    }

    /// Members covering `f`.
    pub fn upper_covers(&self, f: &Subspace) -> Result<Vec<Subspace>> {
        let i = self.idx(f)?;
        Ok(self.lattice.upper[i].iter().map(|&j| self.lattice.members[j].clone()).collect())
    }

    pub fn covers(&self, upper: &Subspace, lower: &Subspace) -> Result<bool> {
        let (u, l) = (self.idx(upper)?, self.idx(lower)?);
        Ok(self.lattice.upper[l].contains(&u))
    }

    /// The intersection of all members containing `a`.
    pub fn family_closure(&self, a: &Subspace) -> Subspace {
        meet_of_members_containing(&self.lattice.members, a, &self.lattice.field, self.lattice.n)
    }

    pub fn lattice_meet(&self, f1: &Subspace, f2: &Subspace) -> Result<Subspace> {
        self.idx(f1)?;
        self.idx(f2)?;
        Ok(f1.meet(f2))
    }

    pub fn lattice_join(&self, f1: &Subspace, f2: &Subspace) -> Result<Subspace> {
        self.idx(f1)?;
        self.idx(f2)?;
        Ok(self.family_closure(&f1.join(f2)))
    }

    /// A pair (F1, F2) where F1 covers F1 ∧ F2 but F1 ∨ F2 does not cover F2.
    pub fn semimodular_violation(&self) -> Option<(Subspace, Subspace)> {
        let m = &self.lattice.members;
        let up = &self.lattice.upper;
        par::find_first(m.len(), |i| {
            (0..m.len()).find_map(|j| {
                let meet = self.lattice.index[&m[i].meet(&m[j])];
                if !up[meet].contains(&i) {
                    return None;
                }
                let join = self.lattice.index[&self.family_closure(&m[i].join(&m[j]))];
                (!up[j].contains(&join)).then(|| (m[i].clone(), m[j].clone()))
            })
        })
    }

    pub fn check_semimodular(&self) -> bool {
        self.semimodular_violation().is_none()
    }

    /// Shortest and longest maximal chain lengths from member `lo` to every
    /// member above it, by dynamic programming over the cover relation.
    fn chain_extremes_from(&self, lo: usize) -> HashMap<usize, (usize, usize)> {
        let m = &self.lattice.members;
        let mut order: Vec<usize> = (0..m.len()).filter(|&j| m[j].includes(&m[lo])).collect();
        order.sort_by_key(|&j| m[j].dim());
        let mut ext: HashMap<usize, (usize, usize)> = HashMap::from([(lo, (0, 0))]);
        for &j in &order {
            let Some(&(mn, mx)) = ext.get(&j) else { continue };
            for &u in &self.lattice.upper[j] {
                let e = ext.entry(u).or_insert((usize::MAX, 0));
                e.0 = e.0.min(mn + 1);
                e.1 = e.1.max(mx + 1);
            }
        }
        ext
    }

    /// A comparable pair (lo, hi) joined by maximal chains of different
    /// lengths, with the shortest and longest length.
    pub fn jordan_dedekind_violation(&self) -> Option<(Subspace, Subspace, usize, usize)> {
        let m = &self.lattice.members;
        par::find_first(m.len(), |lo| {
            let ext = self.chain_extremes_from(lo);
            let mut bad: Vec<_> = ext.into_iter().filter(|(_, (a, b))| a != b).collect();
            bad.sort();
            bad.first().map(|&(hi, (a, b))| (m[lo].clone(), m[hi].clone(), a, b))
        })
    }

    pub fn check_jordan_dedekind(&self) -> bool {
        self.jordan_dedekind_violation().is_none()
    }

    /// Lengths of all maximal chains from `lo` to `hi`, by depth-first
    /// enumeration. Exponential; meant for small cross-checks.
    pub fn maximal_chain_lengths(&self, lo: &Subspace, hi: &Subspace) -> Result<BTreeSet<usize>> {
        let (l, h) = (self.idx(lo)?, self.idx(hi)?);
        let mut out = BTreeSet::new();
        let mut stack = vec![(l, 0usize)];
        while let Some((cur, len)) = stack.pop() {
            if cur == h {
                out.insert(len);
                continue;
            }
            for &u in &self.lattice.upper[cur] {
                if self.lattice.members[h].includes(&self.lattice.members[u]) {
                    stack.push((u, len + 1));
                }
            }
        }
        Ok(out)
    }

    /// Builds a maximal chain from the bottom member towards `a`: at each step
    /// a line of `a` outside the current member is chosen and the current
    /// member is replaced by its unique cover containing that line. Returns
    /// the number of steps and the member reached.
    pub fn greedy_chain(&self, a: &Subspace, order: LineOrder) -> (usize, Subspace) {
        let m = &self.lattice.members;
        let mut lines = a.lines();
        if order == LineOrder::Reverse {
            lines.reverse();
        }
        let mut cur = self.bottom;
        let mut steps = 0;
        while !m[cur].includes(a) {
            let x = lines.iter().find(|x| !m[cur].includes(x)).expect("a line of A lies outside");
            cur = *self.lattice.upper[cur]
                .iter()
                .find(|&&u| m[u].includes(x))
                .expect("validated family has a cover through every line");
            steps += 1;
        }
        (steps, m[cur].clone())
    }

    /// The rank function determined by the family.
    pub fn rank(&self, a: &Subspace) -> usize {
        self.greedy_chain(a, LineOrder::Canonical).0
    }

    /// The family's rank function as an oracle.
    pub fn rank_oracle(&self) -> RankOracle {
        let me = self.clone();
        RankOracle::new(self.field(), self.ambient_dim(), "rank from flats", move |a| me.rank(a))
    }
}

fn meet_of_members_containing(members: &[Subspace], a: &Subspace, field: &FieldSpec, n: usize) -> Subspace {
    members
        .iter()
        .filter(|f| f.includes(a))
        .fold(Subspace::full(field, n), |acc, f| acc.meet(f))
}

pub fn rank_from_flats(flats: &Flats, a: &Subspace) -> usize {
    flats.rank(a)
}

/// The flats of `m`: every subspace on which the rank jumps along each outside line.
pub fn flats_from_rank(m: &RankOracle, limits: &Limits) -> Result<FlatFamily> {
    let all = crate::linalg::all_subspaces(m.field(), m.ambient_dim(), limits)?;
    let members = par::filter_slice(&all, |s| is_flat(m, s));
    FlatFamily::explicit(m.field(), m.ambient_dim(), members)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub checked: u64,
    pub mismatch: Option<String>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Checks `r = r_{F_r}` on every subspace.
pub fn roundtrip_rank(m: &RankOracle, limits: &Limits) -> Result<RoundtripReport> {
    let all = crate::linalg::all_subspaces(m.field(), m.ambient_dim(), limits)?;
    let flats = match flats_from_rank(m, limits)?.validate(limits) {
        Ok(f) => f,
        Err(e @ Error::FlatAxioms(_)) => {
            return Ok(RoundtripReport { checked: 0, mismatch: Some(format!("flats of the oracle: {e}")) })
        }
        Err(e) => return Err(e),
    };
    let bad = par::find_first(all.len(), |i| {
        let (r, rf) = (m.rank(&all[i]), flats.rank(&all[i]));
        (r != rf).then(|| format!("r([{}]) = {r} but the flats give {rf}", all[i]))
    });
    Ok(RoundtripReport { checked: all.len() as u64, mismatch: bad })
}

/// Checks `F = F_{r_F}` as sets of subspaces.
pub fn roundtrip_family(flats: &Flats, limits: &Limits) -> Result<RoundtripReport> {
    let back = flats_from_rank(&flats.rank_oracle(), limits)?.members(limits)?;
    let original: HashSet<&Subspace> = flats.members().iter().collect();
    let returned: HashSet<&Subspace> = back.iter().collect();
    let mismatch = original
        .symmetric_difference(&returned)
        .min()
        .map(|s| format!("[{s}] is in exactly one of the family and the flats of its rank function"));
    Ok(RoundtripReport { checked: all_count(flats), mismatch })
}

fn all_count(flats: &Flats) -> u64 {
    (0..=flats.ambient_dim())
        .map(|k| Grassmannian::new(flats.field(), flats.ambient_dim(), k).map_or(0, |g| g.len() as u64))
        .sum()
}

/// Both directions of the correspondence for a rank oracle: `r = r_{F_r}`,
/// then `F_r = F_{r_{F_r}}`.
pub fn cryptomorphism_roundtrip(m: &RankOracle, limits: &Limits) -> Result<RoundtripReport> {
    let first = roundtrip_rank(m, limits)?;
    if !first.passed() {
        return Ok(first);
    }
    let flats = flats_from_rank(m, limits)?.validate(limits)?;
    let second = roundtrip_family(&flats, limits)?;
    Ok(RoundtripReport { checked: first.checked + second.checked, mismatch: second.mismatch })
}
