use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::Limits;

/// One Schubert cell: all RREF matrices with a fixed pivot set.
#[derive(Debug, Clone)]
struct Cell {
    pivots: Vec<usize>,
    /// (row, column) of every free entry, row-major.
    free: Vec<(usize, usize)>,
    offset: u64,
}

/// The k-subspaces of F_q^n, indexable in canonical order: pivot sets in
/// lexicographic order, then free entries read as a base-q number with the
/// last free entry least significant.
#[derive(Debug, Clone)]
pub struct Grassmannian {
    field: FieldSpec,
    n: usize,
    k: usize,
    cells: Vec<Cell>,
    len: u64,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

impl Grassmannian {
    pub fn new(field: &FieldSpec, n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::OutOfRange { what: "subspace dimension k > n", value: k as i64 });
        }
        let q = field.q() as u64;
        let mut cells = Vec::new();
        let mut len: u64 = 0;
        for pivots in combinations(n, k) {
            let mut free = Vec::new();
            for (r, &p) in pivots.iter().enumerate() {
                for c in p + 1..n {
                    if !pivots.contains(&c) {
                        free.push((r, c));
                    }
                }
            }
            let size = q
                .checked_pow(free.len() as u32)
                .ok_or(Error::OutOfRange { what: "Grassmannian size", value: free.len() as i64 })?;
            cells.push(Cell { pivots, free, offset: len });
            len = len
                .checked_add(size)
                .ok_or(Error::OutOfRange { what: "Grassmannian size", value: n as i64 })?;
        }
        Ok(Grassmannian { field: field.clone(), n, k, cells, len })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// RREF rows (k x n, row-major) of the subspace at `index`.
    pub(crate) fn coefficient_rows(&self, index: usize) -> Vec<u16> {
        let index = index as u64;
        assert!(index < self.len, "index out of range");
        let ci = self.cells.partition_point(|c| c.offset <= index) - 1;
        let cell = &self.cells[ci];
        let mut local = index - cell.offset;
        let q = self.field.q() as u64;
        let mut data = vec![0u16; self.k * self.n];
        for (r, &p) in cell.pivots.iter().enumerate() {
            data[r * self.n + p] = 1;
        }
        for &(r, c) in cell.free.iter().rev() {
            data[r * self.n + c] = (local % q) as u16;
            local /= q;
        }
        data
    }

    pub fn get(&self, index: usize) -> Subspace {
        Subspace::from_rref_dense(&self.field, self.n, self.coefficient_rows(index))
    }

    pub fn iter(&self) -> impl Iterator<Item = Subspace> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<Subspace> {
        crate::par::map_range(self.len(), |i| self.get(i))
    }
}

/// The k-subspaces of F_q^n in canonical order.
pub fn enumerate_grassmannian(n: usize, k: usize, field: &FieldSpec) -> Result<Grassmannian> {
    Grassmannian::new(field, n, k)
}

/// Every subspace of F_q^n, by dimension then canonical order. Fails if the
/// total exceeds `limits.max_subspaces`.
pub fn all_subspaces(field: &FieldSpec, n: usize, limits: &Limits) -> Result<Vec<Subspace>> {
    let grs = (0..=n).map(|k| Grassmannian::new(field, n, k)).collect::<Result<Vec<_>>>()?;
    let total: u64 = grs.iter().map(|g| g.len).fold(0u64, |a, b| a.saturating_add(b));
    limits.check_subspaces(total)?;
    Ok(grs.iter().flat_map(|g| g.to_vec()).collect())
}

/// Subspaces of F_q^n of dimension at most `max_dim`.
pub fn subspaces_up_to(field: &FieldSpec, n: usize, max_dim: usize, limits: &Limits) -> Result<Vec<Subspace>> {
    let grs = (0..=max_dim.min(n)).map(|k| Grassmannian::new(field, n, k)).collect::<Result<Vec<_>>>()?;
    let total: u64 = grs.iter().map(|g| g.len).fold(0u64, |a, b| a.saturating_add(b));
    limits.check_subspaces(total)?;
    Ok(grs.iter().flat_map(|g| g.to_vec()).collect())
}
