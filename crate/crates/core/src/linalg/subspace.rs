use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::elim;
use super::grassmannian::Grassmannian;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::field::{digit_char, FieldSpec};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Basis {
    /// F_2 with n <= 64: one packed word per row.
    Bits(Vec<u64>),
    /// Everything else: row-major dim x n.
    Dense(Vec<u16>),
}

/// A subspace of F_q^n held by its reduced row echelon basis.
///
/// The basis is canonical, so equality, hashing and ordering act on the
/// subspace itself. Ordering is by dimension, then pivot columns
/// (lexicographically), then basis entries in row-major order; this is the
/// order in which [`Grassmannian`] enumerates.
#[derive(Clone)]
pub struct Subspace {
    field: FieldSpec,
    n: usize,
    basis: Basis,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.basis == other.basis && self.field == other.field
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.basis.hash(state);
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.field.q().cmp(&other.field.q()))
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| self.pivots().cmp(&other.pivots()))
            .then_with(|| match (&self.basis, &other.basis) {
                (Basis::Bits(a), Basis::Bits(b)) => a.cmp(b),
                (Basis::Dense(a), Basis::Dense(b)) => a.cmp(b),
                _ => unreachable!("same field and ambient imply same storage"),
            })
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn packed(field: &FieldSpec, n: usize) -> bool {
    field.is_binary() && n <= 64
}

#[inline]
pub(crate) fn pack(v: &[u16]) -> u64 {
    v.iter().fold(0u64, |acc, &x| (acc << 1) | x as u64)
}

#[inline]
pub(crate) fn unpack(w: u64, n: usize) -> Vec<u16> {
    (0..n).map(|j| ((w >> (n - 1 - j)) & 1) as u16).collect()
}

/// Writes a vector as n base-q digits, coordinate 1 first. Orders above 36
/// fall back to comma-separated decimal in parentheses.
pub fn format_vector(field: &FieldSpec, v: &[u16]) -> String {
    if field.q() <= 36 {
        v.iter().map(|&x| digit_char(x as u32)).collect()
    } else {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Parses the digit form written by [`format_vector`] (orders up to 36).
pub fn parse_vector(field: &FieldSpec, n: usize, s: &str) -> Result<Vec<u16>> {
    let bad = |msg: String| Error::Parse { line: 0, msg };
    if field.q() > 36 {
        return Err(bad(format!("vector strings unsupported for q = {}", field.q())));
    }
    let v: Vec<u16> = s
        .chars()
        .map(|c| match c.to_digit(36) {
            Some(d) if d < field.q() => Ok(d as u16),
            _ => Err(bad(format!("invalid digit {c:?} for q = {}", field.q()))),
        })
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(bad(format!("vector {s:?} has {} coordinates, expected {n}", v.len())));
    }
    Ok(v)
}

impl Subspace {
    pub(crate) fn from_bits(field: &FieldSpec, n: usize, mut rows: Vec<u128>) -> Subspace {
        elim::rref_bits(&mut rows);
        Subspace { field: field.clone(), n, basis: Basis::Bits(rows.into_iter().map(|r| r as u64).collect()) }
    }

    /// Takes a row-major matrix with `nrows` rows and n columns and reduces it.
    pub(crate) fn from_dense(field: &FieldSpec, n: usize, mut data: Vec<u16>, nrows: usize) -> Subspace {
        if packed(field, n) {
            let rows = data.chunks(n.max(1)).take(nrows).map(|r| pack(r) as u128).collect();
            return Subspace::from_bits(field, n, if n == 0 { Vec::new() } else { rows });
        }
        elim::rref_dense(field, &mut data, nrows, n);
        Subspace { field: field.clone(), n, basis: Basis::Dense(data) }
    }

    /// Wraps rows already in reduced echelon form.
    pub(crate) fn from_rref_dense(field: &FieldSpec, n: usize, data: Vec<u16>) -> Subspace {
        if packed(field, n) {
            let rows = if n == 0 { Vec::new() } else { data.chunks(n).map(pack).collect() };
            return Subspace { field: field.clone(), n, basis: Basis::Bits(rows) };
        }
        Subspace { field: field.clone(), n, basis: Basis::Dense(data) }
    }

    pub fn zero(field: &FieldSpec, n: usize) -> Subspace {
        Subspace::from_rref_dense(field, n, Vec::new())
    }

    pub fn full(field: &FieldSpec, n: usize) -> Subspace {
        Subspace::from_rref_dense(field, n, Matrix::identity(field, n).data().to_vec())
    }

    /// The span of the given vectors in F_q^n.
    pub fn span<R: AsRef<[u16]>>(field: &FieldSpec, n: usize, vectors: &[R]) -> Result<Subspace> {
        let mut data = Vec::with_capacity(vectors.len() * n);
        for v in vectors {
            let v = v.as_ref();
            if v.len() != n {
                return Err(Error::AmbientMismatch { left: n, right: v.len() });
            }
            if let Some(&bad) = v.iter().find(|&&x| x as u32 >= field.q()) {
                return Err(Error::EntryOutOfRange { value: bad as u32, q: field.q() });
            }
            data.extend_from_slice(v);
        }
        Ok(Subspace::from_dense(field, n, data, vectors.len()))
    }

    /// Row space of a matrix.
    pub fn row_space(m: &Matrix) -> Subspace {
        Subspace::from_dense(m.field(), m.cols(), m.data().to_vec(), m.rows())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Bits(r) => r.len(),
            Basis::Dense(d) => {
                if self.n == 0 {
                    0
                } else {
                    d.len() / self.n
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }

    /// Basis rows in reduced echelon order.
    pub fn rows(&self) -> Vec<Vec<u16>> {
        match &self.basis {
            Basis::Bits(r) => r.iter().map(|&w| unpack(w, self.n)).collect(),
            Basis::Dense(d) => d.chunks(self.n.max(1)).map(|c| c.to_vec()).collect(),
        }
    }

    pub(crate) fn bits(&self) -> Option<&[u64]> {
        match &self.basis {
            Basis::Bits(r) => Some(r),
            Basis::Dense(_) => None,
        }
    }

    fn dense_data(&self) -> Vec<u16> {
        match &self.basis {
            Basis::Bits(r) => r.iter().flat_map(|&w| unpack(w, self.n)).collect(),
            Basis::Dense(d) => d.clone(),
        }
    }

    /// The canonical basis as a dim x n matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_raw(&self.field, self.dim(), self.n, self.dense_data())
    }

    pub fn pivots(&self) -> Vec<usize> {
        match &self.basis {
            Basis::Bits(r) => r.iter().map(|&w| self.n - 1 - (63 - w.leading_zeros() as usize)).collect(),
            Basis::Dense(d) => elim::dense_pivots(d, self.n),
        }
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch { left: self.n, right: other.n });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field.q(), right: other.field.q() });
        }
        Ok(())
    }

    /// A + B.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(self.join(other))
    }

    /// A ∩ B.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(self.meet(other))
    }

    /// Whether `other` ⊆ `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.includes(other))
    }

    /// A + B; panics if the ambients differ.
    pub fn join(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.n, other.n, "ambient mismatch");
        if other.dim() == 0 || self.is_full() {
            return self.clone();
        }
        if self.dim() == 0 || other.is_full() {
            return other.clone();
        }
        match (&self.basis, &other.basis) {
            (Basis::Bits(a), Basis::Bits(b)) => {
                let rows = a.iter().chain(b).map(|&w| w as u128).collect();
                Subspace::from_bits(&self.field, self.n, rows)
            }
            _ => {
                let mut data = self.dense_data();
                data.extend(other.dense_data());
                let rows = self.dim() + other.dim();
                Subspace::from_dense(&self.field, self.n, data, rows)
            }
        }
    }

    /// A ∩ B by the Zassenhaus construction; panics if the ambients differ.
    pub fn meet(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.n, other.n, "ambient mismatch");
        if self.dim() == 0 || other.is_full() {
            return self.clone();
        }
        if other.dim() == 0 || self.is_full() {
            return other.clone();
        }
        let n = self.n;
        match (&self.basis, &other.basis) {
            (Basis::Bits(a), Basis::Bits(b)) => {
                // rows [a | a] and [b | 0]; rows with zero left half span A ∩ B
                let mut rows: Vec<u128> = a
                    .iter()
                    .map(|&w| ((w as u128) << n) | w as u128)
                    .chain(b.iter().map(|&w| (w as u128) << n))
                    .collect();
                elim::rref_bits(&mut rows);
                let low = (1u128 << n) - 1;
                let inter = rows.into_iter().filter(|&r| r & !low == 0).collect();
                Subspace::from_bits(&self.field, n, inter)
            }
            _ => {
                let w = 2 * n;
                let mut data = Vec::with_capacity((self.dim() + other.dim()) * w);
                for row in self.rows() {
                    data.extend_from_slice(&row);
                    data.extend_from_slice(&row);
                }
                for row in other.rows() {
                    data.extend_from_slice(&row);
                    data.extend(std::iter::repeat_n(0, n));
                }
                let nrows = self.dim() + other.dim();
                let pivots = elim::rref_dense(&self.field, &mut data, nrows, w);
                let mut inter = Vec::new();
                for (i, &p) in pivots.iter().enumerate() {
                    if p >= n {
                        inter.extend_from_slice(&data[i * w + n..(i + 1) * w]);
                    }
                }
                let k = inter.len() / n;
                Subspace::from_dense(&self.field, n, inter, k)
            }
        }
    }

    /// Whether `other` ⊆ `self`; panics if the ambients differ.
    pub fn includes(&self, other: &Subspace) -> bool {
        assert_eq!(self.n, other.n, "ambient mismatch");
        if other.dim() > self.dim() {
            return false;
        }
        if other.dim() == 0 || self.is_full() {
            return true;
        }
        match (&self.basis, &other.basis) {
            (Basis::Bits(a), Basis::Bits(b)) => b.iter().all(|&v| elim::reduce_bits(a, v) == 0),
            (Basis::Dense(a), Basis::Dense(b)) => {
                let piv = elim::dense_pivots(a, self.n);
                b.chunks(self.n).all(|row| {
                    let mut v = row.to_vec();
                    elim::reduce_dense(&self.field, a, &piv, self.n, &mut v);
                    v.iter().all(|&x| x == 0)
                })
            }
            _ => unreachable!("same ambient implies same storage"),
        }
    }

    pub fn contains_vector(&self, v: &[u16]) -> bool {
        assert_eq!(v.len(), self.n, "ambient mismatch");
        match &self.basis {
            Basis::Bits(a) => elim::reduce_bits(a, pack(v)) == 0,
            Basis::Dense(a) => {
                let piv = elim::dense_pivots(a, self.n);
                let mut w = v.to_vec();
                elim::reduce_dense(&self.field, a, &piv, self.n, &mut w);
                w.iter().all(|&x| x == 0)
            }
        }
    }

    /// U^⊥ under the standard dot product.
    pub fn orthogonal(&self) -> Subspace {
        let n = self.n;
        let f = &self.field;
        let pivots = self.pivots();
        let rows = self.rows();
        let mut data = Vec::new();
        let mut count = 0;
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u16; n];
            v[free] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = f.neg(row[free]);
            }
            data.extend(v);
            count += 1;
        }
        Subspace::from_dense(f, n, data, count)
    }

    /// Image of the subspace under v ↦ v·M for an n x n matrix M.
    pub fn image(&self, m: &Matrix) -> Result<Subspace> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} map on F^{}",
                m.rows(),
                m.cols(),
                self.n
            )));
        }
        let mut data = Vec::with_capacity(self.dim() * self.n);
        for row in self.rows() {
            data.extend(m.apply_row(&row));
        }
        Ok(Subspace::from_dense(&self.field, self.n, data, self.dim()))
    }

    /// Image under a binary map given by packed matrix rows.
    pub(crate) fn image_bits(&self, map_rows: &[u64]) -> Subspace {
        let n = self.n;
        let a = self.bits().expect("packed subspace");
        let rows = a
            .iter()
            .map(|&v| {
                let mut out = 0u64;
                for (j, &r) in map_rows.iter().enumerate() {
                    if (v >> (n - 1 - j)) & 1 == 1 {
                        out ^= r;
                    }
                }
                out as u128
            })
            .collect();
        Subspace::from_bits(&self.field, n, rows)
    }

    /// Maps coefficient rows (each of length dim) through the basis.
    fn combine(&self, coeffs: &[u16], count: usize) -> Subspace {
        let d = self.dim();
        let n = self.n;
        let f = &self.field;
        if let Basis::Bits(b) = &self.basis {
            let rows = coeffs
                .chunks(d.max(1))
                .take(count)
                .map(|c| {
                    c.iter().zip(b).filter(|(&x, _)| x == 1).fold(0u64, |acc, (_, &r)| acc ^ r) as u128
                })
                .collect();
            return Subspace::from_bits(f, n, rows);
        }
        let basis = self.dense_data();
        let mut data = vec![0u16; count * n];
        for i in 0..count {
            for k in 0..d {
                let c = coeffs[i * d + k];
                if c == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = basis[k * n + j];
                    if b != 0 {
                        data[i * n + j] = f.add(data[i * n + j], f.mul(c, b));
                    }
                }
            }
        }
        Subspace::from_dense(f, n, data, count)
    }

    /// All k-dimensional subspaces of this subspace, in canonical order.
    pub fn subspaces(&self, k: usize) -> Vec<Subspace> {
        if k > self.dim() {
            return Vec::new();
        }
        let g = Grassmannian::new(&self.field, self.dim(), k).expect("k <= dim");
        let mut out: Vec<Subspace> = (0..g.len())
            .map(|i| self.combine(&g.coefficient_rows(i), k))
            .collect();
        out.sort();
        out
    }

    /// The one-dimensional subspaces, in canonical order.
    pub fn lines(&self) -> Vec<Subspace> {
        self.subspaces(1)
    }

    /// The codimension-one subspaces.
    pub fn hyperplanes(&self) -> Vec<Subspace> {
        match self.dim() {
            0 => Vec::new(),
            d => self.subspaces(d - 1),
        }
    }

    /// All s-dimensional subspaces of F_q^n containing this one, in
    /// canonical order.
    pub fn superspaces(&self, s: usize) -> Result<Vec<Subspace>> {
        let d = self.dim();
        if s < d || s > self.n {
            return Err(Error::OutOfRange { what: "superspace dimension", value: s as i64 });
        }
        // complement spanned by unit vectors at the non-pivot columns
        let pivots = self.pivots();
        let free: Vec<usize> = (0..self.n).filter(|c| !pivots.contains(c)).collect();
        let mut comp = Vec::with_capacity(free.len() * self.n);
        for &c in &free {
            let mut v = vec![0u16; self.n];
            v[c] = 1;
            comp.extend(v);
        }
        let complement = Subspace::from_rref_dense(&self.field, self.n, comp);
        let mut out: Vec<Subspace> = complement
            .subspaces(s - d)
            .into_iter()
            .map(|u| u.join(self))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Parses the `;`-joined vector form; the empty string is the zero space.
    pub fn parse(field: &FieldSpec, n: usize, s: &str) -> Result<Subspace> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Subspace::zero(field, n));
        }
        let vectors = s
            .split(';')
            .map(|tok| parse_vector(field, n, tok.trim()))
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(field, n, &vectors)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows().iter().map(|r| format_vector(&self.field, r)).collect();
        f.write_str(&parts.join(";"))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self)
    }
}

/// Row space of `rows`, which must have `n` columns.
pub fn canonicalize(rows: &Matrix, n: usize) -> Result<Subspace> {
    if rows.cols() != n {
        return Err(Error::AmbientMismatch { left: n, right: rows.cols() });
    }
    Ok(Subspace::row_space(rows))
}

/// The one-dimensional subspaces of `a`.
pub fn one_dim_subspaces_of(a: &Subspace) -> Vec<Subspace> {
    a.lines()
}
