use std::fmt;

use super::elim;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// A dense matrix over a finite field, entries stored row-major as field
/// element encodings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{:?}", self.field, self.to_rows())
    }
}

impl Matrix {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x as u32 >= field.q()) {
            return Err(Error::EntryOutOfRange { value: bad as u32, q: field.q() });
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[u16]>>(field: &FieldSpec, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Matrix::new(field, rows.len(), cols, data)
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub(crate) fn from_raw(field: &FieldSpec, rows: usize, cols: usize, data: Vec<u16>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        assert!((v as u32) < self.field.q(), "entry out of range");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u16>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Matrix::from_raw(&self.field, self.cols, self.rows, data)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field.q(), right: other.field.q() });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut data = vec![0u16; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let cell = &mut data[i * other.cols + j];
                        *cell = f.add(*cell, f.mul(a, b));
                    }
                }
            }
        }
        Ok(Matrix::from_raw(f, self.rows, other.cols, data))
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u16]) -> Vec<u16> {
        let f = &self.field;
        let mut out = vec![0u16; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if b != 0 {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns. Zero rows are dropped.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut data = self.data.clone();
        let pivots = elim::rref_dense(&self.field, &mut data, self.rows, self.cols);
        (Matrix::from_raw(&self.field, pivots.len(), self.cols, data), pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square matrix, by reducing `[M | I]`.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = Vec::with_capacity(2 * n * n);
        for r in 0..n {
            aug.extend_from_slice(self.row(r));
            aug.extend((0..n).map(|c| u16::from(c == r)));
        }
        let pivots = elim::rref_dense(&self.field, &mut aug, n, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let data = aug.chunks(2 * n).flat_map(|row| row[n..].iter().copied()).collect();
        Some(Matrix::from_raw(&self.field, n, n, data))
    }

    /// Embeds a matrix over F_p into an extension F_{p^m} (entries map to
    /// constant polynomials).
    pub fn lift_to(&self, ext: &FieldSpec) -> Result<Matrix> {
        if !self.field.is_prime_field() || ext.p() != self.field.p() {
            return Err(Error::InvalidParameters(format!(
                "cannot embed {} into {}",
                self.field, ext
            )));
        }
        Ok(Matrix::from_raw(ext, self.rows, self.cols, self.data.clone()))
    }
}

/// Rank of `m` over its field.
pub fn matrix_rank(m: &Matrix) -> usize {
    m.rank()
}
