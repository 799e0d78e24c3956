//! Row reduction kernels.
//!
//! Binary rows are packed into integers with coordinate 0 in the most
//! significant of the `width` low bits, so numeric order of rows equals
//! lexicographic order of coordinate vectors and the pivot of a row is its
//! highest set bit.

use crate::field::FieldSpec;

/// Reduced row echelon form of packed binary rows, in place. Zero rows are
/// dropped; remaining rows are sorted by pivot, leftmost first.
pub(crate) fn rref_bits(rows: &mut Vec<u128>) {
    rows.retain(|&r| r != 0);
    let mut rank = 0;
    while rank < rows.len() {
        // pick the row with the leftmost pivot among the unprocessed ones
        let (best, _) = rows[rank..]
            .iter()
            .enumerate()
            .max_by_key(|&(_, &r)| 128 - r.leading_zeros())
            .expect("nonempty");
        rows.swap(rank, rank + best);
        let pivot_row = rows[rank];
        let bit = 1u128 << (127 - pivot_row.leading_zeros());
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r & bit != 0 {
                *r ^= pivot_row;
            }
        }
        rows.retain(|&r| r != 0);
        rank += 1;
    }
}

/// Reduces `v` against rows already in reduced echelon form.
#[inline]
pub(crate) fn reduce_bits(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        let bit = 1u64 << (63 - b.leading_zeros());
        if v & bit != 0 {
            v ^= b;
        }
    }
    v
}

/// Reduced row echelon form of a dense row-major matrix, in place. Returns
/// the pivot columns; `data` is truncated to `rank * cols` entries.
pub(crate) fn rref_dense(f: &FieldSpec, data: &mut Vec<u16>, rows: usize, cols: usize) -> Vec<usize> {
    debug_assert_eq!(data.len(), rows * cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if sel != r {
            for j in 0..cols {
                data.swap(sel * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(data[r * cols + c]).expect("nonzero pivot");
        if inv != 1 {
            for j in c..cols {
                data[r * cols + j] = f.mul(data[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c];
            if factor == 0 {
                continue;
            }
            let neg = f.neg(factor);
            for j in c..cols {
                let pv = data[r * cols + j];
                if pv != 0 {
                    data[i * cols + j] = f.add(data[i * cols + j], f.mul(neg, pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    data.truncate(r * cols);
    pivots
}

/// Reduces `v` in place against a reduced echelon basis with the given pivots.
pub(crate) fn reduce_dense(f: &FieldSpec, basis: &[u16], pivots: &[usize], cols: usize, v: &mut [u16]) {
    for (i, &p) in pivots.iter().enumerate() {
        let factor = v[p];
        if factor == 0 {
            continue;
        }
        let neg = f.neg(factor);
        let row = &basis[i * cols..(i + 1) * cols];
        for j in p..cols {
            if row[j] != 0 {
                v[j] = f.add(v[j], f.mul(neg, row[j]));
            }
        }
    }
}

/// Pivot columns of a reduced echelon dense basis.
pub(crate) fn dense_pivots(data: &[u16], cols: usize) -> Vec<usize> {
    data.chunks(cols.max(1))
        .filter(|_| cols > 0)
        .map(|row| row.iter().position(|&x| x != 0).expect("nonzero row"))
        .collect()
}
