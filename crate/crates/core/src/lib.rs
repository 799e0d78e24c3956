//! q-matroids over finite fields, their flat lattices, and the subspace
//! designs obtained from q-Steiner systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: arithmetic in F_q for q = p^m <= 2^16.
//! - [`linalg`]: matrices, canonical subspaces, Grassmannian enumeration.
//! - [`qcount`]: Gaussian binomials, intersection numbers, admissibility.
//! - [`qmatroid`]: rank oracles, the rank axioms, independence, circuits, flats, closure.
//! - [`flats`]: flat families, the flat axioms, lattice checks, and the
//!   flats/rank correspondence in both directions.
//! - [`design`]: subspace designs, spreads, and the matroid induced by a q-Steiner system.
//! - [`derive`]: designs from independent spaces and circuits, and automorphism groups.
//! - [`io`]: the `QDESIGN v1`, `QFLATS v1` and `QMATRIX v1` text formats.
//! - [`tables`]: the parameter tables for STS(13;2) and STS(7;q).
//!
//! Exhaustive sweeps run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; results are identical either way.

pub mod derive;
pub mod design;
pub mod error;
pub mod field;
pub mod flats;
pub mod io;
pub mod linalg;
pub mod par;
pub mod qcount;
pub mod qmatroid;
pub mod tables;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use linalg::{Grassmannian, Matrix, Subspace};

/// Caps on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of subspaces any single sweep may enumerate.
    pub max_subspaces: u64,
    /// Largest |GL(n, q)| an exhaustive automorphism sweep may visit.
    pub max_group_order: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_subspaces: 100_000, max_group_order: 100_000_000 }
    }
}

impl Limits {
    pub(crate) fn check_subspaces(&self, count: u64) -> Result<()> {
        if count > self.max_subspaces {
            return Err(Error::BoundExceeded { count: count.to_string(), bound: self.max_subspaces });
        }
        Ok(())
    }
}
