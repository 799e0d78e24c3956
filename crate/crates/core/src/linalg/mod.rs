//! Matrices over F_q, canonical subspaces of F_q^n, and Grassmannian
//! enumeration.
//!
//! Over F_2 with n <= 64 subspace bases are packed one row per machine word
//! and eliminated with XOR; all other fields use dense digit arithmetic.

mod elim;
mod grassmannian;
mod matrix;
mod subspace;

pub use grassmannian::{all_subspaces, enumerate_grassmannian, subspaces_up_to, Grassmannian};
pub use matrix::{matrix_rank, Matrix};
pub use subspace::{canonicalize, format_vector, one_dim_subspaces_of, parse_vector, Subspace};

pub(crate) use subspace::{pack, packed};
