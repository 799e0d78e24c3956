#![allow(dead_code)]

use qmatroid::design::{desarguesian_spread, induced_rank_oracle, SteinerSystem};
use qmatroid::linalg::all_subspaces;
use qmatroid::qmatroid::RankOracle;
use qmatroid::{FieldSpec, Limits, Matrix, Subspace};

pub fn f2() -> FieldSpec {
    FieldSpec::new(2, 1).unwrap()
}

pub fn limits() -> Limits {
    Limits::default()
}

pub fn spread(n: usize, k: usize) -> SteinerSystem {
    desarguesian_spread(n, k, &f2(), &limits()).unwrap()
}

pub fn subspaces_f2(n: usize) -> Vec<Subspace> {
    all_subspaces(&f2(), n, &limits()).unwrap()
}

/// The q-matroid of a 2 x 4 matrix over F_4.
pub fn representable_f4() -> RankOracle {
    let f4 = FieldSpec::new(2, 2).unwrap();
    let g = Matrix::from_rows(&f4, &[[1, 0, 2, 3], [0, 1, 3, 2]]).unwrap();
    RankOracle::representable(&g, &f2()).unwrap().memoized()
}

/// The q-matroid of a 3 x 4 matrix over F_8.
pub fn representable_f8() -> RankOracle {
    let f8 = FieldSpec::new(2, 3).unwrap();
    let g = Matrix::from_rows(&f8, &[[1, 0, 0, 1], [0, 1, 0, 2], [0, 0, 1, 4]]).unwrap();
    RankOracle::representable(&g, &f2()).unwrap().memoized()
}

/// Every rank oracle on F_2^4 the property tests run over.
pub fn oracles_f2_4() -> Vec<RankOracle> {
    let f = f2();
    let mut out: Vec<RankOracle> = (0..=4).map(|k| RankOracle::uniform(&f, 4, k).unwrap()).collect();
    out.push(RankOracle::free(&f, 4));
    out.push(representable_f4());
    out.push(representable_f8());
    out.push(induced_rank_oracle(&spread(4, 2)).memoized());
    out
}
