mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{f2, limits, spread, subspaces_f2};
use num_bigint::BigInt;
use num_rational::BigRational;
use qmatroid::design::{
    desarguesian_spread, exhaustive_intersection_counts, induced_flat_family, induced_rank, verify_design,
    verify_design_with, Design, VerifyStrategy,
};
use qmatroid::flats::rank_from_flats;
use qmatroid::linalg::subspaces_up_to;
use qmatroid::qcount::intersection_number;
use qmatroid::{FieldSpec, Subspace};

#[test]
fn spreads_verify_with_the_predicted_block_count() {
    let f3 = FieldSpec::new(3, 1).unwrap();
    for (n, k, field) in [(4, 2, f2()), (6, 2, f2()), (6, 3, f2()), (8, 4, f2()), (4, 2, f3.clone()), (6, 3, f3)] {
        let s = desarguesian_spread(n, k, &field, &limits()).unwrap();
        assert!(verify_design(s.design(), &limits()).unwrap().passed(), "n={n} k={k} q={}", field.q());
        let b = intersection_number(s.params(), 0, 0).unwrap();
        assert_eq!(b, BigRational::from_integer(BigInt::from(s.len())), "n={n} k={k}");
    }
}

#[test]
fn spread_blocks_partition_the_points() {
    let s = spread(6, 2);
    let mut seen = BTreeSet::new();
    for b in s.blocks() {
        for x in b.lines() {
            assert!(seen.insert(x), "a point lies in two blocks");
        }
    }
    assert_eq!(seen.len(), 63);
}

#[test]
fn verification_strategies_agree_on_broken_designs() {
    let s = spread(6, 3);
    let mut blocks = s.blocks().to_vec();
    blocks.pop();
    let d = Design::new(&f2(), s.params().clone(), blocks).unwrap();
    let a = verify_design_with(&d, VerifyStrategy::Superspaces, &limits()).unwrap();
    let b = verify_design_with(&d, VerifyStrategy::BlockScan, &limits()).unwrap();
    assert!(!a.passed() && !b.passed());
    assert_eq!(a.failure, b.failure);
    assert_eq!(a.failure.unwrap().1, 0);
}

#[test]
fn induced_rank_equals_rank_from_flats() {
    let s = spread(4, 2);
    let flats = induced_flat_family(&s).validate(&limits()).unwrap();
    for a in subspaces_f2(4) {
        assert_eq!(induced_rank(&s, &a), rank_from_flats(&flats, &a), "{a}");
    }
    for k in [2, 3] {
        let s = spread(6, k);
        let flats = induced_flat_family(&s).validate(&limits()).unwrap();
        for a in subspaces_up_to(&f2(), 6, 4, &limits()).unwrap() {
            assert_eq!(induced_rank(&s, &a), rank_from_flats(&flats, &a), "k={k} {a}");
        }
    }
}

#[test]
fn flats_of_rank_t_are_the_blocks_and_rank_t_plus_one_is_the_whole_space() {
    for (n, k) in [(4, 2), (6, 2), (6, 3)] {
        let s = spread(n, k);
        let flats = induced_flat_family(&s).validate(&limits()).unwrap();
        let mut by_rank: BTreeMap<usize, Vec<Subspace>> = BTreeMap::new();
        for f in flats.members() {
            by_rank.entry(flats.rank(f)).or_default().push(f.clone());
        }
        let t = s.t();
        let mut blocks = s.blocks().to_vec();
        blocks.sort();
        let mut rank_t = by_rank[&t].clone();
        rank_t.sort();
        assert_eq!(rank_t, blocks, "n={n} k={k}");
        assert_eq!(by_rank[&(t + 1)], vec![Subspace::full(&f2(), n)]);
        assert_eq!(by_rank.keys().copied().max(), Some(t + 1));
    }
}

#[test]
fn intersection_numbers_match_exhaustive_counts() {
    let s = spread(4, 2);
    for (i, j) in [(0, 0), (1, 0), (0, 1)] {
        let counts = exhaustive_intersection_counts(s.design(), i, j, &limits()).unwrap();
        let expected = intersection_number(s.params(), i as u64, j as u64).unwrap();
        assert_eq!(counts.len(), 1, "({i},{j}) not constant: {counts:?}");
        let got = BigRational::from_integer(BigInt::from(*counts.iter().next().unwrap()));
        assert_eq!(got, expected, "({i},{j})");
    }
}
