mod common;

use common::subspaces_f2;
use proptest::prelude::*;
use qmatroid::linalg::{enumerate_grassmannian, Subspace};
use qmatroid::qcount::gaussian_binomial;
use qmatroid::FieldSpec;

#[test]
fn modular_identity_on_f2_4() {
    let all = subspaces_f2(4);
    for a in &all {
        for b in &all {
            let (s, m) = (a.join(b), a.meet(b));
            assert_eq!(s.dim() + m.dim(), a.dim() + b.dim(), "{a} / {b}");
            assert!(s.includes(a) && s.includes(b) && a.includes(&m) && b.includes(&m));
            if a.includes(b) && b.includes(a) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn grassmannian_sizes_over_f4_and_f5() {
    for q in [4u64, 5] {
        let f = FieldSpec::of_order(q).unwrap();
        for n in 0..=4usize {
            for k in 0..=n {
                let g = enumerate_grassmannian(n, k, &f).unwrap();
                assert_eq!(num_bigint::BigUint::from(g.len()), gaussian_binomial(n as u64, k as u64, q));
            }
        }
    }
}

fn vectors(q: u16, n: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<u16>>> {
    prop::collection::vec(prop::collection::vec(0..q, n), 0..=max_rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_ignores_row_operations(
        rows in vectors(3, 5, 5),
        ops in prop::collection::vec((0usize..8, 0usize..8, 1u16..3), 0..12),
        perm_seed in 0usize..120,
    ) {
        let f = FieldSpec::new(3, 1).unwrap();
        let a = Subspace::span(&f, 5, &rows).unwrap();
        let mut moved = rows.clone();
        if !moved.is_empty() {
            let len = moved.len();
            moved.rotate_left(perm_seed % len);
            for (i, j, c) in ops {
                let (i, j) = (i % len, j % len);
                if i != j {
                    let src = moved[j].clone();
                    for (x, y) in moved[i].iter_mut().zip(src) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
            }
        }
        let b = Subspace::span(&f, 5, &moved).unwrap();
        prop_assert_eq!(&a, &b);
        let again = Subspace::span(&f, 5, &a.rows()).unwrap();
        prop_assert_eq!(&a, &again);
    }

    #[test]
    fn modular_identity_over_f3(x in vectors(3, 5, 4), y in vectors(3, 5, 4)) {
        let f = FieldSpec::new(3, 1).unwrap();
        let a = Subspace::span(&f, 5, &x).unwrap();
        let b = Subspace::span(&f, 5, &y).unwrap();
        prop_assert_eq!(a.join(&b).dim() + a.meet(&b).dim(), a.dim() + b.dim());
        prop_assert_eq!(a.orthogonal().dim(), 5 - a.dim());
        prop_assert_eq!(&a.orthogonal().orthogonal(), &a);
    }

    #[test]
    fn modular_identity_over_f4(x in vectors(4, 4, 3), y in vectors(4, 4, 3)) {
        let f = FieldSpec::new(2, 2).unwrap();
        let a = Subspace::span(&f, 4, &x).unwrap();
        let b = Subspace::span(&f, 4, &y).unwrap();
        prop_assert_eq!(a.join(&b).dim() + a.meet(&b).dim(), a.dim() + b.dim());
        prop_assert!(a.join(&b).includes(&a));
    }
}
