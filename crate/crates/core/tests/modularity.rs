mod common;

use common::*;
use deltamod::families::{build_a, build_a_lee, sporadic_rank3};
use deltamod::modularity::{self, append_zero_sum_row, drop_last_row, is_delta_modular};
use deltamod::partition::partitions;
use deltamod::IntMatrix;
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn sporadic_examples() {
    let m = sporadic_rank3();
    assert!(is_delta_modular(&m, 3).unwrap().0);
    let (ok, w) = is_delta_modular(&m, 2).unwrap();
    assert!(!ok);
    let w = w.unwrap();
    assert!(w.verify(&m));
    assert!(w.abs_det() > BigInt::from(2));
    assert_eq!(modularity::modularity_level(&m).unwrap().delta, BigInt::from(3));
    assert_eq!(brute_level(&m), 3);
}

#[test]
fn rank_deficient_uses_rank_sized_minors() {
    let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
    let r = modularity::modularity_level(&m).unwrap();
    assert_eq!(r.delta, BigInt::from(brute_level(&m)));
    assert_eq!(r.delta, BigInt::from(6));
    assert_eq!(r.parallel_violations.len(), 3);
}

#[test]
fn extremal_matrices_are_non_parallel() {
    for delta in 2..=4 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in lambda.m() + 1..=5 {
                let a = build_a(delta, &lambda, r).unwrap();
                assert!(modularity::parallel_pairs(&a.matrix).unwrap().is_empty(), "{}", a.name());
            }
        }
        let lee = build_a_lee(delta, 4).unwrap();
        assert!(modularity::parallel_pairs(&lee.matrix).unwrap().is_empty());
    }
}

fn with_frame(r: usize, y: &IntMatrix) -> IntMatrix {
    IntMatrix::identity(r)
        .hstack(&IntMatrix::clique(r))
        .unwrap()
        .hstack(y)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn decision_matches_brute_level(
        (m, delta) in (sized_matrix(2..=3, 2..=6, -3..=3), 1u64..=6)
    ) {
        let level = brute_level(&m);
        prop_assume!(level > 0);
        let (ok, w) = is_delta_modular(&m, delta).unwrap();
        prop_assert_eq!(ok, level <= delta as u128);
        if let Some(w) = w {
            prop_assert!(w.verify(&m));
            prop_assert!(w.abs_det() > BigInt::from(delta));
        }
    }

    #[test]
    fn anchored_decision_matches_brute(
        (y, delta) in (sized_matrix(3..=4, 1..=3, -2..=2), 1u64..=4)
    ) {
        let m = IntMatrix::identity(y.rows()).hstack(&y).unwrap();
        let level = brute_level(&m);
        let (ok, w) = is_delta_modular(&m, delta).unwrap();
        prop_assert_eq!(ok, level <= delta as u128);
        if let Some(w) = w {
            prop_assert_eq!(w.row_indices.len(), m.rows());
            prop_assert!(w.verify(&m));
        }
        prop_assert_eq!(
            modularity::max_square_subdet_all_sizes(&m).unwrap().0,
            BigInt::from(brute_all_sizes(&m))
        );
    }

    // [I_r D_r Y] against its zero-sum form [D_{r+1} | (Y; -1ᵀY)].
    #[test]
    fn zero_sum_equivalence(
        (y, delta) in (sized_matrix(2..=4, 1..=2, -2..=2), 1u64..=4)
    ) {
        let r = y.rows();
        let m = with_frame(r, &y);
        let z = append_zero_sum_row(&m).unwrap();
        prop_assert_eq!(z.rows(), r + 1);
        for j in 0..z.cols() {
            prop_assert_eq!(z.column(j).iter().sum::<i64>(), 0);
        }
        prop_assert_eq!(drop_last_row(&z).unwrap(), m.clone());
        let direct = is_delta_modular(&m, delta).unwrap().0;
        let zero_sum = is_delta_modular(&z, delta).unwrap().0;
        prop_assert_eq!(direct, zero_sum);
        prop_assert_eq!(direct, brute_level(&z) <= delta as u128);
    }

    #[test]
    fn level_invariant_under_operations(
        (m, perm, u) in (2usize..=3, 3usize..=5).prop_flat_map(|(r, n)| (
            matrix(r, n, -2..=2),
            permutation(n),
            unimodular(r),
        ))
    ) {
        // only full row rank: rank-sized minors of a deficient matrix move
        // under row operations
        prop_assume!(deltamod::linalg::rank(&m) == m.rows());
        let base = modularity::modularity_level(&m).unwrap().delta;
        let mut changed = m.select_columns(&perm).unwrap();
        for i in 0..changed.rows() {
            changed.set(i, 0, -changed.get(i, 0));
        }
        let changed = u.mul(&changed).unwrap();
        prop_assert_eq!(modularity::modularity_level(&changed).unwrap().delta, base);
    }
}
