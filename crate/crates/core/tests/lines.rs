mod common;

use common::*;
use deltamod::families::{build_a, build_a_lee, expected_count};
use deltamod::lines::*;
use deltamod::partition::partitions;
use deltamod::search::verify_is_feasible;
use deltamod::{Error, IntMatrix, Partition};
use proptest::prelude::*;

fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

fn ms(s: &str) -> LineMultiset {
    s.parse().unwrap()
}

#[test]
fn nu_examples() {
    assert_eq!(nu_formula(3, &p("2"), 4).unwrap(), ms("3:2,4:2,5:1"));
    assert_eq!(nu_formula(3, &p("1,1"), 4).unwrap(), ms("3:3,4:3"));
    let a = build_a(3, &p("1,1"), 4).unwrap();
    assert_eq!(line_length_multiset(&a.matrix, 0).unwrap(), ms("3:3,4:3"));
    assert_eq!(line_length_multiset(&build_a_lee(3, 4).unwrap().matrix, 0).unwrap(), ms("5:3"));
}

#[test]
fn nu_matches_formula_small() {
    for delta in 2..=4u64 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in (lambda.m() + 1).max(delta as usize + 1)..=6 {
                let a = build_a(delta, &lambda, r).unwrap();
                assert_eq!(
                    line_length_multiset(&a.matrix, a.designated_element).unwrap(),
                    nu_formula(delta, &lambda, r).unwrap(),
                    "{}",
                    a.name()
                );
            }
        }
    }
}

#[test]
fn extremal_matrices_are_feasible() {
    assert!(verify_is_feasible(&build_a(3, &p("2"), 5).unwrap().matrix, 3));
    for delta in 2..=4u64 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in lambda.m() + 1..=5 {
                let a = build_a(delta, &lambda, r).unwrap();
                assert!(verify_is_feasible(&a.matrix, delta), "{}", a.name());
                assert_eq!(a.matrix.cols() as u64, expected_count(delta, r as u64));
                assert!(!verify_is_feasible(&a.matrix, delta - 1), "{}", a.name());
            }
        }
    }
}

// One designated element, the other points on its long lines, and the
// points off them account for every column.
#[test]
fn element_count_consistency() {
    for delta in 2..=5u64 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in (lambda.m() + 1).max(delta as usize + 1)..=7 {
                let a = build_a(delta, &lambda, r).unwrap();
                let lines = long_lines_through(&a.matrix, 0).unwrap();
                let on_lines: std::collections::BTreeSet<usize> =
                    lines.iter().flatten().copied().filter(|&j| j != 0).collect();
                let off = a.matrix.cols() - 1 - on_lines.len();
                let total = 1 + lines.iter().map(|l| l.len() - 1).sum::<usize>() + off;
                assert_eq!(total, a.matrix.cols(), "{}", a.name());
            }
        }
    }
}

#[test]
fn line_count_matches_multiset_size() {
    for delta in 2..=8u64 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in delta as usize + 1..=delta as usize + 3 {
                let nu = nu_formula(delta, &lambda, r).unwrap();
                assert_eq!(line_count(r, lambda.m()), nu.total as i64);
                for x in 1..r - 2 {
                    assert!(line_count(r, x) < line_count(r, x + 1));
                }
            }
        }
    }
}

#[test]
fn recovery_round_trip() {
    assert_eq!(recover_partition(&ms("3:2,4:2,5:1"), 3, 4).unwrap(), p("2"));
    assert_eq!(recover_partition(&ms("3:3,4:3"), 3, 4).unwrap(), p("1,1"));
    for delta in 2..=8u64 {
        for lambda in partitions(delta - 1).unwrap() {
            for r in delta as usize + 1..=delta as usize + 3 {
                let nu = nu_formula(delta, &lambda, r).unwrap();
                assert_eq!(recover_partition(&nu, delta, r).unwrap(), lambda);
            }
        }
    }
}

#[test]
fn recovery_rejects_foreign_multisets() {
    assert!(matches!(recover_partition(&ms("3:1"), 3, 4), Err(Error::InvalidNu(_))));
    assert!(matches!(recover_partition(&ms("3:3,4:2,5:1"), 3, 4), Err(Error::InvalidNu(_))));
    assert!(recover_partition(&ms("3:3,4:3"), 3, 3).is_err());
    assert!("2:1".parse::<LineMultiset>().is_err());
    assert!("3:x".parse::<LineMultiset>().is_err());
}

// Equal part pairs: (1,1,1) has three index pairs summing to 2.
#[test]
fn recovery_counts_index_pairs() {
    let lambda = p("1,1,1");
    let nu = nu_formula(4, &lambda, 5).unwrap();
    assert_eq!(nu.count(4), 3 + 3);
    assert_eq!(recover_partition(&nu, 4, 5).unwrap(), lambda);
}

#[test]
fn distinguishing_examples() {
    for (delta, r, n) in [(2u64, 3usize, 2usize), (3, 4, 3), (4, 5, 4), (5, 6, 6)] {
        let rep = distinguishing_report(delta, r).unwrap();
        assert_eq!(rep.constructions.len(), n);
        assert_eq!(rep.certificates.len(), n * (n - 1) / 2);
        assert!(rep.all_distinct && rep.lee_matches_formula && rep.lee_separated);
    }
    assert!(distinguishing_report(3, 3).is_err());
}

fn scale_and_permute(m: &IntMatrix, perm: &[usize], scales: &[i64]) -> IntMatrix {
    let mut out = m.select_columns(perm).unwrap();
    for (j, &s) in scales.iter().enumerate() {
        for i in 0..out.rows() {
            out.set(i, j, s * out.get(i, j));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn nu_invariances(
        (which, perm, scales, u) in (0usize..4).prop_flat_map(|which| {
            let n = [16usize, 16, 13, 19][which];
            (
                Just(which),
                permutation(n),
                prop::collection::vec(prop::sample::select(vec![-2i64, -1, 1, 2, 3]), n),
                unimodular(4),
            )
        })
    ) {
        let a = match which {
            0 => build_a(3, &p("2"), 4).unwrap(),
            1 => build_a(3, &p("1,1"), 4).unwrap(),
            2 => build_a_lee(2, 4).unwrap(),
            _ => build_a_lee(4, 4).unwrap(),
        };
        prop_assert_eq!(a.matrix.cols(), perm.len());
        let base = line_length_multiset(&a.matrix, 0).unwrap();
        let moved = scale_and_permute(&a.matrix, &perm, &scales);
        let moved = u.mul(&moved).unwrap();
        let e = perm.iter().position(|&j| j == 0).unwrap();
        prop_assert_eq!(line_length_multiset(&moved, e).unwrap(), base);
    }
}
