#![allow(dead_code)]

use deltamod::IntMatrix;
use itertools::Itertools;
use proptest::prelude::*;

/// Laplace expansion along the first row.
pub fn laplace(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    let mut total = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] as i128 * laplace(&minor);
    }
    total
}

pub fn sub(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m.get(i, j)).collect())
        .collect()
}

/// Largest `k` with a nonzero `k x k` minor, by exhaustion.
pub fn brute_rank(m: &IntMatrix) -> usize {
    for k in (1..=m.rows().min(m.cols())).rev() {
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                if laplace(&sub(m, &rows, &cols)) != 0 {
                    return k;
                }
            }
        }
    }
    0
}

/// Maximum `|det|` over `rank x rank` submatrices, by Laplace expansion.
pub fn brute_level(m: &IntMatrix) -> u128 {
    let k = brute_rank(m);
    if k == 0 {
        return 0;
    }
    let mut best = 0;
    for rows in (0..m.rows()).combinations(k) {
        for cols in (0..m.cols()).combinations(k) {
            best = best.max(laplace(&sub(m, &rows, &cols)).unsigned_abs());
        }
    }
    best
}

/// Maximum `|det|` over square submatrices of every size.
pub fn brute_all_sizes(m: &IntMatrix) -> u128 {
    let mut best = 0;
    for k in 1..=m.rows().min(m.cols()) {
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                best = best.max(laplace(&sub(m, &rows, &cols)).unsigned_abs());
            }
        }
    }
    best
}

pub fn matrix(rows: usize, cols: usize, range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(range, rows * cols).prop_map(move |d| IntMatrix::new(rows, cols, d).unwrap())
}

pub fn sized_matrix(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
    range: std::ops::RangeInclusive<i64>,
) -> impl Strategy<Value = IntMatrix> {
    (rows, cols).prop_flat_map(move |(r, c)| matrix(r, c, range.clone()))
}

/// A random product of elementary unimodular matrices.
pub fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = IntMatrix::identity(n).to_rows();
        for (i, j, f, swap) in ops {
            if swap {
                u.swap(i, j);
            } else if i != j {
                let src = u[j].clone();
                for (a, b) in u[i].iter_mut().zip(src) {
                    *a += f * b;
                }
            }
        }
        IntMatrix::from_rows(&u).unwrap()
    })
}

/// Column permutation of `0..n`.
pub fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}
