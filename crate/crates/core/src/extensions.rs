//! Extensions of the clique matrix `D_{r+1}` by one, two or three columns.
//!
//! Extension columns are written in zero-sum form. For pairs and triples the
//! `t` extra columns each own a dedicated row holding `1` (and `0` in the
//! other dedicated rows); the remaining entries `a` of such a column sum to
//! `-1`. All modularity checks use the smallest embedding, i.e. the clique on
//! the union of the supports plus the dedicated rows.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{IntMatrix, SubmatrixWitness};
use crate::modularity;
use crate::partition::partitions;

/// Integer column whose entries sum to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSumColumn {
    entries: Vec<i64>,
}

impl ZeroSumColumn {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        let sum: i128 = entries.iter().map(|&x| x as i128).sum();
        if sum != 0 {
            return Err(Error::invalid(format!("entries sum to {sum}, not 0")));
        }
        Ok(ZeroSumColumn { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        support(&self.entries)
    }
}

fn support(v: &[i64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != 0).collect()
}

/// Largest subset sum of a zero-sum column, i.e. the sum of its positive
/// entries.
pub fn gamma(a: &[i64]) -> Result<u64> {
    let col = ZeroSumColumn::new(a.to_vec())?;
    Ok(col
        .entries()
        .iter()
        .filter(|&&x| x > 0)
        .map(|&x| x as u64)
        .sum())
}

/// Maximum `|det|` over `r x r` submatrices of `[D_{r+1} a]`, by the
/// closed formula `max(1, gamma(a))`.
pub fn clique_extension_max_subdet(a: &[i64], r: usize) -> Result<u64> {
    if a.len() != r + 1 {
        return Err(Error::Dimension(format!(
            "column of length {} cannot extend D_{}",
            a.len(),
            r + 1
        )));
    }
    Ok(gamma(a)?.max(1))
}

/// `[D_n a]` with `n = len(a)`.
pub fn single_embedding(a: &[i64]) -> Result<IntMatrix> {
    let mut m = IntMatrix::clique(a.len());
    m.push_column(a)?;
    Ok(m)
}

/// Zero-free part of a column up to row permutation and global sign.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonicalColumn {
    /// Nonzero entries, sorted non-increasingly; the lexicographically
    /// greater of the two sign choices.
    pub reduced: Vec<i64>,
    /// Whether the input had to be negated to reach `reduced`.
    pub sign_flag: bool,
}

impl CanonicalColumn {
    pub fn of(v: &[i64]) -> Self {
        let sorted = |neg: bool| -> Vec<i64> {
            let mut s: Vec<i64> = v
                .iter()
                .filter(|&&x| x != 0)
                .map(|&x| if neg { -x } else { x })
                .collect();
            s.sort_unstable_by(|a, b| b.cmp(a));
            s
        };
        let plain = sorted(false);
        let flipped = sorted(true);
        if flipped > plain {
            CanonicalColumn {
                reduced: flipped,
                sign_flag: true,
            }
        } else {
            CanonicalColumn {
                reduced: plain,
                sign_flag: false,
            }
        }
    }
}

/// All zero-sum columns with `gamma <= delta` that are not parallel to a
/// column of `D`, one per orbit under row permutation and sign, sorted by
/// canonical form.
pub fn enumerate_single_extensions(delta: u64) -> Result<Vec<CanonicalColumn>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in 1..=delta {
        let parts = partitions(s)?;
        for pos in &parts {
            for neg in &parts {
                // k(e_i - e_j) is parallel to a clique column
                if pos.m() == 1 && neg.m() == 1 {
                    continue;
                }
                let v: Vec<i64> = pos
                    .parts()
                    .iter()
                    .map(|&p| p as i64)
                    .chain(neg.parts().iter().map(|&p| -(p as i64)))
                    .collect();
                let c = CanonicalColumn::of(&v);
                if seen.insert(c.reduced.clone()) {
                    out.push(c);
                }
            }
        }
    }
    out.sort_by(|a, b| a.reduced.cmp(&b.reduced));
    Ok(out)
}

/// Possible nonzero parts of an extension column that owns a dedicated row:
/// a single admissible column (either sign) with one entry `1` removed.
/// Sorted ascending.
pub fn restricted_options(delta: u64) -> Result<Vec<Vec<i64>>> {
    let mut out = BTreeSet::new();
    for c in enumerate_single_extensions(delta)? {
        let neg: Vec<i64> = c.reduced.iter().map(|x| -x).collect();
        for v in [c.reduced.clone(), neg] {
            if let Some(p) = v.iter().position(|&x| x == 1) {
                let mut w = v.clone();
                w.remove(p);
                w.sort_unstable();
                out.insert(w);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `[D_{u+t} | (x_1; e_1), ..., (x_t; e_t)]` for columns `x_i` of length
/// `u`. Every column sums to zero.
pub fn embedding(columns: &[Vec<i64>]) -> Result<IntMatrix> {
    let t = columns.len();
    let u = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != u) {
        return Err(Error::Dimension("extension columns differ in length".into()));
    }
    let n = u + t;
    let mut m = IntMatrix::clique(n);
    for (i, c) in columns.iter().enumerate() {
        let mut full = c.clone();
        full.extend((0..t).map(|j| i64::from(i == j)));
        m.push_column(&full)?;
    }
    Ok(m)
}

/// First violation of `delta`-modularity of a zero-sum matrix, found on the
/// matrix with its last row dropped (an identity-anchored form with the same
/// maximal minors). The witness addresses the input matrix.
pub fn zero_sum_violation(m: &IntMatrix, delta: u64) -> Result<Option<SubmatrixWitness>> {
    let dropped = modularity::drop_last_row(m)?;
    Ok(modularity::is_delta_modular(&dropped, delta)?.1)
}

/// Rows of `[x_1 ... x_t]`, all-zero rows deleted, sorted; then the least
/// such word over the column orders in `orders`.
fn canonical_rows(columns: &[&[i64]], orders: &[Vec<usize>]) -> Vec<Vec<i64>> {
    let u = columns[0].len();
    orders
        .iter()
        .map(|ord| {
            let mut rows: Vec<Vec<i64>> = (0..u)
                .map(|i| ord.iter().map(|&c| columns[c][i]).collect::<Vec<i64>>())
                .filter(|row| row.iter().any(|&x| x != 0))
                .collect();
            rows.sort();
            rows
        })
        .min()
        .expect("at least one column order")
}

/// Two extension columns up to row permutation and column swap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalPair {
    /// Rows `[a_i, b_i]`, lexicographically sorted, no zero rows.
    pub rows: Vec<[i64; 2]>,
}

impl CanonicalPair {
    pub fn of(a: &[i64], b: &[i64]) -> Self {
        let rows = canonical_rows(&[a, b], &[vec![0, 1], vec![1, 0]]);
        CanonicalPair {
            rows: rows.into_iter().map(|r| [r[0], r[1]]).collect(),
        }
    }

    pub fn a(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn b(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r[1]).collect()
    }

    pub fn embedding(&self) -> Result<IntMatrix> {
        embedding(&[self.a(), self.b()])
    }
}

/// Three extension columns up to row permutation and column order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalTriple {
    pub rows: Vec<[i64; 3]>,
}

impl CanonicalTriple {
    pub fn of(a: &[i64], b: &[i64], c: &[i64]) -> Self {
        let orders: Vec<Vec<usize>> = (0..3).permutations(3).collect();
        let rows = canonical_rows(&[a, b, c], &orders);
        CanonicalTriple {
            rows: rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn embedding(&self) -> Result<IntMatrix> {
        embedding(&[self.column(0), self.column(1), self.column(2)])
    }
}

/// Distinct vectors of length `u` whose nonzero entries are `parts`.
fn placements(parts: &[i64], u: usize) -> Vec<Vec<i64>> {
    if parts.len() > u {
        return Vec::new();
    }
    let orders: BTreeSet<Vec<i64>> = parts.iter().copied().permutations(parts.len()).collect();
    let mut out = Vec::new();
    for pos in (0..u).combinations(parts.len()) {
        for ord in &orders {
            let mut v = vec![0; u];
            for (&p, &x) in pos.iter().zip(ord) {
                v[p] = x;
            }
            out.push(v);
        }
    }
    out
}

/// Support conditions satisfied by every admissible pair: each column has
/// at most one row outside the other's support, and the entry there is -1.
fn support_filter(a: &[i64], b: &[i64]) -> bool {
    let outside = |x: &[i64], y: &[i64]| -> bool {
        let rows: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0 && y[i] == 0).collect();
        rows.len() <= 1 && rows.iter().all(|&i| x[i] == -1)
    };
    outside(a, b) && outside(b, a)
}

fn has_zero_row(columns: &[&[i64]]) -> bool {
    (0..columns[0].len()).any(|i| columns.iter().all(|c| c[i] == 0))
}

/// All pairs `(a, b)`, `a != b`, for which the two-column embedding is
/// `delta`-modular with no parallel columns, one per orbit, sorted.
///
/// Candidates are restricted by the support conditions of [`support_filter`]
/// before the modularity check.
pub fn enumerate_pair_extensions(delta: u64) -> Result<Vec<CanonicalPair>> {
    pairs_with(delta, true)
}

/// Same as [`enumerate_pair_extensions`] but over every relative placement
/// of the two supports, without the support conditions.
pub fn enumerate_pair_extensions_unfiltered(delta: u64) -> Result<Vec<CanonicalPair>> {
    pairs_with(delta, false)
}

fn pairs_with(delta: u64, filtered: bool) -> Result<Vec<CanonicalPair>> {
    let options = restricted_options(delta)?;
    let longest = options.iter().map(Vec::len).max().unwrap_or(0);
    let mut found = BTreeSet::new();
    for opt_a in &options {
        let k = opt_a.len();
        let widths = if filtered { k..=k + 1 } else { k..=k + longest };
        for u in widths {
            let mut a = opt_a.clone();
            a.resize(u, 0);
            for opt_b in &options {
                for b in placements(opt_b, u) {
                    if b == a || has_zero_row(&[&a, &b]) || (filtered && !support_filter(&a, &b)) {
                        continue;
                    }
                    let pair = CanonicalPair::of(&a, &b);
                    if found.contains(&pair) {
                        continue;
                    }
                    let m = embedding(&[a.clone(), b.clone()])?;
                    if zero_sum_violation(&m, delta)?.is_none()
                        && modularity::parallel_pairs(&m)?.is_empty()
                    {
                        found.insert(pair);
                    }
                }
            }
        }
    }
    // Independent confirmation through the general maximal-minor scan.
    for pair in &found {
        let m = pair.embedding()?;
        let (level, _) = linalg::max_abs_full_rank_subdet(&m)?;
        if level > BigInt::from(delta) {
            return Err(Error::invalid(format!(
                "pair {:?} failed re-verification with level {level}",
                pair.rows
            )));
        }
    }
    Ok(found.into_iter().collect())
}

/// A candidate triple together with a submatrix of its embedding whose
/// `|det|` exceeds the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleRefutation {
    pub triple: CanonicalTriple,
    pub witness: SubmatrixWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleSearch {
    /// Number of distinct candidate triples examined.
    pub candidates: usize,
    pub refuted: Vec<TripleRefutation>,
    /// Candidates whose embedding turned out `delta`-modular.
    pub survivors: Vec<CanonicalTriple>,
}

/// Examines every triple of distinct extension columns whose three pairs
/// are all admissible, and looks for a violating submatrix of each.
pub fn refute_triple_extensions(delta: u64) -> Result<TripleSearch> {
    let pairs = enumerate_pair_extensions(delta)?;
    let admissible: BTreeSet<&CanonicalPair> = pairs.iter().collect();
    let options = restricted_options(delta)?;
    let mut triples = BTreeSet::new();
    for pair in &pairs {
        let u = pair.rows.len();
        for u2 in [u, u + 1] {
            let mut a = pair.a();
            let mut b = pair.b();
            a.resize(u2, 0);
            b.resize(u2, 0);
            for opt_c in &options {
                for c in placements(opt_c, u2) {
                    if c == a || c == b || has_zero_row(&[&a, &b, &c]) {
                        continue;
                    }
                    if admissible.contains(&CanonicalPair::of(&a, &c))
                        && admissible.contains(&CanonicalPair::of(&b, &c))
                    {
                        triples.insert(CanonicalTriple::of(&a, &b, &c));
                    }
                }
            }
        }
    }
    let mut refuted = Vec::new();
    let mut survivors = Vec::new();
    for triple in &triples {
        let m = triple.embedding()?;
        match zero_sum_violation(&m, delta)? {
            Some(witness) => refuted.push(TripleRefutation {
                triple: triple.clone(),
                witness,
            }),
            None => survivors.push(triple.clone()),
        }
    }
    Ok(TripleSearch {
        candidates: triples.len(),
        refuted,
        survivors,
    })
}

/// The 4x4 pattern `[[1,0,a,b],[-1,0,c,d],[0,1,e,0],[0,-1,0,1]]`.
pub fn corner_matrix(a: i64, b: i64, c: i64, d: i64, e: i64) -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![1, 0, a, b],
        vec![-1, 0, c, d],
        vec![0, 1, e, 0],
        vec![0, -1, 0, 1],
    ])
    .expect("4x4 pattern")
}

/// `|det|` of [`corner_matrix`], which equals `|(a+c) - (b+d)e|`. Both
/// sides are evaluated and compared.
pub fn corner_det(a: i64, b: i64, c: i64, d: i64, e: i64) -> Result<BigInt> {
    let by_det = linalg::det(&corner_matrix(a, b, c, d, e))?.abs();
    let (a, b, c, d, e) = (
        BigInt::from(a),
        BigInt::from(b),
        BigInt::from(c),
        BigInt::from(d),
        BigInt::from(e),
    );
    let by_formula = ((a + c) - (b + d) * e).abs();
    if by_det != by_formula {
        return Err(Error::invalid(format!(
            "corner determinant {by_det} disagrees with formula {by_formula}"
        )));
    }
    Ok(by_det)
}

/// 5x5 pattern with `|det| = |wx + x + 3(y+1)|`.
pub fn matrix_b1(w: i64, x: i64, y: i64) -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![0, 0, -2, 1, x],
        vec![1, 0, w, -1, y],
        vec![0, 1, 1, 0, 0],
        vec![0, -1, 0, 1, 0],
        vec![-1, 0, 0, 0, 1],
    ])
    .expect("5x5 pattern")
}

/// 6x6 pattern with the same determinant as [`matrix_b1`].
pub fn matrix_b2(w: i64, x: i64, y: i64) -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![0, 0, -1, 0, 0, 1],
        vec![0, 0, -1, 1, x, -1],
        vec![1, 0, w, -1, y, 0],
        vec![0, 1, 1, 0, 0, 0],
        vec![0, -1, 0, 1, 0, 0],
        vec![-1, 0, 0, 0, 1, 0],
    ])
    .expect("6x6 pattern")
}

/// 6x6 pattern with `|det| = 4` at the parameters where it is used.
pub fn matrix_b3(w: i64, x: i64, y: i64) -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![1 - y, 0, 0, -1, -1, y],
        vec![0, 1 - x, 0, -1, x, -1],
        vec![0, 0, 1 - w, w, -1, -1],
        vec![0, 0, -1, 1, 0, 0],
        vec![0, -1, 0, 0, 1, 0],
        vec![-1, 0, 0, 0, 0, 1],
    ])
    .expect("6x6 pattern")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&[-3, 2, 1, 0]).unwrap(), 3);
        assert_eq!(gamma(&[1, -1]).unwrap(), 1);
        assert_eq!(gamma(&[-2, -1, 1, 1, 1]).unwrap(), 3);
        assert_eq!(gamma(&[0, 0]), Err(Error::ZeroVector));
        assert!(gamma(&[1, 1]).is_err());
    }

    #[test]
    fn closed_formula_examples() {
        assert_eq!(clique_extension_max_subdet(&[-3, 2, 1, 0], 3).unwrap(), 3);
        assert_eq!(clique_extension_max_subdet(&[1, -1, 0, 0], 3).unwrap(), 1);
        assert!(clique_extension_max_subdet(&[1, -1], 3).is_err());
    }

    #[test]
    fn canonical_column() {
        let c = CanonicalColumn::of(&[-3, 0, 2, 1]);
        assert_eq!(c.reduced, vec![3, -1, -2]);
        assert!(c.sign_flag);
        assert_eq!(CanonicalColumn::of(&[1, 1, -2]).reduced, vec![2, -1, -1]);
    }

    #[test]
    fn singles_small_delta() {
        assert!(enumerate_single_extensions(1).unwrap().is_empty());
        let two: Vec<Vec<i64>> = enumerate_single_extensions(2)
            .unwrap()
            .into_iter()
            .map(|c| c.reduced)
            .collect();
        let mut expected = vec![
            CanonicalColumn::of(&[-2, 1, 1]).reduced,
            CanonicalColumn::of(&[-1, -1, 1, 1]).reduced,
        ];
        expected.sort();
        assert_eq!(two, expected);
    }

    #[test]
    fn restricted_options_for_three() {
        let mut expected: Vec<Vec<i64>> = [
            vec![-3, 2],
            vec![-2, 1],
            vec![-3, 1, 1],
            vec![-2, 2, -1],
            vec![-1, -1, 1],
            vec![-2, -1, 1, 1],
            vec![2, -1, -1, -1],
            vec![-1, -1, -1, 1, 1],
        ]
        .into_iter()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
        expected.sort();
        assert_eq!(restricted_options(3).unwrap(), expected);
    }

    #[test]
    fn corner_examples() {
        assert_eq!(corner_det(-1, 1, -1, 1, 1).unwrap(), BigInt::from(4));
        assert_eq!(corner_det(0, 0, 0, 0, 0).unwrap(), BigInt::from(0));
        assert_eq!(corner_det(-1, -1, -1, -1, -1).unwrap(), BigInt::from(4));
        assert_eq!(corner_det(-1, -2, -1, -1, -1).unwrap(), BigInt::from(5));
    }

    #[test]
    fn embedding_shape() {
        let m = embedding(&[vec![-3, 2], vec![-2, 1]]).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 8));
        assert_eq!(m.column(6), vec![-3, 2, 1, 0]);
        assert_eq!(m.column(7), vec![-2, 1, 0, 1]);
    }

    #[test]
    fn placements_are_distinct() {
        assert_eq!(placements(&[-1, -1, 1], 3).len(), 3);
        assert_eq!(placements(&[-2, 1], 3).len(), 6);
        assert!(placements(&[1, 1], 1).is_empty());
    }
}
