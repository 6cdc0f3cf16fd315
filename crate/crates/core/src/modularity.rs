//! Δ-modularity decisions and measurements.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{bigint_json, IntMatrix, SubmatrixWitness};
use crate::subdet::{self, Goal};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModularityReport {
    /// Exact maximum `|det|` over `rank x rank` submatrices.
    #[serde(with = "bigint_json")]
    pub delta: BigInt,
    /// Present when a bound was queried.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub satisfies_bound: Option<bool>,
    pub witness: SubmatrixWitness,
    pub pairwise_non_parallel: bool,
    pub parallel_violations: Vec<(usize, usize)>,
}

/// Decides whether every `rank x rank` subdeterminant has `|det| <= delta`.
/// On failure a violating submatrix is returned.
///
/// Matrices of the form `[I_r N]` (up to column order) are decided through
/// the square submatrices of `N`, smallest first; a `k x k` violation in `N`
/// is completed to a full `r x r` witness with unit columns.
pub fn is_delta_modular(m: &IntMatrix, delta: u64) -> Result<(bool, Option<SubmatrixWitness>)> {
    if delta < 1 {
        return Err(Error::invalid("delta must be at least 1"));
    }
    let witness = match identity_block(m) {
        Some(unit_cols) => anchored_violation(m, &unit_cols, delta)?,
        None => linalg::first_full_rank_subdet_above(m, delta)?,
    };
    Ok((witness.is_none(), witness))
}

/// Exact modularity level plus a parallel-column audit.
pub fn modularity_level(m: &IntMatrix) -> Result<ModularityReport> {
    let (delta, witness) = linalg::max_abs_full_rank_subdet(m)?;
    let parallel_violations = parallel_pairs(m)?;
    Ok(ModularityReport {
        delta,
        satisfies_bound: None,
        witness,
        pairwise_non_parallel: parallel_violations.is_empty(),
        parallel_violations,
    })
}

/// [`modularity_level`] with the bound query filled in.
pub fn modularity_level_for(m: &IntMatrix, delta: u64) -> Result<ModularityReport> {
    if delta < 1 {
        return Err(Error::invalid("delta must be at least 1"));
    }
    let mut report = modularity_level(m)?;
    report.satisfies_bound = Some(report.delta <= BigInt::from(delta));
    Ok(report)
}

/// Column index pairs `(i, j)`, `i < j`, that are parallel.
pub fn parallel_pairs(m: &IntMatrix) -> Result<Vec<(usize, usize)>> {
    let cols = m.columns();
    let mut out = Vec::new();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            if linalg::is_parallel(&cols[i], &cols[j])? {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Appends the row `-1ᵀM`, making every column sum to zero.
pub fn append_zero_sum_row(m: &IntMatrix) -> Result<IntMatrix> {
    let mut rows = m.to_rows();
    let mut last = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let s: i128 = (0..m.rows()).map(|i| m.get(i, j) as i128).sum();
        last.push(i64::try_from(-s).map_err(|_| Error::Overflow("column sum"))?);
    }
    rows.push(last);
    let mut out = IntMatrix::from_rows(&rows)?;
    if let Some(labels) = m.labels() {
        out.set_labels(labels.to_vec())?;
    }
    Ok(out)
}

/// Deletes the final row.
pub fn drop_last_row(m: &IntMatrix) -> Result<IntMatrix> {
    if m.rows() < 2 {
        return Err(Error::Dimension("cannot drop the only row".into()));
    }
    let rows: Vec<usize> = (0..m.rows() - 1).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    m.select(&rows, &cols)
}

/// For each row `i`, the first column equal to `e_i`, if every unit vector
/// occurs.
pub fn identity_block(m: &IntMatrix) -> Option<Vec<usize>> {
    let r = m.rows();
    let mut found: Vec<Option<usize>> = vec![None; r];
    for j in 0..m.cols() {
        let col = m.column(j);
        let mut ones = col.iter().enumerate().filter(|(_, &v)| v != 0);
        if let (Some((i, &1)), None) = (ones.next(), ones.next()) {
            found[i].get_or_insert(j);
        }
    }
    found.into_iter().collect()
}

/// Maximum `|det|` over square submatrices of every size. The witness is the
/// first maximizer by (size, row set, column set).
pub fn max_square_subdet_all_sizes(m: &IntMatrix) -> Result<(BigInt, SubmatrixWitness)> {
    let all: Vec<usize> = (0..m.cols()).collect();
    let mut best: Option<(BigInt, Vec<usize>, Vec<usize>)> = None;
    for k in 1..=m.rows().min(m.cols()) {
        for rows in (0..m.rows()).combinations(k) {
            if let Some((v, cols)) = scan_exact(m, &rows, &all, None)? {
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, rows, cols));
                }
            }
        }
    }
    let (v, rows, cols) = best.ok_or(Error::DegenerateRank)?;
    let det_value = linalg::det(&m.select(&rows, &cols)?)?;
    Ok((
        v,
        SubmatrixWitness {
            row_indices: rows,
            col_indices: cols,
            det_value,
        },
    ))
}

fn anchored_violation(
    m: &IntMatrix,
    unit_cols: &[usize],
    delta: u64,
) -> Result<Option<SubmatrixWitness>> {
    let r = m.rows();
    let rest: Vec<usize> = (0..m.cols()).filter(|j| !unit_cols.contains(j)).collect();
    let bound = BigInt::from(delta);
    for k in 1..=r.min(rest.len()) {
        for rows in (0..r).combinations(k) {
            let Some((_, cols)) = scan_exact(m, &rows, &rest, Some(&bound))? else {
                continue;
            };
            // Complete with the unit columns of the rows left out.
            let mut full: Vec<usize> = cols;
            full.extend((0..r).filter(|i| !rows.contains(i)).map(|i| unit_cols[i]));
            full.sort_unstable();
            let all_rows: Vec<usize> = (0..r).collect();
            let det_value = linalg::det(&m.select(&all_rows, &full)?)?;
            debug_assert!(det_value.abs() > bound);
            return Ok(Some(SubmatrixWitness {
                row_indices: all_rows,
                col_indices: full,
                det_value,
            }));
        }
    }
    Ok(None)
}

/// Scans the `k x k` minors of `m[rows, cols]` (`k = |rows|`). With a bound,
/// returns the first minor exceeding it; otherwise the first maximum.
/// Returned column indices refer to `m`.
fn scan_exact(
    m: &IntMatrix,
    rows: &[usize],
    cols: &[usize],
    above: Option<&BigInt>,
) -> Result<Option<(BigInt, Vec<usize>)>> {
    let k = rows.len();
    if cols.len() < k {
        return Ok(None);
    }
    let columns: Vec<Vec<i64>> = cols
        .iter()
        .map(|&j| rows.iter().map(|&i| m.get(i, j)).collect())
        .collect();
    let goal = match above {
        Some(b) => match u128::try_from(b) {
            Ok(v) => Goal::FirstAbove(v),
            Err(_) => return brute_scan(m, rows, cols, above),
        },
        None => Goal::Max,
    };
    match subdet::scan(&columns, goal) {
        Ok(hit) => Ok(hit.map(|h| {
            (
                BigInt::from(h.abs),
                h.cols.into_iter().map(|c| cols[c]).collect(),
            )
        })),
        Err(subdet::Overflow) => brute_scan(m, rows, cols, above),
    }
}

fn brute_scan(
    m: &IntMatrix,
    rows: &[usize],
    cols: &[usize],
    above: Option<&BigInt>,
) -> Result<Option<(BigInt, Vec<usize>)>> {
    let mut best: Option<(BigInt, Vec<usize>)> = None;
    for sub in cols.iter().copied().combinations(rows.len()) {
        let v = linalg::det(&m.select(rows, &sub)?)?.abs();
        match above {
            Some(b) if v > *b => return Ok(Some((v, sub))),
            Some(_) => {}
            None => {
                if !v.is_zero() && best.as_ref().is_none_or(|(x, _)| v > *x) {
                    best = Some((v, sub));
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn totally_unimodular_frame() {
        let m = IntMatrix::identity(3).hstack(&IntMatrix::clique(3)).unwrap();
        assert_eq!(is_delta_modular(&m, 1).unwrap(), (true, None));
        assert!(is_delta_modular(&m, 0).is_err());
    }

    #[test]
    fn levels() {
        assert_eq!(modularity_level(&IntMatrix::identity(2)).unwrap().delta, BigInt::from(1));
        let r = modularity_level(&mat(&[&[2, 0], &[0, 1]])).unwrap();
        assert_eq!(r.delta, BigInt::from(2));
        assert!(r.pairwise_non_parallel);
        let r = modularity_level_for(&mat(&[&[1, 2, 1], &[0, 0, 1]]), 1).unwrap();
        assert_eq!(r.parallel_violations, vec![(0, 1)]);
        assert_eq!(r.satisfies_bound, Some(false));
    }

    #[test]
    fn anchored_witness_is_full_size() {
        let m = mat(&[&[1, 0, 0, 2], &[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let (ok, w) = is_delta_modular(&m, 1).unwrap();
        assert!(!ok);
        let w = w.unwrap();
        assert_eq!(w.row_indices, vec![0, 1, 2]);
        assert_eq!(w.col_indices, vec![1, 2, 3]);
        assert_eq!(w.abs_det(), BigInt::from(2));
        assert!(w.verify(&m));
    }

    #[test]
    fn zero_sum_row() {
        let m = mat(&[&[1, 0, 1], &[0, 1, -1]]);
        let z = append_zero_sum_row(&m).unwrap();
        assert_eq!(z.row(2), &[-1, -1, 0]);
        assert_eq!(drop_last_row(&z).unwrap(), m);
        let d = append_zero_sum_row(&IntMatrix::clique(3)).unwrap();
        assert_eq!(d.row(3), &[0, 0, 0]);
        let c = append_zero_sum_row(&mat(&[&[2], &[3]])).unwrap();
        assert_eq!(c.get(2, 0), -5);
        assert!(drop_last_row(&mat(&[&[1, 2]])).is_err());
    }

    #[test]
    fn dropping_a_row_of_the_clique_leaves_a_frame() {
        let d = drop_last_row(&IntMatrix::clique(4)).unwrap();
        assert_eq!(identity_block(&d), Some(vec![2, 4, 5]));
        // columns e_i - e_4 become e_i
        for (i, col) in [2usize, 4, 5].iter().enumerate() {
            let mut e = vec![0; 3];
            e[i] = 1;
            assert_eq!(d.column(*col), e);
        }
    }

    #[test]
    fn all_sizes_maximum() {
        let m = mat(&[&[3, 0], &[0, 1]]);
        let (v, w) = max_square_subdet_all_sizes(&m).unwrap();
        assert_eq!(v, BigInt::from(3));
        assert_eq!(w.col_indices, vec![0]);
    }
}
