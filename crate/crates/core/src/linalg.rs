//! Exact integer linear algebra: determinants, rank, maximal minors,
//! parallelism, primitive parts and Hermite triangularization of a basis
//! block.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, SubmatrixWitness};
use crate::subdet::{self, Goal};

/// Scalars usable in fraction-free elimination. `None` signals overflow.
trait Exact: Clone + PartialEq {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    /// `(a * b - c * d) / p`, with the division known to be exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, p: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
}

impl Exact for i128 {
    fn nil() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, p: &Self) -> Option<Self> {
        let num = a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)?;
        Some(num / p)
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Exact for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, p: &Self) -> Option<Self> {
        Some((a * b - c * d) / p)
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Bareiss elimination in place. Returns the rank and, for square input,
/// the determinant.
fn bareiss<T: Exact>(rows: usize, cols: usize, a: &mut [T], one: T) -> Option<(usize, T)> {
    let mut prev = one;
    let mut sign_flip = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_nil()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
            sign_flip = !sign_flip;
        }
        let pivot = a[r * cols + c].clone();
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = T::cross_div(
                    &pivot,
                    &a[i * cols + j],
                    &a[i * cols + c],
                    &a[r * cols + j],
                    &prev,
                )?;
                a[i * cols + j] = v;
            }
            a[i * cols + c] = T::nil();
        }
        prev = pivot;
        r += 1;
    }
    let det = if rows == cols && r == rows {
        if sign_flip {
            prev.neg()
        } else {
            prev
        }
    } else {
        T::nil()
    };
    Some((r, det))
}

fn eliminate(m: &IntMatrix) -> (usize, BigInt) {
    let mut fast: Vec<i128> = m.data().iter().map(|&v| v as i128).collect();
    if let Some((rank, det)) = bareiss(m.rows(), m.cols(), &mut fast, 1i128) {
        return (rank, BigInt::from(det));
    }
    let mut slow: Vec<BigInt> = m.data().iter().map(|&v| BigInt::from(v)).collect();
    bareiss(m.rows(), m.cols(), &mut slow, BigInt::one()).expect("big integers do not overflow")
}

/// Exact determinant of a square matrix.
pub fn det(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(eliminate(m).1)
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    eliminate(m).0
}

/// Maximum `|det|` over all `rank(M) x rank(M)` submatrices, with the first
/// maximizer in (columns, then rows) lexicographic order.
pub fn max_abs_full_rank_subdet(m: &IntMatrix) -> Result<(BigInt, SubmatrixWitness)> {
    let k = rank(m);
    if k == 0 {
        return Err(Error::DegenerateRank);
    }
    match scan_minors(m, k, Goal::Max) {
        Ok(Some((rows, cols))) => {
            let det_value = det(&m.select(&rows, &cols)?)?;
            Ok((
                det_value.abs(),
                SubmatrixWitness {
                    row_indices: rows,
                    col_indices: cols,
                    det_value,
                },
            ))
        }
        Ok(None) => Err(Error::DegenerateRank),
        Err(subdet::Overflow) => max_abs_full_rank_subdet_brute(m),
    }
}

/// First `rank(M) x rank(M)` submatrix (same order as above) whose `|det|`
/// exceeds `bound`, if any.
pub(crate) fn first_full_rank_subdet_above(
    m: &IntMatrix,
    bound: u64,
) -> Result<Option<SubmatrixWitness>> {
    let k = rank(m);
    if k == 0 {
        return Err(Error::DegenerateRank);
    }
    let found = match scan_minors(m, k, Goal::FirstAbove(bound as u128)) {
        Ok(found) => found,
        Err(subdet::Overflow) => brute_first_above(m, k, bound)?,
    };
    found
        .map(|(rows, cols)| {
            let det_value = det(&m.select(&rows, &cols)?)?;
            Ok(SubmatrixWitness {
                row_indices: rows,
                col_indices: cols,
                det_value,
            })
        })
        .transpose()
}

type Address = (Vec<usize>, Vec<usize>);

/// Runs the minor scan on each `k`-row subset. For full row rank only the
/// full row set is scanned.
fn scan_minors(m: &IntMatrix, k: usize, goal: Goal) -> std::result::Result<Option<Address>, subdet::Overflow> {
    let row_sets: Vec<Vec<usize>> = if k == m.rows() {
        vec![(0..k).collect()]
    } else {
        (0..m.rows()).combinations(k).collect()
    };
    let mut best: Option<(u128, Vec<usize>, Vec<usize>)> = None;
    for rows in row_sets {
        let columns: Vec<Vec<i64>> = (0..m.cols())
            .map(|j| rows.iter().map(|&i| m.get(i, j)).collect())
            .collect();
        let Some(hit) = subdet::scan(&columns, goal)? else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((abs, cols, _)) => match goal {
                Goal::Max => hit.abs > *abs || (hit.abs == *abs && hit.cols < *cols),
                Goal::FirstAbove(_) => hit.cols < *cols,
            },
        };
        if better {
            best = Some((hit.abs, hit.cols, rows));
        }
    }
    Ok(best.map(|(_, cols, rows)| (rows, cols)))
}

/// Plain enumeration with arbitrary-precision determinants: columns outer,
/// rows inner, lexicographic. Used as fallback on overflow and as a test
/// oracle.
pub fn max_abs_full_rank_subdet_brute(m: &IntMatrix) -> Result<(BigInt, SubmatrixWitness)> {
    let k = rank(m);
    if k == 0 {
        return Err(Error::DegenerateRank);
    }
    let mut best: Option<(BigInt, SubmatrixWitness)> = None;
    for cols in (0..m.cols()).combinations(k) {
        for rows in (0..m.rows()).combinations(k) {
            let d = det(&m.select(&rows, &cols)?)?;
            let a = d.abs();
            if best.as_ref().is_none_or(|(b, _)| a > *b) {
                best = Some((
                    a,
                    SubmatrixWitness {
                        row_indices: rows,
                        col_indices: cols.clone(),
                        det_value: d,
                    },
                ));
            }
        }
    }
    best.ok_or(Error::DegenerateRank)
}

fn brute_first_above(m: &IntMatrix, k: usize, bound: u64) -> Result<Option<Address>> {
    let bound = BigInt::from(bound);
    for cols in (0..m.cols()).combinations(k) {
        for rows in (0..m.rows()).combinations(k) {
            if det(&m.select(&rows, &cols)?)?.abs() > bound {
                return Ok(Some((rows, cols)));
            }
        }
    }
    Ok(None)
}

/// Maximum `|det|` over square submatrices of every size, by brute force.
/// Test oracle for the unit-column completion argument.
pub fn max_abs_square_subdet_brute(m: &IntMatrix) -> BigInt {
    let mut best = BigInt::zero();
    for k in 1..=m.rows().min(m.cols()) {
        for cols in (0..m.cols()).combinations(k) {
            for rows in (0..m.rows()).combinations(k) {
                let d = det(&m.select(&rows, &cols).expect("indices in range"))
                    .expect("square")
                    .abs();
                if d > best {
                    best = d;
                }
            }
        }
    }
    best
}

/// Two vectors are parallel when every 2x2 minor of `[u v]` vanishes; the
/// zero vector is parallel to everything.
pub fn is_parallel(u: &[i64], v: &[i64]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    // Compare against the first nonzero coordinate of u; equivalent to all
    // 2x2 minors vanishing.
    let Some(p) = u.iter().position(|&x| x != 0) else {
        return Ok(true);
    };
    let (up, vp) = (u[p] as i128, v[p] as i128);
    Ok(u.iter()
        .zip(v)
        .all(|(&a, &b)| a as i128 * vp == b as i128 * up))
}

/// `v / gcd(v)`, signs unchanged.
pub fn primitive_part(v: &[i64]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|&x| x / g as i64).collect())
}

/// Primitive part scaled so that the first nonzero entry is positive; one
/// representative per point of the vector matroid.
pub fn direction(v: &[i64]) -> Result<Vec<i64>> {
    let mut p = primitive_part(v)?;
    if p.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        p.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(p)
}

/// Elementary unimodular row operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOp {
    Swap(usize, usize),
    Negate(usize),
    /// `row[target] += factor * row[source]`.
    AddMultiple {
        target: usize,
        source: usize,
        factor: i64,
    },
}

impl RowOp {
    fn inverse(self) -> RowOp {
        match self {
            RowOp::AddMultiple {
                target,
                source,
                factor,
            } => RowOp::AddMultiple {
                target,
                source,
                factor: -factor,
            },
            op => op,
        }
    }
}

fn apply_op(a: &mut [i128], cols: usize, op: RowOp) -> Result<()> {
    match op {
        RowOp::Swap(i, j) => {
            for c in 0..cols {
                a.swap(i * cols + c, j * cols + c);
            }
        }
        RowOp::Negate(i) => {
            for c in 0..cols {
                a[i * cols + c] = -a[i * cols + c];
            }
        }
        RowOp::AddMultiple {
            target,
            source,
            factor,
        } => {
            for c in 0..cols {
                let add = a[source * cols + c]
                    .checked_mul(factor as i128)
                    .and_then(|x| x.checked_add(a[target * cols + c]))
                    .ok_or(Error::Overflow("row operation"))?;
                a[target * cols + c] = add;
            }
        }
    }
    Ok(())
}

fn to_matrix(rows: usize, cols: usize, a: &[i128]) -> Result<IntMatrix> {
    let data = a
        .iter()
        .map(|&v| i64::try_from(v).map_err(|_| Error::Overflow("hermite triangularization")))
        .collect::<Result<Vec<i64>>>()?;
    IntMatrix::new(rows, cols, data)
}

/// Output of [`hermite_triangularize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    /// `U * M`.
    pub reduced: IntMatrix,
    /// The unimodular `U`.
    pub transform: IntMatrix,
    /// Row operations whose product (first applied first) is `U`.
    pub ops: Vec<RowOp>,
}

impl HermiteForm {
    /// `U^{-1}`, replaying the inverse operations in reverse order.
    pub fn inverse_transform(&self) -> Result<IntMatrix> {
        let n = self.transform.rows();
        let mut a: Vec<i128> = IntMatrix::identity(n).data().iter().map(|&v| v as i128).collect();
        for op in self.ops.iter().rev() {
            apply_op(&mut a, n, op.inverse())?;
        }
        to_matrix(n, n, &a)
    }
}

/// Row-reduces `M` by unimodular operations so that the columns `basis_cols`
/// (taken in the given order) form an upper-triangular block with positive
/// diagonal, entries above the diagonal reduced into `[0, diagonal)`.
pub fn hermite_triangularize(m: &IntMatrix, basis_cols: &[usize]) -> Result<HermiteForm> {
    let n = m.rows();
    if basis_cols.len() != n {
        return Err(Error::Dimension(format!(
            "basis needs {n} columns, got {}",
            basis_cols.len()
        )));
    }
    let block = m.select_columns(basis_cols)?;
    if det(&block)?.is_zero() {
        return Err(Error::SingularBasis);
    }

    let cols = m.cols();
    let mut a: Vec<i128> = m.data().iter().map(|&v| v as i128).collect();
    let mut u: Vec<i128> = IntMatrix::identity(n).data().iter().map(|&v| v as i128).collect();
    let mut ops = Vec::new();
    let mut apply = |op: RowOp, a: &mut Vec<i128>, u: &mut Vec<i128>| -> Result<()> {
        apply_op(a, cols, op)?;
        apply_op(u, n, op)?;
        ops.push(op);
        Ok(())
    };

    for (t, &b) in basis_cols.iter().enumerate() {
        loop {
            let pivot = (t..n)
                .filter(|&i| a[i * cols + b] != 0)
                .min_by_key(|&i| a[i * cols + b].unsigned_abs())
                .ok_or(Error::SingularBasis)?;
            if pivot != t {
                apply(RowOp::Swap(t, pivot), &mut a, &mut u)?;
            }
            let mut done = true;
            for i in t + 1..n {
                let q = a[i * cols + b] / a[t * cols + b];
                if q != 0 {
                    let factor = i64::try_from(-q).map_err(|_| Error::Overflow("hermite"))?;
                    apply(
                        RowOp::AddMultiple {
                            target: i,
                            source: t,
                            factor,
                        },
                        &mut a,
                        &mut u,
                    )?;
                }
                if a[i * cols + b] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[t * cols + b] < 0 {
            apply(RowOp::Negate(t), &mut a, &mut u)?;
        }
        let d = a[t * cols + b];
        for i in 0..t {
            let q = a[i * cols + b].div_euclid(d);
            if q != 0 {
                let factor = i64::try_from(-q).map_err(|_| Error::Overflow("hermite"))?;
                apply(
                    RowOp::AddMultiple {
                        target: i,
                        source: t,
                        factor,
                    },
                    &mut a,
                    &mut u,
                )?;
            }
        }
    }

    let mut reduced = to_matrix(n, cols, &a)?;
    if let Some(labels) = m.labels() {
        reduced.set_labels(labels.to_vec())?;
    }
    Ok(HermiteForm {
        reduced,
        transform: to_matrix(n, n, &u)?,
        ops,
    })
}
