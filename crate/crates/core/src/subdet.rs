//! Enumeration of maximal minors by depth-first search over column subsets.
//!
//! The search keeps the fraction-free elimination state of `[C | I]` for the
//! chosen columns `C`. Because every elimination step is linear in the column
//! it is applied to, the state after `t` steps is a matrix `L` with
//! `transformed(x) = L x` for any integer column `x`. Once `k - 1` columns
//! are fixed, the determinant with any further column is a single dot product
//! against the last surviving row of `L`. A dependent prefix has no nonzero
//! pivot and its whole subtree is skipped.

use rayon::prelude::*;

/// Raised when an intermediate value leaves `i64`; callers fall back to
/// arbitrary precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Hit {
    pub abs: u128,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Goal {
    /// Largest `|det|`, first in lexicographic column order among ties.
    Max,
    /// First column set (lexicographically) whose `|det|` exceeds the bound.
    FirstAbove(u128),
}

/// Surviving (not yet pivoted) rows of `L`.
struct State {
    rows: Vec<Vec<i64>>,
    prev: i64,
}

struct Scan<'a> {
    k: usize,
    columns: &'a [Vec<i64>],
    col_max: u128,
    goal: Goal,
}

/// Scans all `k x k` minors of the `k`-row matrix whose columns are given.
pub(crate) fn scan(columns: &[Vec<i64>], goal: Goal) -> Result<Option<Hit>, Overflow> {
    let n = columns.len();
    let k = match columns.first() {
        Some(c) => c.len(),
        None => return Ok(None),
    };
    if k == 0 || n < k {
        return Ok(None);
    }
    let col_max = columns
        .iter()
        .flatten()
        .map(|v| v.unsigned_abs() as u128)
        .max()
        .unwrap_or(0);
    let scan = Scan {
        k,
        columns,
        col_max,
        goal,
    };
    let root = State {
        rows: (0..k)
            .map(|i| {
                let mut r = vec![0; k];
                r[i] = 1;
                r
            })
            .collect(),
        prev: 1,
    };

    if k == 1 {
        let mut best = None;
        scan.leaves(&root, 0, &[], &mut best)?;
        return Ok(best);
    }

    let last_first = n - k;
    let per_first = |j: usize| -> Result<Option<Hit>, Overflow> {
        let Some(child) = scan.extend(&root, j)? else {
            return Ok(None);
        };
        let mut best = None;
        let mut chosen = vec![j];
        scan.descend(&child, 1, j + 1, &mut chosen, &mut best)?;
        Ok(best)
    };

    match goal {
        Goal::Max => {
            let results: Vec<Result<Option<Hit>, Overflow>> =
                (0..=last_first).into_par_iter().map(per_first).collect();
            let mut best: Option<Hit> = None;
            for r in results {
                if let Some(h) = r? {
                    if best.as_ref().is_none_or(|b| h.abs > b.abs) {
                        best = Some(h);
                    }
                }
            }
            Ok(best)
        }
        Goal::FirstAbove(_) => {
            let found = (0..=last_first)
                .into_par_iter()
                .map(per_first)
                .find_map_first(|r| match r {
                    Ok(None) => None,
                    other => Some(other),
                });
            match found {
                Some(r) => r,
                None => Ok(None),
            }
        }
    }
}

impl Scan<'_> {
    /// Adds column `j` as the next pivot column. `None` if it is dependent on
    /// the columns already chosen.
    fn extend(&self, state: &State, j: usize) -> Result<Option<State>, Overflow> {
        let col = &self.columns[j];
        let mut y = Vec::with_capacity(state.rows.len());
        for row in &state.rows {
            let mut acc: i128 = 0;
            for (a, b) in row.iter().zip(col) {
                acc = acc
                    .checked_add(*a as i128 * *b as i128)
                    .ok_or(Overflow)?;
            }
            y.push(i64::try_from(acc).map_err(|_| Overflow)?);
        }
        let Some(p) = y.iter().position(|&v| v != 0) else {
            return Ok(None);
        };
        let yp = y[p] as i128;
        let prev = state.prev as i128;
        let pivot_row = &state.rows[p];
        let mut rows = Vec::with_capacity(state.rows.len() - 1);
        for (i, row) in state.rows.iter().enumerate() {
            if i == p {
                continue;
            }
            let yi = y[i] as i128;
            let mut new_row = Vec::with_capacity(self.k);
            for (a, b) in row.iter().zip(pivot_row) {
                let num = yp * *a as i128 - yi * *b as i128;
                debug_assert_eq!(num % prev, 0);
                new_row.push(i64::try_from(num / prev).map_err(|_| Overflow)?);
            }
            rows.push(new_row);
        }
        Ok(Some(State {
            rows,
            prev: y[p],
        }))
    }

    fn descend(
        &self,
        state: &State,
        depth: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<Hit>,
    ) -> Result<bool, Overflow> {
        if depth == self.k - 1 {
            return self.leaves(state, start, chosen, best);
        }
        let n = self.columns.len();
        for j in start..=n - (self.k - depth) {
            if let Some(child) = self.extend(state, j)? {
                chosen.push(j);
                let stop = self.descend(&child, depth + 1, j + 1, chosen, best)?;
                chosen.pop();
                if stop {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Evaluates every completion of `chosen` by one more column. Returns
    /// `true` when the goal asks the search to stop.
    fn leaves(
        &self,
        state: &State,
        start: usize,
        chosen: &[usize],
        best: &mut Option<Hit>,
    ) -> Result<bool, Overflow> {
        debug_assert_eq!(state.rows.len(), 1);
        let w = &state.rows[0];
        let w_max = w.iter().map(|v| v.unsigned_abs() as u128).max().unwrap_or(0);
        if w_max == 0 {
            return Ok(false);
        }
        let narrow = w_max
            .checked_mul(self.col_max)
            .and_then(|p| p.checked_mul(self.k as u128))
            .is_some_and(|b| b < i64::MAX as u128);

        for j in start..self.columns.len() {
            let col = &self.columns[j];
            let abs = if narrow {
                let mut acc: i64 = 0;
                for (a, b) in w.iter().zip(col) {
                    acc += a * b;
                }
                acc.unsigned_abs() as u128
            } else {
                let mut acc: i128 = 0;
                for (a, b) in w.iter().zip(col) {
                    acc = acc
                        .checked_add(*a as i128 * *b as i128)
                        .ok_or(Overflow)?;
                }
                acc.unsigned_abs()
            };
            match self.goal {
                Goal::Max => {
                    if abs > 0 && best.as_ref().is_none_or(|b| abs > b.abs) {
                        let mut cols = chosen.to_vec();
                        cols.push(j);
                        *best = Some(Hit { abs, cols });
                    }
                }
                Goal::FirstAbove(bound) => {
                    if abs > bound {
                        let mut cols = chosen.to_vec();
                        cols.push(j);
                        *best = Some(Hit { abs, cols });
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

/// Cofactor vector of `k - 1` columns in `Z^k`: `w . x = ±det[cols | x]`
/// for every `x`. `None` if the columns are dependent.
pub(crate) fn cofactor_vector(cols: &[&[i64]], k: usize) -> Result<Option<Vec<i64>>, Overflow> {
    debug_assert_eq!(cols.len() + 1, k);
    let owned: Vec<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
    let scan = Scan {
        k,
        columns: &owned,
        col_max: 0,
        goal: Goal::Max,
    };
    let mut state = State {
        rows: (0..k)
            .map(|i| {
                let mut r = vec![0; k];
                r[i] = 1;
                r
            })
            .collect(),
        prev: 1,
    };
    for j in 0..cols.len() {
        match scan.extend(&state, j)? {
            Some(s) => state = s,
            None => return Ok(None),
        }
    }
    Ok(Some(state.rows.pop().expect("one surviving row")))
}
