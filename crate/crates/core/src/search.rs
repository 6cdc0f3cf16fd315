//! Search for large pairwise non-parallel column sets of rank-`r`
//! Δ-modular matrices.
//!
//! # Exhaustive mode
//!
//! Let `A` be rank-`r` and Δ-modular with pairwise non-parallel columns.
//! Dividing a column by the gcd of its entries keeps `A` Δ-modular, so the
//! columns may be taken primitive. Pick a basis `B` whose `|det| = d` is
//! maximal; then `d <= Δ` and every full minor of `A` is at most `d`.
//! Unimodular row operations, which preserve minors up to sign, turn `A[B]`
//! into its Hermite form `H` (upper triangular, positive diagonal, entries
//! above the diagonal reduced modulo the diagonal entry of their column).
//! For any other column `c = Hx`, Cramer's rule gives
//! `|x_i| = |det(H with column i replaced by c)| / d <= 1`, so
//! `x_i ∈ {k/d : |k| <= d}`. Hence `s(Δ, r)` is the maximum, over
//! `d <= Δ` and Hermite forms `H` with determinant `d` and primitive
//! columns, of the largest set `S ⊇ cols(H)` of such columns whose full
//! minors are all at most `d`. Each `(d, H)` is one subproblem.
//!
//! # Identity-anchored mode
//!
//! `S ⊇ I_r`; every entry of a Δ-modular matrix containing `I_r` is a full
//! minor up to sign, so candidates come from `[-Δ, Δ]^r`. The optimum is
//! relative to the class of matrices containing a unimodular basis.
//!
//! Within a subproblem the search is a sequential branch and bound over
//! candidates in a fixed order, so its result does not depend on threads.
//! Feasibility of a new column `q` is checked against the cofactor vectors
//! `w` of all `(r-1)`-subsets of `S`: `det[T q] = ±w·q`.

use std::str::FromStr;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::IntMatrix;
use crate::modularity;
use crate::subdet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    IdentityAnchored,
    HnfExhaustive,
    GreedySeeded,
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "identity-anchored" => Ok(SearchMode::IdentityAnchored),
            "hnf" | "hnf-exhaustive" => Ok(SearchMode::HnfExhaustive),
            "greedy" | "greedy-seeded" => Ok(SearchMode::GreedySeeded),
            _ => Err(Error::invalid(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub delta: u64,
    pub rank: usize,
    pub mode: SearchMode,
    /// Per subproblem.
    pub node_limit: u64,
    pub time_limit_seconds: u64,
    /// Starting matrix for greedy mode; `I_r` when absent.
    pub seed: Option<IntMatrix>,
}

impl SearchConfig {
    pub fn new(delta: u64, rank: usize, mode: SearchMode) -> Self {
        SearchConfig {
            delta,
            rank,
            mode,
            node_limit: 100_000_000,
            time_limit_seconds: 600,
            seed: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.delta < 1 {
            return Err(Error::invalid("Δ must be at least 1"));
        }
        if self.rank < 1 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        if self.node_limit == 0 || self.time_limit_seconds == 0 {
            return Err(Error::invalid("limits must be positive"));
        }
        if let Some(seed) = &self.seed {
            if seed.rows() != self.rank {
                return Err(Error::Dimension(format!(
                    "seed has {} rows, rank is {}",
                    seed.rows(),
                    self.rank
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchCertificate {
    pub delta: u64,
    pub rank: usize,
    pub mode: SearchMode,
    pub best_count: usize,
    #[serde(rename = "matrix")]
    pub best_matrix: IntMatrix,
    /// The declared search space was exhausted within the limits.
    pub optimal: bool,
    /// `exhaustive`, `class-relative` or `heuristic`.
    pub scope: String,
    #[serde(rename = "nodes")]
    pub nodes_explored: u64,
    #[serde(rename = "ceiling")]
    pub ceiling_used: u64,
}

/// `Δ² binom(r+1, 2)`, an upper bound on the column number.
pub fn ceiling(delta: u64, r: usize) -> u64 {
    let r = r as u64;
    delta.saturating_mul(delta).saturating_mul(r * (r + 1) / 2)
}

fn sort_key(v: &[i64]) -> (u64, Vec<i64>) {
    (v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0), v.to_vec())
}

fn canonical_sorted(set: impl IntoIterator<Item = Vec<i64>>) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = set
        .into_iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| linalg::direction(&v).expect("nonzero"))
        .collect();
    out.sort_by_key(|v| sort_key(v));
    out.dedup();
    out
}

fn cube(bound: i64, r: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..r).map(|_| -bound..=bound).multi_cartesian_product()
}

/// Upper-triangular Hermite forms of size `r` with determinant `d`.
pub fn hermite_bases(r: usize, d: u64) -> Vec<IntMatrix> {
    fn diagonals(r: usize, d: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == r - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for h in 1..=d {
            if d.is_multiple_of(h) {
                prefix.push(h);
                diagonals(r, d / h, prefix, out);
                prefix.pop();
            }
        }
    }
    if r == 0 {
        return Vec::new();
    }
    let mut diags = Vec::new();
    diagonals(r, d, &mut Vec::new(), &mut diags);
    let mut out = Vec::new();
    for diag in diags {
        // free positions (i, j), i < j, with range [0, diag[j])
        let free: Vec<(usize, usize)> = (0..r)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .collect();
        let ranges: Vec<std::ops::Range<i64>> =
            free.iter().map(|&(_, j)| 0..diag[j] as i64).collect();
        let fills: Vec<Vec<i64>> = if ranges.is_empty() {
            vec![Vec::new()]
        } else {
            ranges.into_iter().multi_cartesian_product().collect()
        };
        for fill in fills {
            let mut m = vec![0i64; r * r];
            for i in 0..r {
                m[i * r + i] = diag[i] as i64;
            }
            for (&(i, j), &v) in free.iter().zip(&fill) {
                m[i * r + j] = v;
            }
            out.push(IntMatrix::new(r, r, m).expect("small entries"));
        }
    }
    out
}

/// Integer columns `Hx` with `x_i ∈ {k/d : |k| <= d}`, `d = det H`.
fn hermite_columns(h: &IntMatrix, d: u64) -> Vec<Vec<i64>> {
    let r = h.rows();
    let d = d as i64;
    cube(d, r)
        .filter_map(|k| {
            let mut c = Vec::with_capacity(r);
            for i in 0..r {
                let s: i64 = (0..r).map(|j| h.get(i, j) * k[j]).sum();
                if s % d != 0 {
                    return None;
                }
                c.push(s / d);
            }
            Some(c)
        })
        .collect()
}

fn is_primitive(v: &[i64]) -> bool {
    linalg::primitive_part(v).is_ok_and(|p| p == v)
}

/// Candidate columns: primitive, first nonzero entry positive, distinct,
/// sorted by (largest |entry|, lexicographic).
pub fn column_universe(delta: u64, r: usize, mode: SearchMode) -> Result<Vec<Vec<i64>>> {
    if delta < 1 || r < 1 {
        return Err(Error::invalid("Δ and r must be positive"));
    }
    match mode {
        SearchMode::IdentityAnchored | SearchMode::GreedySeeded => {
            Ok(canonical_sorted(cube(delta as i64, r)))
        }
        SearchMode::HnfExhaustive => {
            let mut all = Vec::new();
            for d in 1..=delta {
                for h in hermite_bases(r, d) {
                    all.extend(hermite_columns(&h, d));
                }
            }
            Ok(canonical_sorted(all))
        }
    }
}

/// One branch and bound instance: grow `basis` by candidates keeping all
/// full minors at most `target`.
struct Subproblem {
    basis: Vec<Vec<i64>>,
    candidates: Vec<Vec<i64>>,
    target: u64,
}

struct Outcome {
    chosen: Vec<usize>,
    nodes: u64,
    complete: bool,
}

struct Runner<'a> {
    sub: &'a Subproblem,
    r: usize,
    cap: usize,
    node_limit: u64,
    deadline: Instant,
    nodes: u64,
    aborted: bool,
    best: Vec<usize>,
}

fn cofactor(cols: &[&[i64]], r: usize) -> Result<Option<Vec<i64>>> {
    subdet::cofactor_vector(cols, r).map_err(|_| Error::Overflow("cofactor vector"))
}

fn dot_ok(w: &[i64], c: &[i64], target: u64) -> bool {
    let v: i128 = w.iter().zip(c).map(|(&a, &b)| a as i128 * b as i128).sum();
    v.unsigned_abs() <= target as u128
}

impl Runner<'_> {
    fn columns_of<'b>(&'b self, chosen: &[usize]) -> Vec<&'b [i64]> {
        self.sub
            .basis
            .iter()
            .map(Vec::as_slice)
            .chain(chosen.iter().map(|&i| self.sub.candidates[i].as_slice()))
            .collect()
    }

    /// Cofactors of the `(r-1)`-subsets of `S ∪ {c}` that contain `c`.
    fn new_cofactors(&self, chosen: &[usize], c: usize) -> Result<Vec<Vec<i64>>> {
        let cols = self.columns_of(chosen);
        let new = self.sub.candidates[c].as_slice();
        let mut out = Vec::new();
        if self.r < 2 {
            return Ok(out);
        }
        for t in (0..cols.len()).combinations(self.r - 2) {
            let mut set: Vec<&[i64]> = t.iter().map(|&i| cols[i]).collect();
            set.push(new);
            if let Some(w) = cofactor(&set, self.r)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    fn run(&mut self, chosen: &mut Vec<usize>, pool: &[usize]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit
            || (self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline)
        {
            self.aborted = true;
        }
        if self.aborted {
            return Ok(());
        }
        let base = self.sub.basis.len();
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
            if base + self.best.len() >= self.cap {
                return Ok(());
            }
        }
        for (i, &c) in pool.iter().enumerate() {
            let bound = (base + chosen.len() + pool.len() - i).min(self.cap);
            if bound <= base + self.best.len() || self.aborted {
                return Ok(());
            }
            let ws = self.new_cofactors(chosen, c)?;
            let next: Vec<usize> = pool[i + 1..]
                .iter()
                .copied()
                .filter(|&q| {
                    let col = &self.sub.candidates[q];
                    ws.iter().all(|w| dot_ok(w, col, self.sub.target))
                })
                .collect();
            chosen.push(c);
            self.run(chosen, &next)?;
            chosen.pop();
        }
        Ok(())
    }
}

fn solve(sub: &Subproblem, r: usize, cap: usize, node_limit: u64, deadline: Instant) -> Result<Outcome> {
    // Candidates compatible with the basis alone.
    let basis: Vec<&[i64]> = sub.basis.iter().map(Vec::as_slice).collect();
    let mut ws = Vec::new();
    for t in (0..basis.len()).combinations(r - 1) {
        let set: Vec<&[i64]> = t.iter().map(|&i| basis[i]).collect();
        if let Some(w) = cofactor(&set, r)? {
            ws.push(w);
        }
    }
    let pool: Vec<usize> = (0..sub.candidates.len())
        .filter(|&q| ws.iter().all(|w| dot_ok(w, &sub.candidates[q], sub.target)))
        .collect();
    let mut runner = Runner {
        sub,
        r,
        cap,
        node_limit,
        deadline,
        nodes: 0,
        aborted: false,
        best: Vec::new(),
    };
    runner.run(&mut Vec::new(), &pool)?;
    Ok(Outcome {
        chosen: runner.best,
        nodes: runner.nodes,
        complete: !runner.aborted,
    })
}

fn not_parallel_to(basis: &[Vec<i64>], cands: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let dirs: Vec<Vec<i64>> = basis
        .iter()
        .map(|b| linalg::direction(b).expect("basis column is nonzero"))
        .collect();
    cands.into_iter().filter(|c| !dirs.contains(c)).collect()
}

fn subproblems(config: &SearchConfig) -> Vec<Subproblem> {
    let r = config.rank;
    match config.mode {
        SearchMode::IdentityAnchored => {
            let basis = IntMatrix::identity(r).columns();
            let cands = canonical_sorted(cube(config.delta as i64, r));
            vec![Subproblem {
                candidates: not_parallel_to(&basis, cands),
                basis,
                target: config.delta,
            }]
        }
        SearchMode::HnfExhaustive => {
            let mut out = Vec::new();
            for d in 1..=config.delta {
                for h in hermite_bases(r, d) {
                    let basis = h.columns();
                    if !basis.iter().all(|c| is_primitive(c)) {
                        continue;
                    }
                    let cands = canonical_sorted(hermite_columns(&h, d));
                    out.push(Subproblem {
                        candidates: not_parallel_to(&basis, cands),
                        basis,
                        target: d,
                    });
                }
            }
            out
        }
        SearchMode::GreedySeeded => Vec::new(),
    }
}

/// Runs the configured search and re-verifies its certificate.
pub fn max_columns_search(config: &SearchConfig) -> Result<SearchCertificate> {
    config.validate()?;
    let r = config.rank;
    let cap = ceiling(config.delta, r).min(usize::MAX as u64) as usize;
    let deadline = Instant::now() + Duration::from_secs(config.time_limit_seconds);

    let (matrix, optimal, scope, nodes) = if config.mode == SearchMode::GreedySeeded {
        let (m, nodes) = greedy(config)?;
        (m, false, "heuristic", nodes)
    } else {
        let subs = subproblems(config);
        let outcomes: Vec<Outcome> = subs
            .par_iter()
            .map(|s| solve(s, r, cap, config.node_limit, deadline))
            .collect::<Result<_>>()?;
        let mut best: Option<(usize, usize)> = None;
        for (i, o) in outcomes.iter().enumerate() {
            let size = subs[i].basis.len() + o.chosen.len();
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((i, size));
            }
        }
        let (i, _) = best.ok_or_else(|| Error::invalid("empty search space"))?;
        let sub = &subs[i];
        let mut cols = sub.basis.clone();
        cols.extend(outcomes[i].chosen.iter().map(|&c| sub.candidates[c].clone()));
        let m = IntMatrix::from_columns(r, &cols)?;
        let complete = outcomes.iter().all(|o| o.complete);
        let scope = match config.mode {
            SearchMode::HnfExhaustive => "exhaustive",
            _ => "class-relative",
        };
        (m, complete, scope, outcomes.iter().map(|o| o.nodes).sum())
    };

    if !verify_is_feasible(&matrix, config.delta) {
        return Err(Error::invalid("search produced an infeasible certificate"));
    }
    Ok(SearchCertificate {
        delta: config.delta,
        rank: r,
        mode: config.mode,
        best_count: matrix.cols(),
        best_matrix: matrix,
        optimal,
        scope: scope.into(),
        nodes_explored: nodes,
        ceiling_used: cap as u64,
    })
}

/// Adds candidates from `[-Δ, Δ]^r` in universe order whenever the result
/// stays feasible.
fn greedy(config: &SearchConfig) -> Result<(IntMatrix, u64)> {
    let r = config.rank;
    let seed = config
        .seed
        .clone()
        .unwrap_or_else(|| IntMatrix::identity(r));
    if !verify_is_feasible(&seed, config.delta) {
        return Err(Error::invalid(
            "seed must have full row rank, be Δ-modular and have no parallel columns",
        ));
    }
    let mut cols = seed.columns();
    let cands = not_parallel_to(&cols, canonical_sorted(cube(config.delta as i64, r)));
    let mut nodes = 0;
    for c in cands {
        nodes += 1;
        let ok = (0..cols.len()).combinations(r - 1).all(|t| {
            let set: Vec<&[i64]> = t.iter().map(|&i| cols[i].as_slice()).collect();
            match subdet::cofactor_vector(&set, r) {
                Ok(Some(w)) => dot_ok(&w, &c, config.delta),
                Ok(None) => true,
                Err(_) => false,
            }
        });
        if ok {
            cols.push(c);
        }
    }
    Ok((IntMatrix::from_columns(r, &cols)?, nodes))
}

/// Full row rank, Δ-modular and pairwise non-parallel.
pub fn verify_is_feasible(m: &IntMatrix, delta: u64) -> bool {
    if delta < 1 || linalg::rank(m) != m.rows() {
        return false;
    }
    let modular = matches!(modularity::is_delta_modular(m, delta), Ok((true, _)));
    modular && matches!(modularity::parallel_pairs(m), Ok(p) if p.is_empty())
}
