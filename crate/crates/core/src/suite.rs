//! Named battery of reproducibility checks.
//!
//! The JSON form of a report leaves out timings, so two runs with any
//! thread count serialize to the same bytes.

use std::collections::BTreeSet;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extensions::{self, CanonicalColumn, CanonicalPair};
use crate::families::{self, build_a, build_a_lee, expected_count};
use crate::linalg;
use crate::lines;
use crate::matrix::IntMatrix;
use crate::modularity;
use crate::partition::partitions;
use crate::search::{self, SearchConfig, SearchMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Fast,
    Full,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Scope::Fast),
            "full" => Ok(Scope::Full),
            _ => Err(Error::invalid(format!("unknown scope {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip)]
    pub elapsed_ms: u128,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifySuiteReport {
    pub scope: Scope,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl VerifySuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The seven columns admissible for a single clique extension at `Δ = 3`,
/// in their raw (uncanonicalized) form.
pub const SINGLE_EXTENSIONS_DELTA3: [&[i64]; 7] = [
    &[-3, 2, 1],
    &[-2, 1, 1],
    &[-3, 1, 1, 1],
    &[-2, 2, -1, 1],
    &[-1, -1, 1, 1],
    &[-2, -1, 1, 1, 1],
    &[-1, -1, -1, 1, 1, 1],
];

/// The eight admissible pairs at `Δ = 3`, raw form: rows of `[a b]`.
pub const PAIR_EXTENSIONS_DELTA3: [&[[i64; 2]]; 8] = [
    &[[-3, -2], [2, 1]],
    &[[-2, 1], [1, -2]],
    &[[-2, 1], [1, -1], [0, -1]],
    &[[-2, -1], [1, 1], [0, -1]],
    &[[-2, -1], [2, 1], [-1, -1]],
    &[[-1, -1], [-1, 1], [1, -1]],
    &[[-1, -1], [1, 1], [-1, 0], [0, -1]],
    &[[-1, 1], [1, -1], [-1, 0], [0, -1]],
];

pub fn expected_single_extensions() -> BTreeSet<Vec<i64>> {
    SINGLE_EXTENSIONS_DELTA3
        .iter()
        .map(|v| CanonicalColumn::of(v).reduced)
        .collect()
}

pub fn expected_pair_extensions() -> BTreeSet<CanonicalPair> {
    PAIR_EXTENSIONS_DELTA3
        .iter()
        .map(|rows| {
            let a: Vec<i64> = rows.iter().map(|r| r[0]).collect();
            let b: Vec<i64> = rows.iter().map(|r| r[1]).collect();
            CanonicalPair::of(&a, &b)
        })
        .collect()
}

type Outcome = Result<(bool, String)>;

fn feasible_with_count(m: &IntMatrix, delta: u64, r: usize) -> Result<bool> {
    let (ok, _) = modularity::is_delta_modular(m, delta)?;
    Ok(ok
        && linalg::rank(m) == r
        && modularity::parallel_pairs(m)?.is_empty()
        && m.cols() as u64 == expected_count(delta, r as u64))
}

pub fn check_sporadic() -> Outcome {
    let m = families::sporadic_rank3();
    let level = modularity::modularity_level(&m)?.delta;
    let parallel = modularity::parallel_pairs(&m)?.len();
    let ok = m.cols() == 11
        && linalg::rank(&m) == 3
        && level == 3.into()
        && parallel == 0
        && 11 > expected_count(3, 3);
    Ok((
        ok,
        format!(
            "columns {}, rank {}, level {level}, parallel pairs {parallel}, expected_count(3,3) = {}",
            m.cols(),
            linalg::rank(&m),
            expected_count(3, 3)
        ),
    ))
}

/// `build_a` for every `λ ⊢ Δ-1` and `build_a_lee`, `Δ ∈ [2, max_delta]`,
/// ranks up to `max_r`.
pub fn check_families(max_delta: u64, max_r: usize) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for delta in 2..=max_delta {
        for lambda in partitions(delta - 1)? {
            for r in lambda.m() + 1..=max_r {
                let a = build_a(delta, &lambda, r)?;
                checked += 1;
                if !feasible_with_count(&a.matrix, delta, r)? {
                    failures.push(a.name());
                }
            }
        }
        for r in 2..=max_r {
            let a = build_a_lee(delta, r)?;
            checked += 1;
            if !feasible_with_count(&a.matrix, delta, r)? {
                failures.push(a.name());
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!("{checked} matrices, failures: [{}]", failures.join(", ")),
    ))
}

/// Nonzero sorted zero-sum vectors of length `r + 1` with entries in `[-bound, bound]`.
pub fn canonical_zero_sum(bound: i64, r: usize) -> Vec<Vec<i64>> {
    (-bound..=bound)
        .combinations_with_replacement(r + 1)
        .filter(|v| v.iter().sum::<i64>() == 0 && v.iter().any(|&x| x != 0))
        .map(|mut v| {
            v.reverse();
            v
        })
        .collect()
}

/// Closed formula against exhaustive subdeterminant enumeration.
pub fn check_clique_formula(bound: i64, max_r: usize) -> Outcome {
    let mut checked = 0;
    for r in 1..=max_r {
        for a in canonical_zero_sum(bound, r) {
            let formula = extensions::clique_extension_max_subdet(&a, r)?;
            let m = extensions::single_embedding(&a)?;
            let (scan, _) = linalg::max_abs_full_rank_subdet(&m)?;
            checked += 1;
            if scan != formula.into() {
                return Ok((false, format!("mismatch at a = {a:?}: formula {formula}, scan {scan}")));
            }
        }
    }
    Ok((true, format!("{checked} columns, entries in [-{bound},{bound}], r <= {max_r}")))
}

pub fn check_single_extensions() -> Outcome {
    let found: BTreeSet<Vec<i64>> = extensions::enumerate_single_extensions(3)?
        .into_iter()
        .map(|c| c.reduced)
        .collect();
    let ok = found.len() == 7 && found == expected_single_extensions();
    Ok((ok, format!("{} canonical columns: {found:?}", found.len())))
}

pub fn check_pair_extensions() -> Outcome {
    let found: BTreeSet<CanonicalPair> =
        extensions::enumerate_pair_extensions(3)?.into_iter().collect();
    let ok = found.len() == 8 && found == expected_pair_extensions();
    Ok((ok, format!("{} canonical pairs", found.len())))
}

pub fn check_triples() -> Outcome {
    let t = extensions::refute_triple_extensions(3)?;
    let witnesses_hold = t.refuted.iter().all(|x| {
        x.triple
            .embedding()
            .and_then(|m| modularity::drop_last_row(&m))
            .is_ok_and(|m| x.witness.verify(&m))
            && x.witness.abs_det() >= 4.into()
    });
    let ok = t.survivors.is_empty() && witnesses_hold && t.refuted.len() == t.candidates;
    Ok((
        ok,
        format!(
            "{} candidates, {} refuted, {} survivors",
            t.candidates,
            t.refuted.len(),
            t.survivors.len()
        ),
    ))
}

pub fn check_nu(max_delta: u64, max_r: usize) -> Outcome {
    let mut checked = 0;
    for delta in 2..=max_delta {
        for lambda in partitions(delta - 1)? {
            let lo = (lambda.m() + 1).max(delta as usize + 1);
            for r in lo..=max_r {
                let a = build_a(delta, &lambda, r)?;
                let nu = lines::line_length_multiset(&a.matrix, a.designated_element)?;
                checked += 1;
                if nu != lines::nu_formula(delta, &lambda, r)? {
                    return Ok((false, format!("{}: measured {nu}", a.name())));
                }
            }
        }
        for r in delta as usize + 1..=max_r {
            let a = build_a_lee(delta, r)?;
            checked += 1;
            if lines::line_length_multiset(&a.matrix, 0)? != lines::nu_lee(delta, r) {
                return Ok((false, format!("{} differs from (r-1) x (Δ+2)", a.name())));
            }
        }
    }
    Ok((true, format!("{checked} matrices")))
}

pub fn check_recovery(max_delta: u64) -> Outcome {
    let mut checked = 0;
    for delta in 2..=max_delta {
        for lambda in partitions(delta - 1)? {
            for r in delta as usize + 1..=delta as usize + 3 {
                let nu = lines::nu_formula(delta, &lambda, r)?;
                checked += 1;
                match lines::recover_partition(&nu, delta, r) {
                    Ok(back) if back == lambda => {}
                    other => {
                        return Ok((false, format!("Δ={delta} λ=({lambda}) r={r}: {other:?}")));
                    }
                }
            }
        }
    }
    Ok((true, format!("{checked} round trips, Δ <= {max_delta}")))
}

pub fn check_distinguishing() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (delta, r) in [(2u64, 3usize), (3, 4), (4, 5), (5, 6)] {
        let rep = lines::distinguishing_report(delta, r)?;
        let want = partitions(delta - 1)?.len() + 1;
        ok &= rep.all_distinct
            && rep.constructions.len() == want
            && rep.lee_matches_formula
            && rep.lee_separated;
        parts.push(format!("({delta},{r}): {} distinct", rep.constructions.len()));
    }
    Ok((ok, parts.join(", ")))
}

pub fn check_search(delta: u64, r: usize, mode: SearchMode, want: usize, exact: bool) -> Outcome {
    let mut config = SearchConfig::new(delta, r, mode);
    if mode == SearchMode::GreedySeeded {
        config.seed = Some(families::sporadic_rank3());
    }
    let c = search::max_columns_search(&config)?;
    let ok = if exact {
        c.best_count == want && c.optimal
    } else {
        c.best_count >= want
    };
    Ok((ok, format!("bestCount {}, optimal {}", c.best_count, c.optimal)))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        name: name.into(),
        status: if passed { Status::Pass } else { Status::Fail },
        elapsed_ms: start.elapsed().as_millis(),
        detail,
    }
}

pub fn verify_suite(scope: Scope) -> VerifySuiteReport {
    let mut checks = vec![
        run("sporadic rank-3 matrix: 11 columns, level 3", check_sporadic),
        run("A(3,λ,r) counts, Δ ≤ 3, r ≤ 6", || check_families(3, 6)),
        run("clique extension formula, entries in [-3,3], r ≤ 4", || {
            check_clique_formula(3, 4)
        }),
        run("single-extension enumeration == 7 canonical columns", check_single_extensions),
        run("pair enumeration == 8 canonical pairs", check_pair_extensions),
        run("triple extensions all refuted", check_triples),
        run("ν multisets match formula, Δ ≤ 3, r ≤ 6", || check_nu(3, 6)),
        run("partition recovery round trip, Δ ≤ 8", || check_recovery(8)),
        run("distinguishing reports, Δ ≤ 5", check_distinguishing),
        run("s(1,2) search = 3", || check_search(1, 2, SearchMode::HnfExhaustive, 3, true)),
        run("s(1,3) search = 6", || check_search(1, 3, SearchMode::HnfExhaustive, 6, true)),
    ];
    if scope == Scope::Full {
        checks.extend([
            run("A(Δ,λ,r) counts, Δ ≤ 5, r ≤ 7", || check_families(5, 7)),
            run("clique extension formula, entries in [-4,4], r ≤ 6", || {
                check_clique_formula(4, 6)
            }),
            run("ν multisets match formula, Δ ≤ 5, r ≤ 7", || check_nu(5, 7)),
            run("s(2,3) search = 9", || check_search(2, 3, SearchMode::HnfExhaustive, 9, true)),
            run("s(2,3) identity-anchored search = 9", || {
                check_search(2, 3, SearchMode::IdentityAnchored, 9, true)
            }),
            run("greedy search from the sporadic matrix ≥ 11", || {
                check_search(3, 3, SearchMode::GreedySeeded, 11, false)
            }),
        ]);
    }
    let all_passed = checks.iter().all(|c| c.status == Status::Pass);
    VerifySuiteReport {
        scope,
        checks,
        all_passed,
    }
}
