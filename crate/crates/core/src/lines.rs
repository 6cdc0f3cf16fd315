//! Points and lines of the vector matroid of an integer matrix, and the
//! multiset of long-line lengths through a designated element.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{build_a, build_a_lee, ExtremalMatrix};
use crate::linalg;
use crate::matrix::IntMatrix;
use crate::partition::{partitions, Partition};

/// Columns grouped into points, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelClasses {
    pub classes: Vec<Vec<usize>>,
    /// Zero columns.
    pub loops: Vec<usize>,
}

impl ParallelClasses {
    /// Number of points, `ε(M)`.
    pub fn epsilon(&self) -> usize {
        self.classes.len()
    }

    fn class_of(&self, j: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&j))
    }
}

pub fn parallel_classes(m: &IntMatrix) -> ParallelClasses {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut loops = Vec::new();
    let mut reps: Vec<Vec<i64>> = Vec::new();
    for j in 0..m.cols() {
        let col = m.column(j);
        if col.iter().all(|&x| x == 0) {
            loops.push(j);
            continue;
        }
        let dir = linalg::direction(&col).expect("nonzero column");
        match reps.iter().position(|r| *r == dir) {
            Some(p) => classes[p].push(j),
            None => {
                reps.push(dir);
                classes.push(vec![j]);
            }
        }
    }
    ParallelClasses { classes, loops }
}

fn check_element(m: &IntMatrix, e: usize) -> Result<()> {
    if e >= m.cols() {
        return Err(Error::Index {
            index: e,
            len: m.cols(),
        });
    }
    if m.column(e).iter().all(|&x| x == 0) {
        return Err(Error::invalid(format!("column {e} is a loop")));
    }
    Ok(())
}

/// Lines through `e` with at least three points, as sorted sets of column
/// indices (parallel copies included), ordered by their smallest index
/// other than those parallel to `e`.
pub fn long_lines_through(m: &IntMatrix, e: usize) -> Result<Vec<Vec<usize>>> {
    Ok(lines_through(m, e)?
        .into_iter()
        .filter(|(_, points)| *points >= 3)
        .map(|(line, _)| line)
        .collect())
}

/// Every line through `e` with its point count.
fn lines_through(m: &IntMatrix, e: usize) -> Result<Vec<(Vec<usize>, usize)>> {
    check_element(m, e)?;
    let classes = parallel_classes(m);
    let own = classes.class_of(e).expect("e is not a loop");
    let cols = m.columns();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for (ci, class) in classes.classes.iter().enumerate() {
        if ci == own || class.iter().any(|j| seen.iter().any(|l| l.contains(j))) {
            continue;
        }
        let f = class[0];
        let mut line = Vec::new();
        let mut points = 0;
        for other in &classes.classes {
            let k = other[0];
            let flat = IntMatrix::from_columns(m.rows(), &[cols[e].clone(), cols[f].clone(), cols[k].clone()])?;
            if linalg::rank(&flat) <= 2 {
                line.extend(other.iter().copied());
                points += 1;
            }
        }
        line.sort_unstable();
        if seen.insert(line.clone()) {
            out.push((line, points));
        }
    }
    Ok(out)
}

/// Multiset of line lengths (at least 3).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LineMultiset {
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
}

impl LineMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, length: u64, copies: u64) {
        if copies == 0 {
            return;
        }
        *self.counts.entry(length).or_insert(0) += copies;
        self.total += copies;
    }

    /// Multiplicity of `length`.
    pub fn count(&self, length: u64) -> u64 {
        self.counts.get(&length).copied().unwrap_or(0)
    }
}

impl FromIterator<u64> for LineMultiset {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut ms = LineMultiset::new();
        for l in iter {
            ms.add(l, 1);
        }
        ms
    }
}

/// `3:3,4:3` lists each length with its multiplicity, ascending.
impl fmt::Display for LineMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for LineMultiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ms = LineMultiset::new();
        if s.trim().is_empty() {
            return Ok(ms);
        }
        for item in s.split(',') {
            let (k, v) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidNu(format!("expected length:count, got {item:?}")))?;
            let k: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidNu(format!("bad length {k:?}")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidNu(format!("bad count {v:?}")))?;
            if k < 3 {
                return Err(Error::InvalidNu(format!("long lines have length >= 3, got {k}")));
            }
            if v == 0 {
                return Err(Error::InvalidNu(format!("length {k} has count 0")));
            }
            if ms.counts.contains_key(&k) {
                return Err(Error::InvalidNu(format!("length {k} listed twice")));
            }
            ms.add(k, v);
        }
        Ok(ms)
    }
}

/// Point counts of the long lines through `e`.
pub fn line_length_multiset(m: &IntMatrix, e: usize) -> Result<LineMultiset> {
    Ok(lines_through(m, e)?
        .into_iter()
        .filter(|(_, points)| *points >= 3)
        .map(|(_, points)| points as u64)
        .collect())
}

fn check_partition(delta: u64, lambda: &Partition) -> Result<()> {
    if delta < 2 || lambda.n() != delta - 1 {
        return Err(Error::invalid(format!(
            "({lambda}) is not a partition of Δ - 1 = {}",
            delta.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Long-line lengths through `e_1` of `A(Δ, λ, r)` in closed form:
/// `(r-m-1){3} ∪ {3+λ_i} ∪ (r-m-1){2+λ_i} ∪ {2+λ_i+λ_j : i<j}`.
pub fn nu_formula(delta: u64, lambda: &Partition, r: usize) -> Result<LineMultiset> {
    check_partition(delta, lambda)?;
    let m = lambda.m();
    if r < m + 1 {
        return Err(Error::invalid(format!("rank {r} is below m + 1 = {}", m + 1)));
    }
    let free = (r - m - 1) as u64;
    let parts = lambda.parts();
    let mut nu = LineMultiset::new();
    nu.add(3, free);
    for &l in parts {
        nu.add(3 + l, 1);
        nu.add(2 + l, free);
    }
    for i in 0..m {
        for j in i + 1..m {
            nu.add(2 + parts[i] + parts[j], 1);
        }
    }
    Ok(nu)
}

/// Long-line lengths through `e_1` of `A(Δ, r)`: `r - 1` lines of length
/// `Δ + 2`.
pub fn nu_lee(delta: u64, r: usize) -> LineMultiset {
    let mut nu = LineMultiset::new();
    nu.add(delta + 2, r.saturating_sub(1) as u64);
    nu
}

/// Number of long lines through `e_1` when `λ` has `x` parts.
pub fn line_count(r: usize, x: usize) -> i64 {
    let (r, x) = (r as i64, x as i64);
    (r - (x + 1)) + x + (r - (x + 1)) * x + x * (x - 1) / 2
}

/// Inverts [`nu_formula`] for `r >= Δ + 1`.
///
/// With `n_s` parts equal to `s` and `ℓ_t` the multiplicity of `t`:
/// `ℓ_3 = (r-m-1)(1+n_1)` and, for `s >= 2`,
/// `ℓ_{s+2} = n_{s-1} + (r-m-1) n_s + z_s`, where `z_s` counts index pairs
/// `i < j` with `λ_i + λ_j = s`. The result is checked by recomputing the
/// formula.
pub fn recover_partition(nu: &LineMultiset, delta: u64, r: usize) -> Result<Partition> {
    if delta < 2 {
        return Err(Error::invalid("Δ must be at least 2"));
    }
    if (r as u64) < delta + 1 {
        return Err(Error::invalid(format!(
            "recovery needs r >= Δ + 1, got r = {r}, Δ = {delta}"
        )));
    }
    let total = nu.total as i64;
    let ms: Vec<usize> = (1..=r - 2).filter(|&x| line_count(r, x) == total).collect();
    let m = match ms.as_slice() {
        [m] => *m,
        [] => {
            return Err(Error::InvalidNu(format!(
                "no part count gives {total} long lines at rank {r}"
            )))
        }
        _ => {
            return Err(Error::InvalidNu(format!(
                "several part counts give {total} long lines at rank {r}"
            )))
        }
    };
    let free = (r - m - 1) as i64;
    let ell = |t: u64| nu.count(t) as i64;
    let d = (delta - 1) as usize;
    // n[s] for s in 1..=d; index 0 unused.
    let mut n = vec![0i64; d + 1];
    let solve = |value: i64, what: &str| -> Result<i64> {
        if value < 0 || value % free != 0 {
            return Err(Error::InvalidNu(format!("{what} is not a non-negative integer")));
        }
        Ok(value / free)
    };
    n[1] = solve(ell(3), "n_1")? - 1;
    if n[1] < 0 {
        return Err(Error::InvalidNu("too few lines of length 3".into()));
    }
    for s in 2..=d {
        let z = pair_count(&n, s);
        n[s] = solve(ell(s as u64 + 2) - n[s - 1] - z, &format!("n_{s}"))?;
    }
    let counts: Vec<u64> = n[1..].iter().map(|&c| c as u64).collect();
    let lambda = Partition::from_multiplicities(&counts)
        .map_err(|_| Error::InvalidNu("recovered multiplicities are empty".into()))?;
    if lambda.m() != m || lambda.n() != delta - 1 || nu_formula(delta, &lambda, r)? != *nu {
        return Err(Error::InvalidNu(format!(
            "{nu} does not arise from any partition of {}",
            delta - 1
        )));
    }
    Ok(lambda)
}

/// Pairs of parts `λ_i + λ_j = s`, `i < j`, from multiplicities `n[1..s)`.
fn pair_count(n: &[i64], s: usize) -> i64 {
    let mut z = 0;
    for a in 1..s {
        let b = s - a;
        if a < b {
            z += n[a] * n[b];
        } else if a == b {
            z += n[a] * (n[a] - 1) / 2;
        }
    }
    z
}

/// Two constructions and their invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NonIsoCertificate {
    pub left_id: String,
    pub right_id: String,
    pub left_nu: LineMultiset,
    pub right_nu: LineMultiset,
    pub distinct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistinguishingReport {
    pub delta: u64,
    pub r: usize,
    /// `A(Δ, λ, r)` for every `λ`, then `A(Δ, r)`.
    pub constructions: Vec<String>,
    pub certificates: Vec<NonIsoCertificate>,
    pub all_distinct: bool,
    /// The Lee matrix has `r - 1` long lines of length `Δ + 2` through `e_1`.
    pub lee_matches_formula: bool,
    /// Every `A(Δ, λ, r)` has at most one such line (exactly one iff `m = 1`).
    pub lee_separated: bool,
}

/// Computes the line multiset at the designated element of each extremal
/// construction and compares them pairwise.
pub fn distinguishing_report(delta: u64, r: usize) -> Result<DistinguishingReport> {
    if delta < 2 {
        return Err(Error::invalid("Δ must be at least 2"));
    }
    if (r as u64) <= delta {
        return Err(Error::invalid(format!("needs r > Δ, got r = {r}, Δ = {delta}")));
    }
    let mut built: Vec<ExtremalMatrix> = partitions(delta - 1)?
        .iter()
        .map(|l| build_a(delta, l, r))
        .collect::<Result<_>>()?;
    built.push(build_a_lee(delta, r)?);
    let nus: Vec<LineMultiset> = built
        .par_iter()
        .map(|x| line_length_multiset(&x.matrix, x.designated_element))
        .collect::<Result<_>>()?;

    let mut certificates = Vec::new();
    for i in 0..built.len() {
        for j in i + 1..built.len() {
            certificates.push(NonIsoCertificate {
                left_id: built[i].name(),
                right_id: built[j].name(),
                left_nu: nus[i].clone(),
                right_nu: nus[j].clone(),
                distinct: nus[i] != nus[j],
            });
        }
    }
    let lee = nus.last().expect("Lee matrix present");
    let top = delta + 2;
    let lee_separated = built
        .iter()
        .zip(&nus)
        .filter_map(|(x, nu)| x.partition.as_ref().map(|p| (p, nu)))
        .all(|(p, nu)| nu.count(top) == u64::from(p.m() == 1));
    Ok(DistinguishingReport {
        delta,
        r,
        constructions: built.iter().map(ExtremalMatrix::name).collect(),
        all_distinct: certificates.iter().all(|c| c.distinct),
        certificates,
        lee_matches_formula: *lee == nu_lee(delta, r),
        lee_separated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn ms(s: &str) -> LineMultiset {
        s.parse().unwrap()
    }

    #[test]
    fn classes() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 0, 1]]).unwrap();
        let c = parallel_classes(&m);
        assert_eq!(c.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(c.epsilon(), 2);
        let frame = IntMatrix::identity(2).hstack(&IntMatrix::clique(2)).unwrap();
        assert_eq!(parallel_classes(&frame).epsilon(), 3);
        let z = IntMatrix::from_rows(&[vec![0, 1]]).unwrap();
        assert_eq!(parallel_classes(&z).loops, vec![0]);
    }

    #[test]
    fn lines_in_the_frame() {
        let m = IntMatrix::identity(3).hstack(&IntMatrix::clique(3)).unwrap();
        // columns: e1 e2 e3 e1-e2 e1-e3 e2-e3
        assert_eq!(long_lines_through(&m, 0).unwrap(), vec![vec![0, 1, 3], vec![0, 2, 4]]);
        assert!(long_lines_through(&IntMatrix::identity(3), 1).unwrap().is_empty());
        assert!(long_lines_through(&m, 9).is_err());
    }

    #[test]
    fn multiset_text() {
        let nu = ms("3:3,4:3");
        assert_eq!(nu.total, 6);
        assert_eq!(nu.to_string(), "3:3,4:3");
        assert!("2:1".parse::<LineMultiset>().is_err());
        assert!("3:1,3:2".parse::<LineMultiset>().is_err());
        assert!("3-1".parse::<LineMultiset>().is_err());
        assert_eq!(ms("5:1,3:2"), [3, 5, 3].into_iter().collect());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(nu_formula(3, &p("2"), 4).unwrap(), ms("3:2,4:2,5:1"));
        assert_eq!(nu_formula(3, &p("1,1"), 4).unwrap(), ms("3:3,4:3"));
        for r in 2..8 {
            let mut expected = LineMultiset::new();
            expected.add(3, 2 * (r as u64 - 2));
            expected.add(4, 1);
            assert_eq!(nu_formula(2, &p("1"), r).unwrap(), expected);
        }
        assert!(nu_formula(3, &p("1,1"), 2).is_err());
        assert!(nu_formula(3, &p("1"), 4).is_err());
    }

    #[test]
    fn recovery_examples() {
        assert_eq!(recover_partition(&ms("3:2,4:2,5:1"), 3, 4).unwrap(), p("2"));
        assert_eq!(recover_partition(&ms("3:3,4:3"), 3, 4).unwrap(), p("1,1"));
        assert!(recover_partition(&ms("3:3,4:3"), 3, 3).is_err());
        assert!(matches!(
            recover_partition(&ms("3:1"), 3, 4),
            Err(Error::InvalidNu(_))
        ));
        assert!(matches!(
            recover_partition(&ms("3:3,4:2,9:1"), 3, 4),
            Err(Error::InvalidNu(_))
        ));
    }

    // Counting all bounded-multiplicity sums of smaller parts, rather than
    // pairs of parts, miscounts lines once a value splits in several ways.
    #[test]
    fn pair_count_differs_from_bounded_partition_count() {
        let n = vec![0, 3, 0, 0];
        assert_eq!(pair_count(&n, 2), 3);
        // 2 = 1 + 1 is the only way to write 2 with parts below 2
        let bounded_partitions_of_two = 1;
        assert_ne!(pair_count(&n, 2), bounded_partitions_of_two);
        let nu = nu_formula(4, &p("1,1,1"), 5).unwrap();
        assert_eq!(nu.count(4), 3 + 3);
        assert_eq!(recover_partition(&nu, 4, 5).unwrap(), p("1,1,1"));
    }

    #[test]
    fn lee_lines() {
        let a = build_a_lee(3, 4).unwrap();
        assert_eq!(line_length_multiset(&a.matrix, 0).unwrap(), ms("5:3"));
    }

    #[test]
    fn report_small() {
        let rep = distinguishing_report(3, 4).unwrap();
        assert_eq!(rep.constructions, ["A(3,(2),4)", "A(3,(1,1),4)", "A(3,4)"]);
        assert_eq!(rep.certificates.len(), 3);
        assert!(rep.all_distinct && rep.lee_matches_formula && rep.lee_separated);
        assert!(distinguishing_report(3, 3).is_err());
    }
}
