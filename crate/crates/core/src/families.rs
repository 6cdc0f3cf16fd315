//! Extremal Δ-modular matrices with `binom(r+1,2) + (Δ-1)(r-1)` columns.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::partition::Partition;

/// A constructed extremal matrix. Column labels are `A-1` .. `A-5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtremalMatrix {
    pub matrix: IntMatrix,
    pub delta: u64,
    pub r: usize,
    /// `None` for the Lee et al. matrix.
    pub partition: Option<Partition>,
    /// Column index of `e_1`.
    pub designated_element: usize,
}

impl ExtremalMatrix {
    /// `A(3,(1,1),4)` or `A(3,4)`.
    pub fn name(&self) -> String {
        match &self.partition {
            Some(p) => format!("A({},({}),{})", self.delta, p, self.r),
            None => format!("A({},{})", self.delta, self.r),
        }
    }
}

/// `binom(r+1, 2) + (Δ-1)(r-1)`.
pub fn expected_count(delta: u64, r: u64) -> u64 {
    r * (r + 1) / 2 + delta.saturating_sub(1) * r.saturating_sub(1)
}

fn unit(r: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[i] = 1;
    v
}

/// Columns `e_i` then `e_i - e_j` (`i < j`).
fn frame(r: usize, columns: &mut Vec<Vec<i64>>, labels: &mut Vec<String>) {
    for i in 0..r {
        columns.push(unit(r, i));
        labels.push("A-1".into());
    }
    for i in 0..r {
        for j in i + 1..r {
            let mut v = unit(r, i);
            v[j] = -1;
            columns.push(v);
            labels.push("A-2".into());
        }
    }
}

fn assemble(
    r: usize,
    columns: Vec<Vec<i64>>,
    labels: Vec<String>,
    delta: u64,
    partition: Option<Partition>,
) -> Result<ExtremalMatrix> {
    let matrix = IntMatrix::from_columns(r, &columns)?.with_labels(labels)?;
    Ok(ExtremalMatrix {
        matrix,
        delta,
        r,
        partition,
        designated_element: 0,
    })
}

/// `A(Δ, λ, r)` for a partition `λ` of `Δ - 1` with `m` parts and
/// `r >= m + 1`. Within each class columns follow the quantifier order
/// `i`, then `k`, then `j`.
pub fn build_a(delta: u64, lambda: &Partition, r: usize) -> Result<ExtremalMatrix> {
    if delta < 2 {
        return Err(Error::invalid("A(Δ,λ,r) needs Δ >= 2"));
    }
    if lambda.n() != delta - 1 {
        return Err(Error::invalid(format!(
            "({lambda}) is not a partition of {}",
            delta - 1
        )));
    }
    let m = lambda.m();
    if r < m + 1 {
        return Err(Error::invalid(format!(
            "rank {r} is below m + 1 = {}",
            m + 1
        )));
    }
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    frame(r, &mut columns, &mut labels);
    for (i, &l) in lambda.parts().iter().enumerate() {
        for k in 1..=l as i64 {
            let mut v = unit(r, i + 1);
            v[0] = k;
            columns.push(v);
            labels.push("A-3".into());
        }
    }
    for (i, &l) in lambda.parts().iter().enumerate() {
        for k in 1..=l as i64 {
            for j in 1..r {
                if j == i + 1 {
                    continue;
                }
                let mut v = unit(r, i + 1);
                v[0] = k;
                v[j] = -1;
                columns.push(v);
                labels.push("A-4".into());
            }
        }
    }
    assemble(r, columns, labels, delta, Some(lambda.clone()))
}

/// The Lee et al. matrix `A(Δ, r)`. The `A-5` columns `k e_1 - e_i` are
/// grouped by `k`, one block per multiple, as in the usual drawing.
pub fn build_a_lee(delta: u64, r: usize) -> Result<ExtremalMatrix> {
    if delta < 1 {
        return Err(Error::invalid("A(Δ,r) needs Δ >= 1"));
    }
    if r < 2 {
        return Err(Error::invalid("A(Δ,r) needs r >= 2"));
    }
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    frame(r, &mut columns, &mut labels);
    for k in 2..=delta as i64 {
        for i in 1..r {
            let mut v = vec![0; r];
            v[0] = k;
            v[i] = -1;
            columns.push(v);
            labels.push("A-5".into());
        }
    }
    assemble(r, columns, labels, delta, None)
}

/// The rank-3, 3-modular matrix with 11 columns.
pub fn sporadic_rank3() -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1],
        vec![0, 1, 0, -1, 0, 1, 1, 2, 1, 2, 1],
        vec![0, 0, 1, 0, -1, -1, -2, -3, -2, -3, -3],
    ])
    .expect("constant matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn column_set(m: &IntMatrix) -> BTreeSet<Vec<i64>> {
        m.columns().into_iter().collect()
    }

    #[test]
    fn counts() {
        assert_eq!(expected_count(3, 5), 23);
        assert_eq!(expected_count(1, 4), 10);
        assert_eq!(expected_count(2, 3), 8);
        assert_eq!(build_a(3, &p("2"), 4).unwrap().matrix.cols(), 16);
        assert_eq!(build_a_lee(2, 4).unwrap().matrix.cols(), 13);
        assert_eq!(sporadic_rank3().cols(), 11);
    }

    #[test]
    fn lee_with_delta_one_is_the_frame() {
        let a = build_a_lee(1, 4).unwrap();
        let frame = IntMatrix::identity(4).hstack(&IntMatrix::clique(4)).unwrap();
        assert_eq!(a.matrix.columns(), frame.columns());
    }

    #[test]
    fn invalid_arguments() {
        assert!(build_a(3, &p("1"), 4).is_err());
        assert!(build_a(3, &p("1,1"), 2).is_err());
        assert!(build_a(1, &p("1"), 3).is_err());
        assert!(build_a_lee(3, 1).is_err());
    }

    // Layouts drawn for r = 5: identity, clique, then the extra blocks.
    #[test]
    fn drawn_layouts() {
        let r = 5;
        let base = IntMatrix::identity(r).hstack(&IntMatrix::clique(r)).unwrap();

        // A(3,r): [2..2; -I] [3..3; -I]
        let mut lee = base.clone();
        for k in [2, 3] {
            for i in 1..r {
                let mut v = vec![0; r];
                v[0] = k;
                v[i] = -1;
                lee.push_column(&v).unwrap();
            }
        }
        assert_eq!(build_a_lee(3, r).unwrap().matrix.columns(), lee.columns());

        // A(3,2,r): [1..1; 1..1; -I_{r-2}] [2..2; 1..1; -I_{r-2}] (1,1,0) (2,1,0)
        let mut a2 = base.clone();
        for k in [1, 2] {
            for j in 2..r {
                let mut v = vec![0; r];
                v[0] = k;
                v[1] = 1;
                v[j] = -1;
                a2.push_column(&v).unwrap();
            }
        }
        for k in [1, 2] {
            let mut v = vec![0; r];
            v[0] = k;
            v[1] = 1;
            a2.push_column(&v).unwrap();
        }
        assert_eq!(column_set(&build_a(3, &p("2"), r).unwrap().matrix), column_set(&a2));

        // A(3,1+1,r): [1;1;0;-I_{r-3}] [1;0;1;-I_{r-3}] then four columns
        // with rows 2,3 equal to (1,0) (0,1) (1,-1) (-1,1).
        let mut a11 = base;
        for (x, y) in [(1, 0), (0, 1)] {
            for j in 3..r {
                let mut v = vec![0; r];
                v[0] = 1;
                v[1] = x;
                v[2] = y;
                v[j] = -1;
                a11.push_column(&v).unwrap();
            }
        }
        for (x, y) in [(1, 0), (0, 1), (1, -1), (-1, 1)] {
            let mut v = vec![0; r];
            v[0] = 1;
            v[1] = x;
            v[2] = y;
            a11.push_column(&v).unwrap();
        }
        assert_eq!(column_set(&build_a(3, &p("1,1"), r).unwrap().matrix), column_set(&a11));
    }

    #[test]
    fn labels_follow_classes() {
        let a = build_a(3, &p("1,1"), 4).unwrap();
        let labels = a.matrix.labels().unwrap();
        assert_eq!(labels.iter().filter(|l| *l == "A-1").count(), 4);
        assert_eq!(labels.iter().filter(|l| *l == "A-2").count(), 6);
        assert_eq!(labels.iter().filter(|l| *l == "A-3").count(), 2);
        assert_eq!(labels.iter().filter(|l| *l == "A-4").count(), 4);
        assert_eq!(a.matrix.column(a.designated_element), vec![1, 0, 0, 0]);
        assert_eq!(a.name(), "A(3,(1,1),4)");
        assert_eq!(build_a_lee(3, 4).unwrap().name(), "A(3,4)");
    }
}
