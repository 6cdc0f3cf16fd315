//! Dense integer matrices and their text/JSON fixture formats.
//!
//! Entries are stored as `i64` and must stay within a magnitude bound
//! (2^62 unless configured otherwise). Every derived quantity (determinants,
//! subdeterminant maxima) is computed exactly, widening to arbitrary
//! precision when needed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `|entry|` accepted by constructors and parsers.
pub const DEFAULT_ENTRY_BOUND: i64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
    labels: Option<Vec<String>>,
}

impl IntMatrix {
    /// Row-major constructor.
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        Self::with_bound(rows, cols, data, DEFAULT_ENTRY_BOUND)
    }

    pub fn with_bound(rows: usize, cols: usize, data: Vec<i64>, bound: i64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| v.unsigned_abs() > bound.unsigned_abs()) {
            return Err(Error::EntryBound {
                value: v.to_string(),
                bound,
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            data,
            labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension(format!(
                "every column must have {rows} entries"
            )));
        }
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix {
            rows: n,
            cols: n,
            data,
            labels: None,
        }
    }

    /// `D_r`: the columns `e_i - e_j` for `i < j`, ordered with `i` outer.
    /// For `r = 1` the clique has no edges; a single zero column is returned
    /// so the matrix stays non-empty.
    pub fn clique(r: usize) -> Self {
        let mut columns = Vec::new();
        for i in 0..r {
            for j in i + 1..r {
                let mut c = vec![0; r];
                c[i] = 1;
                c[j] = -1;
                columns.push(c);
            }
        }
        if columns.is_empty() {
            columns.push(vec![0; r]);
        }
        Self::from_columns(r, &columns).expect("clique columns are well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{} labels for {} columns",
                labels.len(),
                self.cols
            )));
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        self.set_labels(labels)?;
        Ok(self)
    }

    pub fn clear_labels(&mut self) {
        self.labels = None;
    }

    pub fn max_abs_entry(&self) -> u64 {
        self.data.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// Submatrix on the given rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::Index {
                index: i,
                len: self.rows,
            });
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Index {
                index: j,
                len: self.cols,
            });
        }
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j));
            }
        }
        let mut out = Self::new(rows.len(), cols.len(), data)?;
        if let Some(labels) = &self.labels {
            out.labels = Some(cols.iter().map(|&j| labels[j].clone()).collect());
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    /// `[self other]`. Labels survive only if both sides carry them.
    pub fn hstack(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut columns = self.columns();
        columns.extend(other.columns());
        let mut out = Self::from_columns(self.rows, &columns)?;
        if let (Some(a), Some(b)) = (&self.labels, &other.labels) {
            out.labels = Some(a.iter().chain(b).cloned().collect());
        }
        Ok(out)
    }

    pub fn push_column(&mut self, column: &[i64]) -> Result<()> {
        if column.len() != self.rows {
            return Err(Error::Dimension("column length mismatch".into()));
        }
        let mut columns = self.columns();
        columns.push(column.to_vec());
        let labels = self.labels.take();
        *self = Self::from_columns(self.rows, &columns)?;
        if let Some(mut l) = labels {
            l.push(String::new());
            self.labels = Some(l);
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
            labels: None,
        }
    }

    /// Exact product; fails if an entry leaves `i64`.
    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc = acc
                        .checked_add(self.get(i, k) as i128 * other.get(k, j) as i128)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                data.push(i64::try_from(acc).map_err(|_| Error::Overflow("matrix product"))?);
            }
        }
        let mut out = Self::new(self.rows, other.cols, data)?;
        out.labels = other.labels.clone();
        Ok(out)
    }

    /// Text fixture format: `rows cols`, one line per row, optional
    /// `labels: ...` trailer.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        if let Some(labels) = &self.labels {
            s.push_str("labels: ");
            s.push_str(&labels.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        Self::parse_text_with_bound(text, DEFAULT_ENTRY_BOUND)
    }

    pub fn parse_text_with_bound(text: &str, bound: i64) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (n, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::parse(n, "header must be `rows cols`"));
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(n, format!("bad dimension `{s}`")))
        };
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::parse(n, format!("expected {rows} rows")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(Error::parse(
                    n,
                    format!("expected {cols} entries, found {}", entries.len()),
                ));
            }
            for e in entries {
                data.push(parse_entry(e, bound).map_err(|msg| Error::parse(n, msg))?);
            }
        }

        let mut labels = None;
        if let Some((n, line)) = lines.next() {
            let rest = line
                .strip_prefix("labels:")
                .ok_or_else(|| Error::parse(n, "unexpected trailing content"))?;
            let l: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if l.len() != cols {
                return Err(Error::parse(n, format!("{} labels for {cols} columns", l.len())));
            }
            labels = Some(l);
        }
        if let Some((n, _)) = lines.next() {
            return Err(Error::parse(n, "unexpected trailing content"));
        }

        let mut m = Self::with_bound(rows, cols, data, bound)?;
        m.labels = labels;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

fn parse_entry(s: &str, bound: i64) -> std::result::Result<i64, String> {
    let v: i128 = s
        .parse()
        .map_err(|_| format!("`{s}` is not an integer within 128 bits"))?;
    if v.unsigned_abs() > bound.unsigned_abs() as u128 {
        return Err(format!("entry {v} exceeds the magnitude bound {bound}"));
    }
    Ok(v as i64)
}

impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
            labels: self.labels.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.len() != raw.cols) {
            return Err(D::Error::custom("entries do not match rows/cols"));
        }
        let mut m = IntMatrix::from_rows(&raw.entries).map_err(D::Error::custom)?;
        if let Some(l) = raw.labels {
            m.set_labels(l).map_err(D::Error::custom)?;
        }
        Ok(m)
    }
}

/// Address of a square submatrix together with its determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmatrixWitness {
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    #[serde(with = "bigint_json")]
    pub det_value: BigInt,
}

impl SubmatrixWitness {
    /// Re-evaluates the addressed determinant against `m`.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        if self.row_indices.len() != self.col_indices.len() {
            return false;
        }
        match m.select(&self.row_indices, &self.col_indices) {
            Ok(sub) => crate::linalg::det(&sub).is_ok_and(|d| d == self.det_value),
            Err(_) => false,
        }
    }

    pub fn abs_det(&self) -> BigInt {
        num_traits::Signed::abs(&self.det_value)
    }
}

/// Big integers as JSON numbers when they fit in `i64`, strings otherwise.
pub mod bigint_json {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(BigInt::from(x)),
            Repr::Str(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_with_labels() {
        let m = IntMatrix::from_rows(&[vec![1, 0, -3], vec![0, 1, 2]])
            .unwrap()
            .with_labels(vec!["A-1".into(), "A-1".into(), "x".into()])
            .unwrap();
        let text = m.to_text();
        assert_eq!(text, "2 3\n1 0 -3\n0 1 2\nlabels: A-1 A-1 x\n");
        assert_eq!(IntMatrix::parse_text(&text).unwrap(), m);
    }

    #[test]
    fn json_mirror() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        let j = m.to_json();
        assert_eq!(j, r#"{"rows":2,"cols":2,"entries":[[2,0],[0,1]]}"#);
        assert_eq!(IntMatrix::from_json(&j).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            IntMatrix::parse_text("2 2\n1 0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            IntMatrix::parse_text("1 2\n1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(IntMatrix::parse_text("1 1\n9223372036854775807\n").is_err());
        assert!(IntMatrix::parse_text_with_bound("1 1\n11\n", 10).is_err());
        assert!(IntMatrix::parse_text("0 3\n").is_err());
    }

    #[test]
    fn clique_shape() {
        let d = IntMatrix::clique(4);
        assert_eq!((d.rows(), d.cols()), (4, 6));
        assert_eq!(d.column(0), vec![1, -1, 0, 0]);
        assert_eq!(d.column(5), vec![0, 0, 1, -1]);
    }

    #[test]
    fn bound_is_enforced() {
        assert!(IntMatrix::new(1, 1, vec![i64::MAX]).is_err());
        assert!(IntMatrix::new(1, 1, vec![1 << 62]).is_ok());
    }
}
