use serde::{Deserialize, Serialize};

use super::comb::check_permutation;
use super::History;
use crate::error::{Error, Result};

/// A labeled feature-count array with `n` rows and one column per feature.
///
/// Column `j` is stored as the history `(W[0][j], …, W[n-1][j])`, never all
/// zero. Serialized as `{"n": 2, "columns": [[1, 0], [0, 2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ArrayRepr", into = "ArrayRepr")]
pub struct FeatureArray {
    n: usize,
    columns: Vec<History>,
}

#[derive(Serialize, Deserialize)]
struct ArrayRepr {
    n: usize,
    columns: Vec<History>,
}

impl TryFrom<ArrayRepr> for FeatureArray {
    type Error = Error;
    fn try_from(v: ArrayRepr) -> Result<Self> {
        Self::new(v.n, v.columns)
    }
}

impl From<FeatureArray> for ArrayRepr {
    fn from(w: FeatureArray) -> Self {
        ArrayRepr {
            n: w.n,
            columns: w.columns,
        }
    }
}

impl FeatureArray {
    pub fn new(n: usize, columns: Vec<History>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("an array needs n ≥ 1 rows".into()));
        }
        if let Some(h) = columns.iter().find(|h| h.len() != n) {
            return Err(Error::Parse(format!(
                "column of length {} in an array with {n} rows",
                h.len()
            )));
        }
        Ok(Self { n, columns })
    }

    pub(crate) fn from_parts(n: usize, columns: Vec<History>) -> Self {
        debug_assert!(n > 0 && columns.iter().all(|h| h.len() == n));
        Self { n, columns }
    }

    /// Builds an array from rows, dropping all-zero columns.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Parse("rows of unequal length".into()));
        }
        let columns = (0..k)
            .filter_map(|j| History::new(rows.iter().map(|r| r[j]).collect()).ok())
            .collect();
        Self::new(n, columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns.
    pub fn kappa(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[History] {
        &self.columns
    }

    pub(crate) fn columns_mut(&mut self) -> &mut Vec<History> {
        &mut self.columns
    }

    pub fn into_columns(self) -> Vec<History> {
        self.columns
    }

    /// Entry in row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.columns[j].entries()[i]
    }

    /// Row `i` as a dense vector.
    pub fn row(&self, i: usize) -> Vec<u64> {
        self.columns.iter().map(|h| h.entries()[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    /// Column sums `s_j`.
    pub fn column_sums(&self) -> Vec<u64> {
        self.columns.iter().map(History::total).collect()
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.columns
            .iter()
            .map(History::total)
            .fold(0u64, u64::saturating_add)
    }

    /// Canonical form: columns sorted ascending under `≼`.
    pub fn left_order(&self) -> Self {
        let mut columns = self.columns.clone();
        columns.sort();
        Self { n: self.n, columns }
    }

    pub fn is_left_ordered(&self) -> bool {
        self.columns.windows(2).all(|w| w[0] <= w[1])
    }

    /// Applies a row permutation: row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        Ok(Self {
            n: self.n,
            columns: self.columns.iter().map(|h| h.permuted(perm)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: &[u64]) -> History {
        History::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(FeatureArray::new(0, vec![]).is_err());
        assert!(FeatureArray::new(2, vec![h(&[1])]).is_err());
        assert!(FeatureArray::new(2, vec![]).is_ok());
    }

    #[test]
    fn left_ordering() {
        let w = FeatureArray::new(2, vec![h(&[1, 0]), h(&[0, 1])]).unwrap();
        let l = w.left_order();
        assert_eq!(l.columns(), &[h(&[0, 1]), h(&[1, 0])]);
        assert_eq!(l.left_order(), l);
        assert!(l.is_left_ordered() && !w.is_left_ordered());
        let single = FeatureArray::new(1, vec![h(&[4])]).unwrap();
        assert_eq!(single.left_order(), single);
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![vec![1, 0, 0, 2], vec![0, 0, 3, 1]];
        let w = FeatureArray::from_rows(&rows).unwrap();
        assert_eq!(w.kappa(), 3);
        assert_eq!(w.rows(), vec![vec![1, 0, 2], vec![0, 3, 1]]);
        assert_eq!(w.column_sums(), vec![1, 3, 3]);
        assert_eq!(w.get(1, 2), 1);
    }

    #[test]
    fn json_round_trip() {
        let w = FeatureArray::new(2, vec![h(&[1, 0]), h(&[0, 2])]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"n":2,"columns":[[1,0],[0,2]]}"#);
        assert_eq!(serde_json::from_str::<FeatureArray>(&s).unwrap(), w);
        assert!(serde_json::from_str::<FeatureArray>(r#"{"n":2,"columns":[[0,0]]}"#).is_err());
    }
}
