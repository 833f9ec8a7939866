use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{FeatureArray, History};
use crate::error::{Error, Result};
use crate::numerics::{ln_factorial, RngStream};

/// A combinatorial structure: the multiplicities `M_h` of each history among
/// the features of `n` rows, with labels forgotten.
///
/// Keys are kept in ascending `≼` order, so iteration and serialization are
/// deterministic. Serialized as
/// `{"n": 2, "counts": [[[1, 0], 2], [[0, 2], 1]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CombRepr", into = "CombRepr")]
pub struct CombStruct {
    n: usize,
    counts: BTreeMap<History, u64>,
}

#[derive(Serialize, Deserialize)]
struct CombRepr {
    n: usize,
    counts: Vec<(History, u64)>,
}

impl TryFrom<CombRepr> for CombStruct {
    type Error = Error;
    fn try_from(v: CombRepr) -> Result<Self> {
        Self::from_counts(v.n, v.counts)
    }
}

impl From<CombStruct> for CombRepr {
    fn from(m: CombStruct) -> Self {
        CombRepr {
            n: m.n,
            counts: m.counts.into_iter().collect(),
        }
    }
}

impl CombStruct {
    /// The empty structure on `n ≥ 1` rows.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("a structure needs n ≥ 1 rows".into()));
        }
        Ok(Self {
            n,
            counts: BTreeMap::new(),
        })
    }

    /// Builds a structure from `(history, multiplicity)` pairs. Repeated
    /// histories accumulate; zero multiplicities are dropped.
    pub fn from_counts(n: usize, pairs: impl IntoIterator<Item = (History, u64)>) -> Result<Self> {
        let mut m = Self::empty(n)?;
        for (h, k) in pairs {
            m.add(h, k)?;
        }
        Ok(m)
    }

    /// Adds `k` copies of `h`.
    pub fn add(&mut self, h: History, k: u64) -> Result<()> {
        if h.len() != self.n {
            return Err(Error::Parse(format!(
                "history of length {} in a structure on {} rows",
                h.len(),
                self.n
            )));
        }
        if k > 0 {
            *self.counts.entry(h).or_insert(0) += k;
        }
        Ok(())
    }

    /// Counts the columns of `w` by history.
    pub fn from_array(w: &FeatureArray) -> Self {
        let mut counts = BTreeMap::new();
        for h in w.columns() {
            *counts.entry(h.clone()).or_insert(0) += 1;
        }
        Self { n: w.n(), counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `κ = Σ_h M_h`.
    pub fn kappa(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `M_h`, zero if absent.
    pub fn count(&self, h: &History) -> u64 {
        self.counts.get(h).copied().unwrap_or(0)
    }

    /// `(h, M_h)` pairs in ascending `≼` order.
    pub fn iter(&self) -> impl Iterator<Item = (&History, u64)> + '_ {
        self.counts.iter().map(|(h, &k)| (h, k))
    }

    /// Number of distinct histories.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    /// `log[κ! / Π_h M_h!]`, the number of distinguishable column orders.
    pub fn ordering_count(&self) -> f64 {
        let denom: f64 = self.counts.values().map(|&k| ln_factorial(k)).sum();
        ln_factorial(self.kappa()) - denom
    }

    /// Left-ordered array with these column counts.
    pub fn to_array(&self) -> FeatureArray {
        let columns = self
            .counts
            .iter()
            .flat_map(|(h, &k)| std::iter::repeat(h.clone()).take(k as usize))
            .collect();
        FeatureArray::from_parts(self.n, columns)
    }

    /// A uniformly random labeling: the columns in a uniformly random order.
    pub fn uniform_label(&self, rng: &mut RngStream) -> FeatureArray {
        let mut w = self.to_array();
        w.columns_mut().shuffle(rng);
        w
    }

    /// The structure seen by the first `n - 1` rows. Histories with no
    /// positive entry among those rows are dropped.
    pub fn project(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::Precondition(
                "projection needs a structure on at least two rows".into(),
            ));
        }
        let mut out = Self::empty(self.n - 1)?;
        for (h, &k) in &self.counts {
            if let Some(t) = h.truncated(self.n - 1) {
                *out.counts.entry(t).or_insert(0) += k;
            }
        }
        Ok(out)
    }

    /// Applies a row permutation: row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut out = Self::empty(self.n)?;
        for (h, &k) in &self.counts {
            *out.counts.entry(h.permuted(perm)).or_insert(0) += k;
        }
        Ok(out)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Precondition(format!(
            "permutation of length {} applied to {n} rows",
            perm.len()
        )));
    }
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Precondition(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: &[u64]) -> History {
        History::new(v.to_vec()).unwrap()
    }

    #[test]
    fn from_array_counts_columns() {
        let w = FeatureArray::new(2, vec![h(&[1, 0]), h(&[1, 0]), h(&[0, 2])]).unwrap();
        let m = CombStruct::from_array(&w);
        assert_eq!(m.count(&h(&[1, 0])), 2);
        assert_eq!(m.count(&h(&[0, 2])), 1);
        assert_eq!(m.kappa(), 3);
        let empty = FeatureArray::new(2, vec![]).unwrap();
        assert!(CombStruct::from_array(&empty).is_empty());
    }

    #[test]
    fn ordering_counts() {
        let m = CombStruct::from_counts(2, [(h(&[1, 0]), 2), (h(&[0, 1]), 1)]).unwrap();
        assert!((m.ordering_count() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(CombStruct::empty(3).unwrap().ordering_count(), 0.0);
        let m = CombStruct::from_counts(1, (1..=4).map(|k| (h(&[k]), 1))).unwrap();
        assert!((m.ordering_count() - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn projection() {
        let m = CombStruct::from_counts(2, [(h(&[1, 0]), 1), (h(&[1, 2]), 1)]).unwrap();
        let p = m.project().unwrap();
        assert_eq!(p, CombStruct::from_counts(1, [(h(&[1]), 2)]).unwrap());
        let m = CombStruct::from_counts(2, [(h(&[0, 3]), 1)]).unwrap();
        assert!(m.project().unwrap().is_empty());
        assert!(CombStruct::empty(1).unwrap().project().is_err());
    }

    #[test]
    fn uniform_label_single_order() {
        let m = CombStruct::from_counts(2, [(h(&[1, 0]), 2)]).unwrap();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..10 {
            let w = m.uniform_label(&mut rng);
            assert_eq!(w.columns(), &[h(&[1, 0]), h(&[1, 0])]);
        }
    }

    #[test]
    fn uniform_label_is_uniform() {
        let m = CombStruct::from_counts(2, [(h(&[1, 0]), 1), (h(&[0, 1]), 1)]).unwrap();
        let mut rng = RngStream::new(2, 0);
        let draws = 10_000;
        let first = (0..draws)
            .filter(|_| m.uniform_label(&mut rng).columns()[0] == h(&[1, 0]))
            .count() as f64;
        let sd = (draws as f64 * 0.25).sqrt();
        assert!((first - draws as f64 / 2.0).abs() < 3.0 * sd, "{first}");
    }

    #[test]
    fn row_permutation() {
        let m = CombStruct::from_counts(3, [(h(&[1, 0, 2]), 1), (h(&[0, 1, 0]), 2)]).unwrap();
        let p = m.permute_rows(&[2, 0, 1]).unwrap();
        assert_eq!(p.count(&h(&[2, 1, 0])), 1);
        assert_eq!(p.count(&h(&[0, 0, 1])), 2);
        assert!(m.permute_rows(&[0, 0, 1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = CombStruct::from_counts(2, [(h(&[0, 2]), 1), (h(&[1, 0]), 2)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"counts":[[[0,2],1],[[1,0],2]]}"#);
        assert_eq!(serde_json::from_str::<CombStruct>(&s).unwrap(), m);
        assert!(serde_json::from_str::<CombStruct>(r#"{"n":2,"counts":[[[1],1]]}"#).is_err());
    }
}
