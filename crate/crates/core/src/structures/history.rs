use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A column pattern: the multiplicity a single feature shows in each of the
/// `n` rows. Never all zero.
///
/// The derived ordering is lexicographic, which on histories of equal length
/// is the order used for left-ordered arrays: `h ≼ h'` iff `h = h'` or
/// `h(i) < h'(i)` at the first coordinate where they differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct History(Vec<u64>);

impl History {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Parse("a history needs at least one row".into()));
        }
        if entries.iter().all(|&x| x == 0) {
            return Err(Error::Parse(
                "the all-zero sequence is not a history".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub(crate) fn new_unchecked(entries: Vec<u64>) -> Self {
        debug_assert!(entries.iter().any(|&x| x > 0));
        Self(entries)
    }

    /// History with a single positive entry `value` in row `row` of `n`.
    pub fn singleton(n: usize, row: usize, value: u64) -> Self {
        assert!(row < n && value > 0);
        let mut v = vec![0; n];
        v[row] = value;
        Self(v)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s(h)`: total multiplicity over all rows, saturating at `u64::MAX`.
    pub fn total(&self) -> u64 {
        self.0.iter().fold(0u64, |a, &x| a.saturating_add(x))
    }

    /// `h ∘ π`, i.e. entry `i` of the result is `h(π(i))`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.0.len());
        Self(perm.iter().map(|&j| self.0[j]).collect())
    }

    /// The first `n` entries, or `None` if they are all zero.
    pub fn truncated(&self, n: usize) -> Option<Self> {
        let head = &self.0[..n];
        head.iter().any(|&x| x > 0).then(|| Self(head.to_vec()))
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.0
    }
}

impl TryFrom<Vec<u64>> for History {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<History> for Vec<u64> {
    fn from(h: History) -> Self {
        h.0
    }
}
