//! Exhaustive enumeration of small structures, used as an exact oracle.

use super::{CombStruct, History};

/// All histories on `n` rows with `1 ≤ s(h) ≤ max_total`, in ascending order.
pub fn histories(n: usize, max_total: u64) -> Vec<History> {
    fn rec(prefix: &mut Vec<u64>, n: usize, budget: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..=budget {
            prefix.push(x);
            rec(prefix, n, budget - x, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, max_total, &mut out);
    let mut hs: Vec<History> = out
        .into_iter()
        .filter(|v| v.iter().any(|&x| x > 0))
        .map(History::new_unchecked)
        .collect();
    hs.sort();
    hs
}

/// All structures on `n` rows whose histories satisfy `s(h) ≤ max_total` and
/// whose feature count is at most `max_kappa`, including the empty one.
pub fn structures(n: usize, max_total: u64, max_kappa: u64) -> Vec<CombStruct> {
    let hs = histories(n, max_total);
    let mut out = Vec::new();
    let mut counts: Vec<(usize, u64)> = Vec::new();
    fn rec(
        hs: &[History],
        start: usize,
        budget: u64,
        n: usize,
        counts: &mut Vec<(usize, u64)>,
        out: &mut Vec<CombStruct>,
    ) {
        let m = CombStruct::from_counts(n, counts.iter().map(|&(i, k)| (hs[i].clone(), k)))
            .expect("enumerated histories have length n");
        out.push(m);
        for i in start..hs.len() {
            for k in 1..=budget {
                counts.push((i, k));
                rec(hs, i + 1, budget - k, n, counts, out);
                counts.pop();
            }
        }
    }
    rec(&hs, 0, max_kappa, n, &mut counts, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_counts() {
        // compositions of s into n non-negative parts: C(s+n-1, n-1)
        assert_eq!(histories(1, 6).len(), 6);
        assert_eq!(histories(2, 6).len(), (1..=6).map(|s| s + 1).sum::<usize>());
        assert_eq!(histories(3, 2).len(), 3 + 6);
    }

    #[test]
    fn structure_counts() {
        // multisets of size ≤ 2 from 3 histories: 1 + 3 + 6
        assert_eq!(structures(1, 3, 2).len(), 10);
        let all = structures(2, 2, 3);
        let mut dedup = all.clone();
        dedup.sort_by_key(|m| serde_json::to_string(m).unwrap());
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert!(all.iter().all(|m| m.kappa() <= 3));
    }
}
