use super::{CombStruct, FeatureArray, History, Hyperparams};
use crate::error::Result;
use crate::numerics::{gap, ln_beta, ln_factorial, ln_rising, CompensatedSum};

/// Log-weight of one feature with history `h` among `n` rows:
/// `log B(s(h), c + nr) + Σ_j log[(r)_{h(j)} / h(j)!]`.
///
/// Entries are summed in sorted order so the value depends on `h` only
/// through its multiset of entries, bit for bit.
pub fn log_history_weight(h: &History, r: f64, c: f64) -> f64 {
    let n = h.len() as f64;
    let mut entries: Vec<u64> = h.entries().iter().copied().filter(|&x| x > 0).collect();
    entries.sort_unstable();
    let mut acc = CompensatedSum::new();
    for x in entries {
        acc.add(ln_rising(r, x) - ln_factorial(x));
    }
    ln_beta(h.total() as f64, c + n * r) + acc.value()
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().collect::<CompensatedSum>().value()
}

/// Log-probability of the unlabeled structure `M` after `n` rows of the
/// negative binomial Indian buffet process.
pub fn log_pmf_struct(m: &CombStruct, hp: &Hyperparams) -> Result<f64> {
    hp.require_nonatomic("log_pmf_struct")?;
    let (r, c) = (hp.r, hp.c);
    let ln_ct = (c * hp.mass).ln();
    let terms = m
        .iter()
        .map(|(h, k)| {
            let kf = k as f64;
            kf * (ln_ct + log_history_weight(h, r, c)) - ln_factorial(k)
        })
        .collect();
    Ok(sorted_sum(terms) - hp.expected_features(m.n()))
}

/// Log-probability of the labeled array `W`, whose columns are a uniformly
/// random ordering of the features.
pub fn log_pmf_array(w: &FeatureArray, hp: &Hyperparams) -> Result<f64> {
    hp.require_nonatomic("log_pmf_array")?;
    let (r, c) = (hp.r, hp.c);
    let k = w.kappa() as u64;
    let terms = w
        .columns()
        .iter()
        .map(|h| log_history_weight(h, r, c))
        .collect();
    Ok(
        k as f64 * (c * hp.mass).ln() - ln_factorial(k) + sorted_sum(terms)
            - hp.c * hp.mass * gap(w.n() as f64 * r, c),
    )
}
