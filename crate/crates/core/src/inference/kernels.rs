use rand::seq::SliceRandom;
use rand::Rng;

use super::likelihood::Likelihood;
use super::priors::{GammaPrior, ScalarPrior};
use super::state::ChainState;
use crate::distributions::base::{beta_log_odds, nb_from_log_odds, poisson, uniform_open};
use crate::distributions::Digamma;
use crate::error::{domain, Error, Result};
use crate::numerics::{gap, RngStream};
use crate::structures::log_pmf_array;

/// Cap on slice-sampler bracket expansions.
pub const MAX_SLICE_EXPANSIONS: usize = 1000;
const MAX_SLICE_SHRINKS: usize = 10_000;

fn accept(log_ratio: f64, rng: &mut RngStream) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    uniform_open(rng).ln() < log_ratio
}

fn mh_log_ratio(new: f64, old: f64) -> f64 {
    if new == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if old == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        new - old
    }
}

/// Metropolis–Hastings update of `W_{i,j}` for a column that some other row
/// also uses.
///
/// The proposal is the prior conditional `BNB(r, S_j^{(-i)}, c + (n-1) r)`,
/// so the acceptance ratio is the likelihood ratio of row `i`. Returns
/// whether the proposal was accepted.
pub fn update_entry<L: Likelihood>(
    state: &mut ChainState,
    model: &L,
    i: usize,
    j: usize,
) -> Result<bool> {
    if i >= state.n || j >= state.kappa() {
        return Err(Error::Precondition(format!(
            "entry ({i}, {j}) out of range"
        )));
    }
    let s_minus = state.sum_without(j, i);
    if s_minus == 0 {
        return Err(Error::Precondition(format!(
            "column {j} is a singleton of row {i}"
        )));
    }
    let (r, c) = (state.hp.r, state.hp.c);
    let beta = c + (state.n - 1) as f64 * r;
    let log_odds = beta_log_odds(s_minus as f64, beta, &mut state.rng);
    let proposal = nb_from_log_odds(r, log_odds, &mut state.rng);
    let current = state.columns[j][i];
    if proposal == current {
        return Ok(true);
    }
    let mut row = state.row(i);
    let old = model.log_lik_row(i, &row, &state.theta);
    row[j] = proposal;
    let new = model.log_lik_row(i, &row, &state.theta);
    if accept(mh_log_ratio(new, old), &mut state.rng) {
        state.columns[j][i] = proposal;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Birth–death move on the singleton columns of row `i`: all of them are
/// replaced by a fresh draw from their prior conditional, and the proposal
/// is accepted with the likelihood ratio of row `i`.
///
/// New columns take uniformly random positions among the columns kept.
pub fn update_singletons<L: Likelihood>(
    state: &mut ChainState,
    model: &L,
    i: usize,
) -> Result<bool> {
    if i >= state.n {
        return Err(Error::Precondition(format!("row {i} out of range")));
    }
    let (r, c) = (state.hp.r, state.hp.c);
    let theta_new = c + (state.n - 1) as f64 * r;
    let digamma = Digamma::new(r, theta_new)?;
    let rate = c * state.hp.mass * digamma.harmonic_gap();
    let births = poisson(rate, &mut state.rng);
    let singleton: Vec<bool> = (0..state.kappa())
        .map(|j| state.columns[j][i] > 0 && state.sum_without(j, i) == 0)
        .collect();
    let deaths = singleton.iter().filter(|&&s| s).count();
    if births == 0 && deaths == 0 {
        return Ok(true);
    }

    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(state.kappa() - deaths + births as usize);
    let mut theta: Vec<Vec<f64>> = Vec::with_capacity(columns.capacity());
    for (j, &s) in singleton.iter().enumerate() {
        if !s {
            columns.push(state.columns[j].clone());
            theta.push(state.theta[j].clone());
        }
    }
    for _ in 0..births {
        let z = digamma.sample(&mut state.rng)?;
        let mut col = vec![0; state.n];
        col[i] = z;
        let t = model.sample_theta_prior(&mut state.rng);
        let pos = state.rng.random_range(0..=columns.len());
        columns.insert(pos, col);
        theta.insert(pos, t);
    }

    let old = model.log_lik_row(i, &state.row(i), &state.theta);
    let new_row: Vec<u64> = columns.iter().map(|col| col[i]).collect();
    let new = model.log_lik_row(i, &new_row, &theta);
    if accept(mh_log_ratio(new, old), &mut state.rng) {
        state.columns = columns;
        state.theta = theta;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Gibbs update of `Θ` from its full conditional.
pub fn update_theta<L: Likelihood>(state: &mut ChainState, model: &L) -> Result<()> {
    if state.kappa() == 0 {
        return Ok(());
    }
    model.gibbs_theta(&state.columns, &mut state.theta, &mut state.rng)
}

/// Gibbs update of the mass `T` under a `Gamma(α, β)` prior:
/// `T | W ~ Gamma(α + κ, β + c [ψ(c + n r) - ψ(c)])`.
///
/// A `Fixed` prior leaves `T` unchanged; a log-normal prior is handled by
/// slice sampling.
pub fn update_mass_t(state: &mut ChainState, slice_width: f64) -> Result<()> {
    match state.priors.mass {
        ScalarPrior::Fixed => Ok(()),
        ScalarPrior::Gamma { shape, rate } => {
            let post = mass_conditional(
                GammaPrior::new(shape, rate)?,
                state.kappa() as u64,
                state.n,
                state.hp.r,
                state.hp.c,
            )?;
            let t = post.sample(&mut state.rng);
            state.hp.set_mass(t)
        }
        ScalarPrior::LogNormal { .. } => {
            let prior = state.priors.mass;
            let w = state.array();
            let hp = state.hp.clone();
            let target = |t: f64| {
                if !(t > 0.0) {
                    return f64::NEG_INFINITY;
                }
                let mut h = hp.clone();
                h.mass = t;
                log_pmf_array(&w, &h).unwrap_or(f64::NEG_INFINITY) + prior.log_pdf(t)
            };
            let t = slice_sample(state.hp.mass, target, slice_width, &mut state.rng)?;
            state.hp.set_mass(t)
        }
    }
}

/// Full conditional of `T` given `κ` features among `n` rows under a gamma
/// prior.
pub fn mass_conditional(
    prior: GammaPrior,
    kappa: u64,
    n: usize,
    r: f64,
    c: f64,
) -> Result<GammaPrior> {
    if n == 0 {
        return Err(domain("mass_conditional", "needs n ≥ 1"));
    }
    GammaPrior::new(
        prior.shape + kappa as f64,
        prior.rate + c * gap(n as f64 * r, c),
    )
}

/// Slice-sampling updates of `c`, then `r`, targeting
/// `log p(W | r, c, T) + log prior`.
pub fn update_c_r(state: &mut ChainState, slice_width: f64) -> Result<()> {
    let w = state.array();
    if !state.priors.c.is_fixed() {
        let prior = state.priors.c;
        let hp = state.hp.clone();
        let target = |c: f64| {
            if !(c > 0.0 && c.is_finite()) {
                return f64::NEG_INFINITY;
            }
            let mut h = hp.clone();
            h.c = c;
            log_pmf_array(&w, &h).unwrap_or(f64::NEG_INFINITY) + prior.log_pdf(c)
        };
        let c = slice_sample(state.hp.c, target, slice_width, &mut state.rng)?;
        state.hp.set_c(c)?;
    }
    if !state.priors.r.is_fixed() {
        let prior = state.priors.r;
        let hp = state.hp.clone();
        let target = |r: f64| {
            if !(r > 0.0 && r.is_finite()) {
                return f64::NEG_INFINITY;
            }
            let mut h = hp.clone();
            h.r = r;
            log_pmf_array(&w, &h).unwrap_or(f64::NEG_INFINITY) + prior.log_pdf(r)
        };
        let r = slice_sample(state.hp.r, target, slice_width, &mut state.rng)?;
        state.hp.set_r(r)?;
    }
    Ok(())
}

/// Applies a uniformly random permutation to the columns of `W` together
/// with the rows of `Θ`.
pub fn shuffle_columns(state: &mut ChainState) {
    let mut perm: Vec<usize> = (0..state.kappa()).collect();
    perm.shuffle(&mut state.rng);
    let columns = perm.iter().map(|&j| state.columns[j].clone()).collect();
    let theta = perm.iter().map(|&j| state.theta[j].clone()).collect();
    state.columns = columns;
    state.theta = theta;
}

/// One univariate slice-sampling step with stepping out and shrinkage.
///
/// `log_f` must be finite at `x0`. Fails after [`MAX_SLICE_EXPANSIONS`]
/// bracket expansions.
pub fn slice_sample(
    x0: f64,
    mut log_f: impl FnMut(f64) -> f64,
    width: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(domain(
            "slice_sample",
            format!("width must be positive, got {width}"),
        ));
    }
    let f0 = log_f(x0);
    if !f0.is_finite() {
        return Err(Error::Precondition(format!(
            "slice sampler started at {x0} where the target is {f0}"
        )));
    }
    let level = f0 + uniform_open(rng).ln();
    let mut left = x0 - width * uniform_open(rng);
    let mut right = left + width;
    let mut expansions = 0;
    while log_f(left) > level {
        left -= width;
        expansions += 1;
        if expansions > MAX_SLICE_EXPANSIONS {
            return Err(Error::SliceBracket(MAX_SLICE_EXPANSIONS));
        }
    }
    while log_f(right) > level {
        right += width;
        expansions += 1;
        if expansions > MAX_SLICE_EXPANSIONS {
            return Err(Error::SliceBracket(MAX_SLICE_EXPANSIONS));
        }
    }
    for _ in 0..MAX_SLICE_SHRINKS {
        let x1 = left + (right - left) * uniform_open(rng);
        if log_f(x1) > level {
            return Ok(x1);
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    Err(Error::Precondition(format!(
        "slice around {x0} did not yield a point after {MAX_SLICE_SHRINKS} shrinks"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{ConstantLikelihood, HyperPriors, PoissonFactorModel};
    use crate::numerics::quadrature::integrate;
    use crate::structures::{FeatureArray, History, Hyperparams};

    fn h(v: &[u64]) -> History {
        History::new(v.to_vec()).unwrap()
    }

    fn flat(n: usize) -> ConstantLikelihood {
        ConstantLikelihood::new(n, 1, GammaPrior::new(1.0, 1.0).unwrap())
    }

    #[test]
    fn entry_rejects_singletons() {
        let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
        let w = FeatureArray::new(2, vec![h(&[1, 0])]).unwrap();
        let mut s = ChainState::new(
            &w,
            vec![vec![1.0]],
            hp,
            HyperPriors::fixed(),
            RngStream::new(0, 0),
        )
        .unwrap();
        assert!(update_entry(&mut s, &flat(2), 0, 0).is_err());
        assert!(update_entry(&mut s, &flat(2), 1, 0).is_ok());
    }

    #[test]
    fn entry_marginal_under_flat_likelihood() {
        // n = 2, S^{(-i)} = 1, r = c = 1: W_{1,0} ~ BNB(1, 1, 2), p(z) = 4/((z+1)(z+2)(z+3))
        let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
        let w = FeatureArray::new(2, vec![h(&[1, 0])]).unwrap();
        let mut s = ChainState::new(
            &w,
            vec![vec![1.0]],
            hp,
            HyperPriors::fixed(),
            RngStream::new(7, 0),
        )
        .unwrap();
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            assert!(update_entry(&mut s, &flat(2), 1, 0).unwrap());
            let z = s.columns[0][1] as usize;
            counts[z.min(3)] += 1;
        }
        let p = |z: f64| 4.0 / ((z + 1.0) * (z + 2.0) * (z + 3.0));
        let probs = [p(0.0), p(1.0), p(2.0), 1.0 - p(0.0) - p(1.0) - p(2.0)];
        for k in 0..4 {
            let e = probs[k] * draws as f64;
            assert!(
                (counts[k] as f64 - e).abs() < 4.0 * e.sqrt(),
                "{k}: {} vs {e}",
                counts[k]
            );
        }
    }

    #[test]
    fn singleton_count_under_flat_likelihood() {
        // stationary number of singletons of row 0 is Poisson(cT ξ(r, c + (n-1) r))
        let hp = Hyperparams::new(1.0, 1.0, 2.0).unwrap();
        let w = FeatureArray::new(2, vec![h(&[0, 1])]).unwrap();
        let mut s = ChainState::new(
            &w,
            vec![vec![1.0]],
            hp,
            HyperPriors::fixed(),
            RngStream::new(3, 0),
        )
        .unwrap();
        let draws = 50_000;
        let mut total = 0usize;
        for _ in 0..draws {
            assert!(update_singletons(&mut s, &flat(2), 0).unwrap());
            total += (0..s.kappa()).filter(|&j| s.columns[j][1] == 0).count();
            assert_eq!(s.theta.len(), s.kappa());
        }
        let mean = 2.0 * 0.5; // 1 · 2 · (ψ(3) - ψ(2))
        let sd = (mean / draws as f64).sqrt();
        assert!((total as f64 / draws as f64 - mean).abs() < 4.0 * sd);
    }

    #[test]
    fn rejected_proposals_leave_state() {
        let hp = Hyperparams::new(1.0, 1.0, 5.0).unwrap();
        let w = FeatureArray::new(1, vec![]).unwrap();
        let model =
            PoissonFactorModel::new(vec![vec![0]], GammaPrior::new(1.0, 1.0).unwrap()).unwrap();
        let mut s =
            ChainState::new(&w, vec![], hp, HyperPriors::fixed(), RngStream::new(1, 0)).unwrap();
        for _ in 0..200 {
            let before = (s.columns.clone(), s.theta.clone());
            let accepted = update_singletons(&mut s, &model, 0).unwrap();
            if !accepted {
                assert_eq!((s.columns.clone(), s.theta.clone()), before);
            }
        }
    }

    #[test]
    fn mass_conditional_matches_quadrature() {
        let prior = GammaPrior::new(2.0, 1.5).unwrap();
        let (kappa, n, r, c) = (3u64, 4usize, 0.7, 1.9);
        let xi = gap(n as f64 * r, c);
        let post = mass_conditional(prior, kappa, n, r, c).unwrap();
        let unnorm =
            |t: f64| t.powf(prior.shape + kappa as f64 - 1.0) * (-(c * xi + prior.rate) * t).exp();
        let z = integrate(unnorm, 0.0, 200.0, 1e-14, 1e-12).unwrap().value;
        for &t in &[0.1, 1.0, 3.0] {
            assert!((unnorm(t) / z - post.log_pdf(t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn fixed_priors_do_nothing() {
        let hp = Hyperparams::new(1.3, 0.4, 2.0).unwrap();
        let w = FeatureArray::new(1, vec![h(&[2])]).unwrap();
        let mut s = ChainState::new(
            &w,
            vec![vec![1.0]],
            hp.clone(),
            HyperPriors::fixed(),
            RngStream::new(0, 0),
        )
        .unwrap();
        update_mass_t(&mut s, 1.0).unwrap();
        update_c_r(&mut s, 1.0).unwrap();
        assert_eq!(s.hp, hp);
    }

    #[test]
    fn slice_sampler_targets_density() {
        // Gamma(3, 1) target
        let mut rng = RngStream::new(9, 0);
        let target = |x: f64| {
            if x > 0.0 {
                2.0 * x.ln() - x
            } else {
                f64::NEG_INFINITY
            }
        };
        let mut x = 1.0;
        let draws = 100_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            x = slice_sample(x, target, 1.0, &mut rng).unwrap();
            assert!(x > 0.0);
            sum += x;
        }
        assert!((sum / draws as f64 - 3.0).abs() < 0.05);
    }

    #[test]
    fn slice_bracket_cap() {
        let mut rng = RngStream::new(0, 0);
        let err = slice_sample(0.0, |_| 0.0, 1.0, &mut rng).unwrap_err();
        assert_eq!(err, Error::SliceBracket(MAX_SLICE_EXPANSIONS));
    }

    #[test]
    fn shuffle_keeps_pairs() {
        let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
        let cols: Vec<History> = (1..=5).map(|k| h(&[k])).collect();
        let w = FeatureArray::new(1, cols).unwrap();
        let theta = (1..=5).map(|k| vec![k as f64]).collect();
        let mut s =
            ChainState::new(&w, theta, hp, HyperPriors::fixed(), RngStream::new(2, 0)).unwrap();
        shuffle_columns(&mut s);
        for j in 0..5 {
            assert_eq!(s.columns[j][0] as f64, s.theta[j][0]);
        }
    }
}
