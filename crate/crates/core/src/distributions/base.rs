//! Exact gamma, beta and Poisson variates on an [`RngStream`].
//!
//! These wrap `rand_distr` (Marsaglia–Tsang gamma, PTRS/Knuth Poisson). Beta
//! variates are formed from two gamma variates in log space so that odds
//! `p / (1 - p)` never suffer cancellation when `p` is close to one.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::error::{require_positive, Result};
use crate::numerics::RngStream;

/// Above this rate a Poisson variate is returned as its (rounded) mean; the
/// relative standard deviation there is below 1e-8.
const POISSON_SATURATION: f64 = 1e16;

/// Uniform variate on `(0, 1]`.
#[inline]
pub fn uniform_open(rng: &mut RngStream) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Log of a `Gamma(shape, 1)` variate.
///
/// Small shapes use `G(a) = G(a + 1) U^{1/a}` so the result never underflows.
pub fn ln_gamma_variate(shape: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(shape > 0.0);
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("validated shape");
        g.sample(rng).ln()
    } else {
        let g = Gamma::new(shape + 1.0, 1.0).expect("validated shape");
        g.sample(rng).ln() + uniform_open(rng).ln() / shape
    }
}

/// `Gamma(shape, rate)` variate (mean `shape / rate`).
pub fn gamma_variate(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    require_positive("gamma_variate", "shape", shape)?;
    require_positive("gamma_variate", "rate", rate)?;
    Ok((ln_gamma_variate(shape, rng) - rate.ln()).exp())
}

/// A `Beta(a, b)` variate as the pair `(p, 1 - p)`, each computed without
/// subtraction.
pub fn beta_variate(a: f64, b: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    require_positive("beta_variate", "a", a)?;
    require_positive("beta_variate", "b", b)?;
    let log_odds = ln_gamma_variate(a, rng) - ln_gamma_variate(b, rng);
    Ok(odds_to_pair(log_odds))
}

pub(crate) fn beta_log_odds(a: f64, b: f64, rng: &mut RngStream) -> f64 {
    ln_gamma_variate(a, rng) - ln_gamma_variate(b, rng)
}

fn odds_to_pair(log_odds: f64) -> (f64, f64) {
    // p = 1/(1+e^{-l}), 1-p = 1/(1+e^{l})
    (
        1.0 / (1.0 + (-log_odds).exp()),
        1.0 / (1.0 + log_odds.exp()),
    )
}

/// `Poisson(lambda)` variate; `lambda = 0` yields 0.
pub fn poisson_variate(lambda: f64, rng: &mut RngStream) -> Result<u64> {
    if !(lambda >= 0.0) {
        return Err(crate::error::domain(
            "poisson_variate",
            format!("rate must be non-negative, got {lambda}"),
        ));
    }
    Ok(poisson(lambda, rng))
}

pub(crate) fn poisson(lambda: f64, rng: &mut RngStream) -> u64 {
    if lambda <= 0.0 {
        0
    } else if lambda >= POISSON_SATURATION {
        // f64 -> u64 casts saturate, so an infinite rate maps to u64::MAX.
        lambda.round() as u64
    } else {
        let p = Poisson::new(lambda).expect("rate in range");
        p.sample(rng) as u64
    }
}

/// Negative binomial variate with the given log odds `log(p / (1 - p))`,
/// via the gamma–Poisson mixture.
pub(crate) fn nb_from_log_odds(r: f64, log_odds: f64, rng: &mut RngStream) -> u64 {
    let ln_rate = ln_gamma_variate(r, rng) + log_odds;
    poisson(ln_rate.exp(), rng)
}
