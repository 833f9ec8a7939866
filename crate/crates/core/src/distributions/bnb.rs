use serde::{Deserialize, Serialize};

use super::base::{beta_log_odds, nb_from_log_odds};
use super::series::{sum_log_terms, SeriesSum, DIRECT_TERMS};
use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::{ln_beta, ln_factorial, ln_gamma, ln_gamma_ratio, ln_rising, RngStream};

/// Beta negative binomial law `BNB(r, α, β)`: `Z | p ~ NB(r, p)` with
/// `p ~ Beta(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BnbRepr", into = "BnbRepr")]
pub struct BetaNegativeBinomial {
    r: f64,
    alpha: f64,
    beta: f64,
    ln_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct BnbRepr {
    r: f64,
    alpha: f64,
    beta: f64,
}

impl TryFrom<BnbRepr> for BetaNegativeBinomial {
    type Error = Error;
    fn try_from(v: BnbRepr) -> Result<Self> {
        Self::new(v.r, v.alpha, v.beta)
    }
}

impl From<BetaNegativeBinomial> for BnbRepr {
    fn from(d: BetaNegativeBinomial) -> Self {
        BnbRepr {
            r: d.r,
            alpha: d.alpha,
            beta: d.beta,
        }
    }
}

impl BetaNegativeBinomial {
    pub fn new(r: f64, alpha: f64, beta: f64) -> Result<Self> {
        require_positive("BetaNegativeBinomial", "r", r)?;
        require_positive("BetaNegativeBinomial", "alpha", alpha)?;
        require_positive("BetaNegativeBinomial", "beta", beta)?;
        Ok(Self {
            r,
            alpha,
            beta,
            ln_norm: ln_beta(alpha, beta),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log[(r)_z / z! · B(z+α, r+β) / B(α, β)]`.
    pub fn log_pmf(&self, z: u64) -> f64 {
        ln_rising(self.r, z) - ln_factorial(z) + ln_beta(z as f64 + self.alpha, self.r + self.beta)
            - self.ln_norm
    }

    fn ln_pmf_real(&self, z: f64) -> f64 {
        let tail = self.alpha + self.r + self.beta;
        ln_gamma_ratio(z, self.r, 1.0) - ln_gamma(self.r)
            + ln_gamma_ratio(z, self.alpha, tail)
            + ln_gamma(self.r + self.beta)
            - self.ln_norm
    }

    fn ln_term(&self, z: f64) -> f64 {
        if z < DIRECT_TERMS as f64 && z.fract() == 0.0 {
            self.log_pmf(z as u64)
        } else {
            self.ln_pmf_real(z)
        }
    }

    pub fn total_mass(&self) -> Result<SeriesSum> {
        sum_log_terms(|z| self.ln_term(z), 0, Some(self.beta))
    }

    /// Mean `r α / (β - 1)`, finite only for `β > 1`.
    pub fn mean(&self) -> Result<f64> {
        if self.beta <= 1.0 {
            return Err(domain(
                "BetaNegativeBinomial::mean",
                format!("mean exists only for beta > 1, got {}", self.beta),
            ));
        }
        Ok(self.r * self.alpha / (self.beta - 1.0))
    }

    /// Compositional draw: `p ~ Beta(α, β)`, then `NB(r, p)`.
    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        let log_odds = beta_log_odds(self.alpha, self.beta, rng);
        nb_from_log_odds(self.r, log_odds, rng)
    }
}
