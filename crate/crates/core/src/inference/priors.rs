use serde::{Deserialize, Serialize};

use crate::distributions::base::gamma_variate;
use crate::error::{domain, require_positive, Result};
use crate::numerics::{ln_gamma, RngStream};

/// `Gamma(shape, rate)` with mean `shape / rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        require_positive("GammaPrior", "shape", shape)?;
        require_positive("GammaPrior", "rate", rate)?;
        Ok(Self { shape, rate })
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        gamma_variate(self.shape, self.rate, rng).expect("validated parameters")
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }
}

/// Prior on a positive scalar hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarPrior {
    /// Point mass at the current value; the parameter is never updated.
    Fixed,
    Gamma {
        shape: f64,
        rate: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
}

impl Default for ScalarPrior {
    fn default() -> Self {
        ScalarPrior::Gamma {
            shape: 1.0,
            rate: 1.0,
        }
    }
}

impl ScalarPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarPrior::Fixed => Ok(()),
            ScalarPrior::Gamma { shape, rate } => GammaPrior::new(shape, rate).map(|_| ()),
            ScalarPrior::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(domain(
                        "ScalarPrior",
                        format!("mu must be finite, got {mu}"),
                    ));
                }
                require_positive("ScalarPrior", "sigma", sigma)
            }
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ScalarPrior::Fixed)
    }

    /// Log density on `(0, ∞)`; `-∞` outside. Zero for `Fixed`.
    pub fn log_pdf(&self, x: f64) -> f64 {
        match *self {
            ScalarPrior::Fixed => 0.0,
            ScalarPrior::Gamma { shape, rate } => GammaPrior { shape, rate }.log_pdf(x),
            ScalarPrior::LogNormal { mu, sigma } => {
                if !(x > 0.0) {
                    return f64::NEG_INFINITY;
                }
                let z = (x.ln() - mu) / sigma;
                -0.5 * z * z - x.ln() - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
        }
    }

    /// A prior draw, or `current` for `Fixed`.
    pub fn sample(&self, current: f64, rng: &mut RngStream) -> f64 {
        match *self {
            ScalarPrior::Fixed => current,
            ScalarPrior::Gamma { shape, rate } => GammaPrior { shape, rate }.sample(rng),
            ScalarPrior::LogNormal { mu, sigma } => {
                let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
                (mu + sigma * z).exp()
            }
        }
    }
}

/// Priors on `(T, c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HyperPriors {
    pub mass: ScalarPrior,
    pub c: ScalarPrior,
    pub r: ScalarPrior,
}

impl HyperPriors {
    /// All three hyperparameters held fixed.
    pub fn fixed() -> Self {
        Self {
            mass: ScalarPrior::Fixed,
            c: ScalarPrior::Fixed,
            r: ScalarPrior::Fixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mass.validate()?;
        self.c.validate()?;
        self.r.validate()
    }
}
