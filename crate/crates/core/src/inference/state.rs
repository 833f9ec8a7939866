use serde::{Deserialize, Serialize};

use super::likelihood::Likelihood;
use super::priors::HyperPriors;
use crate::error::{Error, Result};
use crate::generative::nbibp_simulate;
use crate::numerics::RngStream;
use crate::structures::{log_pmf_array, FeatureArray, History, Hyperparams};

/// State of a posterior sampler over `(W, Θ, T, c, r)`.
///
/// `W` is held column-wise (`columns[j][i] = W_{i,j}`) and `theta[j]` is the
/// parameter vector of column `j`; the two always have the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub(crate) n: usize,
    pub(crate) columns: Vec<Vec<u64>>,
    pub(crate) theta: Vec<Vec<f64>>,
    pub(crate) hp: Hyperparams,
    pub(crate) priors: HyperPriors,
    pub(crate) rng: RngStream,
}

/// Serializable snapshot of `(W, Θ, hyperparameters)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub w: FeatureArray,
    pub theta: Vec<Vec<f64>>,
    pub hp: Hyperparams,
}

impl ChainState {
    pub fn new(
        w: &FeatureArray,
        theta: Vec<Vec<f64>>,
        hp: Hyperparams,
        priors: HyperPriors,
        rng: RngStream,
    ) -> Result<Self> {
        hp.require_nonatomic("ChainState")?;
        priors.validate()?;
        if theta.len() != w.kappa() {
            return Err(Error::Precondition(format!(
                "{} parameter rows for {} features",
                theta.len(),
                w.kappa()
            )));
        }
        if theta.iter().flatten().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Precondition(
                "feature parameters must be positive".into(),
            ));
        }
        if let Some(d) = theta.first().map(Vec::len) {
            if theta.iter().any(|t| t.len() != d) {
                return Err(Error::Precondition("ragged feature parameters".into()));
            }
        }
        Ok(Self {
            n: w.n(),
            columns: w.columns().iter().map(|h| h.entries().to_vec()).collect(),
            theta,
            hp,
            priors,
            rng,
        })
    }

    /// Draws `W` from the prior and `Θ` from the model's feature prior.
    pub fn from_prior<L: Likelihood>(
        model: &L,
        hp: Hyperparams,
        priors: HyperPriors,
        mut rng: RngStream,
    ) -> Result<Self> {
        let w = nbibp_simulate(model.rows(), &hp, &mut rng)?;
        let theta = (0..w.kappa())
            .map(|_| model.sample_theta_prior(&mut rng))
            .collect();
        Self::new(&w, theta, hp, priors, rng)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.columns.len()
    }

    pub fn hp(&self) -> &Hyperparams {
        &self.hp
    }

    pub fn priors(&self) -> &HyperPriors {
        &self.priors
    }

    pub fn theta(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn rng(&self) -> &RngStream {
        &self.rng
    }

    pub fn rng_mut(&mut self) -> &mut RngStream {
        &mut self.rng
    }

    /// `Σ_{i,j} W_{i,j}`.
    pub fn total(&self) -> u64 {
        self.columns
            .iter()
            .flatten()
            .fold(0u64, |a, &x| a.saturating_add(x))
    }

    pub fn array(&self) -> FeatureArray {
        let columns = self
            .columns
            .iter()
            .map(|c| History::new(c.clone()).expect("columns are never all zero"))
            .collect();
        FeatureArray::new(self.n, columns).expect("consistent shape")
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            w: self.array(),
            theta: self.theta.clone(),
            hp: self.hp.clone(),
        }
    }

    pub(crate) fn row(&self, i: usize) -> Vec<u64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// `S_j^{(-i)}`: servings of column `j` outside row `i`.
    pub(crate) fn sum_without(&self, j: usize, i: usize) -> u64 {
        self.columns[j]
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(0u64, |a, (_, &x)| a.saturating_add(x))
    }

    pub(crate) fn check_model<L: Likelihood>(&self, model: &L) -> Result<()> {
        if model.rows() != self.n {
            return Err(Error::Precondition(format!(
                "model has {} rows but the state has {}",
                model.rows(),
                self.n
            )));
        }
        if let Some(t) = self.theta.first() {
            if t.len() != model.theta_dim() {
                return Err(Error::Precondition(format!(
                    "feature parameters have length {} but the model expects {}",
                    t.len(),
                    model.theta_dim()
                )));
            }
        }
        Ok(())
    }
}

/// `log p(y | W, Θ) + log p(W) + log p(Θ)`; `-∞` when the data are
/// impossible under the state.
pub fn log_joint<L: Likelihood>(state: &ChainState, model: &L) -> Result<f64> {
    state.check_model(model)?;
    let prior_w = log_pmf_array(&state.array(), &state.hp)?;
    let prior_theta: f64 = state.theta.iter().map(|t| model.log_theta_prior(t)).sum();
    let mut lik = 0.0;
    for i in 0..state.n {
        lik += model.log_lik_row(i, &state.row(i), &state.theta);
        if lik == f64::NEG_INFINITY {
            break;
        }
    }
    Ok(prior_w + prior_theta + lik)
}
