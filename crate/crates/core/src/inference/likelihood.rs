use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::priors::GammaPrior;
use crate::distributions::base::poisson;
use crate::error::{Error, Result};
use crate::numerics::{ln_factorial, RngStream};

/// Observation model attached to a feature array.
///
/// Each feature `j` carries a parameter vector `θ_j` of length
/// [`theta_dim`](Likelihood::theta_dim) with an i.i.d. prior. Row `i` of the
/// data depends only on row `i` of the array and on `Θ`, so kernels that
/// change one row need only [`log_lik_row`](Likelihood::log_lik_row).
pub trait Likelihood {
    /// Number of data rows.
    fn rows(&self) -> usize;

    fn theta_dim(&self) -> usize;

    fn log_theta_prior(&self, theta: &[f64]) -> f64;

    fn sample_theta_prior(&self, rng: &mut RngStream) -> Vec<f64>;

    /// Log-likelihood of data row `i` given `row[j] = W_{i,j}` and `theta[j]`.
    fn log_lik_row(&self, i: usize, row: &[u64], theta: &[Vec<f64>]) -> f64;

    /// Draws `Θ` from its full conditional. `columns[j][i] = W_{i,j}`.
    fn gibbs_theta(
        &self,
        columns: &[Vec<u64>],
        theta: &mut [Vec<f64>],
        rng: &mut RngStream,
    ) -> Result<()>;
}

/// A likelihood that ignores the data; the posterior equals the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantLikelihood {
    pub rows: usize,
    /// Length of each `θ_j`; may be zero.
    pub theta_dim: usize,
    pub theta_prior: GammaPrior,
}

impl ConstantLikelihood {
    pub fn new(rows: usize, theta_dim: usize, theta_prior: GammaPrior) -> Self {
        Self {
            rows,
            theta_dim,
            theta_prior,
        }
    }
}

impl Likelihood for ConstantLikelihood {
    fn rows(&self) -> usize {
        self.rows
    }

    fn theta_dim(&self) -> usize {
        self.theta_dim
    }

    fn log_theta_prior(&self, theta: &[f64]) -> f64 {
        theta.iter().map(|&t| self.theta_prior.log_pdf(t)).sum()
    }

    fn sample_theta_prior(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.theta_dim)
            .map(|_| self.theta_prior.sample(rng))
            .collect()
    }

    fn log_lik_row(&self, _i: usize, _row: &[u64], _theta: &[Vec<f64>]) -> f64 {
        0.0
    }

    fn gibbs_theta(
        &self,
        _columns: &[Vec<u64>],
        theta: &mut [Vec<f64>],
        rng: &mut RngStream,
    ) -> Result<()> {
        for t in theta.iter_mut() {
            *t = self.sample_theta_prior(rng);
        }
        Ok(())
    }
}

/// Poisson factorization: `y_{i,v} ~ Poisson(Σ_j W_{i,j} θ_{j,v})` with
/// i.i.d. `Gamma(a, b)` factor loadings `θ_{j,v}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonFactorModel {
    y: Vec<Vec<u64>>,
    theta_prior: GammaPrior,
}

impl PoissonFactorModel {
    /// `y` is an `n × V` matrix, given row by row.
    pub fn new(y: Vec<Vec<u64>>, theta_prior: GammaPrior) -> Result<Self> {
        let v = y.first().map_or(0, Vec::len);
        if y.is_empty() || v == 0 {
            return Err(Error::Precondition(
                "the data matrix needs at least one row and one column".into(),
            ));
        }
        if let Some(i) = y.iter().position(|row| row.len() != v) {
            return Err(Error::Precondition(format!(
                "data row {i} has {} entries, expected {v}",
                y[i].len()
            )));
        }
        Ok(Self { y, theta_prior })
    }

    pub fn data(&self) -> &[Vec<u64>] {
        &self.y
    }

    pub fn columns(&self) -> usize {
        self.y[0].len()
    }

    pub fn theta_prior(&self) -> GammaPrior {
        self.theta_prior
    }

    /// Replaces the data, keeping its shape.
    pub fn with_data(&self, y: Vec<Vec<u64>>) -> Result<Self> {
        if y.len() != self.y.len() || y.iter().any(|row| row.len() != self.columns()) {
            return Err(Error::Precondition(
                "replacement data has a different shape".into(),
            ));
        }
        Ok(Self {
            y,
            theta_prior: self.theta_prior,
        })
    }

    /// Draws `y` given `W` (as columns) and `Θ`.
    pub fn sample_data(
        columns: &[Vec<u64>],
        theta: &[Vec<f64>],
        n: usize,
        v: usize,
        rng: &mut RngStream,
    ) -> Vec<Vec<u64>> {
        (0..n)
            .map(|i| {
                (0..v)
                    .map(|k| {
                        let rate: f64 = columns
                            .iter()
                            .zip(theta)
                            .map(|(col, t)| col[i] as f64 * t[k])
                            .sum();
                        poisson(rate, rng)
                    })
                    .collect()
            })
            .collect()
    }
}

impl Likelihood for PoissonFactorModel {
    fn rows(&self) -> usize {
        self.y.len()
    }

    fn theta_dim(&self) -> usize {
        self.columns()
    }

    fn log_theta_prior(&self, theta: &[f64]) -> f64 {
        theta.iter().map(|&t| self.theta_prior.log_pdf(t)).sum()
    }

    fn sample_theta_prior(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.columns())
            .map(|_| self.theta_prior.sample(rng))
            .collect()
    }

    fn log_lik_row(&self, i: usize, row: &[u64], theta: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for (v, &y) in self.y[i].iter().enumerate() {
            let rate: f64 = row
                .iter()
                .zip(theta)
                .filter(|(&w, _)| w > 0)
                .map(|(&w, t)| w as f64 * t[v])
                .sum();
            if rate > 0.0 {
                total += y as f64 * rate.ln() - rate - ln_factorial(y);
            } else if y > 0 {
                return f64::NEG_INFINITY;
            }
        }
        total
    }

    fn gibbs_theta(
        &self,
        columns: &[Vec<u64>],
        theta: &mut [Vec<f64>],
        rng: &mut RngStream,
    ) -> Result<()> {
        let kappa = columns.len();
        let v_dim = self.columns();
        let mut alloc = vec![vec![0u64; v_dim]; kappa];
        let mut weights = vec![0.0; kappa];
        for (i, y_row) in self.y.iter().enumerate() {
            for (v, &y) in y_row.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let mut total = 0.0;
                for j in 0..kappa {
                    weights[j] = columns[j][i] as f64 * theta[j][v];
                    total += weights[j];
                }
                if !(total > 0.0) {
                    return Err(Error::Precondition(format!(
                        "y[{i}][{v}] = {y} but every feature has zero rate"
                    )));
                }
                // multinomial by sequential conditional binomials
                let mut left = y;
                for j in 0..kappa {
                    if left == 0 {
                        break;
                    }
                    if weights[j] == 0.0 {
                        continue;
                    }
                    let p = (weights[j] / total).min(1.0);
                    let k = if p >= 1.0 {
                        left
                    } else {
                        Binomial::new(left, p).expect("valid binomial").sample(rng)
                    };
                    alloc[j][v] += k;
                    left -= k;
                    total -= weights[j];
                }
                if left > 0 {
                    // rounding left a remainder; give it to the last positive weight
                    let j = (0..kappa).rev().find(|&j| weights[j] > 0.0).unwrap();
                    alloc[j][v] += left;
                }
            }
        }
        let a = self.theta_prior.shape;
        let b = self.theta_prior.rate;
        for j in 0..kappa {
            let exposure: f64 = columns[j].iter().map(|&w| w as f64).sum();
            for v in 0..v_dim {
                let g = GammaPrior::new(a + alloc[j][v] as f64, b + exposure)?;
                theta[j][v] = g.sample(rng);
            }
        }
        Ok(())
    }
}
