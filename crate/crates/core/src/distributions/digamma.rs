use serde::{Deserialize, Serialize};

use super::base::{beta_log_odds, nb_from_log_odds, uniform_open};
use super::series::{sum_log_terms, SeriesSum, DIRECT_TERMS};
use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::{gap, ln_gamma, ln_gamma_ratio, ln_rising, RngStream};

/// Iteration cap of the rejection sampler. The expected number of rounds is
/// below `max(r, 1/r)`, so hitting the cap indicates a faulty random stream.
pub const REJECTION_CAP: u64 = 10_000_000;

/// The digamma distribution on `{1, 2, ...}` with p.m.f.
/// `(r)_z / ((r+θ)_z z) / (ψ(r+θ) - ψ(θ))`.
///
/// It is the law of the atom masses of the ordinary component of a beta
/// negative binomial process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DigammaRepr", into = "DigammaRepr")]
pub struct Digamma {
    r: f64,
    theta: f64,
    gap: f64,
}

#[derive(Serialize, Deserialize)]
struct DigammaRepr {
    r: f64,
    theta: f64,
}

impl TryFrom<DigammaRepr> for Digamma {
    type Error = Error;
    fn try_from(v: DigammaRepr) -> Result<Self> {
        Digamma::new(v.r, v.theta)
    }
}

impl From<Digamma> for DigammaRepr {
    fn from(d: Digamma) -> Self {
        DigammaRepr {
            r: d.r,
            theta: d.theta,
        }
    }
}

/// The two evaluations of the Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceRoutes {
    /// `Σ_z e^{-tz} pmf(z)`.
    pub series: f64,
    /// `1 - ξ^{-1} ∫ [1 - ((1-p)/(1-p e^{-t}))^r] p^{-1} (1-p)^{θ-1} dp`.
    pub integral: f64,
}

impl Digamma {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        require_positive("Digamma", "r", r)?;
        require_positive("Digamma", "theta", theta)?;
        Ok(Self {
            r,
            theta,
            gap: gap(r, theta),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `ξ = ψ(r+θ) - ψ(θ)`.
    pub fn harmonic_gap(&self) -> f64 {
        self.gap
    }

    pub fn log_pmf(&self, z: u64) -> Result<f64> {
        if z < 1 {
            return Err(domain("Digamma::log_pmf", "support starts at 1"));
        }
        Ok(self.ln_pmf(z))
    }

    pub(crate) fn ln_pmf(&self, z: u64) -> f64 {
        ln_rising(self.r, z) - ln_rising(self.r + self.theta, z) - (z as f64).ln() - self.gap.ln()
    }

    /// Log p.m.f. extended to real `z ≥ 1` through gamma functions.
    fn ln_pmf_real(&self, z: f64) -> f64 {
        let rt = self.r + self.theta;
        ln_gamma_ratio(z, self.r, rt) - ln_gamma(self.r) + ln_gamma(rt) - z.ln() - self.gap.ln()
    }

    fn ln_term(&self, z: f64) -> f64 {
        if z < DIRECT_TERMS as f64 + 1.0 && z.fract() == 0.0 {
            self.ln_pmf(z as u64)
        } else {
            self.ln_pmf_real(z)
        }
    }

    /// Total mass, summed directly with an Euler–Maclaurin tail.
    pub fn total_mass(&self) -> Result<SeriesSum> {
        sum_log_terms(|z| self.ln_term(z), 1, Some(self.theta))
    }

    /// Mean `r / ((θ - 1) ξ)`, finite only for `θ > 1`.
    pub fn mean(&self) -> Result<f64> {
        if self.theta <= 1.0 {
            return Err(domain(
                "Digamma::mean",
                format!("mean exists only for theta > 1, got {}", self.theta),
            ));
        }
        Ok(self.r / ((self.theta - 1.0) * self.gap))
    }

    /// Expected number of proposal rounds of [`Digamma::sample`]:
    /// `max(r, 1) / (θ ξ)`.
    pub fn expected_rounds(&self) -> f64 {
        self.r.max(1.0) / (self.theta * self.gap)
    }

    /// Exact draw by rejection from `BNB(r, 1, θ)` proposals.
    pub fn sample(&self, rng: &mut RngStream) -> Result<u64> {
        self.sample_counted(rng).map(|(z, _)| z)
    }

    /// Draw together with the number of proposal rounds used.
    pub fn sample_counted(&self, rng: &mut RngStream) -> Result<(u64, u64)> {
        let bound = self.r.max(1.0);
        for round in 1..=REJECTION_CAP {
            let log_odds = beta_log_odds(1.0, self.theta, rng);
            let y = nb_from_log_odds(self.r, log_odds, rng);
            let yf = y as f64;
            if bound * uniform_open(rng) < (yf + self.r) / (yf + 1.0) {
                return Ok((y.saturating_add(1), round));
            }
        }
        Err(Error::IterationCap {
            sampler: "digamma rejection sampler",
            cap: REJECTION_CAP,
        })
    }

    /// Laplace transform `E[e^{-tZ}]`, from the p.m.f. series.
    pub fn laplace(&self, t: f64) -> Result<f64> {
        self.laplace_series(t)
    }

    fn laplace_series(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain(
                "Digamma::laplace",
                format!("argument must be non-negative, got {t}"),
            ));
        }
        Ok(sum_log_terms(|z| self.ln_term(z) - t * z, 1, Some(self.theta))?.total())
    }

    /// Laplace transform by both the p.m.f. series and the integral
    /// representation; each route checks the other.
    pub fn laplace_routes(&self, t: f64) -> Result<LaplaceRoutes> {
        let series = self.laplace_series(t)?;
        let (r, theta) = (self.r, self.theta);
        let m = -(-t).exp_m1();
        // Substituting v = (1-p)^θ turns p^{-1}(1-p)^{θ-1} dp into θ^{-1} p^{-1} dv.
        let q = integrate(
            |v: f64| {
                // ln(1-p) = ln(v)/θ
                let lv = v.ln() / theta;
                let p = -lv.exp_m1();
                if p <= 0.0 {
                    return r * m;
                }
                // 1 - p e^{-t} = (1 - p) + p (1 - e^{-t})
                let ln_ratio = lv - (lv.exp() + p * m).ln();
                -(r * ln_ratio).exp_m1() / p
            },
            0.0,
            1.0,
            1e-15,
            1e-13,
        )?;
        let integral = 1.0 - q.value / (theta * self.gap);
        Ok(LaplaceRoutes { series, integral })
    }
}
