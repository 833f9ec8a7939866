use serde::{Deserialize, Serialize};

use super::base::nb_from_log_odds;
use super::series::{sum_log_terms, SeriesSum};
use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::{ln_factorial, ln_gamma, ln_gamma_ratio, ln_rising, RngStream};

/// Negative binomial law `NB(r, p)` with p.m.f. `(r)_z / z! p^z (1-p)^r`.
///
/// `p = 1` is a valid parameter (it appears in measure-level statements) but
/// the law is then improper: p.m.f. evaluation, sampling and moments reject it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NbRepr", into = "NbRepr")]
pub struct NegativeBinomial {
    r: f64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct NbRepr {
    r: f64,
    p: f64,
}

impl TryFrom<NbRepr> for NegativeBinomial {
    type Error = Error;
    fn try_from(v: NbRepr) -> Result<Self> {
        Self::new(v.r, v.p)
    }
}

impl From<NegativeBinomial> for NbRepr {
    fn from(d: NegativeBinomial) -> Self {
        NbRepr { r: d.r, p: d.p }
    }
}

impl NegativeBinomial {
    pub fn new(r: f64, p: f64) -> Result<Self> {
        require_positive("NegativeBinomial", "r", r)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain(
                "NegativeBinomial",
                format!("p must lie in (0, 1], got {p}"),
            ));
        }
        Ok(Self { r, p })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn proper(&self, what: &'static str) -> Result<()> {
        if self.p < 1.0 {
            Ok(())
        } else {
            Err(domain(what, "p = 1 puts all mass at infinity"))
        }
    }

    pub fn log_pmf(&self, z: u64) -> Result<f64> {
        self.proper("NegativeBinomial::log_pmf")?;
        Ok(ln_rising(self.r, z) - ln_factorial(z)
            + z as f64 * self.p.ln()
            + self.r * (-self.p).ln_1p())
    }

    pub fn total_mass(&self) -> Result<SeriesSum> {
        self.proper("NegativeBinomial::total_mass")?;
        let (r, lp, lq) = (self.r, self.p.ln(), (-self.p).ln_1p());
        sum_log_terms(
            |z| ln_gamma_ratio(z, r, 1.0) - ln_gamma(r) + z * lp + r * lq,
            0,
            None,
        )
    }

    pub fn mean(&self) -> Result<f64> {
        self.proper("NegativeBinomial::mean")?;
        Ok(self.r * self.p / (1.0 - self.p))
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<u64> {
        self.proper("NegativeBinomial::sample")?;
        let log_odds = self.p.ln() - (-self.p).ln_1p();
        Ok(nb_from_log_odds(self.r, log_odds, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_case() {
        let d = NegativeBinomial::new(1.0, 0.5).unwrap();
        assert!((d.log_pmf(2).unwrap().exp() - 0.125).abs() < 1e-15);
        for z in 0..30u64 {
            let expect = (z as f64 + 1.0) * 0.5f64.ln();
            assert!((d.log_pmf(z).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_mass() {
        let d = NegativeBinomial::new(3.2, 0.3).unwrap();
        assert!((d.log_pmf(0).unwrap() - 3.2 * 0.7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn normalization() {
        for &r in &[0.2, 1.0, 6.0] {
            for &p in &[0.01, 0.5, 0.97] {
                let m = NegativeBinomial::new(r, p)
                    .unwrap()
                    .total_mass()
                    .unwrap()
                    .total();
                assert!((m - 1.0).abs() < 1e-10, "r={r} p={p}: {m}");
            }
        }
    }

    #[test]
    fn p_one_is_rejected_for_evaluation() {
        let d = NegativeBinomial::new(2.0, 1.0).unwrap();
        assert!(d.log_pmf(0).is_err());
        assert!(d.mean().is_err());
        let mut rng = RngStream::new(0, 0);
        assert!(d.sample(&mut rng).is_err());
        assert!(NegativeBinomial::new(2.0, 0.0).is_err());
        assert!(NegativeBinomial::new(2.0, 1.5).is_err());
    }

    #[test]
    fn sample_mean() {
        let d = NegativeBinomial::new(2.5, 0.4).unwrap();
        let mut rng = RngStream::new(8, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng).unwrap() as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = 2.5 * 0.4 / 0.36;
        assert!((m - d.mean().unwrap()).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
