//! Summation of p.m.f.-like series over `{start, start+1, ...}`.
//!
//! Terms are summed directly until they are negligible. The digamma and beta
//! negative binomial laws have power-law tails (`z^{-1-θ}`), where a direct
//! sum cannot reach 1e-10 accuracy; for those the remainder after
//! [`DIRECT_TERMS`] terms is evaluated by the Euler–Maclaurin formula
//! `Σ_{k≥Z} f(k) = ∫_Z^∞ f + f(Z)/2 - f'(Z)/12 + O(f'''(Z))`, with the
//! integral done by quadrature after a change of variables that flattens
//! the power-law decay.

use crate::error::Result;
use crate::numerics::quadrature::integrate;
use crate::numerics::CompensatedSum;

pub(crate) const DIRECT_TERMS: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    /// Directly summed part.
    pub head: f64,
    /// Euler–Maclaurin estimate of the remainder (zero when the direct sum
    /// converged).
    pub tail: f64,
    /// Number of directly summed terms.
    pub terms: u64,
}

impl SeriesSum {
    pub fn total(&self) -> f64 {
        self.head + self.tail
    }
}

/// Sums `exp(log_term(z))` for integer `z ≥ start`.
///
/// `log_term` must be smooth on the reals beyond the direct-sum range.
/// `tail_exponent = Some(a)` declares a tail decaying like `z^{-1-a}`.
pub(crate) fn sum_log_terms<F: Fn(f64) -> f64>(
    log_term: F,
    start: u64,
    tail_exponent: Option<f64>,
) -> Result<SeriesSum> {
    let mut head = CompensatedSum::new();
    let end = start + DIRECT_TERMS;
    let mut z = start;
    while z < end {
        let t = log_term(z as f64).exp();
        head.add(t);
        let h = head.value();
        if z > start + 8 && t <= 1e-18 * h && (z as f64) * t <= 1e-18 * h {
            return Ok(SeriesSum {
                head: h,
                tail: 0.0,
                terms: z - start + 1,
            });
        }
        z += 1;
    }
    let tail = euler_maclaurin_tail(&log_term, end as f64, tail_exponent)?;
    Ok(SeriesSum {
        head: head.value(),
        tail,
        terms: DIRECT_TERMS,
    })
}

fn euler_maclaurin_tail<F: Fn(f64) -> f64>(
    log_term: &F,
    from: f64,
    tail_exponent: Option<f64>,
) -> Result<f64> {
    let f = |x: f64| log_term(x).exp();
    let integral = match tail_exponent {
        Some(a) => {
            // x = Z u^{-1/a}, dx = (Z/a) u^{-1/a-1} du
            let ln_scale = (from / a).ln();
            integrate(
                |u: f64| {
                    let x = from * u.powf(-1.0 / a);
                    if !x.is_finite() || x > 1e300 {
                        return 0.0;
                    }
                    let v = (log_term(x) + ln_scale - (1.0 / a + 1.0) * u.ln()).exp();
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                1e-14,
                1e-10,
            )?
            .value
        }
        None => {
            // x = Z / u, dx = Z / u^2 du
            integrate(
                |u: f64| {
                    let x = from / u;
                    if !x.is_finite() || x > 1e300 {
                        return 0.0;
                    }
                    let v = (log_term(x) + from.ln() - 2.0 * u.ln()).exp();
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                1e-14,
                1e-10,
            )?
            .value
        }
    };
    let h = 0.5;
    let derivative = (f(from + h) - f(from - h)) / (2.0 * h);
    Ok(integral + 0.5 * f(from) - derivative / 12.0)
}
