//! Log-space special functions.
//!
//! The digamma function uses the argument-shift recurrence
//! `ψ(x) = ψ(x + 1) - 1/x` to push the argument above [`ASYMPTOTIC_MIN`], then
//! the asymptotic (Stirling-type) series. With the cut-off at 10 the first
//! neglected series term is below 1e-16, so the absolute error is dominated by
//! the recurrence sum.

use crate::error::{domain, Result};

const ASYMPTOTIC_MIN: f64 = 10.0;

/// `B_{2k} / (2k)` for k = 1..=7.
const BERNOULLI_OVER_2K: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Number of factors below which rising factorials are summed term by term.
const RISING_DIRECT_MAX: u64 = 64;

/// `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(
            "digamma",
            format!("argument must be positive, got {x}"),
        ));
    }
    Ok(psi(x))
}

/// Unchecked digamma; callers guarantee `x > 0`.
pub(crate) fn psi(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    while x < ASYMPTOTIC_MIN {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Horner over the series in 1/x^2.
    let mut series = 0.0;
    for c in BERNOULLI_OVER_2K.iter().rev() {
        series = (series + c) * inv2;
    }
    shift + x.ln() - 0.5 / x - series
}

/// `ξ(r, θ) = ψ(θ + r) - ψ(θ)`, computed without cancellation.
///
/// Both arguments are shifted together so that only the difference of the
/// asymptotic series is ever formed; the result keeps full relative accuracy
/// even when `r` is tiny compared with `θ`.
pub fn harmonic_gap(r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0 && theta > 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(domain(
            "harmonic_gap",
            format!("arguments must be positive, got r={r}, theta={theta}"),
        ));
    }
    Ok(gap(r, theta))
}

pub(crate) fn gap(r: f64, theta: f64) -> f64 {
    let mut acc = 0.0;
    let mut x = theta;
    while x < ASYMPTOTIC_MIN {
        acc += r / (x * (x + r));
        x += 1.0;
    }
    let log_ratio = (r / x).ln_1p();
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut power = 1.0;
    for (k, c) in BERNOULLI_OVER_2K.iter().enumerate() {
        power *= inv2;
        let m = 2.0 * (k as f64 + 1.0);
        series += c * power * (-m * log_ratio).exp_m1();
    }
    acc + log_ratio + r / (2.0 * x * (x + r)) - series
}

/// Natural log of the gamma function for positive arguments.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `log Γ(z+a) - log Γ(z+b)`, stable for large `z`.
///
/// Far from the origin the two log-gammas agree to many digits and their
/// difference is taken from the asymptotic expansion in Bernoulli
/// polynomials instead.
pub(crate) fn ln_gamma_ratio(z: f64, a: f64, b: f64) -> f64 {
    if z < 1e4 * (1.0 + a.max(b)) {
        return ln_gamma(z + a) - ln_gamma(z + b);
    }
    let b2 = |x: f64| x * x - x + 1.0 / 6.0;
    let b3 = |x: f64| x * (x * (x - 1.5) + 0.5);
    let b4 = |x: f64| x * x * (x * (x - 2.0) + 1.0) - 1.0 / 30.0;
    let inv = 1.0 / z;
    (a - b) * z.ln()
        + inv
            * ((b2(a) - b2(b)) / 2.0
                + inv * (-(b3(a) - b3(b)) / 6.0 + inv * (b4(a) - b4(b)) / 12.0))
}

/// `log n!`.
#[inline]
pub fn ln_factorial(n: u64) -> f64 {
    match n {
        0 | 1 => 0.0,
        _ => libm::lgamma(n as f64 + 1.0),
    }
}

/// `log (a)_n` where `(a)_n = a (a+1) ... (a+n-1)` and `(a)_0 = 1`.
pub fn log_rising_factorial(a: f64, n: u64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(
            "log_rising_factorial",
            format!("base must be positive, got {a}"),
        ));
    }
    Ok(ln_rising(a, n))
}

pub(crate) fn ln_rising(a: f64, n: u64) -> f64 {
    if n < RISING_DIRECT_MAX {
        let mut acc = 0.0;
        for k in 0..n {
            acc += (a + k as f64).ln();
        }
        acc
    } else {
        ln_gamma(a + n as f64) - ln_gamma(a)
    }
}

/// `log B(a, b)`.
pub fn log_beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(
            "log_beta_fn",
            format!("arguments must be positive, got a={a}, b={b}"),
        ));
    }
    Ok(ln_beta(a, b))
}

#[inline]
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}
