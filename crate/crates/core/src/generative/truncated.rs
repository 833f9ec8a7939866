use serde::{Deserialize, Serialize};

use super::finitary::AtomSource;
use crate::distributions::base::{nb_from_log_odds, poisson, uniform_open};
use crate::distributions::REJECTION_CAP;
use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::quadrature::integrate;
use crate::numerics::RngStream;
use crate::structures::{FeatureArray, History, Hyperparams};

/// An atom of a discrete measure with weight `p ∈ (0, 1)`. The complement
/// `1 - p` is carried separately so weights near one keep full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtom {
    pub weight: f64,
    pub complement: f64,
    pub source: AtomSource,
}

/// A purely atomic measure with weights in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightedAtomMeasure {
    pub atoms: Vec<WeightedAtom>,
}

impl WeightedAtomMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// One `NBP(r, ·)` draw: an independent `NB(r, p)` mass at every atom.
    pub fn sample_counts(&self, r: f64, rng: &mut RngStream) -> Vec<u64> {
        self.atoms
            .iter()
            .map(|a| nb_from_log_odds(r, a.weight.ln() - a.complement.ln(), rng))
            .collect()
    }
}

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-11;

/// The atoms of a beta process `BP(c, B₀)` (non-atomic `B₀` of mass `T`)
/// with weight above `ε`.
///
/// Their number is `Poisson(Λ(ε))`, `Λ(ε) = c T ∫_ε^1 p^{-1} (1-p)^{c-1} dp`,
/// and the weights are i.i.d. from the normalized restricted intensity. The
/// range is split at `max(ε, 1/2)`. Below the split the intensity is
/// integrated in `u = log p`, above it in `v = (1 - p)^c`; in both variables
/// the density is bounded, and weights are drawn exactly by rejection from a
/// uniform proposal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedBetaProcess {
    c: f64,
    epsilon: f64,
    split: f64,
    lower_mass: f64,
    upper_mass: f64,
}

impl TruncatedBetaProcess {
    pub fn new(c: f64, mass: f64, epsilon: f64) -> Result<Self> {
        require_positive("TruncatedBetaProcess", "c", c)?;
        require_positive("TruncatedBetaProcess", "mass", mass)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(domain(
                "TruncatedBetaProcess",
                format!("epsilon must lie in (0, 1), got {epsilon}"),
            ));
        }
        let split = epsilon.max(0.5);
        let lower_mass = if epsilon < split {
            let q = integrate(
                |u: f64| ((c - 1.0) * (-u.exp()).ln_1p()).exp(),
                epsilon.ln(),
                split.ln(),
                QUAD_ABS,
                QUAD_REL,
            )?;
            c * mass * q.value
        } else {
            0.0
        };
        let v_max = (1.0 - split).powf(c);
        let upper_mass = if v_max > 0.0 {
            let q = integrate(
                |v: f64| {
                    if v <= 0.0 {
                        return 1.0;
                    }
                    1.0 / -(v.ln() / c).exp_m1()
                },
                0.0,
                v_max,
                QUAD_ABS,
                QUAD_REL,
            )?;
            mass * q.value
        } else {
            0.0
        };
        Ok(Self {
            c,
            epsilon,
            split,
            lower_mass,
            upper_mass,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `Λ(ε)`, the expected number of atoms.
    pub fn intensity_mass(&self) -> f64 {
        self.lower_mass + self.upper_mass
    }

    /// One weight from the normalized restricted intensity.
    pub fn sample_weight(&self, rng: &mut RngStream) -> Result<(f64, f64)> {
        let total = self.intensity_mass();
        if uniform_open(rng) * total <= self.lower_mass {
            self.sample_lower(rng)
        } else {
            self.sample_upper(rng)
        }
    }

    fn sample_lower(&self, rng: &mut RngStream) -> Result<(f64, f64)> {
        let (a, b) = (self.epsilon.ln(), self.split.ln());
        let g = |u: f64| (self.c - 1.0) * (-u.exp()).ln_1p();
        let ln_max = g(a).max(g(b));
        for _ in 0..REJECTION_CAP {
            let u = a + (b - a) * uniform_open(rng);
            if uniform_open(rng).ln() <= g(u) - ln_max {
                return Ok((u.exp(), -u.exp_m1()));
            }
        }
        Err(Error::IterationCap {
            sampler: "truncated beta process weight",
            cap: REJECTION_CAP,
        })
    }

    fn sample_upper(&self, rng: &mut RngStream) -> Result<(f64, f64)> {
        let ln_v_max = self.c * (1.0 - self.split).ln();
        for _ in 0..REJECTION_CAP {
            let ln_v = ln_v_max + uniform_open(rng).ln();
            let q = (ln_v / self.c).exp();
            let p = -(ln_v / self.c).exp_m1();
            if p > 0.0 && uniform_open(rng) * p <= self.split {
                return Ok((p, q));
            }
        }
        Err(Error::IterationCap {
            sampler: "truncated beta process weight",
            cap: REJECTION_CAP,
        })
    }

    /// All atoms with weight above `ε`, labeled `0, 1, …` in draw order.
    pub fn sample(&self, rng: &mut RngStream) -> Result<WeightedAtomMeasure> {
        let k = poisson(self.intensity_mass(), rng);
        let atoms = (0..k)
            .map(|id| {
                self.sample_weight(rng)
                    .map(|(weight, complement)| WeightedAtom {
                        weight,
                        complement,
                        source: AtomSource::Ordinary(id),
                    })
            })
            .collect::<Result<_>>()?;
        Ok(WeightedAtomMeasure { atoms })
    }
}

/// Simulates `n` rows by drawing the beta process truncated to weights above
/// `ε`, then `n` conditionally independent negative binomial processes.
/// All-zero columns are dropped.
///
/// The result differs in law from [`super::nbibp_simulate`] only through the
/// atoms below `ε`, which contribute about `c T n r ε` features on average.
pub fn truncated_oracle_simulate(
    n: usize,
    hp: &Hyperparams,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<FeatureArray> {
    hp.require_nonatomic("truncated_oracle_simulate")?;
    if n == 0 {
        return Err(Error::Precondition("simulation needs n ≥ 1 rows".into()));
    }
    let process = TruncatedBetaProcess::new(hp.c(), hp.mass(), epsilon)?;
    let measure = process.sample(rng)?;
    let mut columns: Vec<Vec<u64>> = vec![Vec::with_capacity(n); measure.len()];
    for _ in 0..n {
        for (col, z) in columns.iter_mut().zip(measure.sample_counts(hp.r(), rng)) {
            col.push(z);
        }
    }
    let columns = columns
        .into_iter()
        .filter_map(|col| History::new(col).ok())
        .collect();
    FeatureArray::new(n, columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levy_mass_direct(c: f64, mass: f64, eps: f64) -> f64 {
        // brute-force midpoint rule in p on a log grid, for c ≥ 1
        let steps = 400_000;
        let (a, b) = (eps.ln(), 0.0f64);
        let h = (b - a) / steps as f64;
        (0..steps)
            .map(|i| {
                let u = a + (i as f64 + 0.5) * h;
                let p = u.exp();
                (1.0 - p).powf(c - 1.0) * h
            })
            .sum::<f64>()
            * c
            * mass
    }

    #[test]
    fn half_threshold_closed_form() {
        let b = TruncatedBetaProcess::new(1.0, 1.0, 0.5).unwrap();
        assert!((b.intensity_mass() - 2f64.ln()).abs() < 1e-12);
        let b = TruncatedBetaProcess::new(1.0, 3.0, 1e-4).unwrap();
        assert!((b.intensity_mass() - 3.0 * 1e4f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn closed_form_at_c_two() {
        // ∫_ε^1 2 (1-p)/p dp = 2(-ln ε - 1 + ε)
        let eps = 1e-3;
        let b = TruncatedBetaProcess::new(2.0, 1.0, eps).unwrap();
        let expect = 2.0 * (-eps.ln() - 1.0 + eps);
        assert!((b.intensity_mass() - expect).abs() < 1e-10);
        let d = levy_mass_direct(3.5, 0.7, eps);
        let b = TruncatedBetaProcess::new(3.5, 0.7, eps).unwrap();
        assert!((b.intensity_mass() - d).abs() < 1e-6 * d);
    }

    #[test]
    fn small_concentration_mass() {
        // c = 1/2: ∫_ε^1 p^{-1} (1-p)^{-1/2} dp = 2 artanh(√(1-ε))
        let eps = 1e-3;
        let b = TruncatedBetaProcess::new(0.5, 1.0, eps).unwrap();
        let expect = 0.5 * 2.0 * (1.0 - eps).sqrt().atanh();
        assert!((b.intensity_mass() - expect).abs() < 1e-9);
    }

    #[test]
    fn weight_distribution_matches_cdf() {
        // at c = 1 the restricted weight law has CDF ln(p/ε) / ln(1/ε)
        let eps = 1e-2;
        let b = TruncatedBetaProcess::new(1.0, 1.0, eps).unwrap();
        let mut rng = RngStream::new(4, 0);
        let draws = 100_000;
        let probe = [0.03, 0.1, 0.3, 0.6, 0.9];
        let mut below = [0usize; 5];
        for _ in 0..draws {
            let (p, q) = b.sample_weight(&mut rng).unwrap();
            assert!(p > eps && p < 1.0 && (p + q - 1.0).abs() < 1e-12);
            for (k, &x) in probe.iter().enumerate() {
                below[k] += (p <= x) as usize;
            }
        }
        for (k, &x) in probe.iter().enumerate() {
            let f = (x / eps).ln() / (1.0 / eps).ln();
            let sd = (f * (1.0 - f) / draws as f64).sqrt();
            let emp = below[k] as f64 / draws as f64;
            assert!((emp - f).abs() < 4.0 * sd, "p ≤ {x}: {emp} vs {f}");
        }
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(TruncatedBetaProcess::new(1.0, 1.0, 0.0).is_err());
        assert!(TruncatedBetaProcess::new(1.0, 1.0, 1.0).is_err());
        let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(truncated_oracle_simulate(2, &hp, 1.5, &mut rng).is_err());
    }

    #[test]
    fn empty_draws_give_empty_arrays() {
        let hp = Hyperparams::new(1.0, 1.0, 1e-9).unwrap();
        let mut rng = RngStream::new(0, 0);
        let w = truncated_oracle_simulate(3, &hp, 0.5, &mut rng).unwrap();
        assert_eq!(w.kappa(), 0);
        assert_eq!(w.n(), 3);
    }
}
