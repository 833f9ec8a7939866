use serde::{Deserialize, Serialize};

use crate::distributions::base::{beta_log_odds, nb_from_log_odds, poisson};
use crate::distributions::Digamma;
use crate::error::{domain, Error, Result};
use crate::numerics::RngStream;
use crate::structures::Hyperparams;

/// Where an atom of a base measure comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomSource {
    /// The `i`-th fixed atom of the prior base measure.
    Fixed(usize),
    /// An atom created by the ordinary component, identified by a label.
    Ordinary(u64),
}

/// A fixed atom of a beta process whose weight is `Beta(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorAtom {
    pub source: AtomSource,
    pub alpha: f64,
    pub beta: f64,
}

impl PosteriorAtom {
    /// Concentration at this atom, `alpha + beta`.
    pub fn concentration(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// A beta process with constant concentration on its continuous part and
/// beta-distributed weights at finitely many fixed atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorBase {
    pub atoms: Vec<PosteriorAtom>,
    /// Concentration of the continuous part.
    pub concentration: f64,
    /// Total mass of the continuous part of the base measure.
    pub mass: f64,
}

/// One negative binomial process draw in finitary form: masses at the fixed
/// atoms (aligned with [`PosteriorBase::atoms`]) and the masses of the
/// ordinary atoms in draw order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitaryDraw {
    pub fixed: Vec<u64>,
    pub ordinary: Vec<u64>,
}

impl PosteriorBase {
    /// Mean number of ordinary atoms, `c' T' [ψ(c' + r) - ψ(c')]`.
    pub fn ordinary_rate(&self, r: f64) -> Result<f64> {
        let d = Digamma::new(r, self.concentration)?;
        Ok(self.concentration * self.mass * d.harmonic_gap())
    }

    /// Draws `X ~ NBP(r, B)` with `B` marginalized out: each fixed atom gets a
    /// `BNB(r, alpha, beta)` mass, and a `Poisson` number of ordinary atoms
    /// get i.i.d. `Digamma(r, c')` masses.
    pub fn draw(&self, r: f64, rng: &mut RngStream) -> Result<FinitaryDraw> {
        let mut fixed = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            if !(a.alpha > 0.0 && a.beta > 0.0) {
                return Err(domain(
                    "PosteriorBase::draw",
                    format!(
                        "fixed atom {:?} has Beta({}, {}) weight; both shapes must be positive \
                         (a prior weight of exactly 1 is not supported)",
                        a.source, a.alpha, a.beta
                    ),
                ));
            }
            let log_odds = beta_log_odds(a.alpha, a.beta, rng);
            fixed.push(nb_from_log_odds(r, log_odds, rng));
        }
        let d = Digamma::new(r, self.concentration)?;
        let k = poisson(self.concentration * self.mass * d.harmonic_gap(), rng);
        let ordinary = (0..k).map(|_| d.sample(rng)).collect::<Result<_>>()?;
        Ok(FinitaryDraw { fixed, ordinary })
    }
}

/// Posterior of a beta process after `n` negative binomial process draws whose
/// cumulative masses are `seen`.
///
/// A fixed prior atom with weight `b` and total count `S` becomes
/// `Beta(c b + S, c (1 - b) + n r)`; an ordinary atom with count `S > 0`
/// becomes `Beta(S, c + n r)`. The continuous part keeps concentration
/// `c + n r` and mass `c T / (c + n r)`. Ordinary entries with `S = 0` carry
/// no posterior atom and are ignored.
pub fn posterior_hyper(
    hp: &Hyperparams,
    seen: &[(AtomSource, u64)],
    n: usize,
) -> Result<PosteriorBase> {
    let (r, c) = (hp.r(), hp.c());
    let nr = n as f64 * r;
    let mut fixed_counts = vec![0u64; hp.fixed_atoms().len()];
    let mut ordinary = Vec::new();
    for &(source, s) in seen {
        match source {
            AtomSource::Fixed(i) => {
                let slot = fixed_counts.get_mut(i).ok_or_else(|| {
                    Error::Precondition(format!(
                        "fixed atom {i} referenced but only {} exist",
                        hp.fixed_atoms().len()
                    ))
                })?;
                *slot += s;
            }
            AtomSource::Ordinary(_) if s > 0 => ordinary.push(PosteriorAtom {
                source,
                alpha: s as f64,
                beta: c + nr,
            }),
            AtomSource::Ordinary(_) => {}
        }
    }
    let mut atoms: Vec<PosteriorAtom> = hp
        .fixed_atoms()
        .iter()
        .zip(&fixed_counts)
        .enumerate()
        .map(|(i, (&b, &s))| PosteriorAtom {
            source: AtomSource::Fixed(i),
            alpha: c * b + s as f64,
            beta: c * (1.0 - b) + nr,
        })
        .collect();
    atoms.extend(ordinary);
    Ok(PosteriorBase {
        atoms,
        concentration: c + nr,
        mass: c * hp.mass() / (c + nr),
    })
}

/// A single `NBP(r, B)` draw with `B ~ BP(c, B₀)` marginalized out.
pub fn bnbp_sample_finitary(hp: &Hyperparams, rng: &mut RngStream) -> Result<FinitaryDraw> {
    posterior_hyper(hp, &[], 0)?.draw(hp.r(), rng)
}
