use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::gap;

/// Parameters `(r, c, T)` of a beta negative binomial process, plus optional
/// fixed-atom weights of the base measure.
///
/// `mass` is the total mass `T` of the non-atomic part of the base measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HyperparamsRepr")]
pub struct Hyperparams {
    pub(crate) r: f64,
    pub(crate) c: f64,
    pub(crate) mass: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub(crate) fixed_atoms: Vec<f64>,
}

#[derive(Deserialize)]
struct HyperparamsRepr {
    r: f64,
    c: f64,
    mass: f64,
    #[serde(default)]
    fixed_atoms: Vec<f64>,
}

impl TryFrom<HyperparamsRepr> for Hyperparams {
    type Error = Error;
    fn try_from(v: HyperparamsRepr) -> Result<Self> {
        Hyperparams::new(v.r, v.c, v.mass)?.with_fixed_atoms(v.fixed_atoms)
    }
}

impl Hyperparams {
    pub fn new(r: f64, c: f64, mass: f64) -> Result<Self> {
        require_positive("Hyperparams", "r", r)?;
        require_positive("Hyperparams", "c", c)?;
        require_positive("Hyperparams", "mass", mass)?;
        Ok(Self {
            r,
            c,
            mass,
            fixed_atoms: Vec::new(),
        })
    }

    /// Adds fixed atoms with weights in `(0, 1]`.
    pub fn with_fixed_atoms(mut self, weights: Vec<f64>) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w <= 1.0)) {
            return Err(domain(
                "Hyperparams",
                format!("fixed-atom weights must lie in (0, 1], got {w}"),
            ));
        }
        self.fixed_atoms = weights;
        Ok(self)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn fixed_atoms(&self) -> &[f64] {
        &self.fixed_atoms
    }

    pub fn set_r(&mut self, r: f64) -> Result<()> {
        require_positive("Hyperparams", "r", r)?;
        self.r = r;
        Ok(())
    }

    pub fn set_c(&mut self, c: f64) -> Result<()> {
        require_positive("Hyperparams", "c", c)?;
        self.c = c;
        Ok(())
    }

    pub fn set_mass(&mut self, mass: f64) -> Result<()> {
        require_positive("Hyperparams", "mass", mass)?;
        self.mass = mass;
        Ok(())
    }

    /// Mean number of distinct features among `n` rows:
    /// `cT [ψ(c + nr) - ψ(c)]`.
    pub fn expected_features(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.c * self.mass * gap(n as f64 * self.r, self.c)
    }

    /// Mean number of new features introduced by row `m + 1` after `m` rows:
    /// `cT [ψ(c + (m+1) r) - ψ(c + m r)]`.
    pub fn new_feature_rate(&self, m: usize) -> f64 {
        self.c * self.mass * gap(self.r, self.c + m as f64 * self.r)
    }

    pub(crate) fn require_nonatomic(&self, what: &'static str) -> Result<()> {
        if self.fixed_atoms.is_empty() {
            Ok(())
        } else {
            Err(domain(what, "requires a base measure without fixed atoms"))
        }
    }
}
