//! Simulators for exchangeable sequences of negative binomial processes
//! sharing a beta process base measure.

mod finitary;
mod restaurant;
mod truncated;

pub use finitary::{
    bnbp_sample_finitary, posterior_hyper, AtomSource, FinitaryDraw, PosteriorAtom, PosteriorBase,
};
pub use restaurant::{nbibp_simulate, predictive_step, DishState, Restaurant};
pub use truncated::{
    truncated_oracle_simulate, TruncatedBetaProcess, WeightedAtom, WeightedAtomMeasure,
};
