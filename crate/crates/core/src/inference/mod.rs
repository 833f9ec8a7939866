//! Posterior inference for feature arrays under the negative binomial Indian
//! buffet prior, with a Poisson factorization likelihood.

mod chain;
mod geweke;
mod kernels;
mod likelihood;
mod priors;
mod state;

pub use chain::{run_chain, run_chain_with, sweep, ChainConfig, ChainRecord};
pub use geweke::{batch_means, geweke_test, iid_mean, GewekeConfig, GewekeReport, GewekeStat};
pub use kernels::{
    mass_conditional, shuffle_columns, slice_sample, update_c_r, update_entry, update_mass_t,
    update_singletons, update_theta, MAX_SLICE_EXPANSIONS,
};
pub use likelihood::{ConstantLikelihood, Likelihood, PoissonFactorModel};
pub use priors::{GammaPrior, HyperPriors, ScalarPrior};
pub use state::{log_joint, ChainState, StateSnapshot};
