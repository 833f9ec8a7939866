//! Digamma, beta negative binomial and negative binomial laws.

pub mod base;
mod bnb;
mod digamma;
mod nb;
mod series;

pub use bnb::BetaNegativeBinomial;
pub use digamma::{Digamma, LaplaceRoutes, REJECTION_CAP};
pub use nb::NegativeBinomial;
pub use series::SeriesSum;
