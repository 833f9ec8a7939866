//! Histories, combinatorial structures, labeled arrays and their exact
//! probability mass functions.

mod array;
mod comb;
pub mod enumerate;
mod history;
mod hyperparams;
mod pmf;

pub use array::FeatureArray;
pub use comb::CombStruct;
pub use history::History;
pub use hyperparams::Hyperparams;
pub use pmf::{log_history_weight, log_pmf_array, log_pmf_struct};
