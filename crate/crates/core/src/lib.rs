// `!(x > 0.0)` is used deliberately so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod generative;
pub mod inference;
pub mod numerics;
pub mod structures;
pub mod validation;
