//! Numerical primitives: normal and bivariate normal probabilities, the
//! expectation of the positive maximum of a bivariate normal pair, and seeded
//! random streams.

mod bvn;
mod emax;
mod normal;
pub mod rng;

pub use bvn::bvn_cdf;
pub use emax::{e_max_zero_bvn, p_first_is_positive_max, BvnParams};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_sf};
