//! Net benefit, decision curves and the validation expected value of perfect
//! information (EVPI) for risk prediction models.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Everything
//! stochastic is driven by explicitly seeded ChaCha streams, so results are a
//! pure function of the inputs and the seed. Work that fans out over bootstrap
//! replicates or simulation cells goes through the [`Executor`] trait; the
//! crate ships a [`Sequential`] executor and callers with threads can plug in
//! their own without changing any result.
//!
//! Module map:
//!
//! - [`net_benefit`]: NB estimators for the model, treat-all and treat-none
//!   strategies, and decision curves with percentile bootstrap bands.
//! - [`resample`]: ordinary (multinomial) and Bayesian (flat Dirichlet)
//!   bootstrap weights, and matrices of per-replicate NB draws.
//! - [`voi`]: EVPI, relative EVPI and P(useful) from bootstrap draws or from
//!   the bivariate normal approximation.
//! - [`kernels`]: normal and bivariate normal probabilities, the expectation
//!   of `max(0, X, Y)` under a bivariate normal, and RNG utilities.
//! - [`simlab`]: synthetic logistic data generation, c-statistic, and
//!   sample-size sweeps.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod exec;
pub mod kernels;
pub mod net_benefit;
pub mod resample;
pub mod simlab;
pub mod voi;

/// Crate version, for provenance records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use net_benefit::{
    decision_curve, decision_curve_with, nb_all, nb_model, weighted_nb, CurveRow, DecisionCurve, Interval, NbEstimate,
    Threshold, ValidationSample,
};
pub use resample::{bootstrap_nb_draws, NbDrawMatrix, ResampleMethod, WeightVector};
pub use voi::{
    evpi_asymptotic, evpi_bootstrap, evpi_threshold_sweep, evpi_threshold_sweep_with, moments,
    p_useful, relative_evpi, Method, MomentSet, Strategy, SweepSettings, ThresholdSweep, VoiResult,
};
