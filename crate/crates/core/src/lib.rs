//! Asymmetric, scale-stable Log-GARCH and EGARCH(1,1) volatility models:
//! filtering, simulation, Gaussian QML estimation, LM and portmanteau
//! specification tests, stationarity diagnostics and forecast comparison.
//!
//! Returns are percent log-returns. Time is 1-based in documentation and
//! 0-based in every returned vector.

pub mod error;
pub mod estimation;
pub mod forecast;
pub mod ingest;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod optim;
pub mod simulate;
pub mod sptests;
pub mod stationarity;
pub mod volatility;

pub use error::{Error, Result};
pub use estimation::{qmle_aslog, qmle_aslog_restricted, qmle_criterion, qmle_criterion_egarch, qmle_egarch11, OptimConfig};
pub use model::*;
pub use numerics::Rng;
pub use sptests::{lm_test_aslog_vs_augmented, lm_test_egarch_vs_loggarch, portmanteau_test, InfoEstimator, TestOptions};
pub use volatility::{GradPath, InitPolicy};
