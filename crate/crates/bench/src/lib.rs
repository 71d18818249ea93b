//! Shared inputs for the criterion benches.

use logvol::simulate::{simulate_aslog, simulate_egarch11};
use logvol::{AsLogGarchParams, EgarchParams, ReturnSeries, Rng};

pub fn aslog_theta() -> AsLogGarchParams {
    AsLogGarchParams::pq11(0.01, 0.02, 0.04, 0.05, 0.95)
}

pub fn egarch_zeta() -> EgarchParams {
    EgarchParams::new(-0.15, -0.08, 0.12, 0.95).expect("valid parameters")
}

pub fn aslog_sample(n: usize, seed: u64) -> ReturnSeries {
    simulate_aslog(&aslog_theta(), n, 500, &mut Rng::new(seed)).expect("stationary parameters").series
}

pub fn egarch_sample(n: usize, seed: u64) -> ReturnSeries {
    simulate_egarch11(&egarch_zeta(), n, 500, &mut Rng::new(seed)).expect("stationary parameters").series
}
