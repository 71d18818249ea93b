//! Special functions, small dense linear algebra, finite differences and the
//! seeded random number generator.

mod diff;
mod linalg;
mod rng;
mod special;

pub use diff::{finite_diff_gradient, finite_diff_gradient_steps};
pub use linalg::{
    inverse_spd, ridge, solve_spd, solve_spd_vec, spd_quadratic_form, spectral_radius,
    spectral_radius_bound, SpdSolution, PIVOT_RTOL,
};
pub use rng::{splitmix64, Rng};
pub use special::{chi2_sf, gamma_q, normal_cdf, normal_quantile, normal_sf};
