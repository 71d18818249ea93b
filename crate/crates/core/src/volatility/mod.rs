//! Volatility filters for the three model families, their gradient
//! recursions, the LM score regressors and the news impact curve.
//!
//! Time is 1-based in the documentation and 0-based in storage: index `i`
//! of every returned path holds time `t = i + 1`.

mod aslog;
mod egarch;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ReturnSeries;

pub use aslog::{filter_aslog, filter_augmented_log, filter_grad_aslog, grad_aslog, news_impact_curve, nu_hat};
pub(crate) use aslog::aslog_path;
pub(crate) use egarch::run_egarch;
pub use egarch::{egarch_grad_alpha, filter_augmented_egarch, filter_egarch, filter_grad_egarch, EgarchGradState};

/// Presample values and the zero-return floor.
///
/// `None` entries are derived from the data: presample squared returns
/// default to the sample mean of eps^2 and the initial log-volatility to its
/// log. Both scale correctly when the data are rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitPolicy {
    pub presample_eps2: Option<f64>,
    pub presample_sign_negative: bool,
    pub initial_log_sigma2: Option<f64>,
    /// Relative floor tau: |eps_t| below tau * std(eps) is replaced by that
    /// value (positive sign) before taking log eps^2.
    pub zero_return_floor: f64,
}

impl Default for InitPolicy {
    fn default() -> Self {
        Self {
            presample_eps2: None,
            presample_sign_negative: false,
            initial_log_sigma2: None,
            zero_return_floor: 1e-6,
        }
    }
}

/// Concrete presample values for one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedInit {
    pub presample_eps2: f64,
    pub presample_negative: bool,
    pub log_sigma2_0: f64,
    /// Absolute floor tau * std(eps).
    pub floor_abs: f64,
}

impl ResolvedInit {
    /// The signed presample return used where a filter needs eps itself.
    pub fn presample_eps(&self) -> f64 {
        let e = self.presample_eps2.sqrt();
        if self.presample_negative {
            -e
        } else {
            e
        }
    }
}

impl InitPolicy {
    /// Explicit presample values (no data-dependent defaults).
    pub fn fixed(presample_eps2: f64, initial_log_sigma2: f64) -> Self {
        Self {
            presample_eps2: Some(presample_eps2),
            initial_log_sigma2: Some(initial_log_sigma2),
            ..Self::default()
        }
    }

    /// The policy matching data multiplied by `c`: explicit presample squares
    /// scale by c^2 and an explicit initial log-volatility shifts by log c^2.
    pub fn scaled(&self, c: f64) -> Self {
        let l = (c * c).ln();
        Self {
            presample_eps2: self.presample_eps2.map(|v| v * c * c),
            initial_log_sigma2: self.initial_log_sigma2.map(|v| v + l),
            ..*self
        }
    }

    pub fn resolve(&self, eps: &ReturnSeries) -> Result<ResolvedInit> {
        if !(self.zero_return_floor > 0.0 && self.zero_return_floor.is_finite()) {
            return Err(Error::invalid("zero_return_floor must be positive"));
        }
        let ms = eps.mean_square();
        let presample_eps2 = self.presample_eps2.unwrap_or(ms);
        if !(presample_eps2 > 0.0 && presample_eps2.is_finite()) {
            return Err(Error::invalid(format!(
                "presample squared return must be positive (got {presample_eps2}); is the series all zero?"
            )));
        }
        let log_sigma2_0 = match self.initial_log_sigma2 {
            Some(h) => h,
            None => {
                if !(ms > 0.0) {
                    return Err(Error::invalid("cannot derive initial volatility from an all-zero series"));
                }
                ms.ln()
            }
        };
        if !log_sigma2_0.is_finite() {
            return Err(Error::invalid("initial log-volatility must be finite"));
        }
        Ok(ResolvedInit {
            presample_eps2,
            presample_negative: self.presample_sign_negative,
            log_sigma2_0,
            floor_abs: self.zero_return_floor * eps.std_dev(),
        })
    }
}

/// log eps^2 and sign indicators after the zero-return floor.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub log_eps2: Vec<f64>,
    pub negative: Vec<bool>,
    pub floored: usize,
}

pub(crate) fn prepare(eps: &ReturnSeries, init: &ResolvedInit) -> Result<Prepared> {
    let mut floored = 0;
    let mut log_eps2 = Vec::with_capacity(eps.len());
    let mut negative = Vec::with_capacity(eps.len());
    for (i, &e) in eps.values().iter().enumerate() {
        if e.abs() < init.floor_abs || e == 0.0 {
            if init.floor_abs <= 0.0 {
                return Err(Error::invalid(format!(
                    "zero return at index {i} in a series with zero spread"
                )));
            }
            floored += 1;
            log_eps2.push((init.floor_abs * init.floor_abs).ln());
            negative.push(false);
        } else {
            log_eps2.push((e * e).ln());
            negative.push(e < 0.0);
        }
    }
    Ok(Prepared {
        log_eps2,
        negative,
        floored,
    })
}

/// Per-time gradient vectors stored row-major (`len` rows of `dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct GradPath {
    dim: usize,
    data: Vec<f64>,
}

impl GradPath {
    pub fn zeros(len: usize, dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; len * dim],
        }
    }

    /// Rows given back to back; `data.len()` must be a multiple of `dim`.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::invalid(format!("{} values do not form rows of {dim}", data.len())));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Gradient at storage index `i` (time i + 1).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Column `k` as a vector over time.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.data[i * self.dim + k]).collect()
    }
}

pub(crate) fn check_finite(t0: usize, h: f64) -> Result<()> {
    if h.is_finite() {
        Ok(())
    } else {
        Err(Error::FilterDivergence { t: t0 + 1, value: h })
    }
}

pub(crate) fn residuals(eps: &[f64], log_sigma2: &[f64]) -> Vec<f64> {
    eps.iter()
        .zip(log_sigma2)
        .map(|(e, h)| e * (-0.5 * h).exp())
        .collect()
}
