//! Strict-stationarity, moment and invertibility diagnostics.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AsLogGarchParams, EgarchParams, InvertibilityCheck, ReturnSeries};
use crate::numerics::{spectral_radius, Rng};

pub const DEFAULT_HORIZON: usize = 2000;
pub const DEFAULT_REPS: usize = 50;
const RESCALE_EVERY: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stationary,
    Nonstationary,
    Inconclusive,
}

/// Monte Carlo estimate of the top Lyapunov exponent gamma(C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub gamma_hat: f64,
    /// Standard error of the replication mean.
    pub std_err: f64,
    pub horizon: usize,
    pub reps: usize,
}

impl LyapunovEstimate {
    /// Stationary if gamma_hat + 2 se < 0, nonstationary if gamma_hat - 2 se > 0.
    pub fn verdict(&self) -> Verdict {
        if self.gamma_hat + 2.0 * self.std_err < 0.0 {
            Verdict::Stationary
        } else if self.gamma_hat - 2.0 * self.std_err > 0.0 {
            Verdict::Nonstationary
        } else {
            Verdict::Inconclusive
        }
    }
}

/// The two possible companion matrices C_t (for eta_t > 0 and eta_t < 0),
/// with p and q padded to at least 1.
fn companion_pair(theta: &AsLogGarchParams) -> (DMatrix<f64>, DMatrix<f64>) {
    let q = theta.q().max(1);
    let p = theta.p().max(1);
    let m = 2 * q + p;
    let mut row = vec![0.0; m];
    for i in 0..theta.q() {
        row[i] = theta.alpha_plus[i];
        row[q + i] = theta.alpha_minus[i];
    }
    for j in 0..theta.p() {
        row[2 * q + j] = theta.beta[j];
    }
    let build = |positive: bool| {
        let mut c = DMatrix::<f64>::zeros(m, m);
        let top = if positive { 0 } else { q };
        for k in 0..m {
            c[(top, k)] = row[k];
            c[(2 * q, k)] = row[k];
        }
        for i in 1..q {
            c[(i, i - 1)] = 1.0;
            c[(q + i, q + i - 1)] = 1.0;
        }
        for j in 1..p {
            c[(2 * q + j, 2 * q + j - 1)] = 1.0;
        }
        c
    };
    (build(true), build(false))
}

/// log || C_{w+T} ... C_{w+1} || growth over one replication: the product is
/// run for `warmup + horizon` steps and the estimate is
/// (log ||P_{w+T}|| - log ||P_w||) / T.
fn one_replication(pos: &DMatrix<f64>, neg: &DMatrix<f64>, a: f64, warmup: usize, horizon: usize, rng: &mut Rng) -> Result<f64> {
    let m = pos.nrows();
    let mut prod = DMatrix::<f64>::identity(m, m);
    let mut scratch = DMatrix::<f64>::zeros(m, m);
    let mut log_scale = 0.0;
    let mut at_warmup = 0.0;
    for step in 1..=warmup + horizon {
        let c = if rng.bernoulli(a) { pos } else { neg };
        c.mul_to(&prod, &mut scratch);
        std::mem::swap(&mut prod, &mut scratch);
        if step % RESCALE_EVERY == 0 || step == warmup || step == warmup + horizon {
            let norm = prod.norm();
            if norm == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            if !norm.is_finite() {
                return Err(Error::Numeric(format!("matrix product overflowed at step {step}")));
            }
            log_scale += norm.ln();
            prod /= norm;
            if step == warmup {
                at_warmup = log_scale;
            }
        }
    }
    Ok((log_scale - at_warmup) / horizon as f64)
}

/// Estimates gamma(C) from `reps` independent sign sequences with
/// P(eta > 0) = `prob_positive`. Replications run in parallel on child
/// streams of `rng`, so the result does not depend on the thread count.
///
/// A warm-up of horizon / 10 steps is discarded to remove the O(1/T) bias
/// of log ||C_T ... C_1|| / T.
pub fn lyapunov_exponent_mc(
    theta: &AsLogGarchParams,
    prob_positive: f64,
    horizon: usize,
    reps: usize,
    rng: &mut Rng,
) -> Result<LyapunovEstimate> {
    theta.validate()?;
    if !(prob_positive > 0.0 && prob_positive < 1.0) {
        return Err(Error::invalid(format!("prob_positive must be in (0, 1), got {prob_positive}")));
    }
    if horizon < 100 || reps < 10 {
        return Err(Error::invalid("lyapunov_exponent_mc needs horizon >= 100 and reps >= 10"));
    }
    let (pos, neg) = companion_pair(theta);
    let master = rng.next_u64();
    let warmup = horizon / 10;
    let draws: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| one_replication(&pos, &neg, prob_positive, warmup, horizon, &mut Rng::child(master, r as u64)))
        .collect::<Result<_>>()?;
    if draws.iter().any(|d| *d == f64::NEG_INFINITY) {
        return Ok(LyapunovEstimate {
            gamma_hat: f64::NEG_INFINITY,
            std_err: 0.0,
            horizon,
            reps,
        });
    }
    let r = reps as f64;
    let mean = draws.iter().sum::<f64>() / r;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(LyapunovEstimate {
        gamma_hat: mean,
        std_err: (var / r).sqrt(),
        horizon,
        reps,
    })
}

/// a log|alpha+ + beta| + (1 - a) log|alpha- + beta| for p = q = 1; negative
/// iff the strict stationarity condition holds.
pub fn stationarity_pq11_closed_form(theta: &AsLogGarchParams, prob_positive: f64) -> Result<f64> {
    theta.validate()?;
    if theta.p() != 1 || theta.q() != 1 {
        return Err(Error::invalid("closed form needs p = q = 1"));
    }
    if !(0.0..=1.0).contains(&prob_positive) {
        return Err(Error::invalid("prob_positive must be in [0, 1]"));
    }
    let b = theta.beta[0];
    let term = |w: f64, x: f64| if w == 0.0 { 0.0 } else { w * x.abs().ln() };
    Ok(term(prob_positive, theta.alpha_plus[0] + b) + term(1.0 - prob_positive, theta.alpha_minus[0] + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub spectral_radius: f64,
    pub pass: bool,
}

/// Spectral radius of ess sup Abs(A_1): the companion matrix with first row
/// max(|alpha_i+ + beta_i|, |alpha_i- + beta_i|), i = 1..max(p, q).
pub fn moment_matrix_check(theta: &AsLogGarchParams) -> Result<MomentCheck> {
    theta.validate()?;
    let r = theta.p().max(theta.q());
    let coef = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut a = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        let b = coef(&theta.beta, i);
        a[(0, i)] = (coef(&theta.alpha_plus, i) + b).abs().max((coef(&theta.alpha_minus, i) + b).abs());
    }
    for i in 1..r {
        a[(i, i - 1)] = 1.0;
    }
    let rho = spectral_radius(&a)?;
    Ok(MomentCheck {
        spectral_radius: rho,
        pass: rho < 1.0,
    })
}

pub const INVERTIBILITY_FLOOR: f64 = 1e-300;

/// Sample mean of log max[beta, (gamma eps + delta |eps|) exp(-omega / (2 (1 - beta))) / 2 - beta]
/// over the observations; the inner max is floored at [`INVERTIBILITY_FLOOR`].
pub fn egarch_invertibility_check(zeta: &EgarchParams, eps: &ReturnSeries) -> Result<InvertibilityCheck> {
    if !(zeta.beta.abs() < 1.0) {
        return Err(Error::InvalidModel(format!("|beta| must be < 1, got {}", zeta.beta)));
    }
    let scale = (-zeta.omega / (2.0 * (1.0 - zeta.beta))).exp();
    let mut floored = 0;
    let mut sum = 0.0;
    for &e in eps.values() {
        let inner = zeta.beta.max(0.5 * (zeta.gamma * e + zeta.delta * e.abs()) * scale - zeta.beta);
        let v = if inner <= INVERTIBILITY_FLOOR {
            floored += 1;
            INVERTIBILITY_FLOOR
        } else {
            inner
        };
        sum += v.ln();
    }
    if floored == eps.len() {
        return Err(Error::Indeterminate("every observation hit the invertibility floor".into()));
    }
    let expectation = sum / eps.len() as f64;
    Ok(InvertibilityCheck {
        expectation,
        pass: expectation < 0.0,
        floored,
    })
}
