//! One-step-ahead variance forecasts with frozen parameters, forecast losses
//! and the Diebold-Mariano comparison.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FitResult, FittedModel, ReturnSeries};
use crate::numerics::normal_sf;
use crate::volatility::{filter_aslog, filter_egarch, InitPolicy};

/// Variance forecasts sigma^2_t for t = split_index+1..n (1-based).
///
/// The filter runs over the whole series with the fitted parameters; each
/// forecast uses data up to t - 1 only. Presample values not fixed by `init`
/// are derived from the first `split_index` observations, so the holdout
/// never influences them.
pub fn oos_forecast(fit: &FitResult, full: &ReturnSeries, split_index: usize, init: &InitPolicy) -> Result<Vec<f64>> {
    if split_index >= full.len() {
        return Err(Error::invalid(format!("holdout is empty: split {split_index} with {} observations", full.len())));
    }
    if split_index < fit.n_obs {
        return Err(Error::invalid(format!(
            "split {split_index} precedes the end of the estimation sample ({} observations)",
            fit.n_obs
        )));
    }
    let r = init.resolve(&full.slice(0..split_index)?)?;
    let frozen = InitPolicy {
        presample_eps2: Some(r.presample_eps2),
        initial_log_sigma2: Some(r.log_sigma2_0),
        ..*init
    };
    let out = match &fit.model {
        FittedModel::AsLog { params, .. } => filter_aslog(params, full, &frozen)?,
        FittedModel::Egarch { params } => filter_egarch(params, full, &frozen)?,
    };
    Ok(out.log_sigma2[split_index..].iter().map(|h| h.exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    Mse,
    Mae,
    LogMse,
    LogMae,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [LossKind::Mse, LossKind::Mae, LossKind::LogMse, LossKind::LogMae];

    pub fn as_str(&self) -> &'static str {
        match self {
            LossKind::Mse => "MSE",
            LossKind::Mae => "MAE",
            LossKind::LogMse => "LogMSE",
            LossKind::LogMae => "LogMAE",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown loss '{s}' (expected MSE, MAE, LogMSE or LogMAE)")))
    }
}

/// Pointwise losses. For the log losses, squared returns below `eps2_floor`
/// are raised to it; pass the same floor the filter used (tau * std)^2.
pub fn loss_series(eps2: &[f64], sigma2_hat: &[f64], kind: LossKind, eps2_floor: f64) -> Result<Vec<f64>> {
    if eps2.len() != sigma2_hat.len() {
        return Err(Error::invalid(format!(
            "{} squared returns but {} forecasts",
            eps2.len(),
            sigma2_hat.len()
        )));
    }
    if let Some(i) = sigma2_hat.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::invalid(format!("forecast {i} is not a positive finite number")));
    }
    Ok(eps2
        .iter()
        .zip(sigma2_hat)
        .map(|(&e2, &s2)| match kind {
            LossKind::Mse => (e2 - s2).powi(2),
            LossKind::Mae => (e2 - s2).abs(),
            LossKind::LogMse => (e2.max(eps2_floor) / s2).ln().powi(2),
            LossKind::LogMae => (e2.max(eps2_floor) / s2).ln().abs(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DieboldMariano {
    pub statistic: f64,
    /// P(N(0,1) > statistic): small when forecast b is less accurate.
    pub p_value: f64,
    pub mean_diff: f64,
    pub n: usize,
    pub hac_lag: Option<usize>,
}

/// DM test on d_t = loss_b,t - loss_a,t with the plain sample variance, or a
/// Bartlett-kernel long-run variance when `hac_lag` is given.
pub fn diebold_mariano(loss_a: &[f64], loss_b: &[f64], hac_lag: Option<usize>) -> Result<DieboldMariano> {
    if loss_a.len() != loss_b.len() {
        return Err(Error::invalid("loss series differ in length"));
    }
    let n = loss_a.len();
    if n < 30 {
        return Err(Error::invalid(format!("need at least 30 losses, got {n}")));
    }
    let d: Vec<f64> = loss_b.iter().zip(loss_a).map(|(b, a)| b - a).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let autocov = |k: usize| d[k..].iter().zip(&d).map(|(x, y)| (x - mean) * (y - mean)).sum::<f64>() / nf;
    let mut var = autocov(0);
    if let Some(l) = hac_lag {
        if l >= n {
            return Err(Error::invalid("HAC lag must be below the sample size"));
        }
        for k in 1..=l {
            var += 2.0 * (1.0 - k as f64 / (l as f64 + 1.0)) * autocov(k);
        }
    }
    if !(var > 0.0) {
        return Err(Error::DegenerateDifferential(format!("loss differential has variance {var:e}")));
    }
    let statistic = mean / (var / nf).sqrt();
    Ok(DieboldMariano {
        statistic,
        p_value: normal_sf(statistic)?,
        mean_diff: mean,
        n,
        hac_lag,
    })
}

/// Writes `date?,loss_a,loss_b,d` rows.
pub fn write_loss_csv<W: Write>(out: W, dates: Option<&[chrono::NaiveDate]>, loss_a: &[f64], loss_b: &[f64]) -> Result<()> {
    if loss_a.len() != loss_b.len() || dates.is_some_and(|d| d.len() != loss_a.len()) {
        return Err(Error::invalid("loss table columns differ in length"));
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io { path: "<loss table>".into(), message: e.to_string() };
    if dates.is_some() {
        w.write_record(["date", "loss_a", "loss_b", "d"]).map_err(io)?;
    } else {
        w.write_record(["loss_a", "loss_b", "d"]).map_err(io)?;
    }
    for i in 0..loss_a.len() {
        let mut row = Vec::with_capacity(4);
        if let Some(d) = dates {
            row.push(d[i].to_string());
        }
        row.push(loss_a[i].to_string());
        row.push(loss_b[i].to_string());
        row.push((loss_b[i] - loss_a[i]).to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<loss table>".into(), message: e.to_string() })
}

pub fn write_loss_csv_file(path: &Path, dates: Option<&[chrono::NaiveDate]>, loss_a: &[f64], loss_b: &[f64]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    write_loss_csv(f, dates, loss_a, loss_b)
}
