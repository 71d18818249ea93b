//! Seeded size/power experiments for the specification tests.
//!
//! Replication `r` draws everything from `Rng::child(seed, r)`, so results do
//! not depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{qmle_aslog, qmle_aslog_restricted, qmle_egarch11, OptimConfig};
use crate::model::{AsLogGarchOrder, AsLogGarchParams, EgarchParams, FitResult, ReturnSeries};
use crate::numerics::Rng;
use crate::simulate::{simulate_aslog, simulate_egarch11, DEFAULT_BURN};
use crate::sptests::{lm_test_aslog_vs_augmented, lm_test_egarch_vs_loggarch, portmanteau_test, TestOptions};
use crate::volatility::InitPolicy;

pub const NOMINAL_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Dgp {
    Aslog { params: AsLogGarchParams },
    Egarch { params: EgarchParams },
}

impl Dgp {
    pub fn simulate(&self, n: usize, burn: usize, rng: &mut Rng) -> Result<ReturnSeries> {
        Ok(match self {
            Dgp::Aslog { params } => simulate_aslog(params, n, burn, rng)?.series,
            Dgp::Egarch { params } => simulate_egarch11(params, n, burn, rng)?.series,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullModel {
    /// AS-Log-GARCH(1,1), optionally with alpha+ = alpha-.
    Aslog { restrict_alpha: bool },
    Egarch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Lm,
    Portmanteau,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub dgp: Dgp,
    pub null: NullModel,
    pub test: TestKind,
    pub n: usize,
    pub reps: usize,
    pub burn: usize,
    pub seed: u64,
    /// ell, q or m values; one p-value per entry and replication.
    pub lags: Vec<usize>,
    pub optim: OptimConfig,
    pub test_options: TestOptions,
    pub init: InitPolicy,
}

impl Experiment {
    pub fn new(dgp: Dgp, null: NullModel, test: TestKind, n: usize, reps: usize, seed: u64) -> Self {
        Self {
            dgp,
            null,
            test,
            n,
            reps,
            burn: DEFAULT_BURN,
            seed,
            lags: vec![1],
            optim: OptimConfig { restarts: 1, ..OptimConfig::default() },
            test_options: TestOptions::default(),
            init: InitPolicy::default(),
        }
    }
}

/// p-values of one replication, `None` where the fit or test failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub p_values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionRate {
    pub lag: usize,
    pub level: f64,
    pub rate: f64,
    /// Binomial standard error sqrt(rate (1 - rate) / valid).
    pub std_err: f64,
    pub valid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub lags: Vec<usize>,
    pub replications: Vec<Replication>,
    pub rates: Vec<RejectionRate>,
}

impl ExperimentResult {
    /// Valid p-values at the given lag, in replication order.
    pub fn p_values(&self, lag: usize) -> Vec<f64> {
        let Some(k) = self.lags.iter().position(|l| *l == lag) else {
            return Vec::new();
        };
        self.replications.iter().filter_map(|r| r.p_values[k]).collect()
    }

    pub fn rate(&self, lag: usize, level: f64) -> Option<&RejectionRate> {
        self.rates.iter().find(|r| r.lag == lag && (r.level - level).abs() < 1e-12)
    }

    pub fn failures(&self) -> usize {
        self.replications.iter().filter(|r| r.error.is_some()).count()
    }

    /// One row per nominal level and statistic (`rate` or `se`, in percent),
    /// one column per lag.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,stat");
        for l in &self.lags {
            s.push_str(&format!(",lag_{l}"));
        }
        s.push('\n');
        for level in NOMINAL_LEVELS {
            for (stat, pick) in [("rate", 0), ("se", 1)] {
                s.push_str(&format!("{},{stat}", 100.0 * level));
                for l in &self.lags {
                    let r = self.rate(*l, level).expect("rate for every lag and level");
                    let v = if pick == 0 { r.rate } else { r.std_err };
                    s.push_str(&format!(",{:.1}", 100.0 * v));
                }
                s.push('\n');
            }
        }
        s
    }
}

fn fit_null(eps: &ReturnSeries, null: NullModel, optim: &OptimConfig, init: &InitPolicy) -> Result<FitResult> {
    let order = AsLogGarchOrder::new(1, 1)?;
    match null {
        NullModel::Aslog { restrict_alpha: false } => qmle_aslog(eps, order, optim, init),
        NullModel::Aslog { restrict_alpha: true } => qmle_aslog_restricted(eps, order, optim, init),
        NullModel::Egarch => qmle_egarch11(eps, optim, init),
    }
}

/// Simulates, fits the null model and runs the test at every lag for
/// replication `index`.
pub fn run_replication(exp: &Experiment, index: usize) -> Replication {
    let mut rng = Rng::child(exp.seed, index as u64);
    let mut attempt = || -> Result<Vec<Option<f64>>> {
        let eps = exp.dgp.simulate(exp.n, exp.burn, &mut rng)?;
        let optim = OptimConfig { seed: rng.next_u64(), ..exp.optim.clone() };
        let fit = fit_null(&eps, exp.null, &optim, &exp.init)?;
        Ok(exp
            .lags
            .iter()
            .map(|&lag| {
                let rep = match (exp.test, exp.null) {
                    (TestKind::Lm, NullModel::Aslog { .. }) => lm_test_aslog_vs_augmented(&fit, &eps, lag, &exp.init, &exp.test_options),
                    (TestKind::Lm, NullModel::Egarch) => lm_test_egarch_vs_loggarch(&fit, &eps, lag, &exp.init, &exp.test_options),
                    (TestKind::Portmanteau, _) => portmanteau_test(&fit, &eps, lag, &exp.init, &exp.test_options),
                };
                rep.ok().map(|r| r.p_value)
            })
            .collect())
    };
    match attempt() {
        Ok(p_values) => Replication { index, p_values, error: None },
        Err(e) => Replication {
            index,
            p_values: vec![None; exp.lags.len()],
            error: Some(e.to_string()),
        },
    }
}

fn rates(lags: &[usize], reps: &[Replication]) -> Vec<RejectionRate> {
    let mut out = Vec::new();
    for (k, &lag) in lags.iter().enumerate() {
        let ps: Vec<f64> = reps.iter().filter_map(|r| r.p_values[k]).collect();
        for level in NOMINAL_LEVELS {
            let valid = ps.len();
            let rate = if valid == 0 { f64::NAN } else { ps.iter().filter(|p| **p < level).count() as f64 / valid as f64 };
            out.push(RejectionRate {
                lag,
                level,
                rate,
                std_err: (rate * (1.0 - rate) / valid as f64).sqrt(),
                valid,
            });
        }
    }
    out
}

/// Runs all replications, on `threads` workers when given.
pub fn run_experiment(exp: &Experiment, threads: Option<usize>) -> Result<ExperimentResult> {
    if exp.reps == 0 || exp.lags.is_empty() || exp.lags.contains(&0) {
        return Err(Error::invalid("need reps >= 1 and lags >= 1"));
    }
    let work = || (0..exp.reps).into_par_iter().map(|r| run_replication(exp, r)).collect::<Vec<_>>();
    let replications = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(ExperimentResult {
        rates: rates(&exp.lags, &replications),
        lags: exp.lags.clone(),
        replications,
    })
}

/// Kolmogorov-Smirnov test of `sample` against U(0,1): (D_n, p-value),
/// with the Stephens small-sample correction of the asymptotic law.
pub fn ks_uniform(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.is_empty() || sample.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("KS sample must be nonempty and lie in [0, 1]"));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i as f64 + 1.0) / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    Ok((d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)))
}

/// P(K > lambda) for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}
