use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use logvol::estimation::OptimConfig;
use logvol::forecast::{diebold_mariano, loss_series, oos_forecast, write_loss_csv_file, LossKind};
use logvol::montecarlo::{run_experiment, Dgp, Experiment, NullModel, TestKind};
use logvol::simulate::{simulate_aslog, simulate_egarch11};
use logvol::sptests::{lm_test_aslog_vs_augmented, lm_test_egarch_vs_loggarch, portmanteau_test, InfoEstimator, TestOptions};
use logvol::volatility::{filter_aslog, filter_egarch, news_impact_curve};
use logvol::{
    qmle_aslog, qmle_aslog_restricted, qmle_egarch11, AsLogGarchOrder, AsLogGarchParams, EgarchParams, FitResult, FittedModel, InitPolicy,
    ReturnSeries, Rng, TestReport,
};
use serde_json::{json, Value};

use crate::args::{Family, FitArgs, ForecastArgs, Format, ModelArgs, MonteCarloArgs, NicArgs, OptimArgs, SimulateArgs, TestArgs, TestChoice};
use crate::config::{ConfigFile, Settings};
use crate::data::load;
use crate::Failure;

fn write_out(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// `3`, `1..12` (inclusive) or `1,2,5`.
pub fn parse_lags(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("cannot read lags '{s}' (use 3, 1..12 or 1,2,5)"));
    let lags: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if lags.is_empty() || lags.contains(&0) {
        return Err(bad());
    }
    Ok(lags)
}

fn parse_params(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("cannot read parameter '{x}'"))))
        .collect()
}

fn aslog_params(s: Option<&str>) -> Result<AsLogGarchParams, Failure> {
    match s {
        None => Ok(AsLogGarchParams::pq11(0.01, 0.02, 0.04, 0.05, 0.95)),
        Some(s) => match parse_params(s)?.as_slice() {
            &[w, wm, ap, am, b] => Ok(AsLogGarchParams::pq11(w, wm, ap, am, b)),
            _ => Err(Failure::Usage("AS-Log-GARCH(1,1) needs 5 parameters: omega,omega_minus,alpha_plus,alpha_minus,beta".into())),
        },
    }
}

fn egarch_params(s: Option<&str>) -> Result<EgarchParams, Failure> {
    match s {
        None => Ok(EgarchParams::new(-0.15, -0.08, 0.12, 0.95)?),
        Some(s) => Ok(EgarchParams::from_slice(&parse_params(s)?)?),
    }
}

fn info_estimator(s: &str) -> Result<InfoEstimator, Failure> {
    s.parse().map_err(|e: logvol::Error| Failure::Usage(e.to_string()))
}

fn fit_model(eps: &ReturnSeries, model: &ModelArgs, optim: &OptimConfig, init: &InitPolicy) -> Result<FitResult, Failure> {
    Ok(match model.model {
        Family::Aslog => {
            let order = AsLogGarchOrder::new(model.p, model.q)?;
            if model.restrict_alpha {
                qmle_aslog_restricted(eps, order, optim, init)?
            } else {
                qmle_aslog(eps, order, optim, init)?
            }
        }
        Family::Egarch => {
            if model.p != 1 || model.q != 1 || model.restrict_alpha {
                return Err(Failure::Usage("--p, --q and --restrict-alpha apply to --model aslog only".into()));
            }
            qmle_egarch11(eps, optim, init)?
        }
    })
}

pub fn fit_json(fit: &FitResult) -> Value {
    let cov: Vec<Vec<f64>> = fit.cov.row_iter().map(|r| r.iter().copied().collect()).collect();
    json!({
        "family": fit.model.family_name(),
        "model": serde_json::to_value(&fit.model).expect("model serializes"),
        "param_names": fit.param_names,
        "params": fit.params,
        "std_errors": fit.std_errors,
        "covariance": cov,
        "loglik_per_obs": fit.loglik_per_obs,
        "kappa4": fit.kappa4_hat,
        "criterion": fit.criterion_value,
        "n_obs": fit.n_obs,
        "r0": fit.r0,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "ridge_applied": fit.ridge_applied,
        "invertibility": fit.invertibility.map(|c| json!({"expectation": c.expectation, "pass": c.pass, "floored": c.floored})),
        "warnings": fit.warnings,
    })
}

fn write_residuals(path: &Path, fit: &FitResult, eps: &ReturnSeries, init: &InitPolicy) -> Result<(), Failure> {
    let out = match &fit.model {
        FittedModel::AsLog { params, .. } => filter_aslog(params, eps, init)?,
        FittedModel::Egarch { params } => filter_egarch(params, eps, init)?,
    };
    let mut s = String::from("t,date,eps,log_sigma2,residual\n");
    for i in 0..eps.len() {
        let date = eps.dates().map(|d| d[i].to_string()).unwrap_or_default();
        writeln!(s, "{},{date},{},{},{}", i + 1, eps.values()[i], out.log_sigma2[i], out.residuals[i]).expect("string write");
    }
    std::fs::write(path, s).map_err(|e| Failure::io(path, e))
}

pub fn fit(a: FitArgs, file: &ConfigFile) -> Result<(), Failure> {
    let settings = Settings::resolve(&a.optim, None, file, OptimConfig::default())?;
    let data = load(&a.data, &settings)?;
    let init = InitPolicy::default();
    let fit = fit_model(&data.returns, &a.model, &settings.optim, &init)?;
    if let Some(p) = &a.residuals_csv {
        write_residuals(p, &fit, &data.returns, &init)?;
    }
    let mut report = fit_json(&fit);
    report["dropped_missing"] = json!(data.dropped);
    write_out(a.output.as_deref(), &pretty(&report))
}

fn load_fit(path: &Path, eps: &ReturnSeries, init: &InitPolicy, ridge: f64) -> Result<FitResult, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
    let v: Value = serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let model: FittedModel = serde_json::from_value(v.get("model").cloned().unwrap_or(Value::Null))
        .map_err(|e| Failure::Usage(format!("{}: no usable \"model\" entry ({e})", path.display())))?;
    Ok(FitResult::at_params(&model, eps, init, ridge)?)
}

fn run_one(fit: &FitResult, eps: &ReturnSeries, test: TestChoice, lag: usize, init: &InitPolicy, opts: &TestOptions) -> logvol::Result<TestReport> {
    match (test, &fit.model) {
        (TestChoice::Portmanteau, _) => portmanteau_test(fit, eps, lag, init, opts),
        (TestChoice::Lm, FittedModel::AsLog { .. }) => lm_test_aslog_vs_augmented(fit, eps, lag, init, opts),
        (TestChoice::Lm, FittedModel::Egarch { .. }) => lm_test_egarch_vs_loggarch(fit, eps, lag, init, opts),
    }
}

pub fn test(a: TestArgs, file: &ConfigFile) -> Result<(), Failure> {
    let settings = Settings::resolve(&a.optim, None, file, OptimConfig::default())?;
    let lags = parse_lags(&a.lags)?;
    let opts = TestOptions { info: info_estimator(&a.info)?, ridge: a.ridge_tests };
    let data = load(&a.data, &settings)?;
    let eps = &data.returns;
    let init = InitPolicy::default();
    let fit = match &a.fit {
        Some(p) => load_fit(p, eps, &init, settings.optim.ridge)?,
        None => fit_model(eps, &a.model, &settings.optim, &init)?,
    };
    let reports = lags
        .iter()
        .map(|&lag| run_one(&fit, eps, a.test, lag, &init, &opts))
        .collect::<logvol::Result<Vec<_>>>()?;
    let content = match a.format {
        Format::Json => {
            let results: Vec<Value> = lags
                .iter()
                .zip(&reports)
                .map(|(lag, r)| {
                    let mut v = r.to_json();
                    v["lag"] = json!(lag);
                    v
                })
                .collect();
            pretty(&json!({
                "fit": fit_json(&fit),
                "test": match a.test { TestChoice::Lm => "lm", TestChoice::Portmanteau => "portmanteau" },
                "info": opts.info.as_str(),
                "results": results,
            }))
        }
        Format::Text => {
            let mut s = format!("{:>4}  {:>12}  {:>3}  {:>8}\n", "lag", "statistic", "df", "p_value");
            for (lag, r) in lags.iter().zip(&reports) {
                writeln!(s, "{lag:>4}  {:>12.4}  {:>3}  {:>8.4}", r.statistic, r.df, r.p_value).expect("string write");
            }
            s
        }
    };
    write_out(a.output.as_deref(), &content)
}

pub fn montecarlo(a: MonteCarloArgs, file: &ConfigFile) -> Result<(), Failure> {
    let defaults = OptimConfig { restarts: 1, ..OptimConfig::default() };
    let settings = Settings::resolve(&a.optim, a.threads, file, defaults)?;
    let dgp = match a.dgp {
        Family::Aslog => Dgp::Aslog { params: aslog_params(a.params.as_deref())? },
        Family::Egarch => Dgp::Egarch { params: egarch_params(a.params.as_deref())? },
    };
    let null = match a.null {
        Family::Aslog => NullModel::Aslog { restrict_alpha: a.restrict_alpha },
        Family::Egarch => NullModel::Egarch,
    };
    let test = match a.test {
        TestChoice::Lm => TestKind::Lm,
        TestChoice::Portmanteau => TestKind::Portmanteau,
    };
    let mut exp = Experiment::new(dgp, null, test, a.n, a.reps, settings.seed);
    exp.lags = parse_lags(&a.lags)?;
    exp.burn = a.burn;
    exp.optim = settings.optim.clone();
    exp.test_options = TestOptions { info: info_estimator(&a.info)?, ridge: false };
    let result = run_experiment(&exp, settings.threads)?;
    if let Some(p) = &a.json {
        let v = serde_json::to_value(&result).expect("result serializes");
        std::fs::write(p, pretty(&v)).map_err(|e| Failure::io(p, e))?;
    }
    write_out(a.output.as_deref(), &result.to_csv())
}

fn split_index(spec: &str, eps: &ReturnSeries) -> Result<usize, Failure> {
    if let Ok(k) = spec.parse::<usize>() {
        return Ok(k);
    }
    let date = NaiveDate::parse_from_str(spec, "%Y-%m-%d")
        .map_err(|_| Failure::Usage(format!("--train-end '{spec}' is neither a count nor a YYYY-MM-DD date")))?;
    let dates = eps.dates().ok_or_else(|| Failure::Usage("--train-end as a date needs dated input".into()))?;
    Ok(dates.iter().take_while(|d| **d <= date).count())
}

fn fit_family(family: Family, restrict_alpha: bool, eps: &ReturnSeries, optim: &OptimConfig, init: &InitPolicy) -> Result<FitResult, Failure> {
    let m = ModelArgs { model: family, p: 1, q: 1, restrict_alpha: restrict_alpha && family == Family::Aslog };
    fit_model(eps, &m, optim, init)
}

pub fn forecast_eval(a: ForecastArgs, file: &ConfigFile) -> Result<(), Failure> {
    let settings = Settings::resolve(&a.optim, None, file, OptimConfig::default())?;
    let data = load(&a.data, &settings)?;
    let eps = &data.returns;
    let split = split_index(&a.train_end, eps)?;
    if split >= eps.len() {
        return Err(logvol::Error::InvalidArgument(format!("holdout is empty: training ends at {split} of {} returns", eps.len())).into());
    }
    let init = InitPolicy::default();
    let train = eps.slice(0..split)?;
    let fa = fit_family(a.model_a, a.restrict_alpha, &train, &settings.optim, &init)?;
    let fb = fit_family(a.model_b, a.restrict_alpha, &train, &settings.optim, &init)?;
    let sa = oos_forecast(&fa, eps, split, &init)?;
    let sb = oos_forecast(&fb, eps, split, &init)?;
    let e2: Vec<f64> = eps.values()[split..].iter().map(|e| e * e).collect();
    let floor = (init.zero_return_floor * eps.std_dev()).powi(2);
    let dates = eps.dates().map(|d| &d[split..]);
    let mut losses = serde_json::Map::new();
    let mut failed = 0;
    for kind in LossKind::ALL {
        let la = loss_series(&e2, &sa, kind, floor)?;
        let lb = loss_series(&e2, &sb, kind, floor)?;
        if let Some(dir) = &a.losses_dir {
            std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            write_loss_csv_file(&dir.join(format!("{}.csv", kind.as_str())), dates, &la, &lb)?;
        }
        let entry = match diebold_mariano(&la, &lb, a.hac_lag) {
            Ok(dm) => json!({
                "statistic": dm.statistic,
                "p_value": dm.p_value,
                "mean_a": la.iter().sum::<f64>() / la.len() as f64,
                "mean_b": lb.iter().sum::<f64>() / lb.len() as f64,
            }),
            Err(e) => {
                failed += 1;
                json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
            }
        };
        losses.insert(kind.as_str().to_string(), entry);
    }
    let report = json!({
        "model_a": fit_json(&fa),
        "model_b": fit_json(&fb),
        "train_len": split,
        "holdout_len": eps.len() - split,
        "hac_lag": a.hac_lag,
        "losses": losses,
    });
    write_out(a.output.as_deref(), &pretty(&report))?;
    if failed > 0 {
        return Err(Failure::Statistical(format!("Diebold-Mariano comparison failed for {failed} of 4 losses")));
    }
    Ok(())
}

pub fn nic(a: NicArgs) -> Result<(), Failure> {
    if a.points < 2 || !(a.max > a.min) {
        return Err(Failure::Usage("need --points >= 2 and --max > --min".into()));
    }
    let theta = AsLogGarchParams::pq11(a.omega, a.omega_minus, a.alpha_plus, a.alpha_minus, 0.0);
    let step = (a.max - a.min) / (a.points - 1) as f64;
    let grid: Vec<f64> = (0..a.points).map(|i| a.min + step * i as f64).filter(|e| *e != 0.0).collect();
    let sigma = news_impact_curve(&theta, &grid)?;
    let mut s = String::from("eps,sigma\n");
    for (e, v) in grid.iter().zip(&sigma) {
        writeln!(s, "{e},{v}").expect("string write");
    }
    write_out(a.output.as_deref(), &s)
}

pub fn simulate(a: SimulateArgs, file: &ConfigFile) -> Result<(), Failure> {
    let flags = OptimArgs { seed: a.seed, ..OptimArgs::default() };
    let settings = Settings::resolve(&flags, None, file, OptimConfig::default())?;
    let mut rng = Rng::new(settings.seed);
    let path = match a.model {
        Family::Aslog => simulate_aslog(&aslog_params(a.params.as_deref())?, a.n, a.burn, &mut rng)?,
        Family::Egarch => simulate_egarch11(&egarch_params(a.params.as_deref())?, a.n, a.burn, &mut rng)?,
    };
    let mut s = String::from("t,eps,log_sigma2\n");
    for (i, (e, h)) in path.series.values().iter().zip(&path.log_sigma2).enumerate() {
        writeln!(s, "{},{e},{h}", i + 1).expect("string write");
    }
    write_out(a.output.as_deref(), &s)
}
