//! LM tests against the augmented models and the squared-residual portmanteau test.
//!
//! All sums run over t = r0+1..n and are normalized by the same count n - r0.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimation::AslogLayout;
use crate::model::{AugmentedEgarchParams, Component, FitResult, FittedModel, ReturnSeries, TestName, TestReport};
use crate::numerics::{chi2_sf, inverse_spd, spd_quadratic_form};
use crate::volatility::{egarch_grad_alpha, filter_grad_aslog, filter_grad_egarch, nu_hat, GradPath, InitPolicy};

/// Estimator of the score variance in the LM statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfoEstimator {
    /// J11 centered by the score-regressor mean, with the matching centered
    /// cross term. Carries an extra nu-bar nu-bar' term, so the test is
    /// conservative and its null p-values are not uniform.
    Centered,
    /// (n - r0)^-1 sum nu nu' - Omega J^-1 Omega', consistent under the null.
    #[default]
    Uncentered,
}

impl InfoEstimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            InfoEstimator::Centered => "centered",
            InfoEstimator::Uncentered => "uncentered",
        }
    }
}

impl std::str::FromStr for InfoEstimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(InfoEstimator::Centered),
            "uncentered" => Ok(InfoEstimator::Uncentered),
            _ => Err(Error::invalid(format!("unknown information estimator '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TestOptions {
    pub info: InfoEstimator,
    /// On a singular matrix add 1e-8 * trace / dim to its diagonal instead
    /// of failing. Flagged in the report.
    pub ridge: bool,
}

/// Score vector, its variance estimate and the pieces it is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreComponents {
    /// n^-1/2 sum (1 - eta^2) x_t for the tested regressors x_t.
    pub score: DVector<f64>,
    pub info: DMatrix<f64>,
    pub kappa4_hat: f64,
    /// Centered second moment of the regressors.
    pub j11: DMatrix<f64>,
    /// Cross moment of the regressors and the null-model gradient.
    pub omega: DMatrix<f64>,
    pub j12: DMatrix<f64>,
    pub j: DMatrix<f64>,
}

fn ridge_value(a: &DMatrix<f64>) -> f64 {
    1e-8 * a.trace() / a.nrows() as f64
}

fn inverse_with_policy(a: &DMatrix<f64>, context: &str, opts: &TestOptions, warnings: &mut Vec<String>) -> Result<DMatrix<f64>> {
    match inverse_spd(a, context) {
        Ok(s) => Ok(s.x),
        Err(Error::Singular { .. }) if opts.ridge => {
            let lambda = ridge_value(a);
            warnings.push(format!("{context} singular; ridge {lambda:.3e} added"));
            Ok(inverse_spd(&crate::numerics::ridge(a, lambda), context)?.x)
        }
        Err(e) => Err(e),
    }
}

fn quadratic_with_policy(a: &DMatrix<f64>, b: &DVector<f64>, context: &str, opts: &TestOptions, warnings: &mut Vec<String>) -> Result<(f64, f64)> {
    match spd_quadratic_form(a, b, context) {
        Ok(s) => Ok((s.x, s.min_pivot)),
        Err(Error::Singular { .. }) if opts.ridge => {
            let lambda = ridge_value(a);
            warnings.push(format!("{context} singular; ridge {lambda:.3e} added"));
            let s = spd_quadratic_form(&crate::numerics::ridge(a, lambda), b, context)?;
            Ok((s.x, s.min_pivot))
        }
        Err(e) => Err(e),
    }
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let s = (&*a + a.transpose()) * 0.5;
    *a = s;
}

/// Score and variance estimate for regressors `x` given squared residuals
/// and the null-model gradient rows. Rows before `r0` are ignored.
pub fn score_components(
    eta2: &[f64],
    x: &GradPath,
    grad: &GradPath,
    r0: usize,
    opts: &TestOptions,
    warnings: &mut Vec<String>,
) -> Result<ScoreComponents> {
    let n = eta2.len();
    if x.len() != n || grad.len() != n || r0 >= n {
        return Err(Error::invalid("inconsistent lengths in score components"));
    }
    let (a, d) = (x.dim(), grad.dim());
    let m = (n - r0) as f64;
    let mut score = DVector::<f64>::zeros(a);
    let mut k4 = 0.0;
    let mut xbar = DVector::<f64>::zeros(a);
    let mut gbar = DVector::<f64>::zeros(d);
    let mut xx = DMatrix::<f64>::zeros(a, a);
    let mut xg = DMatrix::<f64>::zeros(a, d);
    let mut gg = DMatrix::<f64>::zeros(d, d);
    for t in r0..n {
        let w = 1.0 - eta2[t];
        k4 += w * w;
        let (xr, gr) = (x.row(t), grad.row(t));
        for i in 0..a {
            score[i] += w * xr[i];
            xbar[i] += xr[i];
            for k in 0..a {
                xx[(i, k)] += xr[i] * xr[k];
            }
            for k in 0..d {
                xg[(i, k)] += xr[i] * gr[k];
            }
        }
        for i in 0..d {
            gbar[i] += gr[i];
            for k in 0..d {
                gg[(i, k)] += gr[i] * gr[k];
            }
        }
    }
    score /= m.sqrt();
    xbar /= m;
    gbar /= m;
    xx /= m;
    xg /= m;
    gg /= m;
    let j_inv = inverse_with_policy(&gg, "information matrix J", opts, warnings)?;
    let omega_j = &xg * &j_inv;
    let j11 = &xx - &xbar * xbar.transpose();
    let (j12, mut info) = match opts.info {
        InfoEstimator::Centered => {
            let j12 = -(&xg - &xbar * gbar.transpose()) * &j_inv;
            let info = &j11 + &omega_j * xg.transpose() + &j12 * xg.transpose() + &xg * j12.transpose();
            (j12, info)
        }
        InfoEstimator::Uncentered => (-omega_j.clone(), uncentered_info(x, grad, r0).unwrap_or_else(|| &xx - &omega_j * xg.transpose())),
    };
    symmetrize(&mut info);
    Ok(ScoreComponents {
        score,
        info,
        kappa4_hat: k4 / m + 1.0,
        j11,
        omega: xg,
        j12,
        j: gg,
    })
}

/// mean(x x') - Omega J^-1 Omega' as R22' R22 from a QR factorization of
/// the stacked rows [grad | x] / sqrt(m), which avoids the cancellation in
/// the explicit difference. `None` when there are too few rows.
fn uncentered_info(x: &GradPath, grad: &GradPath, r0: usize) -> Option<DMatrix<f64>> {
    let (a, d) = (x.dim(), grad.dim());
    let rows = x.len() - r0;
    if rows < a + d {
        return None;
    }
    let scale = 1.0 / (rows as f64).sqrt();
    let stacked = DMatrix::from_fn(rows, d + a, |t, k| {
        scale * if k < d { grad.row(r0 + t)[k] } else { x.row(r0 + t)[k - d] }
    });
    let r = stacked.qr().r();
    let r22 = r.view((d, d), (a, a));
    Some(r22.transpose() * r22)
}

fn lm_report(name: TestName, sc: ScoreComponents, context: &str, opts: &TestOptions, mut warnings: Vec<String>) -> Result<TestReport> {
    let df = sc.score.len();
    let k = sc.kappa4_hat - 1.0;
    if !(k > 0.0) {
        return Err(Error::Numeric("kappa4 - 1 is zero; residuals are degenerate".into()));
    }
    let (q, pivot) = quadratic_with_policy(&sc.info, &sc.score, context, opts, &mut warnings)?;
    let statistic = (q / k).max(0.0);
    let mut components = BTreeMap::new();
    components.insert("score".to_string(), Component::Vector(sc.score));
    components.insert("info".to_string(), Component::Matrix(sc.info));
    components.insert("kappa4_hat".to_string(), Component::Scalar(sc.kappa4_hat));
    components.insert("j11".to_string(), Component::Matrix(sc.j11));
    components.insert("j12".to_string(), Component::Matrix(sc.j12));
    components.insert("omega".to_string(), Component::Matrix(sc.omega));
    components.insert("j".to_string(), Component::Matrix(sc.j));
    components.insert("min_pivot".to_string(), Component::Scalar(pivot));
    Ok(TestReport {
        name,
        statistic,
        df,
        p_value: chi2_sf(statistic, df)?,
        components,
        warnings,
    })
}

fn reduced_grad(g: &GradPath, layout: &AslogLayout) -> GradPath {
    let dim = layout.dim();
    if dim == g.dim() {
        return g.clone();
    }
    let mut out = GradPath::zeros(g.len(), dim);
    for t in 0..g.len() {
        layout.reduce(g.row(t), out.row_mut(t));
    }
    out
}

fn squares(v: &[f64]) -> Vec<f64> {
    v.iter().map(|e| e * e).collect()
}

/// LM test of the AS-Log-GARCH null against the augmented model with `ell`
/// lags of the exponential terms; chi-square with 2 ell degrees of freedom.
pub fn lm_test_aslog_vs_augmented(fit: &FitResult, eps: &ReturnSeries, ell: usize, init: &InitPolicy, opts: &TestOptions) -> Result<TestReport> {
    let FittedModel::AsLog { params, restrict_alpha } = &fit.model else {
        return Err(Error::invalid("LM test against the augmented Log-GARCH needs an AS-Log-GARCH fit"));
    };
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    let mut warnings = Vec::new();
    if !fit.converged {
        warnings.push("fit did not converge".to_string());
    }
    let layout = AslogLayout { order: params.order(), restrict_alpha: *restrict_alpha };
    let (out, g) = filter_grad_aslog(params, eps, init)?;
    let nu = nu_hat(&out, &params.beta, ell)?;
    let r0 = out.r0.max(ell);
    if eps.len() <= r0 + 1 {
        return Err(Error::invalid("series too short for the test"));
    }
    let sc = score_components(&squares(&out.residuals), &nu, &reduced_grad(&g, &layout), r0, opts, &mut warnings)?;
    lm_report(TestName::LmAslogVsAugmented, sc, "LM information matrix", opts, warnings)
}

/// LM test of the EGARCH(1,1) null against the augmented EGARCH model with
/// `q` Log-GARCH lags; chi-square with 3q degrees of freedom.
pub fn lm_test_egarch_vs_loggarch(fit: &FitResult, eps: &ReturnSeries, q: usize, init: &InitPolicy, opts: &TestOptions) -> Result<TestReport> {
    let FittedModel::Egarch { params } = &fit.model else {
        return Err(Error::invalid("LM test against the augmented EGARCH needs an EGARCH fit"));
    };
    if q == 0 {
        return Err(Error::invalid("q must be at least 1"));
    }
    let mut warnings = Vec::new();
    if !fit.converged {
        warnings.push("fit did not converge".to_string());
    }
    let (out, g) = filter_grad_egarch(params, eps, init)?;
    let d = egarch_grad_alpha(&AugmentedEgarchParams::null(*params, q)?, eps, init)?.d;
    let r0 = q.max(1);
    if eps.len() <= r0 + 1 {
        return Err(Error::invalid("series too short for the test"));
    }
    let sc = score_components(&squares(&out.residuals), &d, &g, r0, opts, &mut warnings)?;
    lm_report(TestName::LmEgarchVsLoggarch, sc, "LM information matrix", opts, warnings)
}

/// Portmanteau statistic from squared residuals and null-model gradients.
pub fn portmanteau_from_parts(eta2: &[f64], grad: &GradPath, r0: usize, m: usize, name: TestName, opts: &TestOptions) -> Result<TestReport> {
    let n = eta2.len();
    if m == 0 || m >= n.saturating_sub(r0) {
        return Err(Error::invalid(format!("need 1 <= m < n - r0 = {}", n.saturating_sub(r0))));
    }
    if grad.len() != n {
        return Err(Error::invalid("gradient path length differs from the series"));
    }
    let cnt = (n - r0) as f64;
    let dev: Vec<f64> = eta2.iter().map(|e| e - 1.0).collect();
    let mut r = DVector::<f64>::zeros(m);
    let mut km = DMatrix::<f64>::zeros(m, grad.dim());
    for h in 1..=m {
        for t in r0 + h..n {
            r[h - 1] += dev[t] * dev[t - h];
            for (k, gk) in grad.row(t).iter().enumerate() {
                km[(h - 1, k)] += dev[t - h] * gk;
            }
        }
    }
    r /= cnt;
    km /= cnt;
    let k = dev[r0..].iter().map(|d| d * d).sum::<f64>() / cnt;
    let mut warnings = Vec::new();
    let mut components = BTreeMap::new();
    components.insert("r_hat".to_string(), Component::Vector(r.clone()));
    components.insert("k_m".to_string(), Component::Matrix(km.clone()));
    components.insert("kappa4_hat".to_string(), Component::Scalar(k + 1.0));
    if r.iter().all(|v| *v == 0.0) {
        return Ok(TestReport { name, statistic: 0.0, df: m, p_value: 1.0, components, warnings });
    }
    let mut j = DMatrix::<f64>::zeros(grad.dim(), grad.dim());
    for t in r0..n {
        let g = grad.row(t);
        for a in 0..g.len() {
            for b in 0..g.len() {
                j[(a, b)] += g[a] * g[b];
            }
        }
    }
    j /= cnt;
    let j_inv = inverse_with_policy(&j, "information matrix J", opts, &mut warnings)?;
    let mut d = DMatrix::<f64>::identity(m, m) * (k * k) - (&km * &j_inv * km.transpose()) * k;
    symmetrize(&mut d);
    let (q, pivot) = quadratic_with_policy(&d, &r, "portmanteau matrix D", opts, &mut warnings)?;
    let statistic = (cnt * q).max(0.0);
    components.insert("d".to_string(), Component::Matrix(d));
    components.insert("min_pivot".to_string(), Component::Scalar(pivot));
    Ok(TestReport {
        name,
        statistic,
        df: m,
        p_value: chi2_sf(statistic, m)?,
        components,
        warnings,
    })
}

/// Squared-residual autocovariance test with `m` lags; chi-square with m
/// degrees of freedom. For EGARCH fits the limit is asserted, not proven.
pub fn portmanteau_test(fit: &FitResult, eps: &ReturnSeries, m: usize, init: &InitPolicy, opts: &TestOptions) -> Result<TestReport> {
    let (eta2, grad, r0, name) = match &fit.model {
        FittedModel::AsLog { params, restrict_alpha } => {
            let layout = AslogLayout { order: params.order(), restrict_alpha: *restrict_alpha };
            let (out, g) = filter_grad_aslog(params, eps, init)?;
            (squares(&out.residuals), reduced_grad(&g, &layout), out.r0, TestName::PortmanteauAslog)
        }
        FittedModel::Egarch { params } => {
            let (out, g) = filter_grad_egarch(params, eps, init)?;
            (squares(&out.residuals), g, out.r0, TestName::PortmanteauEgarch)
        }
    };
    let mut rep = portmanteau_from_parts(&eta2, &grad, r0, m, name, opts)?;
    if !fit.converged {
        rep.warnings.insert(0, "fit did not converge".to_string());
    }
    Ok(rep)
}
