//! Gaussian QML estimation of the AS-Log-GARCH(p, q) and EGARCH(1,1) models.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AsLogGarchOrder, AsLogGarchParams, EgarchParams, FitResult, FittedModel, ReturnSeries};
use crate::numerics::{inverse_spd, ridge, Rng};
use crate::optim::{nelder_mead, projected_bfgs, Bounds, Minimum};
use crate::stationarity::{egarch_invertibility_check, moment_matrix_check};
use crate::volatility::{aslog_path, filter_grad_aslog, filter_grad_egarch, prepare, run_egarch, GradPath, InitPolicy};

/// Upper bound on |beta| used by the default boxes.
pub const BETA_MAX: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    /// Simplex iterations per start (and BFGS iterations in the refinement).
    pub max_iters: usize,
    /// Convergence tolerance on the spread of simplex criterion values.
    pub tol: f64,
    /// Random starts drawn in addition to the deterministic one.
    pub restarts: usize,
    /// Box over the free parameters; `None` uses the family default.
    pub bounds: Option<Bounds>,
    /// Added to the diagonal of J when it is numerically singular; 0 makes
    /// singularity an error.
    pub ridge: f64,
    pub seed: u64,
    /// Run the gradient refinement after the simplex search.
    pub refine: bool,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 1e-10,
            restarts: 3,
            bounds: None,
            ridge: 0.0,
            seed: 0,
            refine: true,
        }
    }
}

impl OptimConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be positive"));
        }
        if !(self.ridge >= 0.0) {
            return Err(Error::invalid("ridge must be nonnegative"));
        }
        Ok(())
    }
}

/// Free-parameter layout of an AS-Log-GARCH fit. With `restrict_alpha` the
/// vector is (omega, omega_minus, alpha, beta) and alpha+ = alpha- = alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AslogLayout {
    pub order: AsLogGarchOrder,
    pub restrict_alpha: bool,
}

impl AslogLayout {
    pub fn dim(&self) -> usize {
        if self.restrict_alpha {
            2 * self.order.q + self.order.p + 1
        } else {
            self.order.dim()
        }
    }

    pub fn names(&self) -> Vec<String> {
        if !self.restrict_alpha {
            return AsLogGarchParams::names(self.order);
        }
        let mut n = vec!["omega".to_string()];
        n.extend((1..=self.order.q).map(|i| format!("omega_minus[{i}]")));
        n.extend((1..=self.order.q).map(|i| format!("alpha[{i}]")));
        n.extend((1..=self.order.p).map(|j| format!("beta[{j}]")));
        n
    }

    pub fn to_theta(&self, phi: &[f64]) -> AsLogGarchParams {
        let (p, q) = (self.order.p, self.order.q);
        if !self.restrict_alpha {
            return AsLogGarchParams::from_vec(self.order, phi).expect("layout length");
        }
        let alpha = phi[1 + q..1 + 2 * q].to_vec();
        AsLogGarchParams {
            omega: phi[0],
            omega_minus: phi[1..1 + q].to_vec(),
            alpha_plus: alpha.clone(),
            alpha_minus: alpha,
            beta: phi[1 + 2 * q..1 + 2 * q + p].to_vec(),
        }
    }

    pub fn from_theta(&self, theta: &AsLogGarchParams) -> Vec<f64> {
        if !self.restrict_alpha {
            return theta.to_vec();
        }
        let mut v = vec![theta.omega];
        v.extend_from_slice(&theta.omega_minus);
        v.extend(theta.alpha_plus.iter().zip(&theta.alpha_minus).map(|(a, b)| 0.5 * (a + b)));
        v.extend_from_slice(&theta.beta);
        v
    }

    /// Chain rule from a theta-gradient to the free parameters.
    pub fn reduce(&self, g: &[f64], out: &mut [f64]) {
        if !self.restrict_alpha {
            out.copy_from_slice(g);
            return;
        }
        let (p, q) = (self.order.p, self.order.q);
        out[..1 + q].copy_from_slice(&g[..1 + q]);
        for i in 0..q {
            out[1 + q + i] = g[1 + q + i] + g[1 + 2 * q + i];
        }
        out[1 + 2 * q..1 + 2 * q + p].copy_from_slice(&g[1 + 3 * q..1 + 3 * q + p]);
    }

    /// omega, omega_- in [-5, 5]; alpha in [-1, 1]; beta in [-0.999, 0.999].
    pub fn default_bounds(&self) -> Bounds {
        let (p, q) = (self.order.p, self.order.q);
        let na = if self.restrict_alpha { q } else { 2 * q };
        let mut lo = vec![-5.0; 1 + q];
        let mut hi = vec![5.0; 1 + q];
        lo.extend(std::iter::repeat(-1.0).take(na));
        hi.extend(std::iter::repeat(1.0).take(na));
        lo.extend(std::iter::repeat(-BETA_MAX).take(p));
        hi.extend(std::iter::repeat(BETA_MAX).take(p));
        Bounds::new(lo, hi).expect("default box")
    }
}

struct AslogData<'a> {
    eps2: Vec<f64>,
    r0: usize,
    prep: crate::volatility::Prepared,
    init: crate::volatility::ResolvedInit,
    series: &'a ReturnSeries,
    policy: InitPolicy,
}

impl<'a> AslogData<'a> {
    fn new(eps: &'a ReturnSeries, order: AsLogGarchOrder, init: &InitPolicy) -> Result<Self> {
        let r0 = order.p.max(order.q);
        if eps.len() <= r0 + 1 {
            return Err(Error::invalid(format!("series of length {} too short for the order", eps.len())));
        }
        let resolved = init.resolve(eps)?;
        Ok(Self {
            eps2: eps.values().iter().map(|e| e * e).collect(),
            r0,
            prep: prepare(eps, &resolved)?,
            init: resolved,
            series: eps,
            policy: *init,
        })
    }

    fn criterion(&self, theta: &AsLogGarchParams, h: &mut Vec<f64>) -> f64 {
        if aslog_path(theta, &self.prep, &self.init, h).is_err() {
            return f64::INFINITY;
        }
        criterion_from_path(&self.eps2, h, self.r0)
    }
}

fn criterion_from_path(eps2: &[f64], h: &[f64], r0: usize) -> f64 {
    let m = (eps2.len() - r0) as f64;
    let s: f64 = eps2[r0..].iter().zip(&h[r0..]).map(|(e2, l)| e2 * (-l).exp() + l).sum();
    let q = s / m;
    if q.is_finite() {
        q
    } else {
        f64::INFINITY
    }
}

/// (n - r0)^-1 sum_{t > r0} (eps_t^2 / sigma~_t^2 + log sigma~_t^2).
///
/// Filter divergence yields `+inf`, the sentinel the optimizer sees.
pub fn qmle_criterion(theta: &AsLogGarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<f64> {
    theta.validate()?;
    let data = AslogData::new(eps, theta.order(), init)?;
    Ok(data.criterion(theta, &mut Vec::with_capacity(eps.len())))
}

/// The EGARCH(1,1) criterion, r0 = 1.
pub fn qmle_criterion_egarch(zeta: &EgarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<f64> {
    zeta.validate()?;
    if eps.len() < 3 {
        return Err(Error::invalid("series too short"));
    }
    let resolved = init.resolve(eps)?;
    let eps2: Vec<f64> = eps.values().iter().map(|e| e * e).collect();
    Ok(match run_egarch(zeta, eps.values(), &resolved) {
        Ok(h) => criterion_from_path(&eps2, &h, 1),
        Err(_) => f64::INFINITY,
    })
}

/// Criterion and its gradient (n - r0)^-1 sum (1 - eta_t^2) grad log sigma_t^2.
fn objective_with_gradient(eps2: &[f64], h: &[f64], g: &GradPath, r0: usize, reduce: impl Fn(&[f64], &mut [f64]), dim: usize) -> Option<(f64, Vec<f64>)> {
    let q = criterion_from_path(eps2, h, r0);
    if !q.is_finite() {
        return None;
    }
    let m = (eps2.len() - r0) as f64;
    let mut grad = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    for t in r0..eps2.len() {
        let w = 1.0 - eps2[t] * (-h[t]).exp();
        reduce(g.row(t), &mut row);
        for k in 0..dim {
            grad[k] += w * row[k];
        }
    }
    grad.iter_mut().for_each(|v| *v /= m);
    if grad.iter().all(|v| v.is_finite()) {
        Some((q, grad))
    } else {
        None
    }
}

fn best_of(results: Vec<Result<Minimum>>) -> Result<(usize, Minimum)> {
    let mut best: Option<(usize, Minimum)> = None;
    let mut first_err = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => {
                if best.as_ref().map_or(true, |(_, b)| m.value < b.value) {
                    best = Some((i, m));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or_else(|| Error::Numeric("no optimizer start".into())))
}

fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

fn aslog_starts(layout: &AslogLayout, mean_log_eps2: f64, config: &OptimConfig, bounds: &Bounds) -> Vec<Vec<f64>> {
    let (p, q) = (layout.order.p, layout.order.q);
    let make = |om_minus: Vec<f64>, ap: Vec<f64>, am: Vec<f64>, beta: Vec<f64>| {
        let persist: f64 = beta.iter().sum::<f64>() + 0.5 * (ap.iter().sum::<f64>() + am.iter().sum::<f64>());
        let theta = AsLogGarchParams {
            omega: (1.0 - persist) * mean_log_eps2,
            omega_minus: om_minus,
            alpha_plus: ap,
            alpha_minus: am,
            beta,
        };
        let mut v = layout.from_theta(&theta);
        bounds.project(&mut v);
        v
    };
    let mut beta0 = vec![0.0; p];
    if p > 0 {
        beta0[0] = 0.9;
    }
    let a0 = if p > 0 { 0.05 } else { 0.2 };
    let mut starts = vec![make(vec![0.0; q], vec![a0; q], vec![a0; q], beta0)];
    for k in 0..config.restarts {
        let mut rng = Rng::child(config.seed, k as u64);
        let mut cand = None;
        for _ in 0..100 {
            let ap: Vec<f64> = (0..q).map(|_| uniform(&mut rng, 0.0, 0.15)).collect();
            let am: Vec<f64> = if layout.restrict_alpha { ap.clone() } else { (0..q).map(|_| uniform(&mut rng, 0.0, 0.15)).collect() };
            let om: Vec<f64> = (0..q).map(|_| uniform(&mut rng, -0.1, 0.1)).collect();
            let mut beta = vec![0.0; p];
            if p > 0 {
                beta[0] = uniform(&mut rng, 0.5, 0.98);
            }
            let th = AsLogGarchParams { omega: 0.0, omega_minus: om.clone(), alpha_plus: ap.clone(), alpha_minus: am.clone(), beta: beta.clone() };
            let ok = moment_matrix_check(&th).map(|m| m.pass).unwrap_or(false);
            cand = Some((om, ap, am, beta));
            if ok {
                break;
            }
        }
        let (om, ap, am, beta) = cand.expect("at least one draw");
        starts.push(make(om, ap, am, beta));
    }
    starts
}

fn mean_log_eps2(eps: &ReturnSeries) -> f64 {
    eps.mean_square().max(f64::MIN_POSITIVE).ln()
}

/// QMLE of the AS-Log-GARCH(p, q) model.
pub fn qmle_aslog(eps: &ReturnSeries, order: AsLogGarchOrder, config: &OptimConfig, init: &InitPolicy) -> Result<FitResult> {
    fit_aslog(eps, AslogLayout { order, restrict_alpha: false }, config, init)
}

/// QMLE of the AS-Log-GARCH(p, q) model with alpha+ = alpha- lag by lag.
pub fn qmle_aslog_restricted(eps: &ReturnSeries, order: AsLogGarchOrder, config: &OptimConfig, init: &InitPolicy) -> Result<FitResult> {
    fit_aslog(eps, AslogLayout { order, restrict_alpha: true }, config, init)
}

pub fn fit_aslog(eps: &ReturnSeries, layout: AslogLayout, config: &OptimConfig, init: &InitPolicy) -> Result<FitResult> {
    config.validate()?;
    let data = AslogData::new(eps, layout.order, init)?;
    let bounds = config.bounds.clone().unwrap_or_else(|| layout.default_bounds());
    if bounds.dim() != layout.dim() {
        return Err(Error::invalid(format!("box has {} coordinates, model has {}", bounds.dim(), layout.dim())));
    }
    let starts = aslog_starts(&layout, mean_log_eps2(eps), config, &bounds);
    let results: Vec<Result<Minimum>> = starts
        .par_iter()
        .map(|x0| {
            let scratch = std::cell::RefCell::new(Vec::with_capacity(eps.len()));
            let f = |phi: &[f64]| data.criterion(&layout.to_theta(phi), &mut scratch.borrow_mut());
            nelder_mead(f, x0, &bounds, config.max_iters, config.tol)
        })
        .collect();
    let (_, simplex) = best_of(results)?;
    let mut best = simplex.clone();
    let mut iterations = simplex.iterations;
    let mut converged = simplex.converged;
    if config.refine && simplex.value.is_finite() {
        let dim = layout.dim();
        let fg = |phi: &[f64]| {
            let theta = layout.to_theta(phi);
            let (out, g) = filter_grad_aslog(&theta, data.series, &data.policy).ok()?;
            objective_with_gradient(&data.eps2, &out.log_sigma2, &g, data.r0, |a, b| layout.reduce(a, b), dim)
        };
        if let Ok(r) = projected_bfgs(fg, &simplex.x, &bounds, config.max_iters, 1e-8) {
            iterations += r.iterations;
            if r.value <= simplex.value {
                converged = converged || r.converged;
                best = r;
            }
        }
    }
    if !best.value.is_finite() || !converged {
        return Err(Error::NonConvergence {
            iterations,
            message: "QMLE search did not converge".into(),
            best_point: best.x,
            best_value: best.value,
        });
    }
    let theta = layout.to_theta(&best.x);
    let mut fit = summarize_aslog(&theta, layout, eps, init, config.ridge)?;
    fit.converged = converged;
    fit.iterations = iterations;
    for i in bounds.active(&best.x, 1e-6) {
        fit.warnings.push(format!("{} is at the boundary of the parameter box", fit.param_names[i]));
    }
    Ok(fit)
}

fn egarch_to_zeta(phi: &[f64]) -> EgarchParams {
    EgarchParams {
        omega: phi[0],
        gamma: phi[1],
        delta: phi[1].abs() + phi[2] * phi[2],
        beta: phi[3],
    }
}

fn egarch_default_bounds() -> Bounds {
    Bounds::new(vec![-5.0, -1.0, -1.5, -BETA_MAX], vec![5.0, 1.0, 1.5, BETA_MAX]).expect("default box")
}

fn egarch_starts(mean_log_eps2: f64, config: &OptimConfig, bounds: &Bounds) -> Vec<Vec<f64>> {
    // E|eta| = sqrt(2 / pi) under Gaussian noise
    let mean_abs = (2.0 / std::f64::consts::PI).sqrt();
    let make = |gamma: f64, delta: f64, beta: f64| {
        let mut v = vec![(1.0 - beta) * mean_log_eps2 - delta * mean_abs, gamma, (delta - gamma.abs()).max(0.0).sqrt(), beta];
        bounds.project(&mut v);
        v
    };
    let mut starts = vec![make(0.0, 0.1, 0.9)];
    for k in 0..config.restarts {
        let mut rng = Rng::child(config.seed ^ 0xE6A2_C4, k as u64);
        let gamma = uniform(&mut rng, -0.15, 0.15);
        let delta = gamma.abs() + uniform(&mut rng, 0.0, 0.3);
        let beta = uniform(&mut rng, 0.5, 0.98);
        starts.push(make(gamma, delta, beta));
    }
    starts
}

/// QMLE of the EGARCH(1,1) model over (omega, gamma, s, beta) with
/// delta = |gamma| + s^2, so delta >= |gamma| holds everywhere in the box.
pub fn qmle_egarch11(eps: &ReturnSeries, config: &OptimConfig, init: &InitPolicy) -> Result<FitResult> {
    config.validate()?;
    if eps.len() < 10 {
        return Err(Error::invalid("series too short for EGARCH estimation"));
    }
    let resolved = init.resolve(eps)?;
    let eps2: Vec<f64> = eps.values().iter().map(|e| e * e).collect();
    let bounds = config.bounds.clone().unwrap_or_else(egarch_default_bounds);
    if bounds.dim() != 4 {
        return Err(Error::invalid("EGARCH box needs 4 coordinates (omega, gamma, s, beta)"));
    }
    let crit = |phi: &[f64]| match run_egarch(&egarch_to_zeta(phi), eps.values(), &resolved) {
        Ok(h) => criterion_from_path(&eps2, &h, 1),
        Err(_) => f64::INFINITY,
    };
    let starts = egarch_starts(mean_log_eps2(eps), config, &bounds);
    let results: Vec<Result<Minimum>> = starts
        .par_iter()
        .map(|x0| nelder_mead(crit, x0, &bounds, config.max_iters, config.tol))
        .collect();
    let (_, simplex) = best_of(results)?;
    let mut best = simplex.clone();
    let mut iterations = simplex.iterations;
    let mut converged = simplex.converged;
    if config.refine && simplex.value.is_finite() {
        let fg = |phi: &[f64]| {
            let z = egarch_to_zeta(phi);
            let (out, g) = filter_grad_egarch(&z, eps, init).ok()?;
            let (gs, s) = (if phi[1] >= 0.0 { 1.0 } else { -1.0 }, phi[2]);
            objective_with_gradient(&eps2, &out.log_sigma2, &g, 1, |a, b| {
                b[0] = a[0];
                b[1] = a[1] + gs * a[2];
                b[2] = 2.0 * s * a[2];
                b[3] = a[3];
            }, 4)
        };
        if let Ok(r) = projected_bfgs(fg, &simplex.x, &bounds, config.max_iters, 1e-8) {
            iterations += r.iterations;
            if r.value <= simplex.value {
                converged = converged || r.converged;
                best = r;
            }
        }
    }
    if !best.value.is_finite() || !converged {
        return Err(Error::NonConvergence {
            iterations,
            message: "EGARCH QMLE search did not converge".into(),
            best_point: best.x,
            best_value: best.value,
        });
    }
    let zeta = egarch_to_zeta(&best.x);
    let mut fit = summarize_egarch(&zeta, eps, init, config.ridge)?;
    fit.converged = converged;
    fit.iterations = iterations;
    let names = ["omega", "gamma", "s", "beta"];
    for i in bounds.active(&best.x, 1e-6) {
        fit.warnings.push(format!("{} is at the boundary of the parameter box", names[i]));
    }
    Ok(fit)
}

struct Moments {
    loglik_per_obs: f64,
    kappa4_minus_1: f64,
    criterion: f64,
}

fn moments(eps: &ReturnSeries, h: &[f64], r0: usize) -> Moments {
    let e = eps.values();
    let m = (e.len() - r0) as f64;
    let (mut ll, mut k4, mut q) = (0.0, 0.0, 0.0);
    for t in r0..e.len() {
        let eta2 = e[t] * e[t] * (-h[t]).exp();
        let lt = eta2 + h[t];
        q += lt;
        ll += -0.5 * ((2.0 * std::f64::consts::PI).ln() + lt);
        k4 += (1.0 - eta2).powi(2);
    }
    Moments {
        loglik_per_obs: ll / m,
        kappa4_minus_1: k4 / m,
        criterion: q / m,
    }
}

/// (n - r0)^-1 sum_{t > r0} g_t g_t'.
pub fn outer_product_mean(g: &GradPath, r0: usize, map: impl Fn(&[f64], &mut [f64]), dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::<f64>::zeros(dim, dim);
    let mut row = vec![0.0; dim];
    for t in r0..g.len() {
        map(g.row(t), &mut row);
        for a in 0..dim {
            for b in 0..=a {
                j[(a, b)] += row[a] * row[b];
            }
        }
    }
    let m = (g.len() - r0) as f64;
    for a in 0..dim {
        for b in 0..=a {
            let v = j[(a, b)] / m;
            j[(a, b)] = v;
            j[(b, a)] = v;
        }
    }
    j
}

fn covariance(j: &DMatrix<f64>, k4m1: f64, m: usize, ridge_value: f64, warnings: &mut Vec<String>) -> Result<(DMatrix<f64>, f64)> {
    let scale = k4m1 / m as f64;
    match inverse_spd(j, "information matrix J") {
        Ok(inv) => {
            let max_diag = (0..j.nrows()).fold(0.0f64, |a, i| a.max(j[(i, i)]));
            if inv.min_pivot < 1e-10 * max_diag {
                warnings.push(format!(
                    "information matrix nearly singular (smallest pivot {:.3e}); parameters may be weakly identified",
                    inv.min_pivot
                ));
            }
            Ok((inv.x * scale, 0.0))
        }
        Err(e @ Error::Singular { .. }) => {
            if ridge_value > 0.0 {
                warnings.push(format!("information matrix singular; ridge {ridge_value:e} added to its diagonal"));
                let inv = inverse_spd(&ridge(j, ridge_value), "ridged information matrix J")?;
                Ok((inv.x * scale, ridge_value))
            } else {
                Err(e)
            }
        }
        Err(e) => Err(e),
    }
}

fn std_errors(cov: &DMatrix<f64>) -> Vec<f64> {
    (0..cov.nrows()).map(|i| cov[(i, i)].max(0.0).sqrt()).collect()
}

fn summarize_aslog(theta: &AsLogGarchParams, layout: AslogLayout, eps: &ReturnSeries, init: &InitPolicy, ridge_value: f64) -> Result<FitResult> {
    let (out, g) = filter_grad_aslog(theta, eps, init)?;
    let r0 = out.r0;
    let mo = moments(eps, &out.log_sigma2, r0);
    let dim = layout.dim();
    let j = outer_product_mean(&g, r0, |a, b| layout.reduce(a, b), dim);
    let mut warnings = Vec::new();
    if out.floored > 0 {
        warnings.push(format!("{} zero returns replaced by the floor", out.floored));
    }
    let (cov, ridge_applied) = covariance(&j, mo.kappa4_minus_1, eps.len() - r0, ridge_value, &mut warnings)?;
    Ok(FitResult {
        model: FittedModel::AsLog {
            params: theta.clone(),
            restrict_alpha: layout.restrict_alpha,
        },
        params: layout.from_theta(theta),
        param_names: layout.names(),
        loglik_per_obs: mo.loglik_per_obs,
        kappa4_hat: mo.kappa4_minus_1 + 1.0,
        std_errors: std_errors(&cov),
        j_hat: j,
        cov,
        converged: true,
        iterations: 0,
        criterion_value: mo.criterion,
        n_obs: eps.len(),
        r0,
        ridge_applied,
        invertibility: None,
        warnings,
    })
}

fn summarize_egarch(zeta: &EgarchParams, eps: &ReturnSeries, init: &InitPolicy, ridge_value: f64) -> Result<FitResult> {
    let (out, g) = filter_grad_egarch(zeta, eps, init)?;
    let mo = moments(eps, &out.log_sigma2, 1);
    let j = outer_product_mean(&g, 1, |a, b| b.copy_from_slice(a), 4);
    let mut warnings = Vec::new();
    let (cov, ridge_applied) = covariance(&j, mo.kappa4_minus_1, eps.len() - 1, ridge_value, &mut warnings)?;
    let inv = egarch_invertibility_check(zeta, eps).ok();
    match inv {
        Some(c) if !c.pass => warnings.push(format!(
            "invertibility condition fails at the estimate (sample expectation {:.4})",
            c.expectation
        )),
        None => warnings.push("invertibility check indeterminate".into()),
        _ => {}
    }
    Ok(FitResult {
        model: FittedModel::Egarch { params: *zeta },
        params: zeta.to_vec(),
        param_names: EgarchParams::NAMES.iter().map(|s| s.to_string()).collect(),
        loglik_per_obs: mo.loglik_per_obs,
        kappa4_hat: mo.kappa4_minus_1 + 1.0,
        std_errors: std_errors(&cov),
        j_hat: j,
        cov,
        converged: true,
        iterations: 0,
        criterion_value: mo.criterion,
        n_obs: eps.len(),
        r0: 1,
        ridge_applied,
        invertibility: inv,
        warnings,
    })
}

impl FitResult {
    /// Fit summary (J, kappa4, covariance, likelihood) evaluated at given
    /// parameters without optimizing.
    pub fn at_params(model: &FittedModel, eps: &ReturnSeries, init: &InitPolicy, ridge_value: f64) -> Result<FitResult> {
        match model {
            FittedModel::AsLog { params, restrict_alpha } => {
                params.validate()?;
                if *restrict_alpha && !params.is_symmetric() {
                    return Err(Error::invalid("restricted model needs alpha_plus = alpha_minus"));
                }
                let layout = AslogLayout { order: params.order(), restrict_alpha: *restrict_alpha };
                summarize_aslog(params, layout, eps, init, ridge_value)
            }
            FittedModel::Egarch { params } => {
                params.validate()?;
                summarize_egarch(params, eps, init, ridge_value)
            }
        }
    }
}
