use crate::error::{Error, Result};
use crate::model::{AsLogGarchParams, AugmentedLogGarchParams, FilterOutput, ReturnSeries};
use crate::numerics::spectral_radius_bound;

use super::{check_finite, prepare, residuals, GradPath, InitPolicy, Prepared, ResolvedInit};

fn check_len(n: usize, r0: usize) -> Result<()> {
    if n <= r0 {
        return Err(Error::invalid(format!(
            "series of length {n} is too short for lag order {r0}"
        )));
    }
    Ok(())
}

/// (negative?, log eps^2) of the observation `lag` steps before index `t`.
#[inline]
fn lagged(prep: &Prepared, init: &ResolvedInit, t: usize, lag: usize) -> (bool, f64) {
    if t >= lag {
        (prep.negative[t - lag], prep.log_eps2[t - lag])
    } else {
        (init.presample_negative, init.presample_eps2.ln())
    }
}

#[inline]
fn lagged_h(h: &[f64], init: &ResolvedInit, t: usize, lag: usize) -> f64 {
    if t >= lag {
        h[t - lag]
    } else {
        init.log_sigma2_0
    }
}

#[inline]
fn aslog_value(theta: &AsLogGarchParams, prep: &Prepared, init: &ResolvedInit, h: &[f64], t: usize) -> f64 {
    let mut v = theta.omega;
    for i in 0..theta.q() {
        let (neg, le2) = lagged(prep, init, t, i + 1);
        if neg {
            v += theta.omega_minus[i] + theta.alpha_minus[i] * le2;
        } else {
            v += theta.alpha_plus[i] * le2;
        }
    }
    for j in 0..theta.p() {
        v += theta.beta[j] * lagged_h(h, init, t, j + 1);
    }
    v
}

/// log sigma~^2 path from already prepared data; used by the optimizer to
/// avoid redoing the log transform at every evaluation.
pub(crate) fn aslog_path(theta: &AsLogGarchParams, prep: &Prepared, init: &ResolvedInit, h: &mut Vec<f64>) -> Result<()> {
    h.clear();
    for t in 0..prep.log_eps2.len() {
        let v = aslog_value(theta, prep, init, h, t);
        check_finite(t, v)?;
        h.push(v);
    }
    Ok(())
}

fn run_aslog(theta: &AsLogGarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<(Vec<f64>, Prepared, ResolvedInit)> {
    theta.validate()?;
    let r0 = theta.p().max(theta.q());
    check_len(eps.len(), r0)?;
    let init = init.resolve(eps)?;
    let prep = prepare(eps, &init)?;
    let mut h = Vec::with_capacity(eps.len());
    for t in 0..eps.len() {
        let v = aslog_value(theta, &prep, &init, &h, t);
        check_finite(t, v)?;
        h.push(v);
    }
    Ok((h, prep, init))
}

/// Filters log sigma~_t^2 of the AS-Log-GARCH(p, q) model.
pub fn filter_aslog(theta: &AsLogGarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<FilterOutput> {
    let (h, prep, _) = run_aslog(theta, eps, init)?;
    Ok(FilterOutput {
        residuals: residuals(eps.values(), &h),
        log_sigma2: h,
        r0: theta.p().max(theta.q()),
        floored: prep.floored,
    })
}

/// Exact derivative of the filtered log-volatility with respect to theta,
/// holding the presample values fixed.
pub fn grad_aslog(theta: &AsLogGarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<GradPath> {
    Ok(filter_grad_aslog(theta, eps, init)?.1)
}

/// Filter and gradient in one pass.
pub fn filter_grad_aslog(
    theta: &AsLogGarchParams,
    eps: &ReturnSeries,
    init: &InitPolicy,
) -> Result<(FilterOutput, GradPath)> {
    let (h, prep, init) = run_aslog(theta, eps, init)?;
    let (p, q) = (theta.p(), theta.q());
    let d = theta.dim();
    let n = eps.len();
    let mut g = GradPath::zeros(n, d);
    let mut x = vec![0.0; d];
    for t in 0..n {
        x[0] = 1.0;
        for i in 0..q {
            let (neg, le2) = lagged(&prep, &init, t, i + 1);
            x[1 + i] = if neg { 1.0 } else { 0.0 };
            x[1 + q + i] = if neg { 0.0 } else { le2 };
            x[1 + 2 * q + i] = if neg { le2 } else { 0.0 };
        }
        for j in 0..p {
            x[1 + 3 * q + j] = lagged_h(&h, &init, t, j + 1);
        }
        for j in 0..p {
            if t > j {
                let b = theta.beta[j];
                for (xk, gk) in x.iter_mut().zip(g.row(t - j - 1)) {
                    *xk += b * gk;
                }
            }
        }
        g.row_mut(t).copy_from_slice(&x);
    }
    let out = FilterOutput {
        residuals: residuals(eps.values(), &h),
        log_sigma2: h,
        r0: p.max(q),
        floored: prep.floored,
    };
    Ok((out, g))
}

/// Filters the Log-GARCH model augmented with EGARCH-type terms
/// `(gamma_k+ eps+_{t-k} + gamma_k- eps-_{t-k}) exp(-log sigma~^2_{t-k} / 2)`.
pub fn filter_augmented_log(
    vartheta: &AugmentedLogGarchParams,
    eps: &ReturnSeries,
    init: &InitPolicy,
) -> Result<FilterOutput> {
    let theta = &vartheta.theta;
    theta.validate()?;
    let ell = vartheta.ell();
    let r0 = theta.p().max(theta.q()).max(ell);
    check_len(eps.len(), r0)?;
    let init = init.resolve(eps)?;
    let prep = prepare(eps, &init)?;
    let e = eps.values();
    let e0 = init.presample_eps();
    let mut h: Vec<f64> = Vec::with_capacity(e.len());
    for t in 0..e.len() {
        let mut v = aslog_value(theta, &prep, &init, &h, t);
        for k in 0..ell {
            let (gp, gm) = (vartheta.gamma_plus[k], vartheta.gamma_minus[k]);
            if gp == 0.0 && gm == 0.0 {
                continue;
            }
            let (el, hl) = if t > k { (e[t - k - 1], h[t - k - 1]) } else { (e0, init.log_sigma2_0) };
            let term = if el > 0.0 { gp * el } else { gm * (-el) };
            v += term * (-0.5 * hl).exp();
        }
        check_finite(t, v)?;
        h.push(v);
    }
    Ok(FilterOutput {
        residuals: residuals(e, &h),
        log_sigma2: h,
        r0,
        floored: prep.floored,
    })
}

/// Fails unless every root of 1 - beta_1 z - ... - beta_p z^p lies outside
/// the unit circle.
pub(crate) fn check_lag_polynomial(beta: &[f64]) -> Result<()> {
    let radius = match beta.len() {
        0 => 0.0,
        1 => beta[0].abs(),
        p => {
            let mut c = nalgebra::DMatrix::<f64>::zeros(p, p);
            for j in 0..p {
                c[(0, j)] = beta[j];
            }
            for i in 1..p {
                c[(i, i - 1)] = 1.0;
            }
            spectral_radius_bound(&c)?
        }
    };
    if radius < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "beta lag polynomial has a root on or inside the unit circle (companion radius {radius:.6})"
        )))
    }
}

/// Score regressors nu^_t = B^{-1}(L) eta^_{t-1} of the LM test against the
/// augmented model, with eta^_t = 0 for t <= 0.
///
/// Columns are interleaved by lag: (eta+_{t-1}, eta-_{t-1}, ..., eta+_{t-ell}, eta-_{t-ell}).
pub fn nu_hat(out: &FilterOutput, beta: &[f64], ell: usize) -> Result<GradPath> {
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    check_lag_polynomial(beta)?;
    let n = out.n();
    let d = 2 * ell;
    let eta = &out.residuals;
    let mut nu = GradPath::zeros(n, d);
    let mut x = vec![0.0; d];
    for t in 0..n {
        for k in 0..ell {
            let v = if t > k { eta[t - k - 1] } else { 0.0 };
            x[2 * k] = v.max(0.0);
            x[2 * k + 1] = (-v).max(0.0);
        }
        for (j, b) in beta.iter().enumerate() {
            if t > j {
                for (xk, vk) in x.iter_mut().zip(nu.row(t - j - 1)) {
                    *xk += b * vk;
                }
            }
        }
        nu.row_mut(t).copy_from_slice(&x);
    }
    Ok(nu)
}

/// sigma as a function of eps_{t-1} in the AS-Log-ARCH(1) model:
/// sigma^2 = exp(omega + omega_1- 1{eps<0}) (eps^2)^alpha (eps^2)^(tau 1{eps<0})
/// with alpha = alpha_1+ and tau = alpha_1- - alpha_1+. Beta terms are ignored.
pub fn news_impact_curve(theta: &AsLogGarchParams, grid: &[f64]) -> Result<Vec<f64>> {
    theta.validate()?;
    if theta.q() != 1 {
        return Err(Error::invalid(format!("news impact curve needs q = 1, got q = {}", theta.q())));
    }
    let (w, wm, ap, am) = (theta.omega, theta.omega_minus[0], theta.alpha_plus[0], theta.alpha_minus[0]);
    grid.iter()
        .enumerate()
        .map(|(i, &e)| {
            if e == 0.0 || !e.is_finite() {
                return Err(Error::invalid(format!("grid point {i} is {e}; log eps^2 undefined")));
            }
            let le2 = (e * e).ln();
            let log_s2 = if e < 0.0 { w + wm + am * le2 } else { w + ap * le2 };
            Ok((0.5 * log_s2).exp())
        })
        .collect()
}
