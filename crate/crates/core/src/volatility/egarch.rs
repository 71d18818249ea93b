use crate::error::{Error, Result};
use crate::model::{AugmentedEgarchParams, EgarchParams, FilterOutput, ReturnSeries};

use super::{check_finite, prepare, residuals, GradPath, InitPolicy, Prepared, ResolvedInit};

/// D~_t (derivatives with respect to the Log-GARCH block at alpha = 0) and
/// the multipliers U_t = beta - (gamma eps_t + delta |eps_t|) exp(-h_t / 2) / 2.
#[derive(Debug, Clone, PartialEq)]
pub struct EgarchGradState {
    pub d: GradPath,
    /// `u[i]` is U at time i + 1; it multiplies D~ at time i + 1 to form D~ at i + 2.
    pub u: Vec<f64>,
}

fn check_len(n: usize, need: usize) -> Result<()> {
    if n < need {
        return Err(Error::invalid(format!("series of length {n} is too short (need {need})")));
    }
    Ok(())
}

#[inline]
fn news(z: &EgarchParams, e: f64) -> f64 {
    z.gamma * e + z.delta * e.abs()
}

/// (eps, h) one step before index t.
#[inline]
fn prev(e: &[f64], h: &[f64], init: &ResolvedInit, t: usize) -> (f64, f64) {
    if t > 0 {
        (e[t - 1], h[t - 1])
    } else {
        (init.presample_eps(), init.log_sigma2_0)
    }
}

#[inline]
fn alpha_block(v: &AugmentedEgarchParams, prep: &Prepared, init: &ResolvedInit, t: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..v.q() {
        let (neg, le2) = if t > i {
            (prep.negative[t - i - 1], prep.log_eps2[t - i - 1])
        } else {
            (init.presample_negative, init.presample_eps2.ln())
        };
        if neg {
            s += v.omega_minus[i] + v.alpha_minus[i] * le2;
        } else {
            s += v.alpha_plus[i] * le2;
        }
    }
    s
}

pub(crate) fn run_egarch(z: &EgarchParams, e: &[f64], init: &ResolvedInit) -> Result<Vec<f64>> {
    let mut h = Vec::with_capacity(e.len());
    for t in 0..e.len() {
        let (ep, hp) = prev(e, &h, init, t);
        let v = z.omega + news(z, ep) * (-0.5 * hp).exp() + z.beta * hp;
        check_finite(t, v)?;
        h.push(v);
    }
    Ok(h)
}

/// Filters log sigma~_t^2 of the EGARCH(1,1) model.
pub fn filter_egarch(zeta: &EgarchParams, eps: &ReturnSeries, init: &InitPolicy) -> Result<FilterOutput> {
    zeta.validate()?;
    check_len(eps.len(), 2)?;
    let init = init.resolve(eps)?;
    let h = run_egarch(zeta, eps.values(), &init)?;
    Ok(FilterOutput {
        residuals: residuals(eps.values(), &h),
        log_sigma2: h,
        r0: 1,
        floored: 0,
    })
}

/// Filter plus the exact zeta-gradient (omega, gamma, delta, beta) under
/// fixed presample values:
/// dh_t = (1, eta~_{t-1}, |eta~_{t-1}|, h_{t-1}) + U_{t-1} dh_{t-1}.
pub fn filter_grad_egarch(
    zeta: &EgarchParams,
    eps: &ReturnSeries,
    init: &InitPolicy,
) -> Result<(FilterOutput, GradPath)> {
    zeta.validate()?;
    check_len(eps.len(), 2)?;
    let init = init.resolve(eps)?;
    let e = eps.values();
    let h = run_egarch(zeta, e, &init)?;
    let mut g = GradPath::zeros(e.len(), 4);
    let mut last = [0.0; 4];
    for t in 0..e.len() {
        let (ep, hp) = prev(e, &h, &init, t);
        let w = (-0.5 * hp).exp();
        let eta = ep * w;
        let u = zeta.beta - 0.5 * news(zeta, ep) * w;
        let x = [1.0, eta, eta.abs(), hp];
        for k in 0..4 {
            last[k] = x[k] + u * last[k];
        }
        g.row_mut(t).copy_from_slice(&last);
    }
    let out = FilterOutput {
        residuals: residuals(e, &h),
        log_sigma2: h,
        r0: 1,
        floored: 0,
    };
    Ok((out, g))
}

/// Filters the EGARCH(1,1) model augmented with the AS-Log-GARCH regressors
/// omega_i- 1{eps_{t-i} < 0} + (alpha_i+ 1{eps > 0} + alpha_i- 1{eps < 0}) log eps_{t-i}^2.
pub fn filter_augmented_egarch(
    vartheta: &AugmentedEgarchParams,
    eps: &ReturnSeries,
    init: &InitPolicy,
) -> Result<FilterOutput> {
    let z = &vartheta.zeta;
    z.validate()?;
    let q = vartheta.q();
    check_len(eps.len(), q.max(1) + 1)?;
    let init = init.resolve(eps)?;
    let prep = prepare(eps, &init)?;
    let e = eps.values();
    let skip_alpha = vartheta.alpha_is_zero();
    let mut h = Vec::with_capacity(e.len());
    for t in 0..e.len() {
        let (ep, hp) = prev(e, &h, &init, t);
        let mut v = z.omega + news(z, ep) * (-0.5 * hp).exp() + z.beta * hp;
        if !skip_alpha {
            v += alpha_block(vartheta, &prep, &init, t);
        }
        check_finite(t, v)?;
        h.push(v);
    }
    Ok(FilterOutput {
        residuals: residuals(e, &h),
        log_sigma2: h,
        r0: q.max(1),
        floored: prep.floored,
    })
}

/// D~_t = U_{t-1} D~_{t-1} + (1-_{t-1..t-q}, eps+_{t-1..t-q}, eps-_{t-1..t-q}),
/// where eps+ = 1{eps > 0} log eps^2 and eps- = 1{eps < 0} log eps^2, at a
/// constrained point alpha = 0.
pub fn egarch_grad_alpha(
    vartheta_c: &AugmentedEgarchParams,
    eps: &ReturnSeries,
    init: &InitPolicy,
) -> Result<EgarchGradState> {
    if !vartheta_c.alpha_is_zero() {
        return Err(Error::invalid("egarch_grad_alpha is defined at alpha = 0 only"));
    }
    let z = &vartheta_c.zeta;
    z.validate()?;
    let q = vartheta_c.q();
    check_len(eps.len(), q.max(1) + 1)?;
    let init = init.resolve(eps)?;
    let prep = prepare(eps, &init)?;
    let e = eps.values();
    let h = run_egarch(z, e, &init)?;
    let mut d = GradPath::zeros(e.len(), 3 * q);
    let mut u = Vec::with_capacity(e.len());
    let mut last = vec![0.0; 3 * q];
    for t in 0..e.len() {
        let (ep, hp) = prev(e, &h, &init, t);
        let u_prev = z.beta - 0.5 * news(z, ep) * (-0.5 * hp).exp();
        for i in 0..q {
            let (neg, le2) = if t > i {
                (prep.negative[t - i - 1], prep.log_eps2[t - i - 1])
            } else {
                (init.presample_negative, init.presample_eps2.ln())
            };
            let x = [
                if neg { 1.0 } else { 0.0 },
                if neg { 0.0 } else { le2 },
                if neg { le2 } else { 0.0 },
            ];
            for (b, xv) in x.iter().enumerate() {
                let k = b * q + i;
                last[k] = xv + u_prev * last[k];
            }
        }
        d.row_mut(t).copy_from_slice(&last);
        u.push(z.beta - 0.5 * news(z, e[t]) * (-0.5 * h[t]).exp());
    }
    Ok(EgarchGradState { d, u })
}
