//! Seeded simulators for the AS-Log-GARCH, EGARCH(1,1) and augmented
//! Log-GARCH models, and the symmetric EGARCH to Log-GARCH conversion.

use crate::error::{Error, Result};
use crate::model::{AsLogGarchParams, AugmentedLogGarchParams, EgarchParams, ReturnSeries};
use crate::numerics::{normal_cdf, Rng};

/// |log sigma_t^2| above this stops a simulation.
pub const OVERFLOW_GUARD: f64 = 700.0;

pub const DEFAULT_BURN: usize = 1000;

/// Simulated returns with the volatility and innovations that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPath {
    pub series: ReturnSeries,
    pub log_sigma2: Vec<f64>,
    pub innovations: Vec<f64>,
    /// Return and log-volatility one step before the first kept observation.
    pub presample_eps: f64,
    pub presample_log_sigma2: f64,
}

fn guard(t: usize, h: f64) -> Result<()> {
    if h.is_finite() && h.abs() <= OVERFLOW_GUARD {
        Ok(())
    } else {
        Err(Error::Nonstationary { t: t + 1, guard: OVERFLOW_GUARD })
    }
}

fn draw(total: usize, rng: &mut Rng, sampler: &mut dyn FnMut(&mut Rng) -> f64) -> Vec<f64> {
    (0..total).map(|_| sampler(rng)).collect()
}

fn standard_normal(rng: &mut Rng) -> f64 {
    rng.standard_normal()
}

/// log sigma^2 path of the AS-Log-GARCH model driven by the innovations
/// `eta`, starting from log sigma^2 = `h0` and innovation `presample_eta`
/// at every time t <= 0.
pub fn aslog_path_from_innovations(
    theta: &AsLogGarchParams,
    eta: &[f64],
    presample_eta: f64,
    h0: f64,
) -> Result<Vec<f64>> {
    augmented_path(theta, &[], &[], eta, presample_eta, h0)
}

fn augmented_path(
    theta: &AsLogGarchParams,
    gamma_plus: &[f64],
    gamma_minus: &[f64],
    eta: &[f64],
    presample_eta: f64,
    h0: f64,
) -> Result<Vec<f64>> {
    theta.validate()?;
    let (p, q) = (theta.p(), theta.q());
    let mut h: Vec<f64> = Vec::with_capacity(eta.len());
    for t in 0..eta.len() {
        let mut v = theta.omega;
        for i in 0..q {
            let (e, hl) = if t > i { (eta[t - i - 1], h[t - i - 1]) } else { (presample_eta, h0) };
            let le2 = hl + (e * e).ln();
            if e < 0.0 {
                v += theta.omega_minus[i] + theta.alpha_minus[i] * le2;
            } else {
                v += theta.alpha_plus[i] * le2;
            }
        }
        for j in 0..p {
            v += theta.beta[j] * if t > j { h[t - j - 1] } else { h0 };
        }
        for k in 0..gamma_plus.len() {
            let (gp, gm) = (gamma_plus[k], gamma_minus[k]);
            if gp == 0.0 && gm == 0.0 {
                continue;
            }
            let e = if t > k { eta[t - k - 1] } else { presample_eta };
            v += if e > 0.0 { gp * e } else { gm * (-e) };
        }
        guard(t, v)?;
        h.push(v);
    }
    Ok(h)
}

/// log sigma^2 path of the EGARCH(1,1) model driven by `eta`.
pub fn egarch_path_from_innovations(zeta: &EgarchParams, eta: &[f64], presample_eta: f64, h0: f64) -> Result<Vec<f64>> {
    zeta.validate()?;
    let mut h: Vec<f64> = Vec::with_capacity(eta.len());
    for t in 0..eta.len() {
        let (e, hl) = if t > 0 { (eta[t - 1], h[t - 1]) } else { (presample_eta, h0) };
        let v = zeta.omega + zeta.gamma * e + zeta.delta * e.abs() + zeta.beta * hl;
        guard(t, v)?;
        h.push(v);
    }
    Ok(h)
}

fn finish(eta: Vec<f64>, h: Vec<f64>, burn: usize, pre_eta: f64, h0: f64) -> Result<SimPath> {
    let (presample_eps, presample_log_sigma2) = if burn > 0 {
        (eta[burn - 1] * (0.5 * h[burn - 1]).exp(), h[burn - 1])
    } else {
        (pre_eta * (0.5 * h0).exp(), h0)
    };
    let eps: Vec<f64> = eta[burn..]
        .iter()
        .zip(&h[burn..])
        .map(|(e, l)| e * (0.5 * l).exp())
        .collect();
    Ok(SimPath {
        series: ReturnSeries::new(eps)?,
        log_sigma2: h[burn..].to_vec(),
        innovations: eta[burn..].to_vec(),
        presample_eps,
        presample_log_sigma2,
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("simulation length must be at least 1"));
    }
    Ok(())
}

/// Simulates `n` observations of the AS-Log-GARCH model with N(0, 1)
/// innovations after discarding `burn` steps. The recursion starts from
/// log sigma^2 = 0 and eps^2 = 1 at all presample times.
///
/// Divergence errors report t counted from the start of the burn-in.
pub fn simulate_aslog(theta: &AsLogGarchParams, n: usize, burn: usize, rng: &mut Rng) -> Result<SimPath> {
    simulate_aslog_with(theta, n, burn, rng, &mut standard_normal)
}

/// [`simulate_aslog`] with a caller-supplied unit-variance innovation sampler.
pub fn simulate_aslog_with(
    theta: &AsLogGarchParams,
    n: usize,
    burn: usize,
    rng: &mut Rng,
    sampler: &mut dyn FnMut(&mut Rng) -> f64,
) -> Result<SimPath> {
    check_n(n)?;
    let eta = draw(n + burn, rng, sampler);
    let h = aslog_path_from_innovations(theta, &eta, 1.0, 0.0)?;
    finish(eta, h, burn, 1.0, 0.0)
}

/// Simulates the EGARCH(1,1) model with N(0, 1) innovations, starting from
/// log sigma^2 = 0 and a zero presample innovation.
pub fn simulate_egarch11(zeta: &EgarchParams, n: usize, burn: usize, rng: &mut Rng) -> Result<SimPath> {
    simulate_egarch11_with(zeta, n, burn, rng, &mut standard_normal)
}

pub fn simulate_egarch11_with(
    zeta: &EgarchParams,
    n: usize,
    burn: usize,
    rng: &mut Rng,
    sampler: &mut dyn FnMut(&mut Rng) -> f64,
) -> Result<SimPath> {
    check_n(n)?;
    let eta = draw(n + burn, rng, sampler);
    let h = egarch_path_from_innovations(zeta, &eta, 0.0, 0.0)?;
    finish(eta, h, burn, 0.0, 0.0)
}

/// Simulates the augmented Log-GARCH model. With gamma = 0 the output is
/// bitwise equal to [`simulate_aslog`] under the same seed.
pub fn simulate_augmented(vartheta: &AugmentedLogGarchParams, n: usize, burn: usize, rng: &mut Rng) -> Result<SimPath> {
    simulate_augmented_with(vartheta, n, burn, rng, &mut standard_normal)
}

pub fn simulate_augmented_with(
    vartheta: &AugmentedLogGarchParams,
    n: usize,
    burn: usize,
    rng: &mut Rng,
    sampler: &mut dyn FnMut(&mut Rng) -> f64,
) -> Result<SimPath> {
    check_n(n)?;
    let eta = draw(n + burn, rng, sampler);
    let h = augmented_path(&vartheta.theta, &vartheta.gamma_plus, &vartheta.gamma_minus, &eta, 1.0, 0.0)?;
    finish(eta, h, burn, 1.0, 0.0)
}

/// log E exp(|Z|) for standard normal Z, i.e. log(2 e^(1/2) Phi(1)).
pub fn gaussian_log_mean_exp_abs() -> f64 {
    (2.0 * 0.5f64.exp() * normal_cdf(1.0)).ln()
}

/// Log-GARCH parameters and noise reproducing a symmetric EGARCH(1,1)
/// volatility.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricConversion {
    pub theta: AsLogGarchParams,
    pub eta: Vec<f64>,
    pub log_mean_exp_abs: f64,
}

/// Converts a symmetric EGARCH(1,1) (gamma = 0, so both signs load `delta`)
/// into an AS-Log-GARCH(1,1) with alpha+ = alpha- = delta, omega = omega~ +
/// delta log E e^|eta~|, beta = beta~ - delta and
/// eta_t = e^(|eta~_t| / 2) sign(eta~_t) / sqrt(E e^|eta~|).
///
/// `log_mean_exp_abs` is log E e^|eta~|; `None` uses the sample mean over
/// `eta_tilde`. Zero innovations map to the positive branch.
pub fn egarch_to_loggarch_symmetric(
    zeta: &EgarchParams,
    eta_tilde: &[f64],
    log_mean_exp_abs: Option<f64>,
) -> Result<SymmetricConversion> {
    if zeta.gamma != 0.0 {
        return Err(Error::invalid(format!(
            "symmetric conversion needs gamma = 0, got {}",
            zeta.gamma
        )));
    }
    let g = zeta.delta;
    if g == 0.0 {
        return Err(Error::invalid("conversion needs a nonzero news coefficient"));
    }
    let lm = match log_mean_exp_abs {
        Some(v) => v,
        None => {
            if eta_tilde.is_empty() {
                return Err(Error::invalid("cannot estimate E e^|eta| from an empty sample"));
            }
            (eta_tilde.iter().map(|e| e.abs().exp()).sum::<f64>() / eta_tilde.len() as f64).ln()
        }
    };
    if !lm.is_finite() {
        return Err(Error::invalid("log E e^|eta| must be finite"));
    }
    let theta = AsLogGarchParams::pq11(zeta.omega + g * lm, 0.0, g, g, zeta.beta - g);
    let eta = eta_tilde
        .iter()
        .map(|&e| {
            let m = (0.5 * (e.abs() - lm)).exp();
            if e < 0.0 {
                -m
            } else {
                m
            }
        })
        .collect();
    Ok(SymmetricConversion {
        theta,
        eta,
        log_mean_exp_abs: lm,
    })
}
