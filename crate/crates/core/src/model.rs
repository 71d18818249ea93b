//! Domain types shared by every module: return series, parameter vectors of
//! the three model families, filter output, fit results and test reports.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered observations (percent log-returns) with optional calendar dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    values: Vec<f64>,
    dates: Option<Vec<NaiveDate>>,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("return series must be nonempty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite return at index {i}")));
        }
        Ok(Self {
            values,
            dates: None,
        })
    }

    pub fn with_dates(values: Vec<f64>, dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} dates for {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "dates not strictly increasing at index {}",
                w + 1
            )));
        }
        let mut s = Self::new(values)?;
        s.dates = Some(dates);
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The series multiplied by `c` (dates kept).
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            dates: self.dates.clone(),
        }
    }

    /// Observations `range` as a new series.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::invalid(format!(
                "slice {range:?} out of bounds for length {}",
                self.len()
            )));
        }
        Ok(Self {
            values: self.values[range.clone()].to_vec(),
            dates: self.dates.as_ref().map(|d| d[range].to_vec()),
        })
    }

    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (n - 1 denominator; 0 for a single value).
    pub fn std_dev(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.values.iter().sum::<f64>() / n as f64;
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Lag orders of the AS-Log-GARCH(p, q) model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsLogGarchOrder {
    pub p: usize,
    pub q: usize,
}

impl AsLogGarchOrder {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::invalid("order needs p + q >= 1"));
        }
        Ok(Self { p, q })
    }

    /// Number of parameters, 3q + p + 1.
    pub fn dim(&self) -> usize {
        3 * self.q + self.p + 1
    }
}

/// theta = (omega, omega_minus', alpha_plus', alpha_minus', beta')'.
///
/// No sign constraints are imposed on any coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsLogGarchParams {
    pub omega: f64,
    pub omega_minus: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub beta: Vec<f64>,
}

impl AsLogGarchParams {
    pub fn new(
        omega: f64,
        omega_minus: Vec<f64>,
        alpha_plus: Vec<f64>,
        alpha_minus: Vec<f64>,
        beta: Vec<f64>,
    ) -> Result<Self> {
        let p = Self {
            omega,
            omega_minus,
            alpha_plus,
            alpha_minus,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Convenience constructor for the (1, 1) model.
    pub fn pq11(omega: f64, omega_minus: f64, alpha_plus: f64, alpha_minus: f64, beta: f64) -> Self {
        Self {
            omega,
            omega_minus: vec![omega_minus],
            alpha_plus: vec![alpha_plus],
            alpha_minus: vec![alpha_minus],
            beta: vec![beta],
        }
    }

    pub fn zeros(order: AsLogGarchOrder) -> Self {
        Self {
            omega: 0.0,
            omega_minus: vec![0.0; order.q],
            alpha_plus: vec![0.0; order.q],
            alpha_minus: vec![0.0; order.q],
            beta: vec![0.0; order.p],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.omega_minus.len();
        if self.alpha_plus.len() != q || self.alpha_minus.len() != q {
            return Err(Error::invalid(format!(
                "lag vectors disagree: omega_minus {q}, alpha_plus {}, alpha_minus {}",
                self.alpha_plus.len(),
                self.alpha_minus.len()
            )));
        }
        if q + self.beta.len() == 0 {
            return Err(Error::invalid("order needs p + q >= 1"));
        }
        if self.to_vec().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite AS-Log-GARCH coefficient"));
        }
        Ok(())
    }

    pub fn order(&self) -> AsLogGarchOrder {
        AsLogGarchOrder {
            p: self.beta.len(),
            q: self.omega_minus.len(),
        }
    }

    pub fn q(&self) -> usize {
        self.omega_minus.len()
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn dim(&self) -> usize {
        self.order().dim()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.omega);
        v.extend_from_slice(&self.omega_minus);
        v.extend_from_slice(&self.alpha_plus);
        v.extend_from_slice(&self.alpha_minus);
        v.extend_from_slice(&self.beta);
        v
    }

    pub fn from_vec(order: AsLogGarchOrder, v: &[f64]) -> Result<Self> {
        if v.len() != order.dim() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                order.dim(),
                v.len()
            )));
        }
        let q = order.q;
        Ok(Self {
            omega: v[0],
            omega_minus: v[1..1 + q].to_vec(),
            alpha_plus: v[1 + q..1 + 2 * q].to_vec(),
            alpha_minus: v[1 + 2 * q..1 + 3 * q].to_vec(),
            beta: v[1 + 3 * q..].to_vec(),
        })
    }

    pub fn names(order: AsLogGarchOrder) -> Vec<String> {
        let mut n = vec!["omega".to_string()];
        for (prefix, len) in [
            ("omega_minus", order.q),
            ("alpha_plus", order.q),
            ("alpha_minus", order.q),
            ("beta", order.p),
        ] {
            n.extend((1..=len).map(|i| format!("{prefix}[{i}]")));
        }
        n
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha_plus == self.alpha_minus
    }
}

/// Maps theta to the parameter under which `c * eps` has log-volatility
/// `log sigma_t^2(theta; eps) + log c^2`.
///
/// omega* = omega + log c^2 (1 - sum beta - sum alpha_plus) and
/// omega_minus*_i = omega_minus_i - log c^2 (alpha_minus_i - alpha_plus_i);
/// the slope coefficients are unchanged.
pub fn transport_params_under_scaling(theta: &AsLogGarchParams, c: f64) -> Result<AsLogGarchParams> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!("scale factor must be positive and finite, got {c}")));
    }
    theta.validate()?;
    let l = (c * c).ln();
    let sum_beta: f64 = theta.beta.iter().sum();
    let sum_alpha_plus: f64 = theta.alpha_plus.iter().sum();
    let mut out = theta.clone();
    out.omega = theta.omega + l * (1.0 - sum_beta - sum_alpha_plus);
    for i in 0..theta.q() {
        out.omega_minus[i] = theta.omega_minus[i] - l * (theta.alpha_minus[i] - theta.alpha_plus[i]);
    }
    Ok(out)
}

/// zeta = (omega, gamma, delta, beta) of the EGARCH(1,1) log-volatility
/// `omega + gamma eta_{t-1} + delta |eta_{t-1}| + beta log sigma_{t-1}^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgarchParams {
    pub omega: f64,
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
}

impl EgarchParams {
    pub const NAMES: [&'static str; 4] = ["omega", "gamma", "delta", "beta"];

    /// Checked constructor: requires delta >= |gamma| and |beta| < 1.
    pub fn new(omega: f64, gamma: f64, delta: f64, beta: f64) -> Result<Self> {
        let z = Self {
            omega,
            gamma,
            delta,
            beta,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_vec().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite EGARCH coefficient"));
        }
        if self.delta < self.gamma.abs() {
            return Err(Error::InvalidModel(format!(
                "EGARCH needs delta >= |gamma| (delta = {}, gamma = {})",
                self.delta, self.gamma
            )));
        }
        if self.beta.abs() >= 1.0 {
            return Err(Error::InvalidModel(format!("EGARCH needs |beta| < 1, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.omega, self.gamma, self.delta, self.beta]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 4 {
            return Err(Error::invalid(format!("EGARCH needs 4 parameters, got {}", v.len())));
        }
        Ok(Self {
            omega: v[0],
            gamma: v[1],
            delta: v[2],
            beta: v[3],
        })
    }
}

/// vartheta = (theta', gamma')' of the Log-GARCH model augmented with
/// EGARCH-type innovation terms over `ell` lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedLogGarchParams {
    pub theta: AsLogGarchParams,
    pub gamma_plus: Vec<f64>,
    pub gamma_minus: Vec<f64>,
}

impl AugmentedLogGarchParams {
    pub fn new(theta: AsLogGarchParams, gamma_plus: Vec<f64>, gamma_minus: Vec<f64>) -> Result<Self> {
        theta.validate()?;
        if gamma_plus.is_empty() || gamma_plus.len() != gamma_minus.len() {
            return Err(Error::invalid(format!(
                "gamma blocks need equal length >= 1 (got {} and {})",
                gamma_plus.len(),
                gamma_minus.len()
            )));
        }
        if gamma_plus.iter().chain(&gamma_minus).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite gamma coefficient"));
        }
        Ok(Self {
            theta,
            gamma_plus,
            gamma_minus,
        })
    }

    /// The constrained point (theta, 0).
    pub fn null(theta: AsLogGarchParams, ell: usize) -> Result<Self> {
        Self::new(theta, vec![0.0; ell], vec![0.0; ell])
    }

    pub fn ell(&self) -> usize {
        self.gamma_plus.len()
    }
}

/// vartheta = (zeta', alpha')' with alpha = (omega_minus', alpha_plus', alpha_minus')'.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedEgarchParams {
    pub zeta: EgarchParams,
    pub omega_minus: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
}

impl AugmentedEgarchParams {
    pub fn new(
        zeta: EgarchParams,
        omega_minus: Vec<f64>,
        alpha_plus: Vec<f64>,
        alpha_minus: Vec<f64>,
    ) -> Result<Self> {
        let q = omega_minus.len();
        if q == 0 || alpha_plus.len() != q || alpha_minus.len() != q {
            return Err(Error::invalid("alpha blocks need equal length q >= 1"));
        }
        if omega_minus
            .iter()
            .chain(&alpha_plus)
            .chain(&alpha_minus)
            .chain(zeta.to_vec().iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("non-finite augmented EGARCH coefficient"));
        }
        Ok(Self {
            zeta,
            omega_minus,
            alpha_plus,
            alpha_minus,
        })
    }

    /// The constrained point (zeta, 0).
    pub fn null(zeta: EgarchParams, q: usize) -> Result<Self> {
        Self::new(zeta, vec![0.0; q], vec![0.0; q], vec![0.0; q])
    }

    pub fn q(&self) -> usize {
        self.omega_minus.len()
    }

    pub fn alpha_is_zero(&self) -> bool {
        self.omega_minus
            .iter()
            .chain(&self.alpha_plus)
            .chain(&self.alpha_minus)
            .all(|v| *v == 0.0)
    }
}

/// Filtered log-volatility path and standardized residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// log sigma~_t^2 for t = 1..n.
    pub log_sigma2: Vec<f64>,
    /// eps_t / sigma~_t.
    pub residuals: Vec<f64>,
    /// Observations with index <= r0 (1-based) are excluded from criteria.
    pub r0: usize,
    /// Number of returns replaced by the zero-return floor.
    pub floored: usize,
}

impl FilterOutput {
    pub fn n(&self) -> usize {
        self.log_sigma2.len()
    }

    /// Number of observations entering criteria, n - r0.
    pub fn effective_len(&self) -> usize {
        self.n().saturating_sub(self.r0)
    }
}

/// Which family a fit belongs to, with the fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedModel {
    /// `restrict_alpha` ties alpha_plus = alpha_minus lag by lag.
    #[serde(rename = "aslog")]
    AsLog {
        params: AsLogGarchParams,
        restrict_alpha: bool,
    },
    Egarch { params: EgarchParams },
}

impl FittedModel {
    pub fn family_name(&self) -> &'static str {
        match self {
            FittedModel::AsLog { .. } => "aslog",
            FittedModel::Egarch { .. } => "egarch",
        }
    }
}

/// Outcome of the plug-in invertibility check of an EGARCH(1,1) fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityCheck {
    pub expectation: f64,
    pub pass: bool,
    pub floored: usize,
}

/// Result of a quasi-maximum likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FittedModel,
    /// Free parameter vector (restricted parameterizations drop tied entries).
    pub params: Vec<f64>,
    pub param_names: Vec<String>,
    /// (n - r0)^-1 sum -1/2 (log 2 pi + l_t).
    pub loglik_per_obs: f64,
    pub kappa4_hat: f64,
    /// Outer-product matrix of the log-volatility gradients (J or V).
    pub j_hat: DMatrix<f64>,
    /// (kappa4 - 1) J^-1 / (n - r0).
    pub cov: DMatrix<f64>,
    pub std_errors: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub criterion_value: f64,
    pub n_obs: usize,
    pub r0: usize,
    pub ridge_applied: f64,
    pub invertibility: Option<InvertibilityCheck>,
    pub warnings: Vec<String>,
}

/// Identifier of a specification test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    LmAslogVsAugmented,
    LmEgarchVsLoggarch,
    PortmanteauAslog,
    PortmanteauEgarch,
}

impl TestName {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestName::LmAslogVsAugmented => "lm_aslog_vs_augmented",
            TestName::LmEgarchVsLoggarch => "lm_egarch_vs_loggarch",
            TestName::PortmanteauAslog => "portmanteau_aslog",
            TestName::PortmanteauEgarch => "portmanteau_egarch",
        }
    }
}

/// Intermediate quantity kept in a [`TestReport`] for audit.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Scalar(f64),
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
}

impl Component {
    pub fn as_vector(&self) -> Option<&DVector<f64>> {
        match self {
            Component::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            Component::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Component::Scalar(s) => Some(*s),
            _ => None,
        }
    }
}

/// Statistic, degrees of freedom and chi-square p-value of a test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub name: TestName,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub components: BTreeMap<String, Component>,
    pub warnings: Vec<String>,
}

impl TestReport {
    /// `{name, statistic, df, p_value, warnings[]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name.as_str(),
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "warnings": self.warnings,
        })
    }

    pub fn component(&self, key: &str) -> Option<&Component> {
        self.components.get(key)
    }
}
