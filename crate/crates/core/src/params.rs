//! Problem parameters, admissibility checks and closed-form constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which diffusion equation the profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Fast diffusion, `u_t = Δ(u^m/m)` with `0 < m < (n-2)/n`.
    Fde,
    /// Logarithmic diffusion, `u_t = Δ log u`.
    Lde,
}

/// Raw parameter set. `beta` is the radial scaling exponent (`β` for fast
/// diffusion, `β₀` for logarithmic diffusion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub kind: Kind,
    pub n: u32,
    /// Diffusion exponent; `None` for the logarithmic equation.
    pub m: Option<f64>,
    pub rho1: f64,
    pub beta: f64,
    /// Blow-up coefficient: `r^{α/β} f(r) → eta` as `r → 0`.
    pub eta: f64,
}

impl ProblemParams {
    pub fn fde(n: u32, m: f64, rho1: f64, beta: f64, eta: f64) -> Self {
        Self { kind: Kind::Fde, n, m: Some(m), rho1, beta, eta }
    }

    pub fn lde(n: u32, rho1: f64, beta: f64, eta: f64) -> Self {
        Self { kind: Kind::Lde, n, m: None, rho1, beta, eta }
    }

    /// Diffusion exponent with the logarithmic case read as `m = 0`.
    pub fn m_or_zero(&self) -> f64 {
        self.m.unwrap_or(0.0)
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("dimension n = {0} is too small: need n >= 3")]
    DimensionTooSmall(u32),
    #[error("exponent m = {m} is outside (0, {upper})")]
    ExponentOutOfRange { m: f64, upper: f64 },
    #[error("beta = {beta} does not exceed the threshold m*rho1/(n-2-n*m) = {threshold}")]
    BetaBelowThreshold { beta: f64, threshold: f64 },
    #[error("{name} = {value} must be positive")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("exponent m is required for fast diffusion and not allowed for logarithmic diffusion")]
    ExponentMismatch,
}

/// Result of a successful validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validated {
    pub params: ProblemParams,
    /// True when the hypotheses of the sharper `C₂` bounds hold
    /// (`m < (n-2)/(n+2)` and `β > max(β₀′, 2m/(n-2-(n+2)m))`).
    pub refined_bound: bool,
}

fn positive(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NonPositiveParameter { name, value })
    }
}

/// `mρ₁/(n-2-nm)`, the lower limit for `β`.
pub fn beta_threshold(n: u32, m: f64, rho1: f64) -> f64 {
    let n = n as f64;
    m * rho1 / (n - 2.0 - n * m)
}

/// Check the hypotheses of the existence/uniqueness theorems.
pub fn validate(raw: ProblemParams) -> Result<Validated, ParamError> {
    if raw.n < 3 {
        return Err(ParamError::DimensionTooSmall(raw.n));
    }
    positive("rho1", raw.rho1)?;
    positive("eta", raw.eta)?;
    let n = raw.n as f64;
    match (raw.kind, raw.m) {
        (Kind::Lde, None) => {
            positive("beta", raw.beta)?;
            Ok(Validated { params: raw, refined_bound: false })
        }
        (Kind::Fde, Some(m)) => {
            let upper = (n - 2.0) / n;
            if !(m > 0.0 && m < upper) {
                return Err(ParamError::ExponentOutOfRange { m, upper });
            }
            positive("beta", raw.beta)?;
            let threshold = beta_threshold(raw.n, m, raw.rho1);
            if !(raw.beta > threshold) {
                return Err(ParamError::BetaBelowThreshold { beta: raw.beta, threshold });
            }
            let refined_bound = m < (n - 2.0) / (n + 2.0)
                && raw.beta > threshold.max(2.0 * m / (n - 2.0 - (n + 2.0) * m));
            Ok(Validated { params: raw, refined_bound })
        }
        _ => Err(ParamError::ExponentMismatch),
    }
}

/// Closed-form constants. Fields that only make sense for one equation are
/// `None` for the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `α` (fast) or `α₀` (logarithmic).
    pub alpha: f64,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    /// `ε₁` (fast) or `ε₂` (logarithmic).
    pub eps: f64,
    /// Lower bound for the seed interval endpoint, `b₀` or `b₀′`.
    pub b0: f64,
    pub beta0_prime: Option<f64>,
    pub beta1: Option<f64>,
    pub z_infty: Option<f64>,
    pub v_infty: Option<f64>,
}

impl DerivedConstants {
    /// `α/β`: singular exponent of the profile at the origin.
    pub fn ratio(&self, p: &ProblemParams) -> f64 {
        self.alpha / p.beta
    }

    /// Cap on `slope(s)·e^{-ρ₁s/β}`: `C₄η^{m-1}` or `C₀/η`.
    pub fn slope_cap(&self, p: &ProblemParams) -> f64 {
        match p.kind {
            Kind::Fde => self.c4.unwrap() * p.eta.powf(p.m_or_zero() - 1.0),
            Kind::Lde => self.c0.unwrap() / p.eta,
        }
    }

    /// Constant term of the slope equation: `C₃` (fast) or `α₀(n-2)/β₀`.
    pub fn source_constant(&self, p: &ProblemParams) -> f64 {
        match p.kind {
            Kind::Fde => self.c3.unwrap(),
            Kind::Lde => self.alpha * (p.n as f64 - 2.0) / p.beta,
        }
    }
}

/// Evaluate every closed-form constant. `p` must already be validated.
pub fn derive_constants(p: &ProblemParams) -> DerivedConstants {
    let n = p.n as f64;
    let (rho1, beta, eta) = (p.rho1, p.beta, p.eta);
    match p.kind {
        Kind::Fde => {
            let m = p.m_or_zero();
            let alpha = (2.0 * beta + rho1) / (1.0 - m);
            let ab = alpha / beta;
            let c1 = (n - 2.0 - 2.0 * m * ab) / (2.0 * m);
            let c2 = ab * (n - 2.0 - m * ab);
            let c3 = c2 + m * c1 * c1;
            let c4 = c3 / beta;
            let eps = 0.5 * 1f64.min(eta).min((c3 / m).sqrt() - c1.abs());
            let eta_1m = eta.powf(1.0 - m);
            let c5 = (c3 / (rho1 * eta_1m)).exp_m1() * eta_1m;
            let b0 = [
                1.0,
                2.0 * beta / rho1 * (c4 * eta.powf(m - 1.0) / eps).ln().abs(),
                4.0 * beta / (3.0 * rho1) * (c5 * eta.powf(m) / eps).ln(),
                beta / rho1 * (3.0 * rho1 / (4.0 * beta * beta * eta_1m)).ln(),
            ]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
            let gap = n - 2.0 - n * m;
            DerivedConstants {
                alpha,
                c0: None,
                c1: Some(c1),
                c2: Some(c2),
                c3: Some(c3),
                c4: Some(c4),
                c5: Some(c5),
                eps,
                b0,
                beta0_prime: Some(m * rho1 / gap),
                beta1: Some(rho1 / gap),
                z_infty: Some(rho1 / ((1.0 - m) * beta)),
                v_infty: Some(2.0 * gap / ((1.0 - m) * rho1)),
            }
        }
        Kind::Lde => {
            let alpha = 2.0 * beta + rho1;
            let c0 = alpha * (n - 2.0) / (beta * beta);
            let eps = 0.5 * 1f64.min(eta);
            let b0 = [
                1.0,
                2.0 * beta / rho1 * (c0 / (eps * eta)).ln(),
                beta / rho1 * (4.0 * beta * beta * eta / 3.0).ln().abs(),
                beta / rho1 * (eta * (eps / eta).ln_1p() / (c0 * beta)).ln().abs(),
            ]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
            DerivedConstants {
                alpha,
                c0: Some(c0),
                c1: None,
                c2: None,
                c3: None,
                c4: None,
                c5: None,
                eps,
                b0,
                beta0_prime: None,
                beta1: None,
                z_infty: None,
                v_infty: None,
            }
        }
    }
}
