//! The first-order system in `s = ln r` shared by the seed and the extension.
//!
//! State is `(ℓ, z)` with `ℓ = ln(u/η)` and `z = dℓ/ds`. The slope obeys
//! `z' = G(z) − R(s, ℓ)·z` where `R = β e^{-ρ₁s/β} u^{1-m} + d` and `d` is
//! zero for fast diffusion and `n-2` for logarithmic diffusion.

use crate::params::{DerivedConstants, Kind, ProblemParams};

#[derive(Debug, Clone, Copy)]
pub struct Dynamics {
    pub kind: Kind,
    pub m: f64,
    pub beta: f64,
    /// `ρ₁/β`, the growth rate of the slope at the far left.
    pub kappa: f64,
    pub eta: f64,
    /// `α/β`.
    pub ratio: f64,
    /// `C₂` (fast) or `α₀(n-2)/β₀` (log).
    source0: f64,
    /// `2mC₁ = n-2-2mα/β` (fast only).
    linear: f64,
    damping: f64,
    /// `β η^{1-m}`.
    coupling0: f64,
    /// Weighted cap on the slope, `C₄η^{m-1}` or `C₀/η`.
    pub cap: f64,
}

impl Dynamics {
    pub fn new(p: &ProblemParams, c: &DerivedConstants) -> Self {
        let m = p.m_or_zero();
        let n = p.n as f64;
        let (source0, linear, damping) = match p.kind {
            Kind::Fde => (c.c2.unwrap(), n - 2.0 - 2.0 * m * c.ratio(p), 0.0),
            Kind::Lde => (c.source_constant(p), 0.0, n - 2.0),
        };
        Self {
            kind: p.kind,
            m,
            beta: p.beta,
            kappa: p.rho1 / p.beta,
            eta: p.eta,
            ratio: c.ratio(p),
            source0,
            linear,
            damping,
            coupling0: p.beta * p.eta.powf(1.0 - m),
            cap: c.slope_cap(p),
        }
    }

    /// `β e^{-ρ₁s/β} u^{1-m}` with `u = η e^ℓ`; the density of the weight `a`.
    pub fn coupling(&self, s: f64, ell: f64) -> f64 {
        self.coupling0 * ((1.0 - self.m) * ell - self.kappa * s).exp()
    }

    /// Total decay rate of the slope kernel.
    pub fn rate(&self, s: f64, ell: f64) -> f64 {
        self.coupling(s, ell) + self.damping
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// `G(z)`: `C₃ − m(z+C₁)²` (fast, in cancellation-free form) or `α₀(n-2)/β₀`.
    pub fn source(&self, z: f64) -> f64 {
        match self.kind {
            Kind::Fde => self.source0 - z * (self.linear + self.m * z),
            Kind::Lde => self.source0,
        }
    }

    pub fn slope_rhs(&self, s: f64, ell: f64, z: f64) -> f64 {
        self.source(z) - self.rate(s, ell) * z
    }
}
