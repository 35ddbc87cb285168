//! Fixed point of the integral map on the far-left interval `[s_min, -b1]`.
//!
//! The slope update is a Volterra integral with kernel `e^{a(ρ)-a(s)}`. It is
//! evaluated right-to-left in time by a recurrence over per-interval
//! increments of `a`, so the (astronomically negative) weight itself is never
//! formed.

use crate::dynamics::Dynamics;
use crate::numerics::fitted_weights3;
use crate::params::{DerivedConstants, Kind, ProblemParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible measured contraction factor.
pub const CONTRACTION_LIMIT: f64 = 0.2;
/// Increments below this are too close to rounding to estimate a ratio from.
const RATIO_FLOOR: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    /// Uniform grid spacing in `s`.
    pub ds: f64,
    /// The grid starts where the slope cap `C·e^{ρ₁s/β}` drops below this.
    pub tail_tol: f64,
    /// Picard stopping tolerance in the weighted norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self { ds: 1.0 / 64.0, tail_tol: 1e-16, tol: 1e-12, max_iter: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeedError {
    #[error("iterate left the admissible set at s = {s}: {what}")]
    LeftDomain { s: f64, what: &'static str },
    #[error("no convergence to {tol:e} within {iterations} iterations (last increment {last:e})")]
    MaxIterExceeded { tol: f64, iterations: usize, last: f64 },
    #[error("contraction factor {factor} > 1/5 persisted up to b1 = {b1}")]
    ContractionNotAchieved { b1: f64, factor: f64 },
    #[error("invalid seed configuration: {0}")]
    BadConfig(&'static str),
}

/// Discrete seed on `[s_min, -b1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub kind: Kind,
    pub s_min: f64,
    pub b1: f64,
    pub ds: f64,
    pub s: Vec<f64>,
    /// `w̃` (fast) or `q̃` (log).
    pub u: Vec<f64>,
    /// `ln(u/η)`, kept separately so tiny excesses over `η` are exact.
    pub log_ratio: Vec<f64>,
    /// `z` (fast) or `h` (log).
    pub slope: Vec<f64>,
    /// Weighted-norm size of each Picard increment.
    pub increments: Vec<f64>,
}

impl SeedGrid {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.increments.len()
    }

    /// Largest ratio of successive increments that is above the rounding floor.
    pub fn contraction_factor(&self) -> f64 {
        contraction_factor(&self.increments)
    }

    fn with_values(&self, eta: f64, log_ratio: Vec<f64>, slope: Vec<f64>) -> Self {
        Self {
            u: log_ratio.iter().map(|l| eta * l.exp()).collect(),
            log_ratio,
            slope,
            s: self.s.clone(),
            increments: self.increments.clone(),
            ..*self
        }
    }
}

pub fn contraction_factor(increments: &[f64]) -> f64 {
    increments
        .windows(2)
        .filter(|w| w[0] > RATIO_FLOOR)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

/// Uniform grid ending exactly at `-b1`. The span is a whole number of units
/// so that grids with spacings `ds` and `ds/2` share every coarse node.
pub fn seed_nodes(dy: &Dynamics, b1: f64, cfg: &SeedConfig) -> Vec<f64> {
    let needed = -b1 - (cfg.tail_tol / dy.cap).ln() / dy.kappa;
    let span = needed.ceil().max(1.0);
    let count = (span / cfg.ds - 1e-9).ceil() as usize;
    (0..=count).map(|j| -b1 - (count - j) as f64 * cfg.ds).collect()
}

/// The explicit member `(η, min(cap, ε)·e^{ρ₁s/β})` of the admissible set.
pub fn initial_guess(p: &ProblemParams, c: &DerivedConstants, b1: f64, cfg: &SeedConfig) -> SeedGrid {
    let dy = Dynamics::new(p, c);
    let s = seed_nodes(&dy, b1, cfg);
    let amp = dy.cap.min(c.eps);
    let slope = s.iter().map(|&x| amp * (dy.kappa * x).exp()).collect();
    SeedGrid {
        kind: p.kind,
        s_min: s[0],
        b1,
        ds: cfg.ds,
        u: vec![p.eta; s.len()],
        log_ratio: vec![0.0; s.len()],
        slope,
        s,
        increments: Vec::new(),
    }
}

/// `Δa_j`: trapezoid integral of `β e^{-ρ₁s/β} u^{1-m}` over each interval
/// (log case: `β₀ e^{-ρ₁s/β₀} u`).
pub fn kernel_increments(grid: &SeedGrid, p: &ProblemParams, c: &DerivedConstants) -> Vec<f64> {
    let dy = Dynamics::new(p, c);
    let dens: Vec<f64> = grid
        .s
        .iter()
        .zip(&grid.log_ratio)
        .map(|(&s, &l)| dy.coupling(s, l))
        .collect();
    grid.s
        .windows(2)
        .zip(dens.windows(2))
        .map(|(x, a)| 0.5 * (x[1] - x[0]) * (a[0] + a[1]))
        .collect()
}

/// `∫ slope` over one interval, exact when the slope is exponential in `s`
/// (which it is to leading order on the far left).
fn slope_step(h: f64, a: f64, b: f64) -> f64 {
    let q = b / a;
    if a > 0.0 && b > 0.0 && (q - 1.0).abs() > 1e-6 {
        h * (b - a) / q.ln()
    } else {
        0.5 * h * (a + b)
    }
}

/// `Φ₁`: `ln(u/η) = ∫_{-∞}^s slope`, with the part left of `s_min` taken from
/// the model `slope(s_min)·e^{ρ₁(ρ-s_min)/β}`.
fn integrate_slope(dy: &Dynamics, s: &[f64], slope: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut acc = slope[0] / dy.kappa;
    out.push(acc);
    for j in 1..s.len() {
        acc += slope_step(s[j] - s[j - 1], slope[j - 1], slope[j]);
        out.push(acc);
    }
    out
}

/// `Φ₂` given the kernel increments and the source samples `φ_j = G_j/R_j`.
///
/// With `τ = a(s_{j+1}) − a(ρ)` the local integral is `∫ e^{-τ} φ dτ`; `φ` is
/// taken quadratic in `τ` through three nodes (linear on the first interval).
/// A linear fit would leave a first-order error where the kernel is much
/// narrower than the grid.
fn slope_update(lambda: &[f64], phi: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phi.len());
    let mut acc = phi[0];
    out.push(acc);
    for j in 0..lambda.len() {
        let prev = if j == 0 { 0.0 } else { lambda[j - 1] };
        let (w_before, w_old, w_new) = fitted_weights3(prev, lambda[j]);
        let before = if j == 0 { 0.0 } else { phi[j - 1] };
        acc = (-lambda[j]).exp() * acc + w_before * before + w_old * phi[j] + w_new * phi[j + 1];
        out.push(acc);
    }
    out
}

fn total_increments(dy: &Dynamics, grid: &SeedGrid, p: &ProblemParams, c: &DerivedConstants) -> Vec<f64> {
    let mut lambda = kernel_increments(grid, p, c);
    for (l, x) in lambda.iter_mut().zip(grid.s.windows(2)) {
        *l += dy.damping() * (x[1] - x[0]);
    }
    lambda
}

/// One application of the map `Φ`.
pub fn apply_phi(grid: &SeedGrid, p: &ProblemParams, c: &DerivedConstants) -> Result<SeedGrid, SeedError> {
    let dy = Dynamics::new(p, c);
    let log_ratio = integrate_slope(&dy, &grid.s, &grid.slope);
    let lambda = total_increments(&dy, grid, p, c);
    let phi: Vec<f64> = grid
        .s
        .iter()
        .zip(&grid.log_ratio)
        .zip(&grid.slope)
        .map(|((&s, &l), &z)| dy.source(z) / dy.rate(s, l))
        .collect();
    let slope = slope_update(&lambda, &phi);
    let out = grid.with_values(p.eta, log_ratio, slope);
    check_domain(&dy, &out)?;
    Ok(out)
}

fn check_domain(dy: &Dynamics, g: &SeedGrid) -> Result<(), SeedError> {
    let slack = 1.0 + 10.0 * (dy.kappa * g.ds).powi(2);
    for j in 0..g.len() {
        let s = g.s[j];
        if !(g.log_ratio[j] >= 0.0) {
            return Err(SeedError::LeftDomain { s, what: "u < eta" });
        }
        let weighted = g.slope[j] * (-dy.kappa * s).exp();
        if !(weighted > 0.0) {
            return Err(SeedError::LeftDomain { s, what: "non-positive slope" });
        }
        if weighted > dy.cap * slack {
            return Err(SeedError::LeftDomain { s, what: "slope above the growth cap" });
        }
    }
    Ok(())
}

/// Distance in the seed norm: `max(sup|Δu|e^{-ρ₁s/(4β)}, sup|Δslope|e^{-ρ₁s/(2β)})`.
pub fn distance(a: &SeedGrid, b: &SeedGrid, p: &ProblemParams) -> f64 {
    let kappa = p.rho1 / p.beta;
    let mut worst = 0.0f64;
    for j in 0..a.len().min(b.len()) {
        let s = a.s[j];
        let du = p.eta * a.log_ratio[j].exp() * (b.log_ratio[j] - a.log_ratio[j]).exp_m1();
        let dz = b.slope[j] - a.slope[j];
        worst = worst
            .max(du.abs() * (-0.25 * kappa * s).exp())
            .max(dz.abs() * (-0.5 * kappa * s).exp());
    }
    worst
}

/// Picard iteration from the explicit initial member to tolerance `cfg.tol`.
pub fn picard_solve(
    p: &ProblemParams,
    c: &DerivedConstants,
    b1: f64,
    cfg: &SeedConfig,
) -> Result<SeedGrid, SeedError> {
    if !(cfg.ds > 0.0 && cfg.tol > 0.0 && cfg.tail_tol > 0.0) {
        return Err(SeedError::BadConfig("ds, tol and tail_tol must be positive"));
    }
    let mut cur = initial_guess(p, c, b1, cfg);
    let mut increments = Vec::new();
    loop {
        let mut next = apply_phi(&cur, p, c)?;
        let inc = distance(&cur, &next, p);
        increments.push(inc);
        next.increments = increments.clone();
        cur = next;
        if inc <= cfg.tol {
            return Ok(cur);
        }
        if increments.len() >= cfg.max_iter {
            return Err(SeedError::MaxIterExceeded { tol: cfg.tol, iterations: increments.len(), last: inc });
        }
    }
}

/// Pick `b1 > b0` by doubling the excess over `b0` (starting at 1) until the
/// measured contraction factor is at most 1/5. Returns `b1` with its seed.
pub fn choose_b1(
    p: &ProblemParams,
    c: &DerivedConstants,
    cfg: &SeedConfig,
) -> Result<(f64, SeedGrid), SeedError> {
    choose_b1_with(c.b0, |b1| picard_solve(p, c, b1, cfg))
}

/// Doubling search over a caller-supplied solve (exposed for testing the rule).
pub fn choose_b1_with<F>(b0: f64, mut solve: F) -> Result<(f64, SeedGrid), SeedError>
where
    F: FnMut(f64) -> Result<SeedGrid, SeedError>,
{
    let mut excess = 1.0;
    let mut last = (b0 + excess, f64::INFINITY);
    for _ in 0..=MAX_DOUBLINGS {
        let b1 = b0 + excess;
        match solve(b1) {
            Ok(seed) => {
                let factor = seed.contraction_factor();
                if factor <= CONTRACTION_LIMIT {
                    return Ok((b1, seed));
                }
                last = (b1, factor);
            }
            Err(SeedError::BadConfig(m)) => return Err(SeedError::BadConfig(m)),
            Err(_) => last = (b1, f64::INFINITY),
        }
        excess *= 2.0;
    }
    Err(SeedError::ContractionNotAchieved { b1: last.0, factor: last.1 })
}

/// Continue the discrete seed equations to the right, one node at a time,
/// while `keep_going(s, rate)` holds. Each step solves the implicit local
/// update by fixed-point iteration. Returns appended `(s, ℓ, slope)` rows.
pub fn march<F>(
    grid: &SeedGrid,
    dy: &Dynamics,
    s_stop: f64,
    mut keep_going: F,
) -> Vec<(f64, f64, f64)>
where
    F: FnMut(f64, f64) -> bool,
{
    let last = grid.len() - 1;
    let ds = grid.ds;
    let b1 = grid.b1;
    let (mut s0, mut l0, mut z0) = (grid.s[last], grid.log_ratio[last], grid.slope[last]);
    let mut phi_prev = 0.0;
    let mut lambda_prev = 0.0;
    if last > 0 {
        let (sp, lp, zp) = (grid.s[last - 1], grid.log_ratio[last - 1], grid.slope[last - 1]);
        let rp = dy.rate(sp, lp);
        phi_prev = dy.source(zp) / rp;
        lambda_prev = 0.5 * (s0 - sp) * (rp + dy.rate(s0, l0));
    }
    let mut out = Vec::new();
    let mut k = 0usize;
    while s0 < s_stop && keep_going(s0, dy.rate(s0, l0)) {
        k += 1;
        let s1 = -b1 + k as f64 * ds;
        let h = s1 - s0;
        let r0 = dy.rate(s0, l0);
        let phi0 = dy.source(z0) / r0;
        let mut z1 = z0;
        let mut l1 = l0;
        let mut lambda = 0.0;
        for _ in 0..100 {
            l1 = l0 + slope_step(h, z0, z1);
            let r1 = dy.rate(s1, l1);
            lambda = 0.5 * h * (r0 + r1);
            let (w_before, w_old, w_new) = fitted_weights3(lambda_prev, lambda);
            let next = (-lambda).exp() * z0 + w_before * phi_prev + w_old * phi0 + w_new * dy.source(z1) / r1;
            let done = (next - z1).abs() <= 1e-15 * next.abs();
            z1 = next;
            if done {
                break;
            }
        }
        out.push((s1, l1, z1));
        (s0, l0, z0) = (s1, l1, z1);
        (phi_prev, lambda_prev) = (phi0, lambda);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_simpson;
    use crate::params::derive_constants;
    use approx::assert_relative_eq;

    fn reference() -> (ProblemParams, DerivedConstants) {
        let p = ProblemParams::fde(3, 0.1, 1.0, 1.0, 1.0);
        let c = derive_constants(&p);
        (p, c)
    }

    fn lde_reference() -> (ProblemParams, DerivedConstants) {
        let p = ProblemParams::lde(3, 1.0, 1.0, 1.0);
        let c = derive_constants(&p);
        (p, c)
    }

    #[test]
    fn constant_u_increments_match_closed_form() {
        let (p, c) = reference();
        let g = initial_guess(&p, &c, 6.0, &SeedConfig::default());
        let inc = kernel_increments(&g, &p, &c);
        let ds = g.ds;
        for j in (0..inc.len()).step_by(97) {
            let (a, b) = (g.s[j], g.s[j + 1]);
            let exact = p.beta * p.beta / p.rho1 * ((-p.rho1 * a / p.beta).exp() - (-p.rho1 * b / p.beta).exp());
            assert!(inc[j] >= 0.0);
            assert_relative_eq!(inc[j], exact, max_relative = ds * ds);
        }
    }

    #[test]
    fn degenerate_interval_has_zero_increment() {
        let (p, c) = reference();
        let mut g = initial_guess(&p, &c, 6.0, &SeedConfig::default());
        g.s.truncate(2);
        g.s[1] = g.s[0];
        g.log_ratio.truncate(2);
        assert_eq!(kernel_increments(&g, &p, &c), vec![0.0]);
    }

    #[test]
    fn kernel_bounded_by_linear_exponent() {
        // a(ρ) − a(s) ≤ βη^{1-m} e^{-ρ₁s/β}(ρ − s) for ρ < s
        let (p, c) = reference();
        let seed = picard_solve(&p, &c, 6.0, &SeedConfig::default()).unwrap();
        let inc = kernel_increments(&seed, &p, &c);
        let n = seed.len();
        for &j_s in &[n - 1, n - 40, n - 200] {
            let mut diff = 0.0;
            for j in (j_s.saturating_sub(300)..j_s).rev() {
                diff -= inc[j];
                let bound = p.beta * (-p.rho1 * seed.s[j_s] / p.beta).exp() * (seed.s[j] - seed.s[j_s]);
                assert!(diff <= bound * (1.0 - 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn initial_guess_is_admissible() {
        let (p, c) = reference();
        let g = initial_guess(&p, &c, 6.0, &SeedConfig::default());
        let dy = Dynamics::new(&p, &c);
        check_domain(&dy, &g).unwrap();
        assert!(g.u.iter().all(|&u| u == p.eta));
    }

    #[test]
    fn phi_output_obeys_growth_cap() {
        let (p, c) = reference();
        let g = initial_guess(&p, &c, 6.0, &SeedConfig::default());
        let out = apply_phi(&g, &p, &c).unwrap();
        let cap = c.c4.unwrap();
        for (s, z) in out.s.iter().zip(&out.slope) {
            let w = z * (-s).exp();
            assert!(w > 0.0 && w <= cap);
        }
    }

    /// Independent oracle: with u ≡ η the slope update is
    /// `∫_{-∞}^s exp(-A(s)+A(ρ)) G(z(ρ)) dρ`, `A(x) = −βη^{1-m}(β/ρ₁)e^{-ρ₁x/β}`.
    #[test]
    fn phi2_matches_quadrature_oracle_for_frozen_u() {
        let (p, c) = reference();
        let cfg = SeedConfig { ds: 1.0 / 512.0, ..SeedConfig::default() };
        let g = initial_guess(&p, &c, 6.0, &cfg);
        let out = apply_phi(&g, &p, &c).unwrap();
        let dy = Dynamics::new(&p, &c);
        let amp = dy.cap.min(c.eps);
        let big_a = |x: f64| -p.beta * p.beta / p.rho1 * (-p.rho1 * x / p.beta).exp();
        let n = g.len();
        for &j in &[n - 1, n - 129, n - 513] {
            let s = g.s[j];
            let f = |r: f64| (big_a(r) - big_a(s)).exp() * dy.source(amp * r.exp());
            let oracle = adaptive_simpson(f, s - 6.0, s, 1e-14);
            assert_relative_eq!(out.slope[j], oracle, max_relative = 1e-6);
        }
    }

    #[test]
    fn phi2_oracle_error_is_at_least_second_order() {
        let (p, c) = reference();
        let dy = Dynamics::new(&p, &c);
        let amp = dy.cap.min(c.eps);
        let big_a = |x: f64| -p.beta * p.beta / p.rho1 * (-p.rho1 * x / p.beta).exp();
        let s = -6.0;
        let f = |r: f64| (big_a(r) - big_a(s)).exp() * dy.source(amp * r.exp());
        let oracle = adaptive_simpson(f, s - 6.0, s, 1e-15);
        let err = |ds: f64| {
            let cfg = SeedConfig { ds, ..SeedConfig::default() };
            let g = initial_guess(&p, &c, 6.0, &cfg);
            let out = apply_phi(&g, &p, &c).unwrap();
            (out.slope[out.len() - 1] - oracle).abs()
        };
        let (e1, e2) = (err(1.0 / 64.0), err(1.0 / 128.0));
        let ratio = e1 / e2;
        // the three-point rule is third order here; at least second is required
        assert!(ratio > 3.5, "ratio {ratio}");
        // far smaller than the answer even at the coarse default
        assert!(e1 < 1e-4 * oracle);
    }

    #[test]
    fn picard_converges_fast_at_reference() {
        let (p, c) = reference();
        let (b1, seed) = choose_b1(&p, &c, &SeedConfig::default()).unwrap();
        assert!(b1 > c.b0);
        assert!(seed.contraction_factor() <= 0.2);
        assert!(seed.iterations() <= 30);
        assert!(*seed.increments.last().unwrap() <= 1e-12);
        // fixed point: one more application moves nothing
        let again = apply_phi(&seed, &p, &c).unwrap();
        assert!(distance(&seed, &again, &p) <= 1e-12);
    }

    #[test]
    fn fixed_point_respects_left_envelope() {
        let (p, c) = reference();
        let (_, seed) = choose_b1(&p, &c, &SeedConfig::default()).unwrap();
        let c3 = c.c3.unwrap();
        for j in 0..seed.len() {
            let s = seed.s[j];
            let env = p.eta * (c3 * (p.rho1 * s / p.beta).exp() / p.rho1).exp_m1();
            assert!(seed.u[j] - p.eta <= env + 1e-15);
        }
        assert!(seed.u[0] - p.eta <= 1e-15);
    }

    #[test]
    fn lde_fixed_point_obeys_cap() {
        let (p, c) = lde_reference();
        let (b1, seed) = choose_b1(&p, &c, &SeedConfig::default()).unwrap();
        assert!(b1 > c.b0);
        for (s, h) in seed.s.iter().zip(&seed.slope) {
            let w = h * (-p.rho1 * s / p.beta).exp();
            assert!(w > 0.0 && w <= 3.0 * (1.0 + 1e-12), "{s} {w}");
        }
    }

    #[test]
    fn lde_slope_update_ignores_input_slope() {
        let (p, c) = lde_reference();
        let seed = picard_solve(&p, &c, 6.0, &SeedConfig::default()).unwrap();
        let mut other = seed.clone();
        for z in other.slope.iter_mut() {
            *z *= 0.5;
        }
        let a = apply_phi(&seed, &p, &c).unwrap();
        let b = apply_phi(&other, &p, &c).unwrap();
        assert_eq!(a.slope, b.slope);
        assert_ne!(a.log_ratio, b.log_ratio);
    }

    #[test]
    fn doubling_continues_while_factor_too_large() {
        let mut tried = Vec::new();
        let fake = |b1: f64| {
            tried.push(b1);
            let ratio: f64 = if tried.len() < 4 { 0.3 } else { 0.1 };
            let increments = (0..6).map(|k| ratio.powi(k)).collect();
            Ok(SeedGrid {
                kind: Kind::Fde,
                s_min: -10.0,
                b1,
                ds: 1.0,
                s: vec![],
                u: vec![],
                log_ratio: vec![],
                slope: vec![],
                increments,
            })
        };
        let (b1, _) = choose_b1_with(4.0, fake).unwrap();
        assert_eq!(b1, 4.0 + 8.0);
    }

    #[test]
    fn doubling_gives_up_eventually() {
        let fake = |b1: f64| {
            Ok(SeedGrid {
                kind: Kind::Fde,
                s_min: -10.0,
                b1,
                ds: 1.0,
                s: vec![],
                u: vec![],
                log_ratio: vec![],
                slope: vec![],
                increments: vec![1.0, 0.5, 0.25],
            })
        };
        assert!(matches!(
            choose_b1_with(1.0, fake),
            Err(SeedError::ContractionNotAchieved { .. })
        ));
    }

    #[test]
    fn halving_ds_is_second_order() {
        let (p, c) = reference();
        let b1 = 6.0;
        let solve = |ds: f64| picard_solve(&p, &c, b1, &SeedConfig { ds, ..SeedConfig::default() }).unwrap();
        let g1 = solve(1.0 / 32.0);
        let g2 = solve(1.0 / 64.0);
        let g3 = solve(1.0 / 128.0);
        let sub = |fine: &SeedGrid, step: usize| SeedGrid {
            s: fine.s.iter().step_by(step).copied().collect(),
            u: fine.u.iter().step_by(step).copied().collect(),
            log_ratio: fine.log_ratio.iter().step_by(step).copied().collect(),
            slope: fine.slope.iter().step_by(step).copied().collect(),
            ..fine.clone()
        };
        let d1 = distance(&g1, &sub(&g2, 2), &p);
        let d2 = distance(&sub(&g2, 2), &sub(&g3, 4), &p);
        let ratio = d1 / d2;
        assert!((2.5..6.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn nodes_nest_under_halving() {
        let (p, c) = reference();
        let dy = Dynamics::new(&p, &c);
        let a = seed_nodes(&dy, 5.3, &SeedConfig::default());
        let b = seed_nodes(&dy, 5.3, &SeedConfig { ds: 1.0 / 128.0, ..SeedConfig::default() });
        assert_eq!(b.len(), 2 * a.len() - 1);
        for (j, s) in a.iter().enumerate() {
            assert!((s - b[2 * j]).abs() < 1e-12);
        }
        assert_eq!(*a.last().unwrap(), -5.3);
        assert!(dy.cap * (dy.kappa * a[0]).exp() < 1e-16);
    }

    #[test]
    fn march_continues_the_fixed_point() {
        // the seed on the longer interval restricted to the shorter one's
        // extension region equals the marched continuation
        let (p, c) = reference();
        let cfg = SeedConfig::default();
        let long = picard_solve(&p, &c, 6.0, &cfg).unwrap();
        let short = picard_solve(&p, &c, 8.0, &cfg).unwrap();
        assert_eq!(long.s[0], short.s[0]);
        let dy = Dynamics::new(&p, &c);
        let rows = march(&short, &dy, -6.0 - 1e-9, |_, _| true);
        let (s, l, z) = *rows.last().unwrap();
        assert!((s + 6.0).abs() < 1e-12);
        let last = long.len() - 1;
        assert_relative_eq!(l, long.log_ratio[last], max_relative = 1e-9);
        assert_relative_eq!(z, long.slope[last], max_relative = 1e-9);
    }
}
