//! Every structural property of a profile expressed as a numerical predicate,
//! collected into a report.
//!
//! Checks never return errors. A check that cannot run for the given
//! parameters produces a `skipped` entry with the reason in `detail`.

use crate::numerics::{adaptive_simpson, log_space};
use crate::params::{validate, Kind, ProblemParams};
use crate::profile::{solve, solve_with_b1, Profile, Sample};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Names accepted by [`VerifyConfig::checks`], in report order.
pub const CHECKS: [&str; 12] = [
    "blowup_rate",
    "envelopes",
    "far_field",
    "integral_identity",
    "lemma_identity",
    "m_to_zero",
    "monotonicity",
    "ode_residual",
    "pde_ansatz",
    "scaling",
    "slope_bound",
    "uniqueness",
];

/// Relative slack used wherever a strict inequality is tested.
pub const STRICT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Reported for the record, never affects the verdict.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub reference: String,
    /// Worst-case measured quantity; `None` when skipped.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub params: ProblemParams,
    pub settings: crate::profile::SolverSettings,
    /// FNV-1a over the bit patterns of the parameters and settings.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
    /// True iff no entry failed.
    pub overall: bool,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn failed(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error("the self-similar ansatz solves the evolution equation only for rho1 = 1 (got {0})")]
    Rho1NotOne(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Subset of [`CHECKS`] to run; `None` runs all of them.
    pub checks: Option<Vec<String>>,
    pub blowup_tol: f64,
    pub blowup_origin_tol: f64,
    pub envelope_radii: (f64, f64, usize),
    pub identity_xi: f64,
    pub identity_range: (f64, f64),
    pub identity_tol: f64,
    pub lemma_tol: f64,
    pub far_field_r: f64,
    pub far_field_tol: f64,
    pub residual_probes: usize,
    pub residual_tol: f64,
    pub ansatz_steps: [f64; 3],
    pub m_sequence: Vec<f64>,
    pub scaling_lambdas: Vec<f64>,
    pub scaling_tol: f64,
    pub uniqueness_shift: f64,
    pub uniqueness_r_max: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: None,
            blowup_tol: 1e-12,
            blowup_origin_tol: 1e-10,
            envelope_radii: (1e-6, 1e3, 200),
            identity_xi: 0.1,
            identity_range: (0.1, 10.0),
            identity_tol: 1e-8,
            lemma_tol: 1e-6,
            far_field_r: 1e6,
            far_field_tol: 1e-3,
            residual_probes: 60,
            residual_tol: 1e-6,
            ansatz_steps: [0.08, 0.04, 0.02],
            m_sequence: vec![0.05, 0.02, 0.01],
            scaling_lambdas: vec![0.5, 2.0],
            scaling_tol: 1e-8,
            uniqueness_shift: 2.0,
            uniqueness_r_max: 1e3,
        }
    }
}

fn entry(name: &str, reference: &str, measured: f64, tolerance: f64, pass: bool, detail: String) -> CheckEntry {
    CheckEntry {
        name: name.into(),
        reference: reference.into(),
        measured: Some(measured),
        tolerance: Some(tolerance),
        status: if pass { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn skipped(name: &str, reference: &str, why: impl Into<String>) -> CheckEntry {
    CheckEntry {
        name: name.into(),
        reference: reference.into(),
        measured: None,
        tolerance: None,
        status: Status::Skipped,
        detail: why.into(),
    }
}

fn failed(name: &str, reference: &str, why: impl Into<String>) -> CheckEntry {
    CheckEntry { status: Status::Fail, ..skipped(name, reference, why) }
}

/// `pass` for `measured ≤ tolerance`, treating NaN as failure.
fn within(measured: f64, tolerance: f64) -> bool {
    measured <= tolerance
}

fn by_kind<'a>(pr: &Profile, fde: &'a str, lde: &'a str) -> &'a str {
    match pr.kind() {
        Kind::Fde => fde,
        Kind::Lde => lde,
    }
}

/// `(f^m/m)_r = f^{m-1} f_r`, also for `m = 0` where `f^m/m` reads `ln f`.
fn flux(m: f64, f: f64, f_r: f64) -> f64 {
    f.powf(m - 1.0) * f_r
}

/// Exponent multiplier of the upper envelope `η r^{-α/β} exp(E r^{ρ₁/β})`.
fn envelope_coefficient(pr: &Profile) -> f64 {
    let kappa = pr.params.rho1 / pr.params.beta;
    pr.consts.slope_cap(&pr.params) / kappa
}

fn refined_coefficient(pr: &Profile) -> Option<f64> {
    let p = &pr.params;
    match (pr.info.refined_bound, pr.consts.c2) {
        (true, Some(c2)) => Some(c2 * p.eta.powf(p.m_or_zero() - 1.0) / p.rho1),
        _ => None,
    }
}

pub fn check_blowup_rate(pr: &Profile, tol: f64, origin_tol: f64) -> Vec<CheckEntry> {
    let reference = by_kind(pr, "Theorem 1.2 (blow-up rate at the origin)", "Theorem 1.4 (blow-up rate at the origin)");
    let p = &pr.params;
    let kappa = p.rho1 / p.beta;
    let coeff = envelope_coefficient(pr);
    let edge = pr.s_min() + std::f64::consts::LN_10;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_s = pr.s_min();
    for (&s, &ell) in pr.s.iter().zip(&pr.log_ratio).take_while(|(&s, _)| s <= edge) {
        let gap = (p.eta * ell.exp_m1()).abs();
        let bound = p.eta * (coeff * (kappa * s).exp()).exp_m1();
        if gap - bound > worst {
            worst = gap - bound;
            worst_s = s;
        }
    }
    let origin = (p.eta * pr.log_ratio[0].exp_m1()).abs();
    vec![
        entry(
            "blowup_rate",
            reference,
            worst,
            tol,
            within(worst, tol),
            format!("max of |w - eta| minus the envelope over the leftmost decade, attained at r = {:e}", worst_s.exp()),
        ),
        entry(
            "blowup_rate_origin",
            reference,
            origin,
            origin_tol,
            within(origin, origin_tol),
            format!("|w - eta| at r_min = {:e}", pr.r_min()),
        ),
    ]
}

pub fn check_slope_bounds(pr: &Profile) -> Vec<CheckEntry> {
    let reference = by_kind(pr, "Theorem 1.1 (weighted slope bound)", "Theorem 1.3 (weighted slope bound)");
    let p = &pr.params;
    let kappa = p.rho1 / p.beta;
    let weighted: Vec<f64> = pr.s.iter().zip(&pr.slope).map(|(&s, &z)| z * (-kappa * s).exp()).collect();
    let min = weighted.iter().copied().fold(f64::INFINITY, f64::min);
    let max = weighted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cap = pr.consts.slope_cap(p);
    let mut out = vec![entry(
        "slope_bound",
        reference,
        max,
        cap * (1.0 + STRICT_SLACK),
        min > 0.0 && within(max, cap * (1.0 + STRICT_SLACK)),
        format!("weighted slope in [{min:e}, {max:e}], cap {cap}"),
    )];
    if pr.kind() == Kind::Fde {
        let name = "slope_bound_refined";
        let reference = "Proposition 2.5 (refined slope bound)";
        match (pr.info.refined_bound, pr.consts.c2) {
            (true, Some(c2)) => {
                let refined = c2 * p.eta.powf(p.m_or_zero() - 1.0) / p.beta;
                let tol = refined * (1.0 + STRICT_SLACK);
                out.push(entry(name, reference, max, tol, min > 0.0 && within(max, tol), format!("refined cap {refined}")));
            }
            _ => out.push(skipped(name, reference, "beta below the refined-bound threshold")),
        }
    }
    out
}

/// Worst relative violation of `η < w ≤ η exp(E r^κ)` over the given points.
fn envelope_violation(eta: f64, kappa: f64, coeff: f64, points: &[(f64, f64)]) -> (f64, f64) {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for &(r, w) in points {
        let q = w / eta;
        let upper = (q.ln() - coeff * r.powf(kappa)).exp_m1();
        let v = if q > 0.0 { (1.0 - q).max(upper) } else { 1.0 - q };
        if !(v <= worst) {
            worst = v;
            at = r;
        }
    }
    (worst, at)
}

pub fn check_envelopes(pr: &Profile, radii: (f64, f64, usize), table: Option<&[Sample]>) -> Vec<CheckEntry> {
    let p = &pr.params;
    let kappa = p.rho1 / p.beta;
    let lo = radii.0.max(pr.r_min());
    let hi = radii.1.min(pr.r_max());
    let mut points: Vec<(f64, f64)> = Vec::new();
    if lo < hi {
        for r in log_space(lo, hi, radii.2.max(2)) {
            match pr.u_at(r.ln()) {
                Ok(w) => points.push((r, w)),
                Err(_) => points.push((r, f64::NAN)),
            }
        }
    }
    if let Some(rows) = table {
        // rebuilt from f so that a corrupted table is caught
        points.extend(rows.iter().map(|row| (row.r, row.r.powf(pr.ratio()) * row.f)));
    }
    let reference = by_kind(pr, "Corollary 2.3 (two-sided envelope)", "Corollary 3.3 (two-sided envelope)");
    if points.is_empty() {
        return vec![skipped("envelopes", reference, "no radii in the covered range")];
    }
    let mut out = Vec::new();
    let (worst, at) = envelope_violation(p.eta, kappa, envelope_coefficient(pr), &points);
    out.push(entry(
        "envelopes",
        reference,
        worst,
        STRICT_SLACK,
        within(worst, STRICT_SLACK),
        format!("{} radii; worst relative violation at r = {at:e}", points.len()),
    ));
    if pr.kind() == Kind::Fde {
        let name = "envelopes_refined";
        let reference = "Proposition 2.5 (refined envelope)";
        match refined_coefficient(pr) {
            Some(coeff) => {
                let (worst, at) = envelope_violation(p.eta, kappa, coeff, &points);
                out.push(entry(
                    name,
                    reference,
                    worst,
                    STRICT_SLACK,
                    within(worst, STRICT_SLACK),
                    format!("worst relative violation at r = {at:e}"),
                ));
            }
            None => out.push(skipped(name, reference, "beta below the refined-bound threshold")),
        }
    }
    out
}

pub fn check_monotonicity(pr: &Profile, table: Option<&[Sample]>) -> Vec<CheckEntry> {
    let reference = by_kind(
        pr,
        "Corollary 2.3, Corollary 2.4 (f_r < 0 and f + (beta/alpha) r f_r > 0)",
        "Corollary 3.3, Corollary 3.4 (g_r < 0 and g + (beta0/alpha0) r g_r > 0)",
    );
    let ratio = pr.ratio();
    // violation of 0 < z < α/β, relative to α/β
    let violation = |z: f64| if z.is_nan() { f64::INFINITY } else { (-z / ratio).max(z / ratio - 1.0) };
    let mut worst = pr.slope.iter().map(|&z| violation(z)).fold(f64::NEG_INFINITY, f64::max);
    let mut detail = format!("{} nodes", pr.slope.len());
    if let Some(rows) = table {
        let rows_worst = rows
            .iter()
            .map(|row| violation(row.r * row.f_r / row.f + ratio))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(rows_worst);
        detail.push_str(&format!(" and {} table rows", rows.len()));
    }
    detail.push_str(&format!("; slope must lie in (0, {ratio})"));
    vec![entry("monotonicity", reference, worst, STRICT_SLACK, within(worst, STRICT_SLACK), detail)]
}

/// `r^{n-1}(f^m/m)_r + βr^n f` at `r`.
fn flux_form(pr: &Profile, r: f64) -> Option<(f64, f64)> {
    let p = &pr.params;
    let n = p.n as f64;
    let f = pr.eval_f(r).ok()?;
    let f_r = pr.eval_fr(r).ok()?;
    let first = r.powf(n - 1.0) * flux(p.m_or_zero(), f, f_r);
    let second = p.beta * r.powf(n) * f;
    Some((first, second))
}

pub fn check_integral_identity(pr: &Profile, xi: f64, range: (f64, f64), tol: f64) -> Vec<CheckEntry> {
    let name = "integral_identity";
    let reference = "integral identity r^{n-1}(f^m/m)_r + beta r^n f + (alpha - n beta) int_xi^r = c(xi)";
    let p = &pr.params;
    let n = p.n as f64;
    let (lo, hi) = (range.0.max(xi), range.1.min(pr.r_max()));
    if !(xi >= pr.r_min() && lo < hi) {
        return vec![skipped(name, reference, "probe range outside the covered range")];
    }
    let Some((a, b)) = flux_form(pr, xi) else {
        return vec![failed(name, reference, "profile evaluation failed")];
    };
    let c_xi = a + b;
    let lead = pr.consts.alpha - n * p.beta;
    let density = |x: f64| x.powf(n - 1.0) * pr.eval_f(x).unwrap_or(f64::NAN);
    let mut acc = 0.0;
    let mut prev = xi;
    let mut worst = 0.0f64;
    for r in log_space(lo, hi, 41) {
        let scale = density(r) * r;
        acc += adaptive_simpson(density, prev, r, 1e-14 * scale.abs().max(1e-300));
        prev = r;
        let Some((first, second)) = flux_form(pr, r) else {
            return vec![failed(name, reference, "profile evaluation failed")];
        };
        let third = lead * acc;
        let size = first.abs().max(second.abs()).max(third.abs()).max(c_xi.abs());
        let dev = ((first + second + third - c_xi) / size).abs();
        worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
    }
    vec![entry(
        name,
        reference,
        worst,
        tol,
        within(worst, tol),
        format!("c({xi}) = {c_xi:e}; 41 probes on [{lo}, {hi}], deviation relative to the largest term"),
    )]
}

pub fn check_lemma_identity(pr: &Profile, range: (f64, f64), tol: f64) -> Vec<CheckEntry> {
    let name = "lemma_identity";
    let alt = "lemma_identity_alt";
    let reference = "Lemma 4.1 (r^{n-1}(f^m/m)_r + beta r^n f = beta eta when beta = beta1)";
    let p = &pr.params;
    let beta1 = match pr.consts.beta1 {
        Some(b) if (p.beta / b - 1.0).abs() <= 1e-12 => b,
        Some(b) => return vec![skipped(name, reference, format!("applies only at beta = beta1 = {b}"))],
        None => return vec![skipped(name, reference, "fast diffusion only")],
    };
    let (lo, hi) = (range.0.max(pr.r_min()), range.1.min(pr.r_max()));
    let target = beta1 * p.eta;
    let m = p.m_or_zero();
    let mut worst = 0.0f64;
    let mut worst_alt = 0.0f64;
    for r in log_space(lo, hi, 81) {
        let Some((first, second)) = flux_form(pr, r) else {
            return vec![failed(name, reference, "profile evaluation failed")];
        };
        let dev = ((first + second - target) / target).abs();
        worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
        // (f^m)' = m (f^m/m)_r
        worst_alt = worst_alt.max(((m * first + second - target) / target).abs());
    }
    vec![
        entry(name, reference, worst, tol, within(worst, tol), format!("81 probes on [{lo}, {hi}], target beta*eta = {target}")),
        CheckEntry {
            name: alt.into(),
            reference: "Lemma 4.1 as printed, with (f^m)' in place of (f^m/m)_r".into(),
            measured: Some(worst_alt),
            tolerance: Some(tol),
            status: Status::Info,
            detail: "alternative normalization, reported for comparison only".into(),
        },
    ]
}

pub fn check_far_field(pr: &Profile, r_far: f64, rel_tol: f64) -> Vec<CheckEntry> {
    let reference = "Theorem 1.5 (far-field limit of r^2 f^{1-m})";
    let (Some(v_inf), Some(z_inf)) = (pr.consts.v_infty, pr.consts.z_infty) else {
        return vec![skipped("far_field", reference, "fast diffusion only")];
    };
    let r = r_far.min(pr.r_max());
    let (Ok(v), Ok(v_tenth), Ok(z)) = (pr.eval_v(r), pr.eval_v(r / 10.0), pr.slope_at(r.ln())) else {
        return vec![failed("far_field", reference, "far radius outside the covered range")];
    };
    let limit = (v / v_inf - 1.0).abs();
    let cauchy = (v - v_tenth).abs() / v_inf;
    let slope = (z / z_inf - 1.0).abs();
    vec![
        entry("far_field", reference, limit, rel_tol, within(limit, rel_tol), format!("v({r:e}) = {v}, limit {v_inf}")),
        entry(
            "far_field_cauchy",
            reference,
            cauchy,
            2.0 * rel_tol,
            within(cauchy, 2.0 * rel_tol),
            format!("|v(r) - v(r/10)|/v_inf with v(r/10) = {v_tenth}"),
        ),
        entry(
            "far_field_slope",
            reference,
            slope,
            rel_tol,
            within(slope, rel_tol),
            format!("slope at s_max = {z}, limit {z_inf}"),
        ),
    ]
}

pub fn check_ode_residual(pr: &Profile, probes: usize, tol: f64) -> Vec<CheckEntry> {
    let name = "ode_residual";
    let reference = by_kind(pr, "profile equation of Theorem 1.1", "profile equation of Theorem 1.3");
    let p = &pr.params;
    let (n, m, alpha, beta) = (p.n as f64, p.m_or_zero(), pr.consts.alpha, p.beta);
    let lo = (pr.r_min() * 2.0).max(1e-8);
    let hi = pr.r_max() / 2.0;
    let step = f64::EPSILON.sqrt();
    let mut worst = 0.0f64;
    let mut at = f64::NAN;
    for r in log_space(lo, hi, probes.max(2)) {
        let eval = |x: f64| -> Option<(f64, f64)> { Some((pr.eval_f(x).ok()?, pr.eval_fr(x).ok()?)) };
        let h = step * r;
        let (Some((f, f_r)), Some((fp, fpr)), Some((fm, fmr))) = (eval(r), eval(r + h), eval(r - h)) else {
            return vec![failed(name, reference, format!("evaluation failed near r = {r:e}"))];
        };
        let d_flux = (flux(m, fp, fpr) - flux(m, fm, fmr)) / (2.0 * h);
        let terms = [d_flux, (n - 1.0) / r * flux(m, f, f_r), alpha * f, beta * r * f_r];
        let size = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let res = (terms.iter().sum::<f64>() / size).abs();
        if !(res <= worst) {
            worst = if res.is_nan() { f64::INFINITY } else { res };
            at = r;
        }
    }
    vec![entry(
        name,
        reference,
        worst,
        tol,
        within(worst, tol),
        format!("{probes} probes on [{lo:e}, {hi:e}], worst at r = {at:e}, relative to the largest term"),
    )]
}

/// Largest relative finite-difference residual of `u_t − Δφ(u)` for the
/// self-similar solution with blow-up time 1, at `t = 0`, with spacing `h`
/// in both `x` and `t`.
pub fn ansatz_residual(pr: &Profile, h: f64) -> Result<f64, VerifyError> {
    let p = &pr.params;
    if p.rho1 != 1.0 {
        return Err(VerifyError::Rho1NotOne(p.rho1));
    }
    let (n, m, alpha, beta) = (p.n as f64, p.m_or_zero(), pr.consts.alpha, p.beta);
    let u = |x: f64, t: f64| {
        let tau: f64 = 1.0 - t;
        tau.powf(alpha) * pr.eval_f(tau.powf(beta) * x).unwrap_or(f64::NAN)
    };
    let phi = |v: f64| if m == 0.0 { v.ln() } else { v.powf(m) / m };
    let mut worst = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        let u_t = (u(x, h) - u(x, -h)) / (2.0 * h);
        let (pp, p0, pm) = (phi(u(x + h, 0.0)), phi(u(x, 0.0)), phi(u(x - h, 0.0)));
        let lap = (pp - 2.0 * p0 + pm) / (h * h) + (n - 1.0) / x * (pp - pm) / (2.0 * h);
        let res = ((u_t - lap) / u_t).abs();
        worst = if res.is_nan() { f64::INFINITY } else { worst.max(res) };
    }
    Ok(worst)
}

pub fn check_pde_ansatz(pr: &Profile, steps: [f64; 3]) -> Vec<CheckEntry> {
    let name = "pde_ansatz";
    let reference = "backward self-similar solution V(x,t) = (T-t)^alpha f((T-t)^beta x)";
    let mut res = [0.0; 3];
    for (out, &h) in res.iter_mut().zip(&steps) {
        match ansatz_residual(pr, h) {
            Ok(v) => *out = v,
            Err(e) => return vec![skipped(name, reference, e.to_string())],
        }
    }
    let ratios = [res[0] / res[1], res[1] / res[2]];
    let ok = ratios.iter().all(|q| (2.5..=6.0).contains(q));
    vec![entry(
        name,
        reference,
        ratios[1],
        6.0,
        ok,
        format!(
            "residuals {:e}, {:e}, {:e} at steps {:?}; refinement ratios {:.3}, {:.3} must lie in [2.5, 6]",
            res[0], res[1], res[2], steps, ratios[0], ratios[1]
        ),
    )]
}

/// `sup_{r∈[1/2,2]} |f^{(m)} − g|` for each `m`, sharing `(n, ρ₁, β, η)`.
pub fn m_to_zero_distances(
    base: &ProblemParams,
    m_sequence: &[f64],
    settings: &crate::profile::SolverSettings,
) -> Result<Vec<f64>, String> {
    let log = solve(ProblemParams::lde(base.n, base.rho1, base.beta, base.eta), settings).map_err(|e| e.to_string())?;
    distances_to(&log, base, m_sequence, settings)
}

fn distances_to(
    log: &Profile,
    base: &ProblemParams,
    m_sequence: &[f64],
    settings: &crate::profile::SolverSettings,
) -> Result<Vec<f64>, String> {
    let radii = log_space(0.5, 2.0, 201);
    let g: Vec<f64> = radii.iter().map(|&r| log.eval_f(r).unwrap_or(f64::NAN)).collect();
    m_sequence
        .iter()
        .map(|&m| {
            let fp = ProblemParams::fde(base.n, m, base.rho1, base.beta, base.eta);
            validate(fp).map_err(|e| format!("m = {m}: {e}"))?;
            let fast = solve(fp, settings).map_err(|e| format!("m = {m}: {e}"))?;
            Ok(radii
                .iter()
                .zip(&g)
                .map(|(&r, &gr)| (fast.eval_f(r).unwrap_or(f64::NAN) - gr).abs())
                .fold(0.0, f64::max))
        })
        .collect()
}

pub fn check_m_to_zero(pr: &Profile, m_sequence: &[f64]) -> Vec<CheckEntry> {
    let name = "m_to_zero";
    let reference = "m -> 0 limit of the fast-diffusion profiles is the logarithmic profile";
    if m_sequence.len() < 2 || m_sequence.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return vec![skipped(name, reference, "need at least two strictly decreasing positive exponents")];
    }
    let p = &pr.params;
    let settings = &pr.info.settings;
    let dist = match pr.kind() {
        Kind::Lde => distances_to(pr, p, m_sequence, settings),
        Kind::Fde => m_to_zero_distances(p, m_sequence, settings),
    };
    let dist = match dist {
        Ok(d) => d,
        Err(e) => return vec![skipped(name, reference, e)],
    };
    let worst = dist.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    vec![entry(
        name,
        reference,
        worst,
        1.0,
        worst < 1.0,
        format!("distances {dist:?} along m = {m_sequence:?}; successive ratios must be below 1"),
    )]
}

/// Largest relative difference of `f` between two profiles on `[lo, hi]`.
pub fn relative_gap(a: &Profile, b: &Profile, lo: f64, hi: f64, count: usize) -> f64 {
    let lo = lo.max(a.r_min()).max(b.r_min());
    let hi = hi.min(a.r_max()).min(b.r_max());
    log_space(lo, hi, count)
        .into_iter()
        .map(|r| match (a.eval_f(r), b.eval_f(r)) {
            (Ok(x), Ok(y)) => (x / y - 1.0).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

pub fn check_scaling(pr: &Profile, lambdas: &[f64], tol: f64) -> Vec<CheckEntry> {
    let name = "scaling";
    let reference = by_kind(pr, "Proposition 2.6 (scaling law)", "Proposition 3.5 (scaling law)");
    let p = &pr.params;
    let exponent = -p.rho1 / (p.beta * (1.0 - p.m_or_zero()));
    let mut worst = 0.0f64;
    for &l in lambdas {
        let scaled = match pr.rescale(l) {
            Ok(s) => s,
            Err(e) => return vec![failed(name, reference, e.to_string())],
        };
        let direct = match solve(p.with_eta(p.eta * l.powf(exponent)), &pr.info.settings) {
            Ok(d) => d,
            Err(e) => return vec![failed(name, reference, format!("direct solve at lambda = {l}: {e}"))],
        };
        worst = worst.max(relative_gap(&direct, &scaled, 0.0, f64::INFINITY, 400));
    }
    vec![entry(
        name,
        reference,
        worst,
        tol,
        within(worst, tol),
        format!("lambda in {lambdas:?}; sup of relative difference on the overlap"),
    )]
}

pub fn check_uniqueness(pr: &Profile, shift: f64, r_hi: f64) -> Vec<CheckEntry> {
    let name = "uniqueness";
    let reference = by_kind(pr, "Theorem 1.2 (uniqueness)", "Theorem 1.4 (uniqueness)");
    let b1 = pr.info.b1;
    let settings = &pr.info.settings;
    let tol = 100.0 * settings.seed.tol.max(settings.extend.rk_tol);
    let (a, b) = match (solve_with_b1(pr.params, b1, settings), solve_with_b1(pr.params, b1 + shift, settings)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return vec![failed(name, reference, e.to_string())],
    };
    let gap = relative_gap(&a, &b, (-b1).exp(), r_hi, 400);
    vec![entry(
        name,
        reference,
        gap,
        tol,
        within(gap, tol),
        format!("seeds at b1 = {b1:.6} and b1 + {shift}, compared on [e^-b1, {r_hi:e}]"),
    )]
}

fn fnv1a(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

pub fn provenance(pr: &Profile) -> Provenance {
    let p = &pr.params;
    let st = &pr.info.settings;
    let kind = match p.kind {
        Kind::Fde => 0,
        Kind::Lde => 1,
    };
    let words = [
        kind,
        p.n as u64,
        p.m.map_or(u64::MAX, f64::to_bits),
        p.rho1.to_bits(),
        p.beta.to_bits(),
        p.eta.to_bits(),
        st.seed.ds.to_bits(),
        st.seed.tail_tol.to_bits(),
        st.seed.tol.to_bits(),
        st.seed.max_iter as u64,
        st.extend.s_max.to_bits(),
        st.extend.rk_tol.to_bits(),
    ];
    Provenance { params: *p, settings: *st, hash: format!("{:016x}", fnv1a(&words)) }
}

fn run_one(name: &str, pr: &Profile, table: Option<&[Sample]>, cfg: &VerifyConfig) -> Vec<CheckEntry> {
    match name {
        "blowup_rate" => check_blowup_rate(pr, cfg.blowup_tol, cfg.blowup_origin_tol),
        "envelopes" => check_envelopes(pr, cfg.envelope_radii, table),
        "far_field" => check_far_field(pr, cfg.far_field_r, cfg.far_field_tol),
        "integral_identity" => check_integral_identity(pr, cfg.identity_xi, cfg.identity_range, cfg.identity_tol),
        "lemma_identity" => check_lemma_identity(pr, cfg.identity_range, cfg.lemma_tol),
        "m_to_zero" => check_m_to_zero(pr, &cfg.m_sequence),
        "monotonicity" => check_monotonicity(pr, table),
        "ode_residual" => check_ode_residual(pr, cfg.residual_probes, cfg.residual_tol),
        "pde_ansatz" => check_pde_ansatz(pr, cfg.ansatz_steps),
        "scaling" => check_scaling(pr, &cfg.scaling_lambdas, cfg.scaling_tol),
        "slope_bound" => check_slope_bounds(pr),
        "uniqueness" => check_uniqueness(pr, cfg.uniqueness_shift, cfg.uniqueness_r_max),
        _ => unreachable!("names are validated before dispatch"),
    }
}

/// Run the selected checks concurrently. `table` holds previously written
/// sample rows; when present they join the envelope and sign checks.
pub fn run(pr: &Profile, table: Option<&[Sample]>, cfg: &VerifyConfig) -> Result<VerificationReport, VerifyError> {
    let names: Vec<&str> = match &cfg.checks {
        None => CHECKS.to_vec(),
        Some(list) => {
            let mut v = Vec::new();
            for name in list {
                let known = CHECKS.iter().find(|c| **c == name.as_str()).ok_or_else(|| VerifyError::UnknownCheck(name.clone()))?;
                if !v.contains(known) {
                    v.push(*known);
                }
            }
            v
        }
    };
    let mut entries: Vec<CheckEntry> = std::thread::scope(|scope| {
        let handles: Vec<_> = names.iter().map(|name| scope.spawn(move || run_one(name, pr, table, cfg))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("check panicked")).collect()
    });
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let overall = entries.iter().all(|e| e.status != Status::Fail);
    Ok(VerificationReport { entries, overall, provenance: provenance(pr) })
}
