//! Continuation of the seed to the right by an embedded Runge–Kutta 4(5)
//! integrator (Dormand–Prince coefficients) with PI step control and
//! fourth-order dense output.

use crate::dynamics::Dynamics;
use crate::params::{DerivedConstants, ProblemParams};
use crate::seed::{march, SeedGrid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Above this kernel rate the explicit integrator would be stability-bound;
/// the seed recurrence is continued instead until the rate drops below it.
pub const STIFF_RATE: f64 = 65536.0;
const MAX_STEPS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendConfig {
    pub s_max: f64,
    /// Local error allowed per unit step in `s`.
    pub rk_tol: f64,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self { s_max: 1e6f64.ln(), rk_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtendError {
    #[error("profile value {u} is not positive at s = {s}")]
    NonPositiveProfile { s: f64, u: f64 },
    #[error("step size underflow at s = {s} (h = {h:e})")]
    StepSizeUnderflow { s: f64, h: f64 },
    #[error("invariant violated at s = {s}: {what}")]
    InvariantViolated { s: f64, what: &'static str },
    #[error("s_max = {s_max} does not lie right of the seed end {seed_end}")]
    BadRange { s_max: f64, seed_end: f64 },
}

/// Dense samples of the full solution on `[s_min, s_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub s: Vec<f64>,
    /// `ln(u/η)`.
    pub log_ratio: Vec<f64>,
    pub slope: Vec<f64>,
    /// `d slope/ds` at each node.
    pub dslope: Vec<f64>,
    /// Index of the first node produced by the Runge–Kutta stage.
    pub rk_start: usize,
    pub rk_steps: usize,
    pub rk_rejected: usize,
}

/// `(du/ds, dz/ds)` for fast diffusion.
pub fn rhs_fde(s: f64, u: f64, z: f64, p: &ProblemParams, c: &DerivedConstants) -> Result<(f64, f64), ExtendError> {
    if !(u > 0.0) {
        return Err(ExtendError::NonPositiveProfile { s, u });
    }
    let m = p.m_or_zero();
    let c1 = c.c1.unwrap();
    let dz = c.c3.unwrap() - m * (z + c1) * (z + c1) - p.beta * (-p.rho1 * s / p.beta).exp() * u.powf(1.0 - m) * z;
    Ok((z * u, dz))
}

/// `(du/ds, dh/ds)` for logarithmic diffusion.
pub fn rhs_lde(s: f64, u: f64, h: f64, p: &ProblemParams, c: &DerivedConstants) -> Result<(f64, f64), ExtendError> {
    if !(u > 0.0) {
        return Err(ExtendError::NonPositiveProfile { s, u });
    }
    let n2 = p.n as f64 - 2.0;
    let dh = c.alpha * n2 / p.beta - n2 * h - p.beta * (-p.rho1 * s / p.beta).exp() * u * h;
    Ok((h * u, dh))
}

type State = [f64; 2];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous extension.
struct Dense {
    t0: f64,
    h: f64,
    r: [State; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let r = |k: usize| self.r[k][i];
            *o = r(0) + th * (r(1) + th1 * (r(2) + th * (r(3) + th1 * r(4))));
        }
        out
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t1`, handing every accepted step to
/// `emit`. Returns (accepted, rejected) step counts.
fn dopri5<F, G>(mut f: F, t0: f64, y0: State, t1: f64, tol: f64, h0: f64, mut emit: G) -> Result<(usize, usize), ExtendError>
where
    F: FnMut(f64, &State) -> State,
    G: FnMut(&Dense) -> Result<(), ExtendError>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = h0.min(t1 - t0);
    let mut err_prev: f64 = 1e-4;
    let (mut accepted, mut rejected) = (0, 0);
    let mut last_rejected = false;
    while t < t1 {
        if accepted + rejected > MAX_STEPS || h < 1e-14 * t.abs().max(1.0) {
            return Err(ExtendError::StepSizeUnderflow { s: t, h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y1);
        let mut err = 0.0f64;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err = err.max(e.abs() / (tol * h));
        }
        if !err.is_finite() {
            err = 1e10;
        }
        if err <= 1.0 {
            let mut r = [[0.0; 2]; 5];
            for i in 0..2 {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * k7[i] - bspl;
                r[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            emit(&Dense { t0: t, h, r })?;
            accepted += 1;
            t = t_new;
            y = y1;
            k1 = k7;
            // PI controller on the error-per-unit-step estimate (order 4)
            let e = err.max(1e-10);
            let mut fac = 0.9 * e.powf(-0.7 / 4.0) * err_prev.powf(0.4 / 4.0);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            err_prev = e;
            last_rejected = false;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.25)).max(0.2);
            last_rejected = true;
        }
    }
    Ok((accepted, rejected))
}

/// Continue the seed to `s_max`; output nodes keep the seed spacing.
pub fn extend(
    seed: &SeedGrid,
    p: &ProblemParams,
    c: &DerivedConstants,
    cfg: &ExtendConfig,
) -> Result<ProfileGrid, ExtendError> {
    let dy = Dynamics::new(p, c);
    let seed_end = -seed.b1;
    if !(cfg.s_max > seed_end) {
        return Err(ExtendError::BadRange { s_max: cfg.s_max, seed_end });
    }
    let mut s = seed.s.clone();
    let mut ell = seed.log_ratio.clone();
    let mut z = seed.slope.clone();

    for (sk, lk, zk) in march(seed, &dy, cfg.s_max - seed.ds, |_, rate| rate > STIFF_RATE) {
        s.push(sk);
        ell.push(lk);
        z.push(zk);
    }
    let rk_start = s.len();
    let ds = seed.ds;
    let s0 = *s.last().unwrap();
    let y0 = [*ell.last().unwrap(), *z.last().unwrap()];
    let k0 = (s0 - seed_end) / ds;
    let mut next_k = k0.round() as usize + 1;
    let node = |k: usize| seed_end + k as f64 * ds;
    let mut counts = (0, 0);
    if s0 < cfg.s_max {
        let rhs = |t: f64, y: &State| [y[1], dy.slope_rhs(t, y[0], y[1])];
        let h0 = (0.5 / dy.rate(s0, y0[0])).min(ds);
        counts = dopri5(rhs, s0, y0, cfg.s_max, cfg.rk_tol, h0, |d| {
            let t_end = d.t0 + d.h;
            while node(next_k) < cfg.s_max - 1e-3 * ds && node(next_k) <= t_end {
                let t = node(next_k);
                let y = d.eval(t);
                s.push(t);
                ell.push(y[0]);
                z.push(y[1]);
                next_k += 1;
            }
            if t_end >= cfg.s_max {
                let y = d.eval(t_end);
                s.push(cfg.s_max);
                ell.push(y[0]);
                z.push(y[1]);
            }
            Ok(())
        })?;
    }

    let dslope = slope_derivatives(&dy, &s, &ell, &z, rk_start);
    let grid = ProfileGrid { s, log_ratio: ell, slope: z, dslope, rk_start, rk_steps: counts.0, rk_rejected: counts.1 };
    check_invariants(&dy, &grid)?;
    Ok(grid)
}

/// Right-hand side on the Runge–Kutta part; centred differences on the
/// discrete seed part, where the recurrence is only second-order consistent
/// with the differential equation and the right-hand side is a difference of
/// nearly equal large terms.
fn slope_derivatives(dy: &Dynamics, s: &[f64], ell: &[f64], z: &[f64], rk_start: usize) -> Vec<f64> {
    let n = s.len();
    let mut d = vec![0.0; n];
    let junction = rk_start.saturating_sub(1);
    for j in 0..n {
        d[j] = if j >= junction {
            dy.slope_rhs(s[j], ell[j], z[j])
        } else if j == 0 {
            // exponential decay model on the far left
            dy.kappa * z[0]
        } else {
            (z[j + 1] - z[j - 1]) / (s[j + 1] - s[j - 1])
        };
    }
    d
}

fn check_invariants(dy: &Dynamics, g: &ProfileGrid) -> Result<(), ExtendError> {
    const SLACK: f64 = 1e-12;
    for j in 0..g.s.len() {
        let s = g.s[j];
        if !(g.slope[j] > 0.0) {
            return Err(ExtendError::InvariantViolated { s, what: "slope is not positive" });
        }
        if !(g.log_ratio[j] >= -SLACK) {
            return Err(ExtendError::InvariantViolated { s, what: "u fell below eta" });
        }
        if !(g.slope[j] < dy.ratio * (1.0 + SLACK)) {
            return Err(ExtendError::InvariantViolated { s, what: "slope reached alpha/beta" });
        }
    }
    Ok(())
}
