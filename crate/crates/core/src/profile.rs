//! Evaluable profile in the radius variable, the end-to-end solve, and the
//! one-parameter scaling family.

use crate::extend::{extend, ExtendConfig, ExtendError};
use crate::numerics::{hermite, log_space};
use crate::params::{derive_constants, validate, DerivedConstants, Kind, ParamError, ProblemParams};
use crate::seed::{choose_b1, picard_solve, SeedConfig, SeedError, SeedGrid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("radius {r} lies outside the covered range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("scaling factor {0} must be positive")]
    NonPositiveLambda(f64),
    #[error("need at least 2 samples, got {0}")]
    BadCount(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverSettings {
    pub seed: SeedConfig,
    pub extend: ExtendConfig,
}

/// Diagnostics recorded while solving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub b1: f64,
    pub picard_iterations: usize,
    pub picard_increments: Vec<f64>,
    pub contraction_factor: f64,
    pub rk_steps: usize,
    pub rk_rejected: usize,
    /// First node produced by the Runge–Kutta stage.
    pub rk_start_s: f64,
    pub refined_bound: bool,
    pub settings: SolverSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// One output row: `(r, f, f_r, w, slope, v)`; `v` is `None` for the log case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub f: f64,
    pub f_r: f64,
    pub w: f64,
    pub slope: f64,
    pub v: Option<f64>,
}

/// Solution on `[e^{s_min}, e^{s_max}]`, stored on an `s = ln r` grid as
/// `ℓ = ln(u/η)` and the slope `dℓ/ds`, interpolated by cubic Hermite pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub params: ProblemParams,
    pub consts: DerivedConstants,
    pub s: Vec<f64>,
    pub log_ratio: Vec<f64>,
    pub slope: Vec<f64>,
    pub dslope: Vec<f64>,
    pub info: SolveInfo,
}

/// Validate, seed, extend.
pub fn solve(raw: ProblemParams, settings: &SolverSettings) -> Result<Profile, SolveError> {
    let v = validate(raw)?;
    let p = v.params;
    let c = derive_constants(&p);
    let (b1, seed) = choose_b1(&p, &c, &settings.seed)?;
    assemble(p, c, v.refined_bound, b1, seed, settings)
}

/// As [`solve`] but with the seed interval endpoint fixed at `-b1` instead of
/// searched for. `b1` must exceed the lower bound `b0`.
pub fn solve_with_b1(raw: ProblemParams, b1: f64, settings: &SolverSettings) -> Result<Profile, SolveError> {
    let v = validate(raw)?;
    let p = v.params;
    let c = derive_constants(&p);
    if !(b1 > c.b0) {
        return Err(SeedError::BadConfig("b1 must exceed the lower bound b0").into());
    }
    let seed = picard_solve(&p, &c, b1, &settings.seed)?;
    assemble(p, c, v.refined_bound, b1, seed, settings)
}

fn assemble(
    p: ProblemParams,
    c: DerivedConstants,
    refined_bound: bool,
    b1: f64,
    seed: SeedGrid,
    settings: &SolverSettings,
) -> Result<Profile, SolveError> {
    let grid = extend(&seed, &p, &c, &settings.extend)?;
    let info = SolveInfo {
        b1,
        picard_iterations: seed.iterations(),
        picard_increments: seed.increments.clone(),
        contraction_factor: seed.contraction_factor(),
        rk_steps: grid.rk_steps,
        rk_rejected: grid.rk_rejected,
        rk_start_s: grid.s[grid.rk_start.min(grid.s.len() - 1)],
        refined_bound,
        settings: *settings,
    };
    Ok(Profile {
        params: p,
        consts: c,
        s: grid.s,
        log_ratio: grid.log_ratio,
        slope: grid.slope,
        dslope: grid.dslope,
        info,
    })
}

impl Profile {
    pub fn kind(&self) -> Kind {
        self.params.kind
    }

    pub fn s_min(&self) -> f64 {
        self.s[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn r_min(&self) -> f64 {
        self.s_min().exp()
    }

    pub fn r_max(&self) -> f64 {
        self.s_max().exp()
    }

    /// `α/β` (or `α₀/β₀`).
    pub fn ratio(&self) -> f64 {
        self.consts.ratio(&self.params)
    }

    fn locate(&self, s: f64) -> Result<(usize, f64), ProfileError> {
        let (lo, hi) = (self.s_min(), self.s_max());
        let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(ProfileError::OutOfRange { r: s.exp(), lo: lo.exp(), hi: hi.exp() });
        }
        let s = s.clamp(lo, hi);
        let j = self.s.partition_point(|&x| x <= s).clamp(1, self.s.len() - 1) - 1;
        Ok((j, s))
    }

    /// `(ℓ, slope, dslope/ds)` at `s`.
    pub fn state_at(&self, s: f64) -> Result<(f64, f64, f64), ProfileError> {
        let (j, s) = self.locate(s)?;
        let h = self.s[j + 1] - self.s[j];
        let t = (s - self.s[j]) / h;
        let (ell, _) = hermite(self.log_ratio[j], self.slope[j], self.log_ratio[j + 1], self.slope[j + 1], h, t);
        let (z, dz) = hermite(self.slope[j], self.dslope[j], self.slope[j + 1], self.dslope[j + 1], h, t);
        Ok((ell, z, dz))
    }

    /// `w(s) = η e^ℓ` (`w̃` or `q̃`).
    pub fn u_at(&self, s: f64) -> Result<f64, ProfileError> {
        Ok(self.params.eta * self.state_at(s)?.0.exp())
    }

    pub fn slope_at(&self, s: f64) -> Result<f64, ProfileError> {
        Ok(self.state_at(s)?.1)
    }

    /// `f(r)` (or `g(r)`).
    pub fn eval_f(&self, r: f64) -> Result<f64, ProfileError> {
        let s = r.ln();
        let (ell, _, _) = self.state_at(s)?;
        Ok((self.params.eta.ln() + ell - self.ratio() * s).exp())
    }

    /// `f_r = (f/r)(slope − α/β)`.
    pub fn eval_fr(&self, r: f64) -> Result<f64, ProfileError> {
        let s = r.ln();
        let (ell, z, _) = self.state_at(s)?;
        let f = (self.params.eta.ln() + ell - self.ratio() * s).exp();
        Ok(f / r * (z - self.ratio()))
    }

    /// `v = r² f^{1-m}`.
    pub fn eval_v(&self, r: f64) -> Result<f64, ProfileError> {
        let f = self.eval_f(r)?;
        Ok(r * r * f.powf(1.0 - self.params.m_or_zero()))
    }

    /// `f_λ(r) = λ^{2/(1-m)} f(λr)` (log case `λ² g(λr)`), whose blow-up
    /// coefficient is `η λ^{-ρ₁/(β(1-m))}`.
    pub fn rescale(&self, lambda: f64) -> Result<Profile, ProfileError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ProfileError::NonPositiveLambda(lambda));
        }
        let p = &self.params;
        let shift = lambda.ln();
        let exponent = -p.rho1 / (p.beta * (1.0 - p.m_or_zero()));
        let params = p.with_eta(p.eta * lambda.powf(exponent));
        let mut info = self.info.clone();
        info.b1 += shift;
        info.rk_start_s -= shift;
        Ok(Profile {
            params,
            consts: derive_constants(&params),
            s: self.s.iter().map(|s| s - shift).collect(),
            log_ratio: self.log_ratio.clone(),
            slope: self.slope.clone(),
            dslope: self.dslope.clone(),
            info,
        })
    }

    pub fn sample_at(&self, r: f64) -> Result<Sample, ProfileError> {
        let s = r.ln();
        let (ell, z, _) = self.state_at(s)?;
        let ratio = self.ratio();
        let w = self.params.eta * ell.exp();
        let f = (self.params.eta.ln() + ell - ratio * s).exp();
        let v = match self.kind() {
            Kind::Fde => Some(r * r * f.powf(1.0 - self.params.m_or_zero())),
            Kind::Lde => None,
        };
        Ok(Sample { r, f, f_r: f / r * (z - ratio), w, slope: z, v })
    }

    /// `count` rows on `[r_min, r_max]`.
    pub fn sample(&self, r_min: f64, r_max: f64, count: usize, spacing: Spacing) -> Result<Vec<Sample>, ProfileError> {
        if count < 2 {
            return Err(ProfileError::BadCount(count));
        }
        for r in [r_min, r_max] {
            self.locate(r.ln())?;
        }
        let rs = match spacing {
            Spacing::Log => log_space(r_min, r_max, count),
            Spacing::Linear => (0..count)
                .map(|i| r_min + (r_max - r_min) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        rs.into_iter().map(|r| self.sample_at(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn reference() -> &'static Profile {
        static P: OnceLock<Profile> = OnceLock::new();
        P.get_or_init(|| solve(ProblemParams::fde(3, 0.1, 1.0, 1.0, 1.0), &SolverSettings::default()).unwrap())
    }

    fn lde_reference() -> &'static Profile {
        static P: OnceLock<Profile> = OnceLock::new();
        P.get_or_init(|| solve(ProblemParams::lde(3, 1.0, 1.0, 1.0), &SolverSettings::default()).unwrap())
    }

    #[test]
    fn blow_up_normalisation_at_left_end() {
        let pr = reference();
        let r = pr.r_min();
        let w = r.powf(pr.ratio()) * pr.eval_f(r).unwrap();
        assert!((w - 1.0).abs() <= 1e-10, "{w}");
    }

    #[test]
    fn lower_envelopes_and_sign_conditions() {
        for pr in [reference(), lde_reference()] {
            let eta = pr.params.eta;
            for r in log_space(1e-6, 1e3, 60) {
                let f = pr.eval_f(r).unwrap();
                let fr = pr.eval_fr(r).unwrap();
                assert!(f > eta * r.powf(-pr.ratio()));
                assert!(fr < 0.0);
                assert!(f + r * fr / pr.ratio() > 0.0);
            }
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        let pr = reference();
        assert!(matches!(pr.eval_f(pr.r_max() * 1.01), Err(ProfileError::OutOfRange { .. })));
        assert!(matches!(pr.eval_f(pr.r_min() * 0.99), Err(ProfileError::OutOfRange { .. })));
        assert!(pr.eval_f(pr.r_max()).is_ok());
    }

    #[test]
    fn far_field_v_near_limit() {
        let pr = reference();
        let v = pr.eval_v(1e6).unwrap();
        assert!((v / (14.0 / 9.0) - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn rescale_examples() {
        let pr = reference();
        assert!(matches!(pr.rescale(0.0), Err(ProfileError::NonPositiveLambda(_))));
        let same = pr.rescale(1.0).unwrap();
        assert_eq!(same.s, pr.s);
        assert_eq!(same.params, pr.params);
        let two = pr.rescale(2.0).unwrap();
        assert_relative_eq!(two.params.eta, 2f64.powf(-1.0 / 0.9), max_relative = 1e-15);
        assert!((two.params.eta - 0.46294).abs() < 1e-5);
        for r in [0.01, 0.3, 1.0, 7.0] {
            let direct = 2f64.powf(2.0 / 0.9) * pr.eval_f(2.0 * r).unwrap();
            assert_relative_eq!(two.eval_f(r).unwrap(), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn lde_rescale_coefficient() {
        let pr = lde_reference();
        let half = pr.rescale(0.5).unwrap();
        assert_relative_eq!(half.params.eta, 2.0, max_relative = 1e-15);
        let r = 0.8;
        assert_relative_eq!(half.eval_f(r).unwrap(), 0.25 * pr.eval_f(0.5 * r).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn sample_shapes() {
        let pr = reference();
        assert!(matches!(pr.sample(1.0, 2.0, 1, Spacing::Log), Err(ProfileError::BadCount(1))));
        let rows = pr.sample(0.01, 100.0, 2, Spacing::Log).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].r, 0.01);
        assert_eq!(rows[1].r, 100.0);
        let rows = pr.sample(0.5, 5.0, 50, Spacing::Linear).unwrap();
        assert!(rows.windows(2).all(|w| w[0].r < w[1].r));
        for row in &rows {
            let w = row.r.powf(pr.ratio()) * row.f;
            assert_relative_eq!(w, row.w, max_relative = 1e-13);
        }
        assert!(lde_reference().sample_at(1.0).unwrap().v.is_none());
    }

    #[test]
    fn interpolation_error_shrinks_fourth_order() {
        // coarse profiles made of every 2nd / 4th node, checked at their
        // midpoints (which are nodes of the full grid)
        let pr = reference();
        let decimate = |k: usize| {
            let pick = |v: &Vec<f64>| v.iter().step_by(k).copied().collect::<Vec<f64>>();
            Profile { s: pick(&pr.s), log_ratio: pick(&pr.log_ratio), slope: pick(&pr.slope), dslope: pick(&pr.dslope), ..pr.clone() }
        };
        let mid_err = |k: usize| {
            let coarse = decimate(k);
            let mut worst = 0.0f64;
            for j in 0..pr.s.len() {
                let s = pr.s[j];
                if j % k != k / 2 || !(0.0..5.0).contains(&s) {
                    continue;
                }
                worst = worst.max((coarse.slope_at(s).unwrap() - pr.slope[j]).abs());
            }
            worst
        };
        let (e1, e2) = (mid_err(8), mid_err(4));
        assert!(e1 / e2 > 10.0 && e1 / e2 < 24.0, "{e1} {e2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn rescale_composes(l in 0.2f64..5.0, mu in 0.2f64..5.0) {
            let pr = reference();
            let two_step = pr.rescale(l).unwrap().rescale(mu).unwrap();
            let one_step = pr.rescale(l * mu).unwrap();
            prop_assert!((two_step.params.eta / one_step.params.eta - 1.0).abs() < 1e-13);
            let r = (two_step.r_min().ln() * 0.3 + two_step.r_max().ln() * 0.7).exp();
            let (x, y) = (two_step.eval_f(r).unwrap(), one_step.eval_f(r).unwrap());
            prop_assert!((x / y - 1.0).abs() < 1e-12);
        }

        #[test]
        fn log_derivative_in_open_interval(t in 0.0f64..1.0) {
            let pr = reference();
            let s = pr.s_min() + t * (pr.s_max() - pr.s_min());
            let r = s.exp();
            let q = r * pr.eval_fr(r).unwrap() / pr.eval_f(r).unwrap();
            // on the far left the slope is below one ulp of the ratio
            let z = pr.slope_at(s).unwrap();
            prop_assert!(z > 0.0 && z < pr.ratio());
            prop_assert!(q >= -pr.ratio() * (1.0 + 1e-14) && q < 0.0);
        }
    }
}
