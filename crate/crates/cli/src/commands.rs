use crate::args::{KindArg, ModelArgs, RescaleArgs, SampleArgs, SolverArgs, SpacingArg, SweepArgs, VerifyArgs};
use crate::config::ConfigFile;
use crate::io::{read_json, read_samples, samples_to_csv, sidecar_path, write_atomic, write_json, Metadata, Sampling};
use crate::CliError;
use rayon::prelude::*;
use selfsim::verify::{self, CheckEntry, Status, VerificationReport, VerifyConfig};
use selfsim::{solve, validate, Kind, Profile, ProblemParams, Sample, SolverSettings, Spacing};
use serde::Serialize;
use std::path::{Path, PathBuf};

const DEFAULT_SAMPLES: usize = 1000;
const DEFAULT_R_MAX: f64 = 1e6;

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    path.map_or_else(|| Ok(ConfigFile::default()), ConfigFile::load)
}

pub fn resolve_kind(flag: Option<KindArg>, cfg: &ConfigFile) -> Result<Kind, CliError> {
    if let Some(k) = flag {
        return Ok(match k {
            KindArg::Fde => Kind::Fde,
            KindArg::Lde => Kind::Lde,
        });
    }
    match cfg.get::<String>("kind")?.as_deref() {
        None | Some("fde") => Ok(Kind::Fde),
        Some("lde") => Ok(Kind::Lde),
        Some(other) => Err(CliError::Usage(format!("kind must be fde or lde, got '{other}'"))),
    }
}

pub fn resolve_params(kind: Kind, model: &ModelArgs, cfg: &ConfigFile) -> Result<ProblemParams, CliError> {
    let n = cfg.pick(model.n, "n")?.unwrap_or(3);
    let rho1 = cfg.pick(model.rho1, "rho1")?.unwrap_or(1.0);
    let eta = cfg.pick(model.eta, "eta")?.unwrap_or(1.0);
    let beta = cfg.pick(model.beta, "beta")?.ok_or_else(|| CliError::Usage("--beta is required".into()))?;
    let m = cfg.pick(model.m, "m")?;
    match kind {
        Kind::Fde => {
            let m = m.ok_or_else(|| CliError::Usage("--m is required for fast diffusion".into()))?;
            Ok(ProblemParams::fde(n, m, rho1, beta, eta))
        }
        Kind::Lde if m.is_some() => Err(CliError::Usage("--m does not apply to logarithmic diffusion".into())),
        Kind::Lde => Ok(ProblemParams::lde(n, rho1, beta, eta)),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

/// Solver settings; the extension reaches at least the requested `r_max`.
pub fn resolve_settings(solver: &SolverArgs, sample: &SampleArgs, cfg: &ConfigFile) -> Result<SolverSettings, CliError> {
    let mut st = SolverSettings::default();
    if let Some(v) = cfg.pick(solver.tol, "tol")? {
        st.seed.tol = positive("tol", v)?;
    }
    if let Some(v) = cfg.pick(solver.seed_ds, "seed-ds")? {
        st.seed.ds = positive("seed-ds", v)?;
    }
    if let Some(v) = cfg.pick(solver.rk_tol, "rk-tol")? {
        st.extend.rk_tol = positive("rk-tol", v)?;
    }
    if let Some(r) = cfg.pick(sample.r_max, "r-max")? {
        let r = positive("r-max", r)?;
        st.extend.s_max = st.extend.s_max.max(r.ln());
    }
    Ok(st)
}

pub fn resolve_sampling(sample: &SampleArgs, cfg: &ConfigFile, pr: &Profile) -> Result<Sampling, CliError> {
    let r_min = cfg.pick(sample.r_min, "r-min")?.unwrap_or_else(|| pr.r_min());
    // exp(ln 1e6) may land an ulp short of 1e6; evaluation allows that slack
    let default_max = if pr.eval_f(DEFAULT_R_MAX).is_ok() { DEFAULT_R_MAX } else { pr.r_max() };
    let r_max = cfg.pick(sample.r_max, "r-max")?.unwrap_or(default_max);
    let count = cfg.pick(sample.samples, "samples")?.unwrap_or(DEFAULT_SAMPLES);
    let spacing = match sample.spacing {
        Some(SpacingArg::Log) => Spacing::Log,
        Some(SpacingArg::Linear) => Spacing::Linear,
        None => match cfg.get::<String>("spacing")?.as_deref() {
            None | Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => return Err(CliError::Usage(format!("spacing must be log or linear, got '{other}'"))),
        },
    };
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(CliError::Usage(format!("need 0 < r-min < r-max, got {r_min} and {r_max}")));
    }
    Ok(Sampling { r_min, r_max, count, spacing })
}

pub fn table(pr: &Profile, s: &Sampling) -> Result<Vec<Sample>, CliError> {
    pr.sample(s.r_min, s.r_max, s.count, s.spacing).map_err(|e| CliError::Usage(e.to_string()))
}

/// Write the CSV and its sidecar; returns the sidecar contents.
pub fn write_profile(pr: &Profile, sampling: Sampling, out: &Path) -> Result<Metadata, CliError> {
    let rows = table(pr, &sampling)?;
    write_atomic(out, &samples_to_csv(pr.kind(), &rows)?)?;
    let meta = Metadata::new(pr, sampling, out);
    write_json(&sidecar_path(out), &meta)?;
    Ok(meta)
}

pub fn cmd_solve(
    kind: Kind,
    model: &ModelArgs,
    solver: &SolverArgs,
    sample: &SampleArgs,
    out: &Path,
    config: Option<&Path>,
) -> Result<Metadata, CliError> {
    let cfg = load_config(config)?;
    let params = resolve_params(kind, model, &cfg)?;
    let settings = resolve_settings(solver, sample, &cfg)?;
    let pr = solve(params, &settings)?;
    let sampling = resolve_sampling(sample, &cfg, &pr)?;
    let meta = write_profile(&pr, sampling, out)?;
    eprintln!(
        "b1 = {:.6}, {} Picard iterations (factor {:.3}), {} RK steps; wrote {} rows to {}",
        meta.b1,
        meta.picard_iterations,
        meta.contraction_factor,
        meta.rk_steps,
        sampling.count,
        out.display()
    );
    Ok(meta)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn verdict(report_ok: bool, failed: Vec<&CheckEntry>) -> Result<(), CliError> {
    for e in &failed {
        eprintln!("FAIL {:24} measured {:?} tolerance {:?}  {}", e.name, e.measured, e.tolerance, e.detail);
    }
    if report_ok {
        Ok(())
    } else {
        let names: Vec<&str> = failed.iter().map(|e| e.name.as_str()).collect();
        Err(CliError::ChecksFailed(names.join(", ")))
    }
}

/// Profile plus the table the checks should see, from flags or from `--in`.
pub fn verify_inputs(args: &VerifyArgs) -> Result<(Profile, Vec<Sample>), CliError> {
    if let Some(csv) = &args.input {
        let meta_path = args.meta.clone().unwrap_or_else(|| sidecar_path(csv));
        let meta: Metadata = read_json(&meta_path)?;
        let (kind, rows) = read_samples(csv)?;
        if kind != meta.params.kind {
            return Err(CliError::Usage(format!("{} does not match the kind recorded in {}", csv.display(), meta_path.display())));
        }
        let pr = solve(meta.params, &meta.settings)?;
        return Ok((pr, rows));
    }
    let cfg = load_config(args.config.as_deref())?;
    let kind = resolve_kind(args.kind, &cfg)?;
    let params = resolve_params(kind, &args.model, &cfg)?;
    let settings = resolve_settings(&args.solver, &args.sample, &cfg)?;
    let pr = solve(params, &settings)?;
    let sampling = resolve_sampling(&args.sample, &cfg, &pr)?;
    let rows = table(&pr, &sampling)?;
    Ok((pr, rows))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<VerificationReport, CliError> {
    let (pr, rows) = verify_inputs(args)?;
    let cfg = VerifyConfig { checks: args.checks.clone(), ..VerifyConfig::default() };
    let report = verify::run(&pr, Some(&rows), &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    emit_json(&report, args.out.as_deref())?;
    verdict(report.overall, report.failed().collect())?;
    Ok(report)
}

/// Worker count: `--jobs` (default: all cores) capped by `SELFSIM_THREADS`.
pub fn worker_count(jobs: Option<usize>, cap: Option<&str>) -> usize {
    let want = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = cap.and_then(|c| c.trim().parse::<usize>().ok()).filter(|&c| c > 0).unwrap_or(usize::MAX);
    want.min(cap).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub m: Option<f64>,
    pub beta: f64,
    pub status: String,
    pub csv: Option<String>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepIndex {
    pub kind: Kind,
    pub cells: Vec<SweepCell>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepIndex, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let kind = resolve_kind(args.kind, &cfg)?;
    let n = cfg.pick(args.n, "n")?.unwrap_or(3);
    let rho1 = cfg.pick(args.rho1, "rho1")?.unwrap_or(1.0);
    let eta = cfg.pick(args.eta, "eta")?.unwrap_or(1.0);
    let settings = resolve_settings(&args.solver, &args.sample, &cfg)?;
    let grid: Vec<(Option<f64>, f64)> = match kind {
        Kind::Fde if args.m.is_empty() => return Err(CliError::Usage("--m is required for a fast-diffusion sweep".into())),
        Kind::Fde => args.m.iter().flat_map(|&m| args.beta.iter().map(move |&b| (Some(m), b))).collect(),
        Kind::Lde if !args.m.is_empty() => return Err(CliError::Usage("--m does not apply to logarithmic diffusion".into())),
        Kind::Lde => args.beta.iter().map(|&b| (None, b)).collect(),
    };
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;
    let workers = worker_count(args.jobs, std::env::var("SELFSIM_THREADS").ok().as_deref());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| CliError::Io(e.to_string()))?;
    let run_cell = |&(m, beta): &(Option<f64>, f64)| -> SweepCell {
        let params = match m {
            Some(m) => ProblemParams::fde(n, m, rho1, beta, eta),
            None => ProblemParams::lde(n, rho1, beta, eta),
        };
        let cell = |status: &str, csv: Option<String>, message: Option<String>| SweepCell {
            m,
            beta,
            status: status.into(),
            csv,
            message,
        };
        if let Err(e) = validate(params) {
            return cell("skipped", None, Some(e.to_string()));
        }
        let name = match m {
            Some(m) => format!("fde_m{m}_beta{beta}.csv"),
            None => format!("lde_beta{beta}.csv"),
        };
        let path: PathBuf = args.out_dir.join(&name);
        let result = solve(params, &settings)
            .map_err(CliError::from)
            .and_then(|pr| Ok((resolve_sampling(&args.sample, &cfg, &pr)?, pr)))
            .and_then(|(sampling, pr)| write_profile(&pr, sampling, &path));
        match result {
            Ok(_) => cell("ok", Some(name), None),
            Err(e) => cell("failed", None, Some(e.to_string())),
        }
    };
    let cells: Vec<SweepCell> = pool.install(|| grid.par_iter().map(run_cell).collect());
    for c in cells.iter().filter(|c| c.status != "ok") {
        eprintln!("warning: {} cell m = {:?}, beta = {}: {}", c.status, c.m, c.beta, c.message.as_deref().unwrap_or(""));
    }
    let index = SweepIndex { kind, cells };
    write_json(&args.out_dir.join("index.json"), &index)?;
    if index.cells.iter().all(|c| c.status == "skipped") {
        return Err(CliError::Usage("every sweep cell is inadmissible".into()));
    }
    if index.cells.iter().any(|c| c.status == "failed") {
        return Err(CliError::Solve("some sweep cells failed; see index.json".into()));
    }
    Ok(index)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaleReport {
    pub entries: Vec<CheckEntry>,
    pub overall: bool,
}

pub fn cmd_rescale_check(args: &RescaleArgs) -> Result<RescaleReport, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let kind = resolve_kind(args.kind, &cfg)?;
    let params = resolve_params(kind, &args.model, &cfg)?;
    let settings = resolve_settings(&args.solver, &SampleArgs::default(), &cfg)?;
    for &l in &args.lambda {
        positive("lambda", l)?;
    }
    let pr = solve(params, &settings)?;
    let entries: Vec<CheckEntry> = args
        .lambda
        .iter()
        .flat_map(|&l| {
            verify::check_scaling(&pr, &[l], args.tolerance).into_iter().map(move |mut e| {
                e.name = format!("scaling_lambda_{l}");
                e
            })
        })
        .collect();
    let overall = entries.iter().all(|e| e.status != Status::Fail);
    let report = RescaleReport { entries, overall };
    emit_json(&report, args.out.as_deref())?;
    verdict(overall, report.entries.iter().filter(|e| e.status == Status::Fail).collect())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_cap_from_environment() {
        assert_eq!(worker_count(Some(8), Some("2")), 2);
        assert_eq!(worker_count(Some(1), Some("4")), 1);
        assert_eq!(worker_count(Some(3), Some("zero")), 3);
        assert_eq!(worker_count(Some(0), None), 1);
    }

    #[test]
    fn params_need_beta_and_m() {
        let cfg = ConfigFile::default();
        let mut model = ModelArgs { beta: Some(1.0), ..ModelArgs::default() };
        assert!(matches!(resolve_params(Kind::Fde, &model, &cfg), Err(CliError::Usage(_))));
        model.m = Some(0.1);
        let p = resolve_params(Kind::Fde, &model, &cfg).unwrap();
        assert_eq!(p, ProblemParams::fde(3, 0.1, 1.0, 1.0, 1.0));
        assert!(resolve_params(Kind::Lde, &model, &cfg).is_err());
    }

    #[test]
    fn config_fills_missing_flags() {
        let cfg = ConfigFile::parse("kind = lde\nbeta = 2\nn = 4\nrk-tol = 1e-9").unwrap();
        let kind = resolve_kind(None, &cfg).unwrap();
        assert_eq!(kind, Kind::Lde);
        let p = resolve_params(kind, &ModelArgs::default(), &cfg).unwrap();
        assert_eq!(p, ProblemParams::lde(4, 1.0, 2.0, 1.0));
        let st = resolve_settings(&SolverArgs::default(), &SampleArgs::default(), &cfg).unwrap();
        assert_eq!(st.extend.rk_tol, 1e-9);
    }

    #[test]
    fn far_r_max_extends_the_solve() {
        let sample = SampleArgs { r_max: Some(1e8), ..SampleArgs::default() };
        let st = resolve_settings(&SolverArgs::default(), &sample, &ConfigFile::default()).unwrap();
        assert_eq!(st.extend.s_max, 1e8f64.ln());
        let bad = SolverArgs { seed_ds: Some(-1.0), ..SolverArgs::default() };
        assert!(resolve_settings(&bad, &SampleArgs::default(), &ConfigFile::default()).is_err());
    }
}
