//! CSV tables, JSON sidecars and atomic file writes.

use crate::CliError;
use selfsim::{DerivedConstants, Kind, Profile, ProblemParams, Sample, SolverSettings, Spacing};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const FDE_HEADER: [&str; 6] = ["r", "f", "f_r", "w", "z", "v"];
pub const LDE_HEADER: [&str; 5] = ["r", "g", "g_r", "q", "h"];

/// 17 significant digits, enough to round-trip any double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to a temporary file next to `path`, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn samples_to_csv(kind: Kind, rows: &[Sample]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    match kind {
        Kind::Fde => w.write_record(FDE_HEADER).map_err(err)?,
        Kind::Lde => w.write_record(LDE_HEADER).map_err(err)?,
    }
    for row in rows {
        let mut rec = vec![fmt17(row.r), fmt17(row.f), fmt17(row.f_r), fmt17(row.w), fmt17(row.slope)];
        if kind == Kind::Fde {
            rec.push(fmt17(row.v.unwrap_or(f64::NAN)));
        }
        w.write_record(&rec).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_samples(path: &Path) -> Result<(Kind, Vec<Sample>), CliError> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    let kind = if header == FDE_HEADER {
        Kind::Fde
    } else if header == LDE_HEADER {
        Kind::Lde
    } else {
        return Err(bad(format!("unrecognised header {header:?}")));
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if vals.len() != header.len() {
            return Err(bad(format!("row {}: expected {} fields", i + 1, header.len())));
        }
        rows.push(Sample { r: vals[0], f: vals[1], f_r: vals[2], w: vals[3], slope: vals[4], v: vals.get(5).copied() });
    }
    Ok((kind, rows))
}

/// Where and how a table was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

/// Sidecar written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub params: ProblemParams,
    pub constants: DerivedConstants,
    pub settings: SolverSettings,
    pub sampling: Sampling,
    pub b1: f64,
    pub picard_iterations: usize,
    pub picard_increments: Vec<f64>,
    pub contraction_factor: f64,
    pub rk_steps: usize,
    pub rk_rejected: usize,
    pub refined_bound: bool,
    pub csv: String,
}

impl Metadata {
    pub fn new(pr: &Profile, sampling: Sampling, csv: &Path) -> Self {
        let info = &pr.info;
        Self {
            params: pr.params,
            constants: pr.consts,
            settings: info.settings,
            sampling,
            b1: info.b1,
            picard_iterations: info.picard_iterations,
            picard_increments: info.picard_increments.clone(),
            contraction_factor: info.contraction_factor,
            rk_steps: info.rk_steps,
            rk_rejected: info.rk_rejected,
            refined_bound: info.refined_bound,
            csv: csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        }
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.718281828459045e-17, 1e300, -5e-324] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            Sample { r: 0.1, f: 2154.4346900318847, f_r: -71814.489667729, w: 1.0000000001, slope: 1e-9, v: Some(1.2) },
            Sample { r: 2.0, f: 0.3, f_r: -0.4, w: 3.0, slope: 0.9, v: Some(1.5) },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_atomic(&path, &samples_to_csv(Kind::Fde, &rows).unwrap()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("r,f,f_r,w,z,v\n"));
        assert!(!text.contains('\r'));
        let (kind, back) = read_samples(&path).unwrap();
        assert_eq!(kind, Kind::Fde);
        assert_eq!(back, rows);
    }

    #[test]
    fn log_table_has_five_columns() {
        let rows = vec![Sample { r: 1.0, f: 2.0, f_r: -3.0, w: 2.0, slope: 0.5, v: None }];
        let bytes = samples_to_csv(Kind::Lde, &rows).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().next(), Some("r,g,g_r,q,h"));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 5);
    }
}
