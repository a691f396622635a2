//! Field dumps, diagnostics JSON and run manifests, written atomically.

use super::pipeline::{Frame, RunDetails, RunOutput};
use super::{evaluate_checks, CheckOutcome, RunError};
use crate::diagnostics::{DiagnosticsReport, Table1Row};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const FIELDS_FILE: &str = "fields.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t,x[,y[,z]],component,re,im`, one row per sample, LF line endings.
pub fn fields_csv(frames: &[Frame], dim: usize) -> String {
    let axes = ["x", "y", "z"];
    let mut s = String::from("t");
    for a in &axes[..dim] {
        s.push(',');
        s.push_str(a);
    }
    s.push_str(",component,re,im\n");
    for f in frames {
        let t = fmt_f64(f.t);
        for r in &f.rows {
            s.push_str(&t);
            for c in &r.coord[..dim] {
                s.push(',');
                s.push_str(&fmt_f64(*c));
            }
            let _ = writeln!(s, ",{},{},{}", r.component, fmt_f64(r.value.re), fmt_f64(r.value.im));
        }
    }
    s
}

#[derive(Serialize)]
pub struct DiagnosticsJson<'a> {
    pub name: &'a str,
    pub scheme: &'a str,
    pub t_final: f64,
    #[serde(flatten)]
    pub report: &'a DiagnosticsReport,
    pub paper_reference: Option<Table1Row>,
    pub details: &'a RunDetails,
    pub checks: Vec<CheckOutcome>,
}

pub fn diagnostics_json(out: &RunOutput) -> String {
    let j = DiagnosticsJson {
        name: &out.config.name,
        scheme: out.config.scheme.name(),
        t_final: out.config.t_final,
        report: &out.report,
        paper_reference: out.paper_reference,
        details: &out.details,
        checks: evaluate_checks(out),
    };
    let mut s = serde_json::to_string_pretty(&j).expect("diagnostics serialize");
    s.push('\n');
    s
}

/// The resolved config, runnable as is.
pub fn manifest_toml(out: &RunOutput) -> String {
    format!(
        "# run manifest written by schrmax {}; re-run with `schrmax run <this file>`\n{}",
        env!("CARGO_PKG_VERSION"),
        out.config.to_toml()
    )
}

/// Writes to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| RunError::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        RunError::from(e)
    })
}

/// Writes the artifacts requested by the config into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    use super::config::OutputKind::*;
    let mut written = Vec::new();
    for kind in &out.config.outputs {
        let (file, body) = match kind {
            Fields => (FIELDS_FILE, fields_csv(&out.frames, out.config.grid.dim)),
            Diagnostics => (DIAGNOSTICS_FILE, diagnostics_json(out)),
            Manifest => (MANIFEST_FILE, manifest_toml(out)),
        };
        let p = dir.join(file);
        write_atomic(&p, &body)?;
        written.push(p);
    }
    Ok(written)
}
