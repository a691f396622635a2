//! Config-driven experiment runner: scenarios, presets, dumps, Table 1 and convergence studies.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod presets;
pub mod study;

pub use config::{ScenarioConfig, Scheme};
pub use pipeline::{run, RunOutput};

use crate::diagnostics::DiagnosticsError;
use crate::evolution::EvolutionError;
use crate::linalg::LinalgError;
use crate::maxwell::AssemblyError;
use crate::schrodinger::SchrodingerError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<LinalgError> for RunError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotHermitian { .. } | LinalgError::Singular | LinalgError::NonFinite(_) => {
                RunError::Numerical(e.to_string())
            }
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<SchrodingerError> for RunError {
    fn from(e: SchrodingerError) -> Self {
        match e {
            SchrodingerError::Linalg(l) => l.into(),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<AssemblyError> for RunError {
    fn from(e: AssemblyError) -> Self {
        match e {
            AssemblyError::Linalg(l) => l.into(),
            AssemblyError::Schrodinger(s) => s.into(),
            AssemblyError::SingularMatching => RunError::Numerical(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<EvolutionError> for RunError {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::Linalg(l) => l.into(),
            EvolutionError::InvalidPlan(_) | EvolutionError::TimeDependent | EvolutionError::Shape { .. } => {
                RunError::Config(e.to_string())
            }
            EvolutionError::Singular { .. } | EvolutionError::StepUnderflow { .. } => {
                RunError::Numerical(e.to_string())
            }
        }
    }
}

impl From<DiagnosticsError> for RunError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Assembly(a) => a.into(),
            other => RunError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn at_most(name: &str, value: Option<f64>, limit: f64) -> Self {
        let v = value.unwrap_or(f64::NAN);
        CheckOutcome { name: name.into(), value: v, limit: format!("≤ {limit:e}"), pass: v <= limit }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            value,
            limit: format!("∈ [{lo:e}, {hi:e}]"),
            pass: (lo..=hi).contains(&value),
        }
    }
}

/// Applies the thresholds of `out.config.checks`.
pub fn evaluate_checks(out: &RunOutput) -> Vec<CheckOutcome> {
    let c = &out.config.checks;
    let r = &out.report;
    let mut v = Vec::new();
    if let Some(l) = c.max_energy_drift {
        v.push(CheckOutcome::at_most("energy_drift", Some(r.energy_drift), l));
    }
    if let Some(l) = c.max_div_b_drift {
        v.push(CheckOutcome::at_most("div_b_drift", r.div_b_drift, l));
    }
    if let Some(l) = c.max_gauss {
        v.push(CheckOutcome::at_most("gauss_f4", r.gauss_f4, l));
        v.push(CheckOutcome::at_most("gauss_f8", r.gauss_f8, l));
    }
    if let Some([lo, hi]) = c.err_eb_range {
        v.push(CheckOutcome::within("err_eb", r.err_eb, lo, hi));
    }
    let fresnel = out.details.fresnel.as_ref();
    if let Some(l) = c.max_reflection_error {
        v.push(CheckOutcome::at_most("reflection_error", fresnel.map(|f| f.reflection_error), l));
    }
    if let Some(l) = c.max_transmission_error {
        v.push(CheckOutcome::at_most("transmission_error", fresnel.map(|f| f.transmission_error), l));
    }
    v
}
