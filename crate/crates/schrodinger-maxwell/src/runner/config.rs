//! Scenario configuration, parsed from TOML or JSON.

use super::RunError;
use crate::diagnostics::PecVariant;
use crate::evolution::EvolutionMethod;
use crate::maxwell::{BoundaryKind, BoundarySpec, GridSpec};
use crate::schrodinger::RecoveryMode;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Schr1Spectral,
    Schr2Yee,
    UpwindChar,
    #[serde(rename = "yee_1d")]
    Yee1d,
    SpectralInhomogeneous,
    #[serde(rename = "interface_1d")]
    Interface1d,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Schr1Spectral => "schr1_spectral",
            Scheme::Schr2Yee => "schr2_yee",
            Scheme::UpwindChar => "upwind_char",
            Scheme::Yee1d => "yee_1d",
            Scheme::SpectralInhomogeneous => "spectral_inhomogeneous",
            Scheme::Interface1d => "interface_1d",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PGridConfig {
    pub left: f64,
    pub right: f64,
    pub n: usize,
    /// Extend the domain at fixed spacing to cover `H1` transport over `[0, t_final]`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumConfig {
    Constant {
        eps: f64,
        mu: f64,
    },
    Tanh {
        eps1: f64,
        eps2: f64,
        center: f64,
        beta: f64,
        /// Mirrored transition at this fraction of the domain, making the profile periodic.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mirror_fraction: Option<f64>,
        mu: f64,
    },
    Interface {
        eps1: f64,
        mu1: f64,
        eps2: f64,
        mu2: f64,
        position: f64,
    },
}

impl Default for MediumConfig {
    fn default() -> Self {
        MediumConfig::Constant { eps: 1.0, mu: 1.0 }
    }
}

/// The test problem: initial data, sources and the exact solution if one exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    TmPlaneWave {},
    Pec {
        #[serde(default)]
        variant: PecVariant,
    },
    Impedance {},
    Fresnel {
        omega: f64,
    },
    GaussianPulse {
        amplitude: f64,
        center: f64,
        /// `a` in `exp(−a(x − c)²)`.
        decay: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoveryConfig {
    pub mode: RecoveryMode,
    /// Pointwise recovery point; `None` picks the default from `λ_max(H₁)·T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig { mode: RecoveryMode::Pointwise, p_star: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    /// `None`: exact exponentials unless the Hamiltonian depends on time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<EvolutionMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Fields,
    Diagnostics,
    Manifest,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Fields, OutputKind::Diagnostics, OutputKind::Manifest]
}

fn default_delta() -> f64 {
    1e-3
}

/// Thresholds applied by `--check`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_energy_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_div_b_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gauss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_eb_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_reflection_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_transmission_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub scheme: Scheme,
    pub grid: GridSpec,
    pub pgrid: PGridConfig,
    pub t_final: f64,
    pub problem: ProblemConfig,
    #[serde(default = "BoundarySpec::periodic")]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub medium: MediumConfig,
    #[serde(default)]
    pub recovery: RecoveryConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    /// Extra dump times before `t_final`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
    /// Initial value of the auxiliary variable; `None` uses `max(1, 2·max‖b‖)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_scale: Option<f64>,
    /// Target error of the gate-count estimate.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Also integrate the unschrödingerised system with RK4 and report the gap.
    #[serde(default)]
    pub reference: bool,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub checks: CheckConfig,
}

fn cfg(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let c: ScenarioConfig = toml::from_str(text).map_err(|e| cfg(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let c: ScenarioConfig = serde_json::from_str(text).map_err(|e| cfg(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads `.json` as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg(format!("{}: {e}", path.display())))?;
        let ctx = |e: RunError| cfg(format!("{}: {e}", path.display()));
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text).map_err(ctx)
        } else {
            Self::from_toml(&text).map_err(ctx)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every scheme/boundary/medium/problem combination, collecting all problems.
    pub fn validate(&self) -> Result<(), RunError> {
        let mut errs: Vec<String> = Vec::new();
        if let Err(e) = self.grid.validate() {
            errs.push(e.to_string());
        }
        if let Err(e) = self.boundary.validate() {
            errs.push(e.to_string());
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            errs.push(format!("t_final = {} must be finite and ≥ 0", self.t_final));
        }
        if self.pgrid.n < 2 || self.pgrid.n % 2 != 0 || !(self.pgrid.right > self.pgrid.left) {
            errs.push(format!(
                "pgrid needs even n ≥ 2 and left < right (got n = {}, [{}, {}])",
                self.pgrid.n, self.pgrid.left, self.pgrid.right
            ));
        }
        if let Some(dt) = self.evolution.dt {
            if !(dt > 0.0) {
                errs.push(format!("evolution.dt = {dt} must be > 0"));
            }
        }
        if let Some(s) = self.aux_scale {
            if !(s > 0.0) || !s.is_finite() {
                errs.push(format!("aux_scale = {s} must be > 0"));
            }
        }
        if let Some(p) = self.recovery.p_star {
            if !(p > 0.0) {
                errs.push(format!("recovery.p_star = {p} must be > 0"));
            }
        }
        if !(self.delta > 0.0) {
            errs.push(format!("delta = {} must be > 0", self.delta));
        }
        for &t in &self.snapshots {
            if !(0.0..=self.t_final).contains(&t) {
                errs.push(format!("snapshot {t} lies outside [0, t_final]"));
            }
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            errs.push("snapshots must be strictly increasing".into());
        }
        self.validate_combination(&mut errs);
        if errs.is_empty() {
            Ok(())
        } else {
            Err(cfg(errs.join("; ")))
        }
    }

    fn validate_combination(&self, errs: &mut Vec<String>) {
        use BoundaryKind::*;
        use ProblemConfig as P;
        let s = self.scheme.name();
        let periodic = self.boundary.left == Periodic;
        let dim = self.grid.dim;
        let constant = matches!(self.medium, MediumConfig::Constant { .. });
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                errs.push(format!("{s}: {msg}"));
            }
        };
        match self.scheme {
            Scheme::Schr1Spectral => {
                need(periodic, "needs periodic boundaries");
                need(constant, "needs a constant medium");
                need(
                    matches!(self.problem, P::TmPlaneWave {} | P::GaussianPulse { .. }),
                    "supports the tm_plane_wave and gaussian_pulse problems",
                );
            }
            Scheme::Schr2Yee => {
                need(periodic, "needs periodic boundaries");
                need(constant, "needs a constant medium");
                need(dim == 2, "runs the 2-D TM problem");
                need(matches!(self.problem, P::TmPlaneWave {}), "supports the tm_plane_wave problem");
            }
            Scheme::UpwindChar | Scheme::Yee1d => {
                need(dim == 1, "needs a 1-D grid");
                need(constant, "needs a constant medium");
                need(matches!(self.problem, P::Pec { .. } | P::Impedance {}), "supports the pec and impedance problems");
                if self.scheme == Scheme::Yee1d {
                    need(
                        self.boundary.left != InflowExact && self.boundary.right != InflowExact,
                        "has no inflow_exact closure",
                    );
                }
            }
            Scheme::SpectralInhomogeneous => {
                need(periodic, "needs periodic boundaries");
                need(!matches!(self.medium, MediumConfig::Interface { .. }), "needs a constant or tanh medium");
                if matches!(self.medium, MediumConfig::Tanh { .. }) {
                    need(dim == 1, "tanh media are 1-D");
                }
                need(
                    matches!(self.problem, P::TmPlaneWave {} | P::GaussianPulse { .. }),
                    "supports the tm_plane_wave and gaussian_pulse problems",
                );
            }
            Scheme::Interface1d => {
                need(dim == 1, "needs a 1-D grid");
                need(!periodic, "does not support periodic boundaries");
                need(matches!(self.medium, MediumConfig::Interface { .. }), "needs an interface medium");
                need(matches!(self.problem, P::Fresnel { .. }), "supports the fresnel problem");
                if let MediumConfig::Interface { position, .. } = self.medium {
                    need(position == 0.0, "the exact Fresnel solution places the interface at x = 0");
                }
            }
        }
        if matches!(self.problem, P::TmPlaneWave {}) {
            need(dim == 2, "tm_plane_wave is a 2-D problem");
        }
        if matches!(self.problem, P::GaussianPulse { .. }) {
            need(dim == 1, "gaussian_pulse is a 1-D problem");
        }
        if matches!(self.problem, P::Pec { .. }) {
            need(
                self.boundary.left != Impedance && self.boundary.right != Impedance,
                "the pec problem has no impedance wall",
            );
        }
        if matches!(self.problem, P::Impedance {}) {
            need(
                self.boundary.left != PerfectConductor && self.boundary.right != PerfectConductor,
                "the impedance problem has no conducting wall",
            );
        }
    }
}
