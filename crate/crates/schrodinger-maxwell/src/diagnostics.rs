//! Exact solutions, conservation monitors, error metrics and gate-count estimates.

use crate::maxwell::{AssemblyError, CurrentFn, CurrentSample, FieldFn, FieldSample, FieldState, Layout};
use crate::schrodinger::{hamiltonian_stats, SchrodingerisedSystem};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("layouts differ: {0:?} vs {1:?}")]
    LayoutMismatch(Layout, Layout),
    #[error("states have {0} and {1} entries")]
    Shape(usize, usize),
    #[error("{0}")]
    Domain(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub sparsity: usize,
    pub h_max: f64,
    pub t: f64,
    pub tau: f64,
    pub delta: f64,
    pub queries: f64,
    pub gates: f64,
    pub m_h: usize,
    pub m: usize,
    pub d: usize,
    pub label: String,
}

impl ComplexityEstimate {
    pub fn new(sparsity: usize, h_max: f64, t: f64, delta: f64, m_h: usize, m: usize, d: usize) -> Self {
        ComplexityEstimate {
            sparsity,
            h_max,
            t,
            tau: sparsity as f64 * h_max * t,
            delta,
            queries: 0.0,
            gates: 0.0,
            m_h,
            m,
            d,
            label: "estimate".into(),
        }
    }

    /// Fills the estimate from the Hamiltonian of `s`; `m` is log₂ of the
    /// points per axis and `d` the spatial dimension.
    pub fn for_system(s: &SchrodingerisedSystem, t: f64, delta: f64, m: usize, d: usize) -> Self {
        let stats = hamiltonian_stats(s);
        let total = s.dim() * s.mode_count();
        let m_h = (total as f64).log2().ceil() as usize;
        ComplexityEstimate::new(stats.sparsity, stats.max_norm, t, delta, m_h, m, d)
    }
}

fn log_ratio(tau: f64, delta: f64) -> Result<f64, DiagnosticsError> {
    if !(delta > 0.0) || !(tau > 0.0) {
        return Err(DiagnosticsError::Domain(format!("need τ > 0 and δ > 0, got τ = {tau}, δ = {delta}")));
    }
    let l = (tau / delta).ln();
    if !(l > 1.0) {
        return Err(DiagnosticsError::Domain(format!("τ/δ = {} must exceed e", tau / delta)));
    }
    Ok(l)
}

/// `τ log(τ/δ) / log log(τ/δ)` with unit constants.
pub fn lemma_queries(tau: f64, delta: f64) -> Result<f64, DiagnosticsError> {
    let l = log_ratio(tau, delta)?;
    Ok(tau * l / l.ln())
}

/// `τ [m_H + log^{2.5}(τ/δ)] log(τ/δ) / log log(τ/δ)` with unit constants.
pub fn lemma_gates(tau: f64, delta: f64, m_h: usize) -> Result<f64, DiagnosticsError> {
    let l = log_ratio(tau, delta)?;
    Ok(tau * (m_h as f64 + l.powf(2.5)) * l / l.ln())
}

fn check_m(m: f64) -> Result<f64, DiagnosticsError> {
    if !(m > 1.0) {
        return Err(DiagnosticsError::Domain(format!("m = {m} must exceed 1 so that log m > 0")));
    }
    Ok(m.ln())
}

/// Spectral scheme: `M((d+2)m² + 4m)/log m + m log m`.
pub fn spectral_gate_count(big_m: f64, m: f64, d: usize) -> Result<f64, DiagnosticsError> {
    let lm = check_m(m)?;
    Ok(big_m * ((d as f64 + 2.0) * m * m + 4.0 * m) / lm + m * lm)
}

/// Yee scheme: `M((d+2)m² + 2m)/log m + m log m`.
pub fn yee_gate_count(big_m: f64, m: f64, d: usize) -> Result<f64, DiagnosticsError> {
    let lm = check_m(m)?;
    Ok(big_m * ((d as f64 + 2.0) * m * m + 2.0 * m) / lm + m * lm)
}

/// Fills `queries` and `gates`; errors when `τ/δ ≤ e`.
pub fn gate_complexity(est: &ComplexityEstimate) -> Result<ComplexityEstimate, DiagnosticsError> {
    let mut out = est.clone();
    out.tau = est.sparsity as f64 * est.h_max * est.t;
    out.queries = lemma_queries(out.tau, est.delta)?;
    out.gates = lemma_gates(out.tau, est.delta, est.m_h)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_drift: f64,
    /// `None` where the scheme has no staggered magnetic divergence.
    pub div_b_drift: Option<f64>,
    /// `None` where the state is not in RS form.
    pub gauss_f4: Option<f64>,
    pub gauss_f8: Option<f64>,
    pub err_eb: f64,
    pub complexity: Option<ComplexityEstimate>,
}

impl DiagnosticsReport {
    pub fn is_finite(&self) -> bool {
        let opt = |x: Option<f64>| x.map_or(true, |v| v.is_finite() && v >= 0.0);
        [self.energy_initial, self.energy_final, self.energy_drift, self.err_eb]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
            && opt(self.div_b_drift)
            && opt(self.gauss_f4)
            && opt(self.gauss_f8)
    }
}

/// One row of the published comparison table; `None` marks "-".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub energy_drift: f64,
    pub div_b_drift: Option<f64>,
    pub gauss_f4: Option<f64>,
    pub gauss_f8: Option<f64>,
    pub err_eb: f64,
}

pub const TABLE1_QLA: Table1Row = Table1Row {
    energy_drift: 1.16e-4,
    div_b_drift: None,
    gauss_f4: Some(3.71e-3),
    gauss_f8: Some(3.72e-3),
    err_eb: 1.53e-1,
};

pub const TABLE1_SCHR1: Table1Row = Table1Row {
    energy_drift: 1.33e-15,
    div_b_drift: None,
    gauss_f4: Some(9.72e-16),
    gauss_f8: Some(9.70e-16),
    err_eb: 3.72e-15,
};

pub const TABLE1_SCHR2: Table1Row = Table1Row {
    energy_drift: 4.44e-16,
    div_b_drift: Some(6.88e-14),
    gauss_f4: None,
    gauss_f8: None,
    err_eb: 3.83e-2,
};

fn cell_volume(f: &FieldState) -> f64 {
    f.grid.dx().iter().product()
}

/// `Σ |field|² ΔV` over every component of a physical layout.
pub fn discrete_energy(f: &FieldState) -> Result<f64, DiagnosticsError> {
    match f.layout {
        Layout::YeeEb | Layout::YeeTm2d | Layout::Te1d | Layout::Nodal => {}
        other => return Err(DiagnosticsError::LayoutMismatch(other, Layout::YeeEb)),
    }
    Ok(f.data.iter().map(|x| x.norm_sqr()).sum::<f64>() * cell_volume(f))
}

/// Max over points and components of `|numeric − exact|`.
pub fn err_eb(numeric: &FieldState, exact: &FieldState) -> Result<f64, DiagnosticsError> {
    if numeric.layout != exact.layout {
        return Err(DiagnosticsError::LayoutMismatch(numeric.layout, exact.layout));
    }
    if numeric.data.len() != exact.data.len() {
        return Err(DiagnosticsError::Shape(numeric.data.len(), exact.data.len()));
    }
    Ok(numeric.data.iter().zip(&exact.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

pub fn sample_diff(a: &FieldSample, b: &FieldSample) -> f64 {
    a.e.iter().zip(&b.e).chain(a.b.iter().zip(&b.b)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max error of `(x, sample)` pairs against `exact(x)`.
pub fn err_samples(numeric: &[(f64, FieldSample)], exact: &dyn Fn(f64) -> FieldSample) -> f64 {
    numeric.iter().map(|(x, s)| sample_diff(s, &exact(*x))).fold(0.0, f64::max)
}

/// `(E_z, B_x, B_y)` of the periodic TM plane wave.
pub fn exact_tm_2d(t: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let ez = (PI * (x + 2.0 * y + 5f64.sqrt() * t)).sin();
    (ez, -2.0 * ez / 5f64.sqrt(), ez / 5f64.sqrt())
}

pub fn tm_2d_field() -> FieldFn {
    Arc::new(|t, p| {
        let (ez, bx, by) = exact_tm_2d(t, p[0], p[1]);
        FieldSample::real([0.0, 0.0, ez], [bx, by, 0.0])
    })
}

/// Which closed form to use for the perfect-conductor test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PecVariant {
    /// `E_y = (2π/5)(cos(2πx/5)/(2π) − 1)`; violates `E_y = 0` at the walls and Faraday's law.
    Printed,
    /// `E_y = (5/(2π))(cos(2πx/5) − 1)`, which vanishes at both walls and solves the system.
    #[default]
    Consistent,
}

/// `(E_x, E_y, B_z)` on `[0, 15]`.
pub fn exact_pec_1d(t: f64, x: f64) -> (f64, f64, f64) {
    exact_pec_1d_variant(PecVariant::Printed, t, x)
}

pub fn exact_pec_1d_variant(variant: PecVariant, t: f64, x: f64) -> (f64, f64, f64) {
    let k = 2.0 * PI / 5.0;
    let ex = (k * (x + t)).sin();
    let ey = match variant {
        PecVariant::Printed => k * ((k * x).cos() / (2.0 * PI) - 1.0),
        PecVariant::Consistent => ((k * x).cos() - 1.0) / k,
    };
    (ex, ey, t * (k * x).sin())
}

/// `(J_x, J_y, ρ)` with `J_x = −∂_tE_x`, `J_y = −∂_tE_y − ∂_xB_z`, `ρ = ∂_xE_x`.
pub fn pec_1d_source(t: f64, x: f64) -> (f64, f64, f64) {
    let k = 2.0 * PI / 5.0;
    let c = (k * (x + t)).cos();
    (-k * c, -t * k * (k * x).cos(), k * c)
}

/// `(E_x, E_y, B_z)` on `[0, 15]` for unit impedance.
pub fn exact_impedance_1d(t: f64, x: f64) -> (f64, f64, f64) {
    let k = PI / 5.0;
    (-(k * (x + t)).sin(), (k * x).cos() / k, t * (k * x).sin() - 1.0 / k)
}

pub fn impedance_1d_source(t: f64, x: f64) -> (f64, f64, f64) {
    let k = PI / 5.0;
    let c = (k * (x + t)).cos();
    (k * c, -t * k * (k * x).cos(), -k * c)
}

fn te_sample((ex, ey, bz): (f64, f64, f64)) -> FieldSample {
    FieldSample::real([ex, ey, 0.0], [0.0, 0.0, bz])
}

fn te_current((jx, jy, rho): (f64, f64, f64)) -> CurrentSample {
    CurrentSample::real([jx, jy, 0.0], rho)
}

pub fn pec_field(variant: PecVariant) -> FieldFn {
    Arc::new(move |t, p| te_sample(exact_pec_1d_variant(variant, t, p[0])))
}

pub fn pec_current() -> CurrentFn {
    Arc::new(|t, p| te_current(pec_1d_source(t, p[0])))
}

pub fn impedance_field() -> FieldFn {
    Arc::new(|t, p| te_sample(exact_impedance_1d(t, p[0])))
}

pub fn impedance_current() -> CurrentFn {
    Arc::new(|t, p| te_current(impedance_1d_source(t, p[0])))
}

/// `max(|E_y(t, a)|, |E_y(t, b)|)`: how far a closed form is from a conducting wall.
pub fn pec_wall_residual(variant: PecVariant, t: f64, a: f64, b: f64) -> f64 {
    exact_pec_1d_variant(variant, t, a).1.abs().max(exact_pec_1d_variant(variant, t, b).1.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FresnelParams {
    pub eps1: f64,
    pub mu1: f64,
    pub eps2: f64,
    pub mu2: f64,
    pub omega: f64,
}

impl Default for FresnelParams {
    fn default() -> Self {
        FresnelParams { eps1: 1.0, mu1: 1.0, eps2: 2.0, mu2: 2.0, omega: 0.5 }
    }
}

impl FresnelParams {
    pub fn z1(&self) -> f64 {
        (self.mu1 / self.eps1).sqrt()
    }
    pub fn z2(&self) -> f64 {
        (self.mu2 / self.eps2).sqrt()
    }
    pub fn k1(&self) -> f64 {
        self.omega * (self.eps1 * self.mu1).sqrt()
    }
    pub fn k2(&self) -> f64 {
        self.omega * (self.eps2 * self.mu2).sqrt()
    }
    pub fn reflection(&self) -> f64 {
        (self.z2() - self.z1()) / (self.z1() + self.z2())
    }
    pub fn transmission(&self) -> f64 {
        2.0 * self.z2() / (self.z1() + self.z2())
    }
}

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// `(E_y, B_z)` of a plane wave hitting the interface `x = 0` from the left.
pub fn exact_interface(p: &FresnelParams, t: f64, x: f64) -> (C64, C64) {
    let (w, k1, k2) = (p.omega, p.k1(), p.k2());
    let (z1, z2) = (p.z1(), p.z2());
    let v1 = 1.0 / (p.eps1 * p.mu1).sqrt();
    if x < 0.0 {
        let inc = phase(w * t - k1 * x);
        let refl = phase(w * t + k1 * x) * p.reflection();
        (inc + refl, (inc - refl) / v1)
    } else {
        let tr = phase(w * t - k2 * x);
        (tr * p.transmission(), tr * (2.0 * p.mu2 / (z1 + z2)))
    }
}

pub fn interface_field(p: FresnelParams) -> FieldFn {
    Arc::new(move |t, x| {
        let (ey, bz) = exact_interface(&p, t, x[0]);
        let z = C64::new(0.0, 0.0);
        FieldSample { e: [z, ey, z], b: [z, z, bz] }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelFit {
    pub incident: C64,
    pub reflected: C64,
    pub transmitted: C64,
    pub left_samples: usize,
    pub right_samples: usize,
}

/// Least-squares plane-wave amplitudes of `E_y` at time `t`: incident and
/// reflected from samples with `x ≤ −window`, transmitted from `x ≥ window`.
pub fn fresnel_fit(
    p: &FresnelParams,
    t: f64,
    samples: &[(f64, C64)],
    window: f64,
) -> Result<FresnelFit, DiagnosticsError> {
    let (w, k1, k2) = (p.omega, p.k1(), p.k2());
    let left: Vec<_> = samples.iter().filter(|(x, _)| *x <= -window).collect();
    let right: Vec<_> = samples.iter().filter(|(x, _)| *x >= window).collect();
    if left.len() < 2 || right.is_empty() {
        return Err(DiagnosticsError::Domain(format!(
            "fit windows hold {} and {} samples",
            left.len(),
            right.len()
        )));
    }
    // normal equations for E ≈ a·φ₊ + r·φ₋
    let (mut g11, mut g12, mut g22) = (0.0, C64::new(0.0, 0.0), 0.0);
    let (mut r1, mut r2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (x, e) in &left {
        let a = phase(w * t - k1 * x);
        let b = phase(w * t + k1 * x);
        g11 += a.norm_sqr();
        g22 += b.norm_sqr();
        g12 += a.conj() * b;
        r1 += a.conj() * e;
        r2 += b.conj() * e;
    }
    let det = g11 * g22 - g12.norm_sqr();
    if det.abs() < 1e-12 * g11 * g22 {
        return Err(DiagnosticsError::Domain("left fit window cannot separate the two waves".into()));
    }
    let incident = (r1 * g22 - g12 * r2) / det;
    let reflected = (r2 * g11 - g12.conj() * r1) / det;
    let transmitted = right.iter().map(|(x, e)| phase(w * t - k2 * x).conj() * e).sum::<C64>() / right.len() as f64;
    Ok(FresnelFit { incident, reflected, transmitted, left_samples: left.len(), right_samples: right.len() })
}

/// Least-squares slope of `log err` against `log h`.
pub fn observed_order(h: &[f64], err: &[f64]) -> Result<f64, DiagnosticsError> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(DiagnosticsError::Domain("need at least two (h, err) pairs".into()));
    }
    if h.iter().chain(err).any(|v| !(*v > 0.0)) {
        return Err(DiagnosticsError::Domain("h and err must be positive".into()));
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
