//! Scenario execution: assemble, Schrödingerise, evolve, recover, measure.

use super::config::{MediumConfig, ProblemConfig, ScenarioConfig, Scheme};
use super::RunError;
use crate::diagnostics::{
    self, err_eb, exact_interface, gate_complexity, impedance_current, impedance_field, interface_field,
    pec_current, pec_field, pec_wall_residual, sample_diff, tm_2d_field, ComplexityEstimate, DiagnosticsReport,
    FresnelFit, FresnelParams, Table1Row,
};
use crate::evolution::{
    evolve_backward_euler_snapshots, evolve_exact_snapshots, reference_snapshots, EvolutionMethod, DEFAULT_BE_STEPS,
};
use crate::linalg::C64;
use crate::maxwell::interface::{build_interface_1d, interface_pack, interface_unpack, InterfaceSpec};
use crate::maxwell::profile::TanhProfile;
use crate::maxwell::rs::rs_to_nodal;
use crate::maxwell::spectral::{build_spectral_inhomogeneous, build_spectral_periodic, spectral_state};
use crate::maxwell::upwind::{build_upwind_1d, char_pack, char_unpack};
use crate::maxwell::yee::{build_yee_1d, build_yee_periodic, discrete_div};
use crate::maxwell::{
    build_transforms, gauss_monitors, layout_slots, rs_pack, sample_fields, BoundaryKind, CurrentFn, FieldFn,
    FieldSample, FieldState, GridSpec, Layout, MediumParams,
};
use crate::schrodinger::{
    auto_aux_scale, build, default_p_star, hermitian_extremes, homogenize_scaled, initial_extension, recover, LinearSystem, PGrid,
    RecoveryMode, RecoverySpec,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One field value of a dump.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRow {
    pub coord: [f64; 3],
    pub component: &'static str,
    pub value: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub rows: Vec<FieldRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelSummary {
    pub fit: FresnelFit,
    pub expected_reflection: f64,
    pub expected_transmission: f64,
    /// `|r − R|`, divided by `|R|` unless `R = 0`.
    pub reflection_error: f64,
    /// `|t − T|/|T|`.
    pub transmission_error: f64,
}

/// Resolved numerical choices and scheme-specific monitors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunDetails {
    pub method: Option<EvolutionMethod>,
    pub dt: Option<f64>,
    pub p_star: Option<f64>,
    pub aux_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_domain: Option<[f64; 2]>,
    pub unknowns: usize,
    pub modes: usize,
    /// What `err_eb` was measured against.
    pub error_reference: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fresnel: Option<FresnelSummary>,
    /// Max error per field component at `t_final`, when a closed form exists.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub component_errors: BTreeMap<String, f64>,
    /// Gap between the Schrödingerised result and direct RK4, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_gap: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub report: DiagnosticsReport,
    pub details: RunDetails,
    pub paper_reference: Option<Table1Row>,
    pub frames: Vec<Frame>,
}

fn names(e: bool, axis: usize) -> &'static str {
    match (e, axis) {
        (true, 0) => "E_x",
        (true, 1) => "E_y",
        (true, _) => "E_z",
        (false, 0) => "B_x",
        (false, 1) => "B_y",
        _ => "B_z",
    }
}

fn sample_rows(coord: [f64; 3], s: &FieldSample, out: &mut Vec<FieldRow>) {
    for axis in 0..3 {
        out.push(FieldRow { coord, component: names(true, axis), value: s.e[axis] });
    }
    for axis in 0..3 {
        out.push(FieldRow { coord, component: names(false, axis), value: s.b[axis] });
    }
}

fn layout_rows(state: &FieldState) -> Vec<FieldRow> {
    let grid = &state.grid;
    let slots = layout_slots(state.layout).expect("physical layout");
    let n = grid.points();
    let mut rows = Vec::with_capacity(slots.len() * n);
    for (b, slot) in slots.iter().enumerate() {
        for idx in 0..n {
            rows.push(FieldRow {
                coord: grid.coord(grid.unflatten(idx), slot.offset),
                component: slot.name(),
                value: state.data[b * n + idx],
            });
        }
    }
    rows
}

/// Result of evolving and recovering a [`LinearSystem`].
struct Evolved {
    states: Vec<Vec<C64>>,
    details: RunDetails,
    complexity: Option<ComplexityEstimate>,
}

fn times_of(cfg: &ScenarioConfig) -> Vec<f64> {
    let mut t = cfg.snapshots.clone();
    if t.last() != Some(&cfg.t_final) {
        t.push(cfg.t_final);
    }
    t
}

fn log2_points(grid: &GridSpec) -> usize {
    (grid.m as f64).log2().round() as usize
}

fn schrodingerise(cfg: &ScenarioConfig, sys: LinearSystem, times: &[f64]) -> Result<Evolved, RunError> {
    let n0 = sys.dim();
    let (hsys, aux) = if sys.is_homogeneous() {
        (sys, None)
    } else {
        let scale = cfg.aux_scale.unwrap_or_else(|| auto_aux_scale(&sys, cfg.t_final));
        (homogenize_scaled(&sys, scale), Some(scale))
    };
    let mut pgrid = PGrid::new(cfg.pgrid.left, cfg.pgrid.right, cfg.pgrid.n)?;
    let mut s = build(&hsys, &pgrid)?;
    if cfg.pgrid.fit {
        let (lo, hi) = hermitian_extremes(&s.h1);
        let fitted = pgrid.fit_transport(lo, hi, cfg.t_final)?;
        if fitted.n != pgrid.n {
            pgrid = fitted;
            s = build(&hsys, &pgrid)?;
        }
    }
    let method = cfg.evolution.method.unwrap_or(if s.is_time_dependent() {
        EvolutionMethod::BackwardEuler
    } else {
        EvolutionMethod::ExactExpm
    });
    let w0 = initial_extension(&hsys.u0, &pgrid);
    let (ws, dt) = match method {
        EvolutionMethod::ExactExpm => (evolve_exact_snapshots(&s, &w0, times)?, None),
        EvolutionMethod::BackwardEuler => {
            let dt = cfg.evolution.dt.unwrap_or(if cfg.t_final > 0.0 {
                cfg.t_final / DEFAULT_BE_STEPS as f64
            } else {
                1.0
            });
            (evolve_backward_euler_snapshots(&s, &w0, times, dt)?, Some(dt))
        }
    };
    let (spec, p_star) = match cfg.recovery.mode {
        RecoveryMode::Pointwise => {
            let p = cfg.recovery.p_star.unwrap_or_else(|| default_p_star(&s, cfg.t_final));
            (RecoverySpec::pointwise(p), Some(p))
        }
        RecoveryMode::Integral => (RecoverySpec::integral(), None),
    };
    let states = ws
        .iter()
        .zip(times)
        .map(|(w, &t)| {
            let mut u = if t == 0.0 { hsys.u0.clone() } else { recover(w, &pgrid, &spec)? };
            u.truncate(n0);
            Ok(u)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let est = ComplexityEstimate::for_system(&s, cfg.t_final, cfg.delta, log2_points(&cfg.grid), cfg.grid.dim);
    Ok(Evolved {
        states,
        details: RunDetails {
            method: Some(method),
            dt,
            p_star,
            aux_scale: aux,
            p_domain: Some([pgrid.left, pgrid.right]),
            unknowns: s.dim(),
            modes: s.mode_count(),
            ..Default::default()
        },
        complexity: gate_complexity(&est).ok(),
    })
}

fn constant_medium(cfg: &ScenarioConfig) -> Result<MediumParams, RunError> {
    match cfg.medium {
        MediumConfig::Constant { eps, mu } => Ok(MediumParams::constant(eps, mu)?),
        _ => Err(RunError::Config(format!("{} needs a constant medium", cfg.scheme.name()))),
    }
}

/// `a·exp(−d(x − c − t)²)` summed over periodic images; exact for vacuum.
fn gaussian_profile(amplitude: f64, center: f64, decay: f64, length: f64) -> impl Fn(f64, f64) -> f64 {
    move |t, x| {
        (-3..=3)
            .map(|k| {
                let d = x - center - t + k as f64 * length;
                amplitude * (-decay * d * d).exp()
            })
            .sum()
    }
}

fn problem_field(cfg: &ScenarioConfig) -> Option<FieldFn> {
    match &cfg.problem {
        ProblemConfig::TmPlaneWave {} => Some(tm_2d_field()),
        ProblemConfig::Pec { variant } => Some(pec_field(*variant)),
        ProblemConfig::Impedance {} => Some(impedance_field()),
        ProblemConfig::Fresnel { omega } => {
            let MediumConfig::Interface { eps1, mu1, eps2, mu2, .. } = cfg.medium else { return None };
            Some(interface_field(FresnelParams { eps1, mu1, eps2, mu2, omega: *omega }))
        }
        ProblemConfig::GaussianPulse { amplitude, center, decay } => {
            let g = gaussian_profile(*amplitude, *center, *decay, cfg.grid.lengths[0]);
            Some(Arc::new(move |t, x| {
                let v = g(t, x[0]);
                FieldSample::real([0.0, v, 0.0], [0.0, 0.0, v])
            }))
        }
    }
}

/// True when `problem_field` solves the equations for every `t`.
fn has_exact(cfg: &ScenarioConfig) -> bool {
    match cfg.problem {
        ProblemConfig::GaussianPulse { .. } => {
            matches!(cfg.medium, MediumConfig::Constant { eps, mu } if eps == 1.0 && mu == 1.0)
        }
        _ => true,
    }
}

fn problem_current(cfg: &ScenarioConfig) -> Option<CurrentFn> {
    match cfg.problem {
        ProblemConfig::Pec { .. } => Some(pec_current()),
        ProblemConfig::Impedance {} => Some(impedance_current()),
        _ => None,
    }
}

fn nodal_samples(grid: &GridSpec, f: &FieldFn, t: f64) -> (Vec<[C64; 3]>, Vec<[C64; 3]>) {
    (0..grid.points())
        .map(|idx| {
            let s = f(t, grid.coord(grid.unflatten(idx), [0.0; 3]));
            (s.e, s.b)
        })
        .unzip()
}

fn nodal_exact(grid: &GridSpec, f: &FieldFn, t: f64) -> Result<FieldState, RunError> {
    Ok(sample_fields(Layout::Nodal, grid, &|x| f(t, x))?)
}

fn layout_component_errors(a: &FieldState, b: &FieldState) -> Vec<(&'static str, f64)> {
    let slots = layout_slots(a.layout).expect("physical layout");
    let n = a.grid.points();
    slots
        .iter()
        .enumerate()
        .map(|(k, slot)| {
            let e = a.data[k * n..(k + 1) * n]
                .iter()
                .zip(&b.data[k * n..(k + 1) * n])
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            (slot.name(), e)
        })
        .collect()
}

fn sample_component_errors<'a>(
    pairs: impl Iterator<Item = (FieldSample, FieldSample)>,
) -> Vec<(&'a str, f64)> {
    let mut errs = [0.0f64; 6];
    for (a, b) in pairs {
        for k in 0..3 {
            errs[k] = errs[k].max((a.e[k] - b.e[k]).norm());
            errs[3 + k] = errs[3 + k].max((a.b[k] - b.b[k]).norm());
        }
    }
    (0..6).map(|k| (names(k < 3, k % 3), errs[k])).collect()
}

fn sample_energy(samples: &[(f64, FieldSample)], dx: &dyn Fn(f64) -> f64) -> f64 {
    samples
        .iter()
        .map(|(x, s)| s.e.iter().chain(&s.b).map(|v| v.norm_sqr()).sum::<f64>() * dx(*x))
        .sum()
}

struct Measured {
    components: Vec<(&'static str, f64)>,
    energy: f64,
    div_b: Option<Vec<C64>>,
    gauss: Option<(f64, f64)>,
    err: f64,
    rows: Vec<FieldRow>,
    fresnel: Option<FresnelSummary>,
}

fn paper_row(cfg: &ScenarioConfig) -> Option<Table1Row> {
    let tm = matches!(cfg.problem, ProblemConfig::TmPlaneWave {});
    match cfg.scheme {
        Scheme::Schr1Spectral if tm => Some(diagnostics::TABLE1_SCHR1),
        Scheme::Schr2Yee if tm => Some(diagnostics::TABLE1_SCHR2),
        _ => None,
    }
}

/// Runs one scenario end to end.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let grid = cfg.grid.clone();
    let times = times_of(cfg);
    let field = problem_field(cfg).expect("validated problem");
    let exact = has_exact(cfg).then(|| field.clone());
    let source = problem_current(cfg);
    let transforms = build_transforms();

    // assembly, plus a post-processor from recovered unknowns to measurements
    type Post<'a> = Box<dyn Fn(f64, &[C64]) -> Result<Measured, RunError> + 'a>;
    let (sys, post): (LinearSystem, Post) = match cfg.scheme {
        Scheme::Schr1Spectral | Scheme::SpectralInhomogeneous => {
            let medium = match &cfg.medium {
                MediumConfig::Constant { eps, mu } => MediumParams::constant(*eps, *mu)?,
                MediumConfig::Tanh { eps1, eps2, center, beta, mirror_fraction, mu } => {
                    let mut p = TanhProfile::new(*eps1, *eps2, *center, *beta)?;
                    if let Some(f) = mirror_fraction {
                        p = p.periodic(grid.origin_at(0), grid.lengths[0], *f);
                    }
                    p.sample(&grid, *mu)?
                }
                MediumConfig::Interface { .. } => unreachable!("validated"),
            };
            let (e, b) = nodal_samples(&grid, &field, 0.0);
            let psi0 = rs_pack(&e, &b, &medium, &grid)?;
            let spectral = cfg.scheme == Scheme::Schr1Spectral;
            let sys = if spectral {
                build_spectral_periodic(&grid, &medium, &psi0, None)?
            } else {
                build_spectral_inhomogeneous(&grid, &medium, &psi0, None)?
            };
            let g = grid.clone();
            let exact = exact.clone();
            let tr = transforms;
            let post: Post = Box::new(move |t, u| {
                let psi = if spectral { spectral_state(u, &g)? } else { FieldState::new(Layout::Rs8, u.to_vec(), g.clone())? };
                let nodal = rs_to_nodal(&psi, &medium)?;
                let (err, components) = match &exact {
                    Some(f) => {
                        let ex = nodal_exact(&g, f, t)?;
                        (err_eb(&nodal, &ex)?, layout_component_errors(&nodal, &ex))
                    }
                    None => (f64::NAN, Vec::new()),
                };
                Ok(Measured {
                    components,
                    energy: diagnostics::discrete_energy(&nodal)?,
                    div_b: None,
                    gauss: Some(gauss_monitors(&psi, &tr)?),
                    err,
                    rows: layout_rows(&nodal),
                    fresnel: None,
                })
            });
            (sys, post)
        }
        Scheme::Schr2Yee => {
            let medium = constant_medium(cfg)?;
            let init = sample_fields(Layout::YeeTm2d, &grid, &|x| field(0.0, x))?;
            let sys = build_yee_periodic(&grid, &medium, &init, None)?;
            let div0 = discrete_div(&init)?;
            let g = grid.clone();
            let f = field.clone();
            let post: Post = Box::new(move |t, u| {
                let state = FieldState::new(Layout::YeeTm2d, u.to_vec(), g.clone())?;
                let ex = sample_fields(Layout::YeeTm2d, &g, &|x| f(t, x))?;
                Ok(Measured {
                    components: layout_component_errors(&state, &ex),
                    energy: diagnostics::discrete_energy(&state)?,
                    div_b: Some(discrete_div(&state)?.iter().zip(&div0).map(|(a, b)| a - b).collect()),
                    gauss: None,
                    err: err_eb(&state, &ex)?,
                    rows: layout_rows(&state),
                    fresnel: None,
                })
            });
            (sys, post)
        }
        Scheme::Yee1d => {
            let medium = constant_medium(cfg)?;
            let init = sample_fields(Layout::Te1d, &grid, &|x| field(0.0, x))?;
            let sys = build_yee_1d(&grid, &medium, &cfg.boundary, &init, source.clone())?;
            let g = grid.clone();
            let f = field.clone();
            let post: Post = Box::new(move |t, u| {
                let state = FieldState::new(Layout::Te1d, u.to_vec(), g.clone())?;
                let ex = sample_fields(Layout::Te1d, &g, &|x| f(t, x))?;
                Ok(Measured {
                    components: layout_component_errors(&state, &ex),
                    energy: diagnostics::discrete_energy(&state)?,
                    div_b: None,
                    gauss: None,
                    err: err_eb(&state, &ex)?,
                    rows: layout_rows(&state),
                    fresnel: None,
                })
            });
            (sys, post)
        }
        Scheme::UpwindChar => {
            let medium = constant_medium(cfg)?;
            let init = char_pack(&grid, &medium, &|x| field(0.0, x))?;
            let inflow = (cfg.boundary.left == BoundaryKind::InflowExact
                || cfg.boundary.right == BoundaryKind::InflowExact)
                .then(|| field.clone());
            let sys = build_upwind_1d(&grid, &medium, &cfg.boundary, &init, source.clone(), inflow)?;
            let dx = grid.dx()[0];
            let g = grid.clone();
            let f = field.clone();
            let post: Post = Box::new(move |t, u| {
                let state = FieldState::new(Layout::Te1dChar, u.to_vec(), g.clone())?;
                let samples = char_unpack(&state, &medium)?;
                let err = samples.iter().map(|(x, s)| sample_diff(s, &f(t, [*x, 0.0, 0.0]))).fold(0.0, f64::max);
                let components = sample_component_errors(samples.iter().map(|(x, s)| (*s, f(t, [*x, 0.0, 0.0]))));
                let mut rows = Vec::new();
                for (x, s) in &samples {
                    sample_rows([*x, 0.0, 0.0], s, &mut rows);
                }
                Ok(Measured {
                    components,
                    energy: sample_energy(&samples, &|_| dx),
                    div_b: None,
                    gauss: None,
                    err,
                    rows,
                    fresnel: None,
                })
            });
            (sys, post)
        }
        Scheme::Interface1d => {
            let MediumConfig::Interface { eps1, mu1, eps2, mu2, position } = cfg.medium else {
                unreachable!("validated")
            };
            let ProblemConfig::Fresnel { omega } = cfg.problem else { unreachable!("validated") };
            let fp = FresnelParams { eps1, mu1, eps2, mu2, omega };
            let spec = InterfaceSpec::new(
                position,
                MediumParams::constant(eps1, mu1)?,
                MediumParams::constant(eps2, mu2)?,
                cfg.boundary.surface_normal,
            )?;
            // evaluate each side's closed form up to the interface
            let sided = move |side: usize, t: f64, x: f64| {
                let x = if side == 0 { x.min(position - 1e-12) } else { x.max(position + 1e-12) };
                let (ey, bz) = exact_interface(&fp, t, x);
                let z = C64::new(0.0, 0.0);
                FieldSample { e: [z, ey, z], b: [z, z, bz] }
            };
            let init = interface_pack(&grid, &spec, &|side, x| sided(side, 0.0, x))?;
            let inflow = (cfg.boundary.left == BoundaryKind::InflowExact
                || cfg.boundary.right == BoundaryKind::InflowExact)
                .then(|| field.clone());
            let sys = build_interface_1d(&grid, &spec, &cfg.boundary, &init, None, inflow)?;
            let ig = crate::maxwell::interface::InterfaceGrid::new(&grid, position)?;
            let cell = move |x: f64| if x < position { ig.dx1 } else { ig.dx2 };
            let g = grid.clone();
            let post: Post = Box::new(move |t, u| {
                let state = FieldState::new(Layout::Te1dChar, u.to_vec(), g.clone())?;
                let samples = interface_unpack(&state, &spec)?;
                let err = samples.iter().map(|(side, x, s)| sample_diff(s, &sided(*side, t, *x))).fold(0.0, f64::max);
                let flat: Vec<(f64, FieldSample)> = samples.iter().map(|(_, x, s)| (*x, *s)).collect();
                let mut rows = Vec::new();
                for (x, s) in &flat {
                    sample_rows([*x, 0.0, 0.0], s, &mut rows);
                }
                let ey: Vec<(f64, C64)> = flat.iter().map(|(x, s)| (*x - position, s.e[1])).collect();
                let fresnel = diagnostics::fresnel_fit(&fp, t, &ey, 2.0).ok().map(|fit| {
                    let r = fp.reflection();
                    let tr = fp.transmission();
                    let dr = (fit.reflected - r).norm();
                    FresnelSummary {
                        fit,
                        expected_reflection: r,
                        expected_transmission: tr,
                        reflection_error: if r.abs() < 1e-12 { dr } else { dr / r.abs() },
                        transmission_error: (fit.transmitted - tr).norm() / tr.abs(),
                    }
                });
                let components = sample_component_errors(samples.iter().map(|(side, x, s)| (*s, sided(*side, t, *x))));
                Ok(Measured {
                    components,
                    energy: sample_energy(&flat, &cell),
                    div_b: None,
                    gauss: None,
                    err,
                    rows,
                    fresnel,
                })
            });
            (sys, post)
        }
    };

    let initial_energy = post(0.0, &sys.u0)?.energy;
    let reference = if cfg.reference { Some(reference_snapshots(&sys, &times)?) } else { None };
    let evolved = schrodingerise(cfg, sys, &times)?;
    let mut details = evolved.details;
    let mut frames = Vec::with_capacity(times.len());
    let mut last = None;
    for (k, (&t, u)) in times.iter().zip(&evolved.states).enumerate() {
        let mut m = post(t, u)?;
        if let Some(refs) = &reference {
            let r = post(t, &refs[k])?;
            let gap = m
                .rows
                .iter()
                .zip(&r.rows)
                .map(|(a, b)| (a.value - b.value).norm())
                .fold(0.0, f64::max);
            details.reference_gap = Some(details.reference_gap.unwrap_or(0.0).max(gap));
            if exact.is_none() {
                m.err = gap;
            }
        }
        frames.push(Frame { t, rows: std::mem::take(&mut m.rows) });
        last = Some(m);
    }
    let m = last.expect("at least one time");
    details.error_reference = if exact.is_some() {
        "exact solution".into()
    } else if cfg.reference {
        "direct RK4 integration".into()
    } else {
        "none".into()
    };
    if !m.err.is_finite() && exact.is_none() {
        return Err(RunError::Config(format!(
            "{}: this problem has no closed form here; set reference = true",
            cfg.name
        )));
    }
    if let ProblemConfig::Pec { variant } = cfg.problem {
        let a = grid.origin_at(0);
        details.wall_residual = Some(pec_wall_residual(variant, cfg.t_final, a, a + grid.lengths[0]));
    }
    details.fresnel = m.fresnel.clone();
    details.component_errors = m.components.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let report = DiagnosticsReport {
        energy_initial: initial_energy,
        energy_final: m.energy,
        energy_drift: (m.energy - initial_energy).abs(),
        div_b_drift: m.div_b.map(|d| d.iter().map(|x| x.norm()).fold(0.0, f64::max)),
        gauss_f4: m.gauss.map(|g| g.0),
        gauss_f8: m.gauss.map(|g| g.1),
        err_eb: m.err,
        complexity: evolved.complexity,
    };
    if !report.is_finite() {
        return Err(RunError::Numerical(format!("{}: non-finite diagnostics", cfg.name)));
    }
    Ok(RunOutput { config: cfg.clone(), report, details, paper_reference: paper_row(cfg), frames })
}
