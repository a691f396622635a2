//! Time evolution of Schrödingerised systems and the direct RK4 reference.

use crate::linalg::{self, ComplexMatrix, LinalgError, Propagator, C64};
use crate::schrodinger::{LinearSystem, PTransform, SchrodingerisedSystem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("the Hamiltonian depends on time; use backward Euler")]
    TimeDependent,
    #[error("singular backward-Euler system in mode {mode}")]
    Singular { mode: usize },
    #[error("invalid evolution plan: {0}")]
    InvalidPlan(String),
    #[error("reference integrator would need {steps} steps (‖A‖_max = {norm:e})")]
    StepUnderflow { steps: f64, norm: f64 },
    #[error("state has length {got}, expected {expected}")]
    Shape { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    ExactExpm,
    BackwardEuler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPlan {
    pub method: EvolutionMethod,
    pub t_final: f64,
    /// Backward-Euler step; `None` means `t_final / 2000`.
    #[serde(default)]
    pub dt: Option<f64>,
}

pub const DEFAULT_BE_STEPS: usize = 2000;

impl EvolutionPlan {
    pub fn exact(t_final: f64) -> Self {
        EvolutionPlan { method: EvolutionMethod::ExactExpm, t_final, dt: None }
    }

    pub fn backward_euler(t_final: f64, dt: f64) -> Self {
        EvolutionPlan { method: EvolutionMethod::BackwardEuler, t_final, dt: Some(dt) }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(EvolutionError::InvalidPlan(format!("t_final = {} must be ≥ 0", self.t_final)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(EvolutionError::InvalidPlan(format!("dt = {dt} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.dt.unwrap_or(self.t_final / DEFAULT_BE_STEPS as f64)
    }
}

fn check_len(s: &SchrodingerisedSystem, w: &[C64]) -> Result<(), EvolutionError> {
    let expected = s.dim() * s.mode_count();
    if w.len() != expected {
        return Err(EvolutionError::Shape { expected, got: w.len() });
    }
    Ok(())
}

/// Splits `ṽ` (index `j·N + l`) into one length-`n` vector per mode.
fn to_mode_vectors(v: &[C64], n: usize, modes: usize) -> Vec<Vec<C64>> {
    (0..modes).map(|l| (0..n).map(|j| v[j * modes + l]).collect()).collect()
}

fn from_mode_vectors(x: &[Vec<C64>], n: usize, modes: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n * modes];
    for (l, xl) in x.iter().enumerate() {
        for j in 0..n {
            v[j * modes + l] = xl[j];
        }
    }
    v
}

/// `e^{−iHt}` applied to `w0` at each of the increasing `times`.
pub fn evolve_exact_snapshots(
    s: &SchrodingerisedSystem,
    w0: &[C64],
    times: &[f64],
) -> Result<Vec<Vec<C64>>, EvolutionError> {
    if s.is_time_dependent() {
        return Err(EvolutionError::TimeDependent);
    }
    check_len(s, w0)?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(EvolutionError::InvalidPlan("snapshot times must be finite and increasing".into()));
    }
    let n = s.dim();
    let modes = s.mode_count();
    let tr = PTransform::new(&s.pgrid);
    let mut v = w0.to_vec();
    tr.to_modes(&mut v);
    let x0 = to_mode_vectors(&v, n, modes);

    let march = |prop: &Propagator, x: &[C64]| -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(times.len());
        let mut cur = x.to_vec();
        let mut t_prev = 0.0;
        for &t in times {
            if t > t_prev {
                cur = prop.apply(t - t_prev, &cur);
            }
            t_prev = t;
            out.push(cur.clone());
        }
        out
    };

    let per_mode: Vec<Vec<Vec<C64>>> = if s.h1_is_zero() {
        let h = s.h2.scale(C64::new(-1.0, 0.0));
        let prop = Propagator::new(&h)?;
        x0.par_iter().map(|x| march(&prop, x)).collect()
    } else {
        x0.par_iter()
            .enumerate()
            .map(|(k, x)| Propagator::new(&s.mode_hamiltonian(k)).map(|p| march(&p, x)))
            .collect::<Result<_, _>>()?
    };

    Ok((0..times.len())
        .map(|snap| {
            let xs: Vec<Vec<C64>> = per_mode.iter().map(|m| m[snap].clone()).collect();
            let mut w = from_mode_vectors(&xs, n, modes);
            tr.from_modes(&mut w);
            w
        })
        .collect())
}

/// `w(t) = (1⊗Φ) e^{−iHt} (1⊗Φ⁻¹) w0`, one exponential per p-mode.
pub fn evolve_exact(s: &SchrodingerisedSystem, w0: &[C64], t: f64) -> Result<Vec<C64>, EvolutionError> {
    Ok(evolve_exact_snapshots(s, w0, &[t])?.pop().unwrap())
}

/// LU factors of a banded matrix in a bandwidth-reducing order, without pivoting.
pub struct BandedLu {
    n: usize,
    bw: usize,
    /// `order[p]` is the original index placed at position `p`.
    order: Vec<usize>,
    /// Row `p` holds columns `p−bw ..= p+bw`.
    band: Vec<C64>,
}

impl BandedLu {
    fn width(&self) -> usize {
        2 * self.bw + 1
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Factors `g` using the given symmetric ordering.
    pub fn factor(g: &ComplexMatrix, order: Vec<usize>) -> Option<Self> {
        let n = g.rows();
        let mut pos = vec![0usize; n];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        let trips = g.triplets();
        let bw = trips.iter().map(|(i, j, _)| pos[*i].abs_diff(pos[*j])).max().unwrap_or(0);
        let width = 2 * bw + 1;
        let mut band = vec![C64::new(0.0, 0.0); n * width];
        for (i, j, x) in trips {
            let (pi, pj) = (pos[i], pos[j]);
            band[pi * width + (pj + bw - pi)] += x;
        }
        for k in 0..n {
            let pivot = band[k * width + bw];
            if pivot.norm() < 1e-300 {
                return None;
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let f = band[i * width + (k + bw - i)] / pivot;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                band[i * width + (k + bw - i)] = f;
                for j in k + 1..=last {
                    let u = band[k * width + (j + bw - k)];
                    band[i * width + (j + bw - i)] -= f * u;
                }
            }
        }
        Some(BandedLu { n, bw, order, band })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let (n, bw, width) = (self.n, self.bw, self.width());
        let mut y: Vec<C64> = self.order.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut acc = y[i];
            for k in lo..i {
                acc -= self.band[i * width + (k + bw - i)] * y[k];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut acc = y[i];
            for j in i + 1..=hi {
                acc -= self.band[i * width + (j + bw - i)] * y[j];
            }
            y[i] = acc / self.band[i * width + bw];
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (p, &i) in self.order.iter().enumerate() {
            out[i] = y[p];
        }
        out
    }
}

/// Reverse Cuthill–McKee order of the symmetrized pattern of `m`.
pub fn rcm_order(m: &ComplexMatrix) -> Vec<usize> {
    let n = m.rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in m.triplets() {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    indptr.push(0);
    for (i, row) in adj.iter_mut().enumerate() {
        row.push(i);
        row.sort_unstable();
        row.dedup();
        indices.extend_from_slice(row);
        indptr.push(indices.len());
    }
    let data = vec![1.0f64; indices.len()];
    let pattern = sprs::CsMat::new((n, n), indptr, indices, data);
    sprs::linalg::reverse_cuthill_mckee(pattern.view()).perm.vec()
}

/// Solver for `(1 + i·dt·H_k(t))x = v` with `H_k` bordered by the homogenization column.
struct ModeStepper {
    lu: BandedLu,
    /// `ν_k/2 + i/2`, the weight of the homogenization column in `H_k`.
    ck: C64,
    bordered: bool,
}

fn mode_stepper(s: &SchrodingerisedSystem, k: usize, dt: f64, order: &[usize]) -> Result<ModeStepper, EvolutionError> {
    let hk = s.mode_hamiltonian(k);
    let dev = hk.hermitian_deviation();
    if dev > linalg::HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation: dev }.into());
    }
    let bordered = s.augmented.is_some();
    let n = if bordered { s.dim() - 1 } else { s.dim() };
    let mut trips: Vec<(usize, usize, C64)> = hk
        .triplets()
        .into_iter()
        .filter(|(i, j, _)| *i < n && *j < n)
        .map(|(i, j, x)| (i, j, C64::new(0.0, dt) * x))
        .collect();
    for i in 0..n {
        trips.push((i, i, C64::new(1.0, 0.0)));
    }
    let g = ComplexMatrix::sparse_from_triplets(n, n, trips);
    let lu = BandedLu::factor(&g, order.to_vec()).ok_or(EvolutionError::Singular { mode: k })?;
    Ok(ModeStepper { lu, ck: C64::new(0.5 * s.pgrid.freqs[k], 0.5), bordered })
}

impl ModeStepper {
    fn step(&self, v: &[C64], col: Option<&[C64]>, dt: f64) -> Option<Vec<C64>> {
        if !self.bordered {
            return Some(self.lu.solve(v));
        }
        let n = v.len() - 1;
        let col = col.expect("bordered systems carry a column");
        let idt = C64::new(0.0, dt);
        let y1 = self.lu.solve(&v[..n]);
        let w: Vec<C64> = col.iter().map(|c| idt * self.ck * c).collect();
        let y2 = self.lu.solve(&w);
        let dot = |y: &[C64]| -> C64 { col.iter().zip(y).map(|(c, y)| c.conj() * y).sum() };
        let cc = idt * self.ck.conj();
        let denom = C64::new(1.0, 0.0) - cc * dot(&y2);
        if denom.norm() < 1e-300 {
            return None;
        }
        let xr = (v[n] - cc * dot(&y1)) / denom;
        let mut x: Vec<C64> = y1.iter().zip(&y2).map(|(a, b)| a - b * xr).collect();
        x.push(xr);
        Some(x)
    }
}

/// Backward Euler on every p-mode, with the homogenization column refreshed at `t_{n+1}`.
pub fn evolve_backward_euler(
    s: &SchrodingerisedSystem,
    w0: &[C64],
    t: f64,
    dt: f64,
) -> Result<Vec<C64>, EvolutionError> {
    Ok(evolve_backward_euler_snapshots(s, w0, &[t], dt)?.pop().unwrap())
}

/// As [`evolve_backward_euler`], returning the state at each of the increasing `times`.
/// Each interval is split into `ceil(Δt/dt)` equal steps.
pub fn evolve_backward_euler_snapshots(
    s: &SchrodingerisedSystem,
    w0: &[C64],
    times: &[f64],
    dt: f64,
) -> Result<Vec<Vec<C64>>, EvolutionError> {
    check_len(s, w0)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(EvolutionError::InvalidPlan(format!("dt = {dt} must be > 0")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(*t >= 0.0)) {
        return Err(EvolutionError::InvalidPlan("snapshot times must be ≥ 0 and increasing".into()));
    }
    let n = s.dim();
    let modes = s.mode_count();
    let tr = PTransform::new(&s.pgrid);
    let mut v = w0.to_vec();
    tr.to_modes(&mut v);
    let x0 = to_mode_vectors(&v, n, modes);

    let mut schedule: Vec<(usize, f64)> = Vec::new();
    let mut t_prev = 0.0;
    for &t in times {
        let span = t - t_prev;
        let steps = if span > 0.0 { (span / dt - 1e-9).ceil().max(1.0) as usize } else { 0 };
        schedule.push((steps, if steps > 0 { span / steps as f64 } else { 0.0 }));
        t_prev = t;
    }
    let bordered = s.augmented.is_some();
    let core = if bordered { n - 1 } else { n };
    let pattern = {
        let trips: Vec<_> = s
            .h1
            .triplets()
            .into_iter()
            .chain(s.h2.triplets())
            .filter(|(i, j, _)| *i < core && *j < core)
            .collect();
        ComplexMatrix::sparse_from_triplets(core, core, trips)
    };
    let order = rcm_order(&pattern);
    let cols: Vec<Vec<Vec<C64>>> = if bordered {
        let mut t = 0.0;
        schedule
            .iter()
            .map(|&(steps, h)| {
                let c: Vec<Vec<C64>> = (1..=steps).map(|k| s.driven_column(t + k as f64 * h).unwrap()).collect();
                t += steps as f64 * h;
                c
            })
            .collect()
    } else {
        vec![Vec::new(); schedule.len()]
    };

    let per_mode: Vec<Vec<Vec<C64>>> = x0
        .par_iter()
        .enumerate()
        .map(|(k, x)| -> Result<Vec<Vec<C64>>, EvolutionError> {
            let mut out = Vec::with_capacity(times.len());
            let mut cur = x.clone();
            let mut steppers: Vec<(f64, ModeStepper)> = Vec::new();
            for (seg, &(steps, h)) in schedule.iter().enumerate() {
                if steps > 0 {
                    let idx = match steppers.iter().position(|(hh, _)| (hh - h).abs() <= 1e-14 * h) {
                        Some(i) => i,
                        None => {
                            steppers.push((h, mode_stepper(s, k, h, &order)?));
                            steppers.len() - 1
                        }
                    };
                    let st = &steppers[idx].1;
                    for step in 0..steps {
                        let col = if bordered { Some(cols[seg][step].as_slice()) } else { None };
                        cur = st.step(&cur, col, h).ok_or(EvolutionError::Singular { mode: k })?;
                    }
                }
                out.push(cur.clone());
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;

    Ok((0..times.len())
        .map(|snap| {
            let xs: Vec<Vec<C64>> = per_mode.iter().map(|m| m[snap].clone()).collect();
            let mut w = from_mode_vectors(&xs, n, modes);
            tr.from_modes(&mut w);
            w
        })
        .collect())
}

/// Evolves according to `plan`.
pub fn evolve(s: &SchrodingerisedSystem, w0: &[C64], plan: &EvolutionPlan) -> Result<Vec<C64>, EvolutionError> {
    plan.validate()?;
    match plan.method {
        EvolutionMethod::ExactExpm => evolve_exact(s, w0, plan.t_final),
        EvolutionMethod::BackwardEuler => evolve_backward_euler(s, w0, plan.t_final, plan.step()),
    }
}

/// Upper limit on reference-integrator steps.
pub const MAX_REFERENCE_STEPS: f64 = 5e7;

/// Classic RK4 for `du/dt = Au + b(t)` with `dt ≤ min(1e−3, 0.1/‖A‖_max)`.
pub fn reference_solve(sys: &LinearSystem, t: f64) -> Result<Vec<C64>, EvolutionError> {
    Ok(reference_snapshots(sys, &[t])?.pop().unwrap())
}

/// [`reference_solve`] at each of the increasing `times`.
pub fn reference_snapshots(sys: &LinearSystem, times: &[f64]) -> Result<Vec<Vec<C64>>, EvolutionError> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(EvolutionError::InvalidPlan("reference times must be finite, ≥ 0 and increasing".into()));
    }
    let norm = sys.a.max_norm();
    let dt_max = if norm > 0.0 { (0.1 / norm).min(1e-3) } else { 1e-3 };
    let total = (times.last().copied().unwrap_or(0.0) / dt_max).ceil();
    if total > MAX_REFERENCE_STEPS {
        return Err(EvolutionError::StepUnderflow { steps: total, norm });
    }
    let axpy = |u: &[C64], k: &[C64], s: f64| -> Vec<C64> { u.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    let mut u = sys.u0.clone();
    let mut t0 = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let steps = ((t - t0) / dt_max).ceil() as usize;
        if steps > 0 {
            let h = (t - t0) / steps as f64;
            for step in 0..steps {
                let ts = t0 + step as f64 * h;
                let k1 = sys.rhs(ts, &u);
                let k2 = sys.rhs(ts + 0.5 * h, &axpy(&u, &k1, 0.5 * h));
                let k3 = sys.rhs(ts + 0.5 * h, &axpy(&u, &k2, 0.5 * h));
                let k4 = sys.rhs(ts + h, &axpy(&u, &k3, h));
                for i in 0..u.len() {
                    u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
                }
            }
        }
        linalg::check_finite(&u)?;
        out.push(u.clone());
        t0 = t;
    }
    Ok(out)
}
