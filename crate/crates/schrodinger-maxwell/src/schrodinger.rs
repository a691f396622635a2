//! Generic Schrödingerisation: homogenize, split, extend into the auxiliary
//! p variable, build the per-mode Hamiltonians and recover the solution.

use crate::linalg::{self, hermitian_split, ComplexMatrix, LinalgError, C64};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type SourceFn = Arc<dyn Fn(f64) -> Vec<C64> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchrodingerError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("system is inhomogeneous: homogenize it first")]
    Inhomogeneous,
    #[error("p* = {0} is not positive")]
    PStarNotPositive(f64),
    #[error("p* = {0} is not a point of the p grid")]
    PStarOffGrid(f64),
    #[error("invalid p grid: {0}")]
    InvalidPGrid(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
}

/// How a homogenized system was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Augmentation {
    pub original_dim: usize,
    /// The auxiliary component starts at this value; the source column is divided by it.
    pub scale: f64,
}

/// `du/dt = A u + b(t)`, `u(0) = u0`.
#[derive(Clone)]
pub struct LinearSystem {
    pub a: ComplexMatrix,
    pub b: Vec<C64>,
    pub u0: Vec<C64>,
    /// For plain systems this is `b(t)`. For homogenized systems it is the
    /// unscaled last column of `a` as a function of time.
    pub time_dependent_source: Option<SourceFn>,
    pub augmented: Option<Augmentation>,
}

impl fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSystem")
            .field("dim", &self.dim())
            .field("time_dependent", &self.time_dependent_source.is_some())
            .field("augmented", &self.augmented)
            .finish()
    }
}

impl LinearSystem {
    pub fn new(a: ComplexMatrix, b: Vec<C64>, u0: Vec<C64>) -> Result<Self, SchrodingerError> {
        if a.rows() != a.cols() {
            return Err(LinalgError::NonSquare { rows: a.rows(), cols: a.cols() }.into());
        }
        if b.len() != a.rows() || u0.len() != a.rows() {
            return Err(SchrodingerError::Inconsistent(format!(
                "dim(a) = {}, len(b) = {}, len(u0) = {}",
                a.rows(),
                b.len(),
                u0.len()
            )));
        }
        linalg::check_finite(&b)?;
        linalg::check_finite(&u0)?;
        Ok(LinearSystem { a, b, u0, time_dependent_source: None, augmented: None })
    }

    pub fn homogeneous(a: ComplexMatrix, u0: Vec<C64>) -> Result<Self, SchrodingerError> {
        let n = a.rows();
        Self::new(a, vec![C64::new(0.0, 0.0); n], u0)
    }

    /// Attaches `b(t)`; `b` is reset to `source(0)`.
    pub fn with_source(mut self, source: SourceFn) -> Self {
        let b0 = source(0.0);
        assert_eq!(b0.len(), self.dim(), "source length mismatch");
        self.b = b0;
        self.time_dependent_source = Some(source);
        self
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.augmented.is_some() || (self.time_dependent_source.is_none() && self.b.iter().all(|v| v.norm() == 0.0))
    }

    pub fn source_at(&self, t: f64) -> Vec<C64> {
        match &self.time_dependent_source {
            Some(f) if self.augmented.is_none() => f(t),
            _ => self.b.clone(),
        }
    }

    /// Last column of a homogenized generator at time `t` (rows `0..n`).
    pub fn driven_column(&self, t: f64) -> Option<Vec<C64>> {
        let aug = self.augmented?;
        let n = aug.original_dim;
        Some(match &self.time_dependent_source {
            Some(f) => f(t).into_iter().map(|v| v / aug.scale).collect(),
            None => (0..n).map(|i| self.a.get(i, n)).collect(),
        })
    }

    /// `du/dt` evaluated at `(t, u)`.
    pub fn rhs(&self, t: f64, u: &[C64]) -> Vec<C64> {
        let mut du = self.a.matvec(u);
        if let Some(aug) = self.augmented {
            if self.time_dependent_source.is_some() {
                let n = aug.original_dim;
                let col0 = self.driven_column(0.0).unwrap();
                let col = self.driven_column(t).unwrap();
                for i in 0..n {
                    du[i] += (col[i] - col0[i]) * u[n];
                }
            }
        } else {
            for (d, b) in du.iter_mut().zip(self.source_at(t)) {
                *d += b;
            }
        }
        du
    }
}

/// `a′ = [[A, b],[0, 0]]`, `u0′ = [u0; 1]`.
pub fn homogenize(sys: &LinearSystem) -> LinearSystem {
    homogenize_scaled(sys, 1.0)
}

/// As [`homogenize`] with the auxiliary variable started at `scale` and the
/// source column divided by it, which leaves the physical components unchanged.
pub fn homogenize_scaled(sys: &LinearSystem, scale: f64) -> LinearSystem {
    assert!(scale > 0.0 && scale.is_finite(), "auxiliary scale must be positive");
    assert!(sys.augmented.is_none(), "system is already homogenized");
    let n = sys.dim();
    let mut trips = sys.a.triplets();
    for (i, v) in sys.b.iter().enumerate() {
        if v.norm() != 0.0 {
            trips.push((i, n, v / scale));
        }
    }
    let a = if sys.a.is_sparse() {
        ComplexMatrix::sparse_from_triplets(n + 1, n + 1, trips)
    } else {
        ComplexMatrix::from_triplets(n + 1, n + 1, trips)
    };
    let mut u0 = sys.u0.clone();
    u0.push(C64::new(scale, 0.0));
    LinearSystem {
        a,
        b: vec![C64::new(0.0, 0.0); n + 1],
        u0,
        time_dependent_source: sys.time_dependent_source.clone(),
        augmented: Some(Augmentation { original_dim: n, scale }),
    }
}

/// `max(1, 2·max_t ‖b(t)‖₂)` sampled on `[0, t_final]`.
pub fn auto_aux_scale(sys: &LinearSystem, t_final: f64) -> f64 {
    let samples = 9;
    let mut m: f64 = 0.0;
    for s in 0..samples {
        let t = t_final * s as f64 / (samples - 1) as f64;
        m = m.max(linalg::norm2(&sys.source_at(t)));
    }
    (2.0 * m).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub left: f64,
    pub right: f64,
    pub n: usize,
    pub points: Vec<f64>,
    pub freqs: Vec<f64>,
    pub dp: f64,
}

impl PGrid {
    pub fn new(left: f64, right: f64, n: usize) -> Result<Self, SchrodingerError> {
        if n < 2 || n % 2 != 0 {
            return Err(SchrodingerError::InvalidPGrid(format!("N = {n} must be even and at least 2")));
        }
        if !(right > left) || !left.is_finite() || !right.is_finite() {
            return Err(SchrodingerError::InvalidPGrid(format!("[{left}, {right}] is empty")));
        }
        let dp = (right - left) / n as f64;
        let points = (0..n).map(|k| left + k as f64 * dp).collect();
        let freqs = linalg::fourier_freqs(n, right - left);
        Ok(PGrid { left, right, n, points, freqs, dp })
    }

    /// Widens the domain at fixed `Δp` so that transport along any `H1`
    /// eigen-direction with eigenvalue in `[lam_min, lam_max]` stays inside it up to time `t`.
    pub fn fit_transport(&self, lam_min: f64, lam_max: f64, t: f64) -> Result<Self, SchrodingerError> {
        let margin = 1.1;
        let left = self.left - margin * lam_max.max(0.0) * t;
        let right = self.right + margin * (-lam_min).max(0.0) * t;
        let mut n = ((right - left) / self.dp - 1e-9).ceil() as usize;
        n += n % 2;
        if n <= self.n {
            return Ok(self.clone());
        }
        Self::new(left, left + n as f64 * self.dp, n)
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self, SchrodingerError> {
        Self::new(-half_width, half_width, n)
    }

    pub fn index_of(&self, p: f64) -> Option<usize> {
        let k = ((p - self.left) / self.dp).round();
        if k < 0.0 || k >= self.n as f64 {
            return None;
        }
        let k = k as usize;
        ((self.points[k] - p).abs() <= 1e-9 * self.dp.max(1.0)).then_some(k)
    }

    /// Smallest grid point `≥ p`.
    pub fn point_at_least(&self, p: f64) -> Option<f64> {
        self.points.iter().copied().find(|x| *x >= p - 1e-12 * self.dp)
    }

    /// `Φ[j,l] = exp(i ν_l p_j)`.
    pub fn basis(&self) -> ComplexMatrix {
        let n = self.n;
        let mut trips = Vec::with_capacity(n * n);
        for j in 0..n {
            for l in 0..n {
                trips.push((j, l, C64::from_polar(1.0, self.freqs[l] * self.points[j])));
            }
        }
        ComplexMatrix::from_triplets(n, n, trips).into_dense_storage()
    }
}

/// Fast transform between p samples and p-Fourier coefficients for blocks
/// laid out component-major (`index = j·N + k`).
pub struct PTransform {
    n: usize,
    shift: Vec<C64>,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl PTransform {
    pub fn new(pgrid: &PGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = pgrid.n;
        let shift = pgrid.freqs.iter().map(|nu| C64::from_polar(1.0, nu * pgrid.left)).collect();
        PTransform { n, shift, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn slot(&self, l: usize) -> usize {
        let m = l as isize - (self.n / 2) as isize;
        m.rem_euclid(self.n as isize) as usize
    }

    /// `ṽ = Φ⁻¹ w` in place, one block of length `N` at a time.
    pub fn to_modes(&self, data: &mut [C64]) {
        assert_eq!(data.len() % self.n, 0);
        let mut buf = vec![C64::new(0.0, 0.0); self.n];
        for block in data.chunks_mut(self.n) {
            buf.copy_from_slice(block);
            self.fwd.process(&mut buf);
            for l in 0..self.n {
                block[l] = buf[self.slot(l)] * self.shift[l].conj() / self.n as f64;
            }
        }
    }

    /// `w = Φ ṽ` in place.
    pub fn from_modes(&self, data: &mut [C64]) {
        assert_eq!(data.len() % self.n, 0);
        let mut buf = vec![C64::new(0.0, 0.0); self.n];
        for block in data.chunks_mut(self.n) {
            for l in 0..self.n {
                buf[self.slot(l)] = block[l] * self.shift[l];
            }
            self.inv.process(&mut buf);
            block.copy_from_slice(&buf);
        }
    }
}

/// `w(0, p_k) = e^{−|p_k|} u0`, laid out as `Σ_j |j⟩ ⊗ Σ_k w_j(p_k)|k⟩`.
pub fn initial_extension(u0: &[C64], pgrid: &PGrid) -> Vec<C64> {
    let weights: Vec<f64> = pgrid.points.iter().map(|p| (-p.abs()).exp()).collect();
    let mut out = Vec::with_capacity(u0.len() * pgrid.n);
    for u in u0 {
        out.extend(weights.iter().map(|w| u * *w));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    Pointwise,
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoverySpec {
    pub mode: RecoveryMode,
    /// Used by pointwise recovery only.
    pub p_star: f64,
}

impl RecoverySpec {
    pub fn pointwise(p_star: f64) -> Self {
        RecoverySpec { mode: RecoveryMode::Pointwise, p_star }
    }

    pub fn integral() -> Self {
        RecoverySpec { mode: RecoveryMode::Integral, p_star: f64::NAN }
    }
}

/// `h1`, `h2` and the p grid; `H_k = ν_k h1 − h2`.
#[derive(Clone)]
pub struct SchrodingerisedSystem {
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
    pub pgrid: PGrid,
    pub augmented: Option<Augmentation>,
    /// Time dependence of the homogenization column, if any.
    pub driven: Option<SourceFn>,
}

impl fmt::Debug for SchrodingerisedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchrodingerisedSystem")
            .field("dim", &self.dim())
            .field("modes", &self.pgrid.n)
            .field("augmented", &self.augmented)
            .field("time_dependent", &self.driven.is_some())
            .finish()
    }
}

impl SchrodingerisedSystem {
    pub fn dim(&self) -> usize {
        self.h1.rows()
    }

    pub fn mode_count(&self) -> usize {
        self.pgrid.n
    }

    pub fn is_time_dependent(&self) -> bool {
        self.driven.is_some()
    }

    pub fn h1_is_zero(&self) -> bool {
        self.h1.max_norm() == 0.0
    }

    pub fn mode_hamiltonian(&self, k: usize) -> ComplexMatrix {
        let nu = self.pgrid.freqs[k];
        self.h1.scale(C64::new(nu, 0.0)).sub(&self.h2).expect("h1 and h2 share a shape")
    }

    pub fn mode_hamiltonians(&self) -> Vec<ComplexMatrix> {
        (0..self.pgrid.n).map(|k| self.mode_hamiltonian(k)).collect()
    }

    /// Homogenization column of `a′` at time `t`, scaled by the auxiliary factor.
    pub fn driven_column(&self, t: f64) -> Option<Vec<C64>> {
        let aug = self.augmented?;
        let n = aug.original_dim;
        Some(match &self.driven {
            Some(f) => f(t).into_iter().map(|v| v / aug.scale).collect(),
            None => (0..n).map(|i| self.h1.get(i, n) + C64::new(0.0, 1.0) * self.h2.get(i, n)).collect(),
        })
    }

    /// `H_k(t)`, with the homogenization column refreshed for time `t`.
    pub fn mode_hamiltonian_at(&self, k: usize, t: f64) -> ComplexMatrix {
        let base = self.mode_hamiltonian(k);
        let (Some(aug), Some(_)) = (self.augmented, &self.driven) else {
            return base;
        };
        let n = aug.original_dim;
        let col = self.driven_column(t).unwrap();
        let ck = C64::new(0.5 * self.pgrid.freqs[k], 0.5);
        let mut trips: Vec<_> = base.triplets().into_iter().filter(|(i, j, _)| *i != n && *j != n).collect();
        for (i, v) in col.iter().enumerate() {
            if v.norm() != 0.0 {
                trips.push((i, n, ck * v));
                trips.push((n, i, (ck * v).conj()));
            }
        }
        if base.is_sparse() {
            ComplexMatrix::sparse_from_triplets(n + 1, n + 1, trips)
        } else {
            ComplexMatrix::from_triplets(n + 1, n + 1, trips)
        }
    }
}

pub fn build(sys: &LinearSystem, pgrid: &PGrid) -> Result<SchrodingerisedSystem, SchrodingerError> {
    if !sys.is_homogeneous() {
        return Err(SchrodingerError::Inhomogeneous);
    }
    let (h1, h2) = hermitian_split(&sys.a)?;
    let driven = match (&sys.augmented, &sys.time_dependent_source) {
        (Some(_), Some(f)) => Some(f.clone()),
        _ => None,
    };
    Ok(SchrodingerisedSystem { h1, h2, pgrid: pgrid.clone(), augmented: sys.augmented, driven })
}

/// Trapezoid weights on the grid points with `p ≥ 0`, normalized so that
/// `e^{−p}` integrates to one on the same nodes.
pub fn integral_weights(pgrid: &PGrid) -> Vec<f64> {
    let idx: Vec<usize> = (0..pgrid.n).filter(|&k| pgrid.points[k] >= -1e-12 * pgrid.dp).collect();
    let mut w = vec![0.0; pgrid.n];
    if idx.len() < 2 {
        if let Some(&k) = idx.first() {
            w[k] = (pgrid.points[k]).exp();
        }
        return w;
    }
    for (pos, &k) in idx.iter().enumerate() {
        let end = pos == 0 || pos == idx.len() - 1;
        w[k] = if end { 0.5 * pgrid.dp } else { pgrid.dp };
    }
    let mass: f64 = idx.iter().map(|&k| w[k] * (-pgrid.points[k]).exp()).sum();
    w.iter_mut().for_each(|x| *x /= mass);
    w
}

/// Recovers `u` from `w` laid out as in [`initial_extension`].
pub fn recover(w: &[C64], pgrid: &PGrid, spec: &RecoverySpec) -> Result<Vec<C64>, SchrodingerError> {
    let n = pgrid.n;
    assert_eq!(w.len() % n, 0, "w length must be a multiple of N");
    match spec.mode {
        RecoveryMode::Pointwise => {
            if !(spec.p_star > 0.0) {
                return Err(SchrodingerError::PStarNotPositive(spec.p_star));
            }
            let k = pgrid.index_of(spec.p_star).ok_or(SchrodingerError::PStarOffGrid(spec.p_star))?;
            let f = pgrid.points[k].exp();
            Ok(w.chunks(n).map(|b| b[k] * f).collect())
        }
        RecoveryMode::Integral => {
            let wt = integral_weights(pgrid);
            Ok(w.chunks(n).map(|b| b.iter().zip(&wt).map(|(x, q)| x * *q).sum()).collect())
        }
    }
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a Hermitian matrix.
pub fn hermitian_extremes(h: &ComplexMatrix) -> (f64, f64) {
    if h.rows() == 0 || h.max_norm() == 0.0 {
        (0.0, 0.0)
    } else if h.is_sparse() {
        let hi = linalg::lambda_max_hermitian(h, 500);
        let lo = -linalg::lambda_max_hermitian(&h.scale(C64::new(-1.0, 0.0)), 500);
        (lo, hi)
    } else {
        let m = h.to_dense();
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let ev = herm.symmetric_eigenvalues();
        (ev.min(), ev.max())
    }
}

/// Pointwise recovery point: the smallest grid point `≥ max(1, λ_max(h1)·t)`.
pub fn default_p_star(s: &SchrodingerisedSystem, t: f64) -> f64 {
    let lam = hermitian_extremes(&s.h1).1;
    let target = (lam * t).max(1.0);
    s.pgrid.point_at_least(target).unwrap_or(*s.pgrid.points.last().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianStats {
    pub sparsity: usize,
    pub max_norm: f64,
}

/// Row sparsity of `H = h1⊗D_p − h2⊗1` and the bound `‖h1‖_max/Δp + ‖h2‖_max`.
pub fn hamiltonian_stats(s: &SchrodingerisedSystem) -> HamiltonianStats {
    let n = s.dim();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let has_nonzero_freq = s.pgrid.freqs.iter().any(|f| *f != 0.0);
    if has_nonzero_freq {
        for (i, j, _) in s.h1.triplets() {
            rows[i].push(j);
        }
    }
    for (i, j, _) in s.h2.triplets() {
        rows[i].push(j);
    }
    let sparsity = rows
        .iter_mut()
        .map(|r| {
            r.sort_unstable();
            r.dedup();
            r.len()
        })
        .max()
        .unwrap_or(0);
    HamiltonianStats { sparsity, max_norm: s.h1.max_norm() / s.pgrid.dp + s.h2.max_norm() }
}

/// Assembles `H = h1⊗D_p − h2⊗1` with `D_p = Φ diag(ν) Φ⁻¹` acting on p samples.
/// Only meant for small oracle checks.
pub fn assemble_full_hamiltonian(s: &SchrodingerisedSystem) -> ComplexMatrix {
    let phi = s.pgrid.basis();
    let phinv = linalg::fourier_inverse(&phi);
    let nu: Vec<C64> = s.pgrid.freqs.iter().map(|f| C64::new(*f, 0.0)).collect();
    let dp = phi.matmul(&ComplexMatrix::diagonal(&nu)).unwrap().matmul(&phinv).unwrap();
    let id = ComplexMatrix::identity(s.pgrid.n);
    linalg::kron(&s.h1, &dp).sub(&linalg::kron(&s.h2, &id)).unwrap()
}

