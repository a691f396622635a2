//! Fourier spectral discretizations of the RS system on periodic grids.

use super::rs::{j_vector, rs_pack_current, t_matrix, apply8};
use super::{AssemblyError, CurrentFn, FieldState, GridSpec, Layout, MediumParams};
use crate::linalg::{kron, pauli, ComplexMatrix, C64, I};
use crate::schrodinger::{LinearSystem, PGrid, PTransform, SourceFn};
use std::sync::Arc;

/// Separable transform `c = (Φ_z⊗Φ_y⊗Φ_x)⁻¹ ψ` for one scalar field on the grid.
pub struct SpatialFourier {
    grid: GridSpec,
    axes: Vec<PTransform>,
    freqs: Vec<Vec<f64>>,
}

impl SpatialFourier {
    pub fn new(grid: &GridSpec) -> Result<Self, AssemblyError> {
        grid.validate()?;
        let mut axes = Vec::new();
        let mut freqs = Vec::new();
        for axis in 0..grid.dim {
            let o = grid.origin_at(axis);
            let pg = PGrid::new(o, o + grid.lengths[axis], grid.m)?;
            axes.push(PTransform::new(&pg));
            freqs.push(pg.freqs);
        }
        Ok(SpatialFourier { grid: grid.clone(), axes, freqs })
    }

    /// `(ν₁, ν₂, ν₃)` of a flat coefficient index; absent axes give 0.
    pub fn freq(&self, idx: usize) -> [f64; 3] {
        let l = self.grid.unflatten(idx);
        let mut nu = [0.0; 3];
        for axis in 0..self.grid.dim {
            nu[axis] = self.freqs[axis][l[axis]];
        }
        nu
    }

    pub fn axis_freqs(&self, axis: usize) -> &[f64] {
        &self.freqs[axis]
    }

    fn along_axes(&self, field: &mut [C64], forward: bool) {
        let m = self.grid.m;
        let n = self.grid.points();
        assert_eq!(field.len() % n, 0);
        let mut buf = vec![C64::new(0.0, 0.0); m];
        for block in field.chunks_mut(n) {
            for axis in 0..self.grid.dim {
                let stride = m.pow(axis as u32);
                for start in 0..n {
                    if (start / stride) % m != 0 {
                        continue;
                    }
                    for j in 0..m {
                        buf[j] = block[start + j * stride];
                    }
                    if forward {
                        self.axes[axis].to_modes(&mut buf);
                    } else {
                        self.axes[axis].from_modes(&mut buf);
                    }
                    for j in 0..m {
                        block[start + j * stride] = buf[j];
                    }
                }
            }
        }
    }

    /// Samples to coefficients, applied to every length-`M^d` block.
    pub fn to_coeffs(&self, field: &mut [C64]) {
        self.along_axes(field, true);
    }

    pub fn from_coeffs(&self, field: &mut [C64]) {
        self.along_axes(field, false);
    }
}

/// Fourier coefficients `c = (1⊗Φ⁻¹)ψ_h` of an RS state.
pub fn spectral_coefficients(psi: &FieldState) -> Result<Vec<C64>, AssemblyError> {
    psi.expect_layout(Layout::Rs8)?;
    let mut c = psi.data.clone();
    SpatialFourier::new(&psi.grid)?.to_coeffs(&mut c);
    Ok(c)
}

/// Inverse of [`spectral_coefficients`].
pub fn spectral_state(coeffs: &[C64], grid: &GridSpec) -> Result<FieldState, AssemblyError> {
    let mut d = coeffs.to_vec();
    SpatialFourier::new(grid)?.from_coeffs(&mut d);
    FieldState::new(Layout::Rs8, d, grid.clone())
}

fn sample_current(grid: &GridSpec, source: &CurrentFn, t: f64) -> (Vec<[C64; 3]>, Vec<C64>) {
    let n = grid.points();
    let mut j = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    for idx in 0..n {
        let s = source(t, grid.coord(grid.unflatten(idx), [0.0; 3]));
        j.push(s.j);
        rho.push(s.rho);
    }
    (j, rho)
}

/// `A = Q̃ = −iv·diag(Σᵢ Σᵢ⊗Dᵢ, Σᵢ Σᵢ*⊗Dᵢ)` acting on Fourier coefficients.
pub fn build_spectral_periodic(
    grid: &GridSpec,
    medium: &MediumParams,
    initial: &FieldState,
    source: Option<CurrentFn>,
) -> Result<LinearSystem, AssemblyError> {
    grid.validate()?;
    if medium.sample_count() != 1 && !medium.is_constant() {
        return Err(AssemblyError::InvalidMedium(
            "the periodic spectral scheme needs a constant medium".into(),
        ));
    }
    initial.expect_layout(Layout::Rs8)?;
    if initial.grid != *grid {
        return Err(AssemblyError::InvalidGrid("initial state lives on a different grid".into()));
    }
    let fourier = SpatialFourier::new(grid)?;
    let v = medium.v_at(0);
    let n = grid.points();
    let sig: Vec<ComplexMatrix> = (1..=3).map(|k| kron(&ComplexMatrix::identity(2), &pauli(k))).collect();
    let mut trips = Vec::new();
    for idx in 0..n {
        let nu = fourier.freq(idx);
        for axis in 0..grid.dim {
            if nu[axis] == 0.0 {
                continue;
            }
            for (r, c, s) in sig[axis].triplets() {
                let w = -I * v * nu[axis];
                trips.push((r * n + idx, c * n + idx, w * s));
                trips.push(((4 + r) * n + idx, (4 + c) * n + idx, w * s.conj()));
            }
        }
    }
    let a = ComplexMatrix::from_triplets(8 * n, 8 * n, trips);
    let u0 = spectral_coefficients(initial)?;
    let sys = LinearSystem::homogeneous(a, u0)?;
    Ok(match source {
        None => sys,
        Some(src) => {
            let grid = grid.clone();
            let medium = medium.clone();
            let f: SourceFn = Arc::new(move |t| {
                let (j, rho) = sample_current(&grid, &src, t);
                let mut b = rs_pack_current(&j, &rho, &medium, &grid).expect("grid-consistent current");
                SpatialFourier::new(&grid).expect("validated grid").to_coeffs(&mut b);
                b.iter_mut().for_each(|x| *x = -*x);
                b
            });
            sys.with_source(f)
        }
    })
}

/// Dense 1-D spectral derivative `P = Φ diag(ν) Φ⁻¹ = −i∂`.
pub fn spectral_derivative_1d(m: usize, length: f64) -> Result<ComplexMatrix, AssemblyError> {
    let pg = PGrid::new(0.0, length, m)?;
    let mut trips = Vec::with_capacity(m * m);
    for j in 0..m {
        for jp in 0..m {
            let dx = pg.points[j] - pg.points[jp];
            let s: C64 = pg.freqs.iter().map(|nu| C64::from_polar(*nu, nu * dx)).sum();
            trips.push((j, jp, s / m as f64));
        }
    }
    Ok(ComplexMatrix::from_triplets(m, m, trips).into_dense_storage())
}

/// `Pᵢ` on the full grid: `P₁ = 1⊗1⊗P_x`, `P₂ = 1⊗P_y⊗1`, `P₃ = P_z⊗1⊗1`.
pub fn spectral_derivative(grid: &GridSpec, axis: usize) -> Result<ComplexMatrix, AssemblyError> {
    let p = spectral_derivative_1d(grid.m, grid.lengths[axis])?;
    let id = ComplexMatrix::identity(grid.m);
    let mut out = ComplexMatrix::identity(1);
    for a in (0..grid.dim).rev() {
        out = kron(&out, if a == axis { &p } else { &id });
    }
    Ok(out)
}

fn push_block(
    trips: &mut Vec<(usize, usize, C64)>,
    n: usize,
    offset: (usize, usize),
    pattern: &ComplexMatrix,
    inner: &[(usize, usize, C64)],
    coef: C64,
) {
    for (r, c, s) in pattern.triplets() {
        for (i, j, x) in inner {
            trips.push(((offset.0 + r) * n + i, (offset.1 + c) * n + j, coef * s * x));
        }
    }
}

/// Spectral RS system for a spatially varying medium, acting on grid samples `ψ_h`.
pub fn build_spectral_inhomogeneous(
    grid: &GridSpec,
    medium: &MediumParams,
    initial: &FieldState,
    source: Option<CurrentFn>,
) -> Result<LinearSystem, AssemblyError> {
    grid.validate()?;
    let n = grid.points();
    if medium.sample_count() != 1 && medium.sample_count() != n {
        return Err(AssemblyError::InvalidMedium(format!(
            "medium has {} samples for {n} grid points",
            medium.sample_count()
        )));
    }
    initial.expect_layout(Layout::Rs8)?;
    let v: Vec<f64> = (0..n).map(|i| medium.v_at(i)).collect();
    let eb: Vec<C64> = (0..n).map(|i| C64::new(medium.eps_bar_at(i), 0.0)).collect();
    let mb: Vec<C64> = (0..n).map(|i| C64::new(medium.mu_bar_at(i), 0.0)).collect();
    let plus: Vec<C64> = eb.iter().zip(&mb).map(|(a, b)| a + b).collect();
    let minus: Vec<C64> = eb.iter().zip(&mb).map(|(a, b)| a - b).collect();

    let id2 = ComplexMatrix::identity(2);
    let s2 = pauli(2);
    let mut trips = Vec::new();
    let half_i = I * 0.5;
    for axis in 0..grid.dim {
        let p = spectral_derivative(grid, axis)?;
        let vp: Vec<(usize, usize, C64)> = p.triplets().into_iter().map(|(i, j, x)| (i, j, x * v[i])).collect();
        let vplus: Vec<(usize, usize, C64)> =
            p.matvec(&plus).into_iter().enumerate().map(|(i, x)| (i, i, x * v[i])).collect();
        let vminus: Vec<(usize, usize, C64)> =
            p.matvec(&minus).into_iter().enumerate().map(|(i, x)| (i, i, x * v[i])).collect();
        let sk = pauli(axis + 1);
        let sigma = kron(&id2, &sk);
        let sigma_c = sigma.conj();
        let p12 = kron(&s2, &sk.matmul(&s2)?);
        let p21 = kron(&s2, &sk.conj().matmul(&s2)?);
        push_block(&mut trips, n, (0, 0), &sigma, &vp, -I);
        push_block(&mut trips, n, (4, 4), &sigma_c, &vp, -I);
        push_block(&mut trips, n, (0, 0), &sigma, &vplus, half_i);
        push_block(&mut trips, n, (4, 4), &sigma_c, &vplus, half_i);
        push_block(&mut trips, n, (0, 4), &p12, &vminus, half_i);
        push_block(&mut trips, n, (4, 0), &p21, &vminus, half_i);
    }
    let a = ComplexMatrix::from_triplets(8 * n, 8 * n, trips);
    let sys = LinearSystem::homogeneous(a, initial.data.clone())?;
    Ok(match source {
        None => sys,
        Some(src) => {
            let grid = grid.clone();
            let medium = medium.clone();
            let t = t_matrix();
            let f: SourceFn = Arc::new(move |time| {
                let mut b = vec![C64::new(0.0, 0.0); 8 * n];
                for idx in 0..n {
                    let s = src(time, grid.coord(grid.unflatten(idx), [0.0; 3]));
                    let jv = apply8(&t, &j_vector(s.j, s.rho, medium.eps_at(idx), medium.mu_at(idx)));
                    for (comp, x) in jv.iter().enumerate() {
                        b[comp * n + idx] = -*x;
                    }
                }
                b
            });
            sys.with_source(f)
        }
    })
}
