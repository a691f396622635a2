//! Riemann–Silberstein packing and the fixed 8×8 transforms.

use super::{AssemblyError, FieldState, GridSpec, Layout, MediumParams};
use crate::linalg::{kron, pauli, ComplexMatrix, C64, I};

/// `T`, `1⊗U`, `Σᵢ = 1⊗σᵢ` and `Λ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrices {
    pub t_rs: ComplexMatrix,
    /// `1₂⊗U` acting on the full 8-vector.
    pub u_char: ComplexMatrix,
    /// `U = 1₂⊗H` acting on one 4-component half.
    pub u: ComplexMatrix,
    pub sigma: [ComplexMatrix; 3],
    pub lambda1: ComplexMatrix,
}

pub fn t_matrix() -> ComplexMatrix {
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    let rows: [[C64; 8]; 8] = [
        [-o, I, z, z, -I, -o, z, z],
        [z, z, o, I, z, z, I, -o],
        [z, z, o, -I, z, z, I, o],
        [o, I, z, z, I, -o, z, z],
        [-o, -I, z, z, I, -o, z, z],
        [z, z, o, -I, z, z, -I, -o],
        [z, z, o, I, z, z, -I, o],
        [o, -I, z, z, -I, -o, z, z],
    ];
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|x| x * 0.5).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn build_transforms() -> TransformMatrices {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]);
    let id2 = ComplexMatrix::identity(2);
    let u = kron(&id2, &hadamard);
    let u_char = kron(&ComplexMatrix::identity(4), &hadamard);
    let sigma = [kron(&id2, &pauli(1)), kron(&id2, &pauli(2)), kron(&id2, &pauli(3))];
    let lambda1 = kron(&id2, &pauli(3));
    TransformMatrices { t_rs: t_matrix(), u_char, u, sigma, lambda1 }
}

/// `𝓕 = (√ε E, 0, B/√μ, 0)/√2` at one point.
pub fn f_vector(e: [C64; 3], b: [C64; 3], eps: f64, mu: f64) -> [C64; 8] {
    let se = eps.sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let sm = std::f64::consts::FRAC_1_SQRT_2 / mu.sqrt();
    let mut f = [C64::new(0.0, 0.0); 8];
    for k in 0..3 {
        f[k] = e[k] * se;
        f[4 + k] = b[k] * sm;
    }
    f
}

/// `𝓙 = (J, 0, 0, −vρ)/√(2ε)`.
pub fn j_vector(j: [C64; 3], rho: C64, eps: f64, mu: f64) -> [C64; 8] {
    let s = 1.0 / (2.0 * eps).sqrt();
    let v = 1.0 / (eps * mu).sqrt();
    let mut f = [C64::new(0.0, 0.0); 8];
    for k in 0..3 {
        f[k] = j[k] * s;
    }
    f[7] = -rho * v * s;
    f
}

pub fn apply8(m: &ComplexMatrix, x: &[C64; 8]) -> [C64; 8] {
    let y = m.matvec(x);
    let mut out = [C64::new(0.0, 0.0); 8];
    out.copy_from_slice(&y);
    out
}

fn scatter(data: &mut [C64], n: usize, idx: usize, x: &[C64; 8]) {
    for (comp, v) in x.iter().enumerate() {
        data[comp * n + idx] = *v;
    }
}

fn gather(data: &[C64], n: usize, idx: usize) -> [C64; 8] {
    let mut x = [C64::new(0.0, 0.0); 8];
    for (comp, v) in x.iter_mut().enumerate() {
        *v = data[comp * n + idx];
    }
    x
}

fn check_samples(grid: &GridSpec, medium: &MediumParams, len: usize) -> Result<usize, AssemblyError> {
    let n = grid.points();
    if len != n {
        return Err(AssemblyError::InvalidGrid(format!("expected {n} samples, got {len}")));
    }
    if medium.sample_count() != 1 && medium.sample_count() != n {
        return Err(AssemblyError::InvalidMedium(format!(
            "medium has {} samples for {n} grid points",
            medium.sample_count()
        )));
    }
    Ok(n)
}

/// Packs sampled `E`, `B` into `Ψ = T𝓕`, component-major.
pub fn rs_pack(
    e: &[[C64; 3]],
    b: &[[C64; 3]],
    medium: &MediumParams,
    grid: &GridSpec,
) -> Result<FieldState, AssemblyError> {
    let n = check_samples(grid, medium, e.len())?;
    if b.len() != n {
        return Err(AssemblyError::InvalidGrid("E and B sample counts differ".into()));
    }
    let t = t_matrix();
    let mut data = vec![C64::new(0.0, 0.0); 8 * n];
    for idx in 0..n {
        let f = f_vector(e[idx], b[idx], medium.eps_at(idx), medium.mu_at(idx));
        scatter(&mut data, n, idx, &apply8(&t, &f));
    }
    FieldState::new(Layout::Rs8, data, grid.clone())
}

/// Packs `J`, `ρ` into `𝔍 = T𝓙` with the same layout as [`rs_pack`].
pub fn rs_pack_current(
    j: &[[C64; 3]],
    rho: &[C64],
    medium: &MediumParams,
    grid: &GridSpec,
) -> Result<Vec<C64>, AssemblyError> {
    let n = check_samples(grid, medium, j.len())?;
    let t = t_matrix();
    let mut data = vec![C64::new(0.0, 0.0); 8 * n];
    for idx in 0..n {
        let f = j_vector(j[idx], rho[idx], medium.eps_at(idx), medium.mu_at(idx));
        scatter(&mut data, n, idx, &apply8(&t, &f));
    }
    Ok(data)
}

/// `𝓕 = T†Ψ` per grid point.
pub fn rs_to_f(psi: &FieldState) -> Result<Vec<[C64; 8]>, AssemblyError> {
    rs_to_f_with(psi, &t_matrix())
}

fn rs_to_f_with(psi: &FieldState, t: &ComplexMatrix) -> Result<Vec<[C64; 8]>, AssemblyError> {
    psi.expect_layout(Layout::Rs8)?;
    let n = psi.grid.points();
    let td = t.adjoint();
    Ok((0..n).map(|idx| apply8(&td, &gather(&psi.data, n, idx))).collect())
}

/// Inverse of [`rs_pack`]: returns sampled `(E, B)`.
#[allow(clippy::type_complexity)]
pub fn rs_unpack(
    psi: &FieldState,
    medium: &MediumParams,
) -> Result<(Vec<[C64; 3]>, Vec<[C64; 3]>), AssemblyError> {
    let f = rs_to_f(psi)?;
    let r2 = std::f64::consts::SQRT_2;
    let mut e = Vec::with_capacity(f.len());
    let mut b = Vec::with_capacity(f.len());
    for (idx, fv) in f.iter().enumerate() {
        let se = r2 / medium.eps_at(idx).sqrt();
        let sm = r2 * medium.mu_at(idx).sqrt();
        e.push([fv[0] * se, fv[1] * se, fv[2] * se]);
        b.push([fv[4] * sm, fv[5] * sm, fv[6] * sm]);
    }
    Ok((e, b))
}

/// Max `|𝓕₄|` and `|𝓕₈|` (slots 3 and 7).
pub fn gauss_monitors(psi: &FieldState, transforms: &TransformMatrices) -> Result<(f64, f64), AssemblyError> {
    let f = rs_to_f_with(psi, &transforms.t_rs)?;
    let mut f4 = 0.0f64;
    let mut f8 = 0.0f64;
    for fv in &f {
        f4 = f4.max(fv[3].norm());
        f8 = f8.max(fv[7].norm());
    }
    Ok((f4, f8))
}

/// Unpacks an RS state into nodal `E`, `B` blocks.
pub fn rs_to_nodal(psi: &FieldState, medium: &MediumParams) -> Result<FieldState, AssemblyError> {
    let (e, b) = rs_unpack(psi, medium)?;
    let n = e.len();
    let mut data = vec![C64::new(0.0, 0.0); 6 * n];
    for idx in 0..n {
        for k in 0..3 {
            data[k * n + idx] = e[idx][k];
            data[(3 + k) * n + idx] = b[idx][k];
        }
    }
    FieldState::new(Layout::Nodal, data, psi.grid.clone())
}

/// Packs a nodal `E`, `B` state into RS form.
pub fn nodal_to_rs(state: &FieldState, medium: &MediumParams) -> Result<FieldState, AssemblyError> {
    state.expect_layout(Layout::Nodal)?;
    let n = state.grid.points();
    let e: Vec<[C64; 3]> = (0..n).map(|i| [0, 1, 2].map(|k| state.data[k * n + i])).collect();
    let b: Vec<[C64; 3]> = (0..n).map(|i| [3, 4, 5].map(|k| state.data[k * n + i])).collect();
    rs_pack(&e, &b, medium, &state.grid)
}
