//! Two constant media joined at a point, discretized with the upwind scheme on
//! each side and coupled through the interface jump conditions.

use super::rs::build_transforms;
use super::upwind::{boundary_coupling, bulk_triplets, char_current, char_point, char_transform, CouplingKind};
use super::{
    AssemblyError, BoundaryKind, BoundarySpec, CurrentFn, FieldFn, FieldSample, FieldState, GridSpec, Layout,
    MediumParams, TransformMatrices,
};
use crate::linalg::{ComplexMatrix, C64};
use crate::schrodinger::{LinearSystem, SourceFn};
use nalgebra::DMatrix;
use std::sync::Arc;

const EVEN: [usize; 4] = [0, 2, 4, 6];
const ODD: [usize; 4] = [1, 3, 5, 7];

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSpec {
    pub position: f64,
    pub medium_left: MediumParams,
    pub medium_right: MediumParams,
    pub normal: [f64; 3],
    pub r1: ComplexMatrix,
    pub r2: ComplexMatrix,
    pub r1_tilde: ComplexMatrix,
    pub r2_tilde: ComplexMatrix,
}

fn r_block(s: f64, n: [f64; 3]) -> [[f64; 4]; 4] {
    let [nx, ny, nz] = n;
    [
        [s * nx, s * ny, s * nz, 1.0],
        [0.0, -nz / s, ny / s, 1.0],
        [nz / s, 0.0, -nx / s, 1.0],
        [-ny / s, nx / s, 0.0, 1.0],
    ]
}

/// `R_j = diag(R_j^{11}, R_j^{22})` built from `√ε_j`, `√μ_j` and the normal.
pub fn jump_matrix(eps: f64, mu: f64, n: [f64; 3]) -> ComplexMatrix {
    let b11 = r_block(eps.sqrt(), n);
    let b22 = r_block(mu.sqrt(), n);
    let mut rows = vec![vec![0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            rows[i][j] = b11[i][j];
            rows[4 + i][4 + j] = b22[i][j];
        }
    }
    ComplexMatrix::from_real_rows(&rows)
}

fn constant_pair(m: &MediumParams) -> Result<(f64, f64), AssemblyError> {
    if !m.is_constant() {
        return Err(AssemblyError::InvalidMedium("interface media must be constant on each side".into()));
    }
    Ok((m.eps_at(0), m.mu_at(0)))
}

impl InterfaceSpec {
    pub fn new(
        position: f64,
        medium_left: MediumParams,
        medium_right: MediumParams,
        normal: [f64; 3],
    ) -> Result<Self, AssemblyError> {
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(AssemblyError::NonUnitNormal(norm));
        }
        let (e1, m1) = constant_pair(&medium_left)?;
        let (e2, m2) = constant_pair(&medium_right)?;
        let r1 = jump_matrix(e1, m1, normal);
        let r2 = jump_matrix(e2, m2, normal);
        let mut spec = InterfaceSpec {
            position,
            medium_left,
            medium_right,
            normal,
            r1_tilde: r1.clone(),
            r2_tilde: r2.clone(),
            r1,
            r2,
        };
        let (t1, t2) = interface_jump_matrices(&spec, &build_transforms())?;
        spec.r1_tilde = t1;
        spec.r2_tilde = t2;
        Ok(spec)
    }
}

/// `R̃_j = R_j T† (1⊗U)†`.
pub fn interface_jump_matrices(
    spec: &InterfaceSpec,
    transforms: &TransformMatrices,
) -> Result<(ComplexMatrix, ComplexMatrix), AssemblyError> {
    let norm = spec.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(AssemblyError::NonUnitNormal(norm));
    }
    let right = transforms.t_rs.adjoint().matmul(&transforms.u_char.adjoint())?;
    Ok((spec.r1.matmul(&right)?, spec.r2.matmul(&right)?))
}

/// Columns of `(R̃₁ | −R̃₂)` for the unknown traces (`Ψ̃¹` odd, `Ψ̃²` even) and the known ones.
fn split_matching(spec: &InterfaceSpec) -> (DMatrix<C64>, DMatrix<C64>) {
    let r1 = spec.r1_tilde.to_dense();
    let r2 = spec.r2_tilde.to_dense();
    let mut mu = DMatrix::zeros(8, 8);
    let mut mk = DMatrix::zeros(8, 8);
    for row in 0..8 {
        for q in 0..4 {
            mu[(row, q)] = r1[(row, ODD[q])];
            mu[(row, 4 + q)] = -r2[(row, EVEN[q])];
            mk[(row, q)] = -r1[(row, EVEN[q])];
            mk[(row, 4 + q)] = r2[(row, ODD[q])];
        }
    }
    (mu, mk)
}

/// `|det|` of the incoming-trace block of the matching system.
pub fn matching_determinant(spec: &InterfaceSpec) -> f64 {
    split_matching(spec).0.determinant().norm()
}

/// `S` with `[Ψ̃¹_odd; Ψ̃²_even] = S [Ψ̃¹_even; Ψ̃²_odd]` at the interface.
pub fn scattering_matrix(spec: &InterfaceSpec) -> Result<DMatrix<C64>, AssemblyError> {
    let (mu, mk) = split_matching(spec);
    if mu.determinant().norm() < 1e-12 {
        return Err(AssemblyError::SingularMatching);
    }
    mu.lu().solve(&mk).ok_or(AssemblyError::SingularMatching)
}

/// Per-side cell counts and spacings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceGrid {
    pub left: f64,
    pub position: f64,
    pub right: f64,
    pub m1: usize,
    pub m2: usize,
    pub dx1: f64,
    pub dx2: f64,
}

impl InterfaceGrid {
    pub fn new(grid: &GridSpec, position: f64) -> Result<Self, AssemblyError> {
        grid.validate()?;
        if grid.dim != 1 {
            return Err(AssemblyError::InvalidGrid("interface problems are 1-D".into()));
        }
        let left = grid.origin_at(0);
        let right = left + grid.lengths[0];
        if !(position > left && position < right) {
            return Err(AssemblyError::InterfaceOffGrid(format!("{position} is outside ({left}, {right})")));
        }
        let m1 = (grid.m as f64 * (position - left) / (right - left)).round() as usize;
        let m2 = grid.m.saturating_sub(m1);
        if m1 < 2 || m2 < 2 {
            return Err(AssemblyError::InterfaceOffGrid(format!(
                "{position} leaves fewer than two cells on one side at M = {}",
                grid.m
            )));
        }
        Ok(InterfaceGrid {
            left,
            position,
            right,
            m1,
            m2,
            dx1: (position - left) / m1 as f64,
            dx2: (right - position) / m2 as f64,
        })
    }

    pub fn cells(&self, side: usize) -> usize {
        if side == 0 {
            self.m1
        } else {
            self.m2
        }
    }

    pub fn dx(&self, side: usize) -> f64 {
        if side == 0 {
            self.dx1
        } else {
            self.dx2
        }
    }

    pub fn start(&self, side: usize) -> f64 {
        if side == 0 {
            self.left
        } else {
            self.position
        }
    }

    pub fn offset(&self, side: usize) -> usize {
        if side == 0 {
            0
        } else {
            8 * self.m1
        }
    }

    pub fn index(&self, side: usize, c: usize, j: usize) -> usize {
        self.offset(side) + c * self.cells(side) + j
    }

    /// Even components sit at nodes `1..=M_s`, odd ones at `0..M_s`.
    pub fn coord(&self, side: usize, c: usize, j: usize) -> f64 {
        let node = if c % 2 == 0 { j + 1 } else { j };
        self.start(side) + node as f64 * self.dx(side)
    }
}

/// Samples `f(side, x)` into the two-sided characteristic layout.
pub fn interface_pack(
    grid: &GridSpec,
    spec: &InterfaceSpec,
    f: &dyn Fn(usize, f64) -> FieldSample,
) -> Result<FieldState, AssemblyError> {
    let ig = InterfaceGrid::new(grid, spec.position)?;
    let w = char_transform();
    let mut data = vec![C64::new(0.0, 0.0); 8 * grid.m];
    for side in 0..2 {
        let (eps, mu) = constant_pair(if side == 0 { &spec.medium_left } else { &spec.medium_right })?;
        for c in 0..8 {
            for j in 0..ig.cells(side) {
                let u = char_point(&w, &f(side, ig.coord(side, c, j)), eps, mu);
                data[ig.index(side, c, j)] = u[c];
            }
        }
    }
    FieldState::new(Layout::Te1dChar, data, grid.clone())
}

/// `(side, x, E, B)` at the interior nodes of each side.
pub fn interface_unpack(
    state: &FieldState,
    spec: &InterfaceSpec,
) -> Result<Vec<(usize, f64, FieldSample)>, AssemblyError> {
    state.expect_layout(Layout::Te1dChar)?;
    let ig = InterfaceGrid::new(&state.grid, spec.position)?;
    let winv = char_transform().adjoint();
    let mut out = Vec::new();
    for side in 0..2 {
        let (eps, mu) = constant_pair(if side == 0 { &spec.medium_left } else { &spec.medium_right })?;
        let se = std::f64::consts::SQRT_2 / eps.sqrt();
        let sm = std::f64::consts::SQRT_2 * mu.sqrt();
        for node in 1..ig.cells(side) {
            let mut u = [C64::new(0.0, 0.0); 8];
            for (c, slot) in u.iter_mut().enumerate() {
                let j = if c % 2 == 0 { node - 1 } else { node };
                *slot = state.data[ig.index(side, c, j)];
            }
            let f = winv.matvec(&u);
            let s = FieldSample { e: [f[0] * se, f[1] * se, f[2] * se], b: [f[4] * sm, f[5] * sm, f[6] * sm] };
            out.push((side, ig.start(side) + node as f64 * ig.dx(side), s));
        }
    }
    Ok(out)
}

pub fn build_interface_1d(
    grid: &GridSpec,
    spec: &InterfaceSpec,
    bc: &BoundarySpec,
    initial: &FieldState,
    source: Option<CurrentFn>,
    inflow: Option<FieldFn>,
) -> Result<LinearSystem, AssemblyError> {
    bc.validate()?;
    let ig = InterfaceGrid::new(grid, spec.position)?;
    initial.expect_layout(Layout::Te1dChar)?;
    if bc.left == BoundaryKind::Periodic {
        return Err(AssemblyError::UnsupportedBoundary("interface problems are not periodic".into()));
    }
    let needs_inflow = bc.left == BoundaryKind::InflowExact || bc.right == BoundaryKind::InflowExact;
    if needs_inflow && inflow.is_none() {
        return Err(AssemblyError::UnsupportedBoundary("inflow_exact needs an exact field sampler".into()));
    }
    let (e1, m1) = constant_pair(&spec.medium_left)?;
    let (e2, m2) = constant_pair(&spec.medium_right)?;
    let v = [1.0 / (e1 * m1).sqrt(), 1.0 / (e2 * m2).sqrt()];
    let k = [v[0] / ig.dx1, v[1] / ig.dx2];
    let s = scattering_matrix(spec)?;
    let mut trips = Vec::new();
    for side in 0..2 {
        bulk_triplets(ig.cells(side), ig.dx(side), v[side], ig.offset(side), &mut trips);
    }
    let known: Vec<usize> = EVEN
        .iter()
        .map(|&c| ig.index(0, c, ig.m1 - 1))
        .chain(ODD.iter().map(|&c| ig.index(1, c, 0)))
        .collect();
    for (q, &c) in ODD.iter().enumerate() {
        let row = ig.index(0, c, ig.m1 - 1);
        for (col, &kidx) in known.iter().enumerate() {
            trips.push((row, kidx, s[(q, col)] * k[0]));
        }
    }
    for (q, &c) in EVEN.iter().enumerate() {
        let row = ig.index(1, c, 0);
        for (col, &kidx) in known.iter().enumerate() {
            trips.push((row, kidx, s[(4 + q, col)] * k[1]));
        }
    }
    let r2 = std::f64::consts::SQRT_2;
    let g = |side: usize| bc.impedance_z.unwrap_or(v[side]) / v[side];
    let left = match bc.left {
        BoundaryKind::PerfectConductor => Some(boundary_coupling(CouplingKind::PecLeft, g(0))),
        BoundaryKind::Impedance => Some(boundary_coupling(CouplingKind::ImpedanceLeft, g(0))),
        _ => None,
    };
    if let Some(bm) = left {
        for (i, j, x) in bm.triplets() {
            trips.push((ig.index(0, 2 * i, 0), ig.index(0, 2 * j + 1, 0), x * r2 * k[0]));
        }
    }
    let right = match bc.right {
        BoundaryKind::PerfectConductor => Some(boundary_coupling(CouplingKind::PecRight, g(1))),
        BoundaryKind::Impedance => Some(boundary_coupling(CouplingKind::ImpedanceRight, g(1))),
        _ => None,
    };
    if let Some(bm) = right {
        let last = ig.m2 - 1;
        for (i, j, x) in bm.triplets() {
            trips.push((ig.index(1, 2 * i + 1, last), ig.index(1, 2 * j, last), x * r2 * k[1]));
        }
    }
    let n = 8 * grid.m;
    let a = ComplexMatrix::from_triplets(n, n, trips);
    let sys = LinearSystem::homogeneous(a, initial.data.clone())?;
    if source.is_none() && !needs_inflow {
        return Ok(sys);
    }
    let w = char_transform();
    let media = [(e1, m1), (e2, m2)];
    let (left_in, right_in) = (bc.left == BoundaryKind::InflowExact, bc.right == BoundaryKind::InflowExact);
    let f: SourceFn = Arc::new(move |t| {
        let mut b = vec![C64::new(0.0, 0.0); n];
        if let Some(src) = &source {
            for side in 0..2 {
                let (eps, mu) = media[side];
                for c in 0..8 {
                    for j in 0..ig.cells(side) {
                        let sm = src(t, [ig.coord(side, c, j), 0.0, 0.0]);
                        b[ig.index(side, c, j)] = -char_current(&w, sm.j, sm.rho, eps, mu)[c];
                    }
                }
            }
        }
        if let Some(ex) = &inflow {
            if left_in {
                let u = char_point(&w, &ex(t, [ig.left, 0.0, 0.0]), media[0].0, media[0].1);
                for c in EVEN {
                    b[ig.index(0, c, 0)] += u[c] * k[0];
                }
            }
            if right_in {
                let u = char_point(&w, &ex(t, [ig.right, 0.0, 0.0]), media[1].0, media[1].1);
                for c in ODD {
                    b[ig.index(1, c, ig.m2 - 1)] += u[c] * k[1];
                }
            }
        }
        b
    });
    Ok(sys.with_source(f))
}
