//! 1-D upwind scheme on the characteristic variables `Ψ̃ = (1⊗U)Ψ`.
//!
//! Components are 0-based: even components travel right with speed `v` and
//! live at `(j+1)Δx`; odd components travel left and live at `jΔx`.

use super::rs::{apply8, f_vector, j_vector, t_matrix};
use super::yee::{d_left, d_right};
use super::{
    AssemblyError, BoundaryKind, BoundarySpec, CurrentFn, FieldFn, FieldSample, FieldState, GridSpec, Layout,
    MediumParams,
};
use crate::linalg::{kron, ComplexMatrix, C64};
use crate::schrodinger::{LinearSystem, SourceFn};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    PecLeft,
    ImpedanceRight,
    PecRight,
    ImpedanceLeft,
}

impl FromStr for CouplingKind {
    type Err = AssemblyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pec_left" => Ok(CouplingKind::PecLeft),
            "impedance_right" => Ok(CouplingKind::ImpedanceRight),
            "pec_right" => Ok(CouplingKind::PecRight),
            "impedance_left" => Ok(CouplingKind::ImpedanceLeft),
            other => Err(AssemblyError::UnsupportedBoundary(format!("unknown coupling kind '{other}'"))),
        }
    }
}

/// The 4×4 boundary matrices `B_E2O` (left walls) and `B_O2E` (right walls),
/// with the `1/(2√2)` normalization; `v` enters through `r = (v−1)/(v+1)`.
pub fn boundary_coupling(kind: CouplingKind, v: f64) -> ComplexMatrix {
    let r = (v - 1.0) / (v + 1.0);
    let rows: [[f64; 4]; 4] = match kind {
        CouplingKind::PecLeft => [[1., 1., 1., -1.], [-1., -1., 1., -1.], [1., -1., 1., 1.], [1., -1., -1., -1.]],
        CouplingKind::PecRight => [[1., -1., 1., 1.], [1., -1., -1., -1.], [1., 1., 1., -1.], [-1., -1., 1., -1.]],
        CouplingKind::ImpedanceRight => [[1., -1., -r, -r], [1., -1., r, r], [-r, -r, 1., -1.], [r, r, 1., -1.]],
        CouplingKind::ImpedanceLeft => [[1., 1., -r, r], [-1., -1., -r, r], [-r, r, 1., 1.], [-r, r, -1., -1.]],
    };
    let s = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    ComplexMatrix::from_real_rows(&rows.map(|row| row.map(|x| x * s).to_vec()))
}

/// `W = (1⊗U)T`, the map from `𝓕` to characteristic variables.
pub fn char_transform() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]);
    kron(&ComplexMatrix::identity(4), &hadamard).matmul(&t_matrix()).expect("8×8 product")
}

/// Sample location of component `c` at index `j`.
pub fn char_coord(grid: &GridSpec, c: usize, j: usize) -> f64 {
    let dx = grid.dx()[0];
    let shift = if c % 2 == 0 { 1.0 } else { 0.0 };
    grid.origin_at(0) + (j as f64 + shift) * dx
}

pub(crate) fn char_point(w: &ComplexMatrix, s: &FieldSample, eps: f64, mu: f64) -> [C64; 8] {
    apply8(w, &f_vector(s.e, s.b, eps, mu))
}

pub(crate) fn char_current(w: &ComplexMatrix, j: [C64; 3], rho: C64, eps: f64, mu: f64) -> [C64; 8] {
    apply8(w, &j_vector(j, rho, eps, mu))
}

fn constant_medium(medium: &MediumParams) -> Result<(f64, f64), AssemblyError> {
    if !medium.is_constant() {
        return Err(AssemblyError::InvalidMedium("the upwind scheme needs a constant medium".into()));
    }
    Ok((medium.eps_at(0), medium.mu_at(0)))
}

/// Samples physical fields into the characteristic layout.
pub fn char_pack(
    grid: &GridSpec,
    medium: &MediumParams,
    f: &dyn Fn([f64; 3]) -> FieldSample,
) -> Result<FieldState, AssemblyError> {
    let (eps, mu) = constant_medium(medium)?;
    let m = grid.m;
    let w = char_transform();
    let mut data = vec![C64::new(0.0, 0.0); 8 * m];
    for c in 0..8 {
        for j in 0..m {
            let x = char_coord(grid, c, j);
            data[c * m + j] = char_point(&w, &f([x, 0.0, 0.0]), eps, mu)[c];
        }
    }
    FieldState::new(Layout::Te1dChar, data, grid.clone())
}

/// Recovers `(x, E, B)` at the interior nodes `x_j`, `j = 1..M−1`, where both
/// families of components are available.
pub fn char_unpack(state: &FieldState, medium: &MediumParams) -> Result<Vec<(f64, FieldSample)>, AssemblyError> {
    state.expect_layout(Layout::Te1dChar)?;
    let (eps, mu) = constant_medium(medium)?;
    let m = state.grid.m;
    let winv = char_transform().adjoint();
    let dx = state.grid.dx()[0];
    let mut out = Vec::with_capacity(m - 1);
    for j in 1..m {
        let mut u = [C64::new(0.0, 0.0); 8];
        for (c, slot) in u.iter_mut().enumerate() {
            *slot = state.data[c * m + if c % 2 == 0 { j - 1 } else { j }];
        }
        let f = apply8(&winv, &u);
        let se = std::f64::consts::SQRT_2 / eps.sqrt();
        let sm = std::f64::consts::SQRT_2 * mu.sqrt();
        let s = FieldSample { e: [f[0] * se, f[1] * se, f[2] * se], b: [f[4] * sm, f[5] * sm, f[6] * sm] };
        out.push((state.grid.origin_at(0) + j as f64 * dx, s));
    }
    Ok(out)
}

/// Bulk upwind operator `1₄⊗diag(−vD_{x,L}, vD_{x,R})` for `m` cells.
pub(crate) fn bulk_triplets(m: usize, dx: f64, v: f64, base: usize, trips: &mut Vec<(usize, usize, C64)>) {
    let dl = d_left(m, dx);
    let dr = d_right(m, dx);
    for c in 0..8 {
        let (mat, s) = if c % 2 == 0 { (&dl, -v) } else { (&dr, v) };
        for (i, j, x) in mat.triplets() {
            trips.push((base + c * m + i, base + c * m + j, x * s));
        }
    }
}

/// Impedance parameter of the coupling matrices in the scaled RS variables.
fn impedance_ratio(bc: &BoundarySpec, v: f64) -> f64 {
    bc.impedance_z.unwrap_or(v) / v
}

pub fn build_upwind_1d(
    grid: &GridSpec,
    medium: &MediumParams,
    bc: &BoundarySpec,
    initial: &FieldState,
    source: Option<CurrentFn>,
    inflow: Option<FieldFn>,
) -> Result<LinearSystem, AssemblyError> {
    grid.validate()?;
    bc.validate()?;
    if grid.dim != 1 {
        return Err(AssemblyError::InvalidGrid("build_upwind_1d needs a 1-D grid".into()));
    }
    initial.expect_layout(Layout::Te1dChar)?;
    let (eps, mu) = constant_medium(medium)?;
    let v = medium.v_at(0);
    let m = grid.m;
    let dx = grid.dx()[0];
    let k = v / dx;
    let g = impedance_ratio(bc, v);
    let scale = std::f64::consts::SQRT_2 * k;
    let mut trips = Vec::new();
    bulk_triplets(m, dx, v, 0, &mut trips);

    let needs_inflow = bc.left == BoundaryKind::InflowExact || bc.right == BoundaryKind::InflowExact;
    if needs_inflow && inflow.is_none() {
        return Err(AssemblyError::UnsupportedBoundary("inflow_exact needs an exact field sampler".into()));
    }
    let left = match bc.left {
        BoundaryKind::PerfectConductor => Some(boundary_coupling(CouplingKind::PecLeft, g)),
        BoundaryKind::Impedance => Some(boundary_coupling(CouplingKind::ImpedanceLeft, g)),
        BoundaryKind::Periodic => {
            for c in (0..8).step_by(2) {
                trips.push((c * m, c * m + m - 1, C64::new(k, 0.0)));
            }
            None
        }
        BoundaryKind::InflowExact => None,
    };
    if let Some(bm) = left {
        for (i, j, x) in bm.triplets() {
            trips.push((2 * m * i, (2 * j + 1) * m, x * scale));
        }
    }
    let right = match bc.right {
        BoundaryKind::PerfectConductor => Some(boundary_coupling(CouplingKind::PecRight, g)),
        BoundaryKind::Impedance => Some(boundary_coupling(CouplingKind::ImpedanceRight, g)),
        BoundaryKind::Periodic => {
            for c in (1..8).step_by(2) {
                trips.push((c * m + m - 1, c * m, C64::new(k, 0.0)));
            }
            None
        }
        BoundaryKind::InflowExact => None,
    };
    if let Some(bm) = right {
        for (i, j, x) in bm.triplets() {
            trips.push((2 * (i + 1) * m - 1, (2 * j + 1) * m - 1, x * scale));
        }
    }
    let a = ComplexMatrix::from_triplets(8 * m, 8 * m, trips);
    let sys = LinearSystem::homogeneous(a, initial.data.clone())?;
    if source.is_none() && !needs_inflow {
        return Ok(sys);
    }
    let grid = grid.clone();
    let (left_in, right_in) = (bc.left == BoundaryKind::InflowExact, bc.right == BoundaryKind::InflowExact);
    let w = char_transform();
    let x0 = grid.origin_at(0);
    let x1 = x0 + grid.lengths[0];
    let f: SourceFn = Arc::new(move |t| {
        let mut b = vec![C64::new(0.0, 0.0); 8 * m];
        if let Some(src) = &source {
            for c in 0..8 {
                for j in 0..m {
                    let s = src(t, [char_coord(&grid, c, j), 0.0, 0.0]);
                    b[c * m + j] = -char_current(&w, s.j, s.rho, eps, mu)[c];
                }
            }
        }
        if let Some(ex) = &inflow {
            if left_in {
                let u = char_point(&w, &ex(t, [x0, 0.0, 0.0]), eps, mu);
                for c in (0..8).step_by(2) {
                    b[c * m] += u[c] * k;
                }
            }
            if right_in {
                let u = char_point(&w, &ex(t, [x1, 0.0, 0.0]), eps, mu);
                for c in (1..8).step_by(2) {
                    b[c * m + m - 1] += u[c] * k;
                }
            }
        }
        b
    });
    Ok(sys.with_source(f))
}
