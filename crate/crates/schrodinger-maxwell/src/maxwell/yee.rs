//! Yee staggered-grid discretizations.

use super::{
    layout_slots, AssemblyError, BoundaryKind, BoundarySpec, CurrentFn, FieldKind, FieldState, GridSpec, Layout,
    MediumParams,
};
use crate::linalg::{kron, shift_matrix, ComplexMatrix, C64};
use crate::schrodinger::{LinearSystem, SourceFn};
use std::sync::Arc;

/// `C_a = (… ⊗ F_M ⊗ … − 1)/Δa` for axis `a` (x fastest).
pub fn difference_matrix(grid: &GridSpec, axis: usize) -> Result<ComplexMatrix, AssemblyError> {
    let f = shift_matrix(grid.m)?;
    let id = ComplexMatrix::identity(grid.m);
    let mut out = ComplexMatrix::identity(1);
    for a in (0..grid.dim).rev() {
        out = kron(&out, if a == axis { &f } else { &id });
    }
    let out = out.into_sparse_storage();
    let dx = grid.dx()[axis];
    Ok(out.sub(&ComplexMatrix::identity(grid.points()).into_sparse_storage())?.scale(C64::new(1.0 / dx, 0.0)))
}

fn constant_v(medium: &MediumParams) -> Result<f64, AssemblyError> {
    if !medium.is_constant() {
        return Err(AssemblyError::InvalidMedium("Yee schemes need a constant medium".into()));
    }
    Ok(medium.v_at(0))
}

fn place(trips: &mut Vec<(usize, usize, C64)>, n: usize, br: usize, bc: usize, m: &ComplexMatrix, s: f64) {
    for (i, j, x) in m.triplets() {
        trips.push((br * n + i, bc * n + j, x * s));
    }
}

/// `M_B^E = v[[0,−C_z,C_y],[C_z,0,−C_x],[−C_y,C_x,0]]` on a 3-D grid.
pub fn curl_matrix(grid: &GridSpec, v: f64) -> Result<ComplexMatrix, AssemblyError> {
    if grid.dim != 3 {
        return Err(AssemblyError::InvalidGrid("M_B^E is defined on 3-D grids".into()));
    }
    let n = grid.points();
    let c: Vec<ComplexMatrix> = (0..3).map(|a| difference_matrix(grid, a)).collect::<Result<_, _>>()?;
    let mut trips = Vec::new();
    place(&mut trips, n, 0, 1, &c[2], -v);
    place(&mut trips, n, 0, 2, &c[1], v);
    place(&mut trips, n, 1, 0, &c[2], v);
    place(&mut trips, n, 1, 2, &c[0], -v);
    place(&mut trips, n, 2, 0, &c[1], -v);
    place(&mut trips, n, 2, 1, &c[0], v);
    Ok(ComplexMatrix::sparse_from_triplets(3 * n, 3 * n, trips))
}

fn yee_layout(grid: &GridSpec) -> Result<Layout, AssemblyError> {
    match grid.dim {
        2 => Ok(Layout::YeeTm2d),
        3 => Ok(Layout::YeeEb),
        _ => Err(AssemblyError::InvalidGrid("periodic Yee needs a 2-D (TM) or 3-D grid; use build_yee_1d".into())),
    }
}

/// Generator of the periodic Yee scheme (TM unknowns `E_z, B_x, B_y` in 2-D).
pub fn yee_periodic_matrix(grid: &GridSpec, v: f64) -> Result<ComplexMatrix, AssemblyError> {
    let n = grid.points();
    match yee_layout(grid)? {
        Layout::YeeEb => {
            let m = curl_matrix(grid, v)?;
            let mt = m.transpose();
            let mut trips = Vec::new();
            for (i, j, x) in m.triplets() {
                trips.push((i, 3 * n + j, x));
            }
            for (i, j, x) in mt.triplets() {
                trips.push((3 * n + i, j, -x));
            }
            Ok(ComplexMatrix::sparse_from_triplets(6 * n, 6 * n, trips))
        }
        _ => {
            let cx = difference_matrix(grid, 0)?;
            let cy = difference_matrix(grid, 1)?;
            let mut trips = Vec::new();
            place(&mut trips, n, 0, 1, &cy, -v);
            place(&mut trips, n, 0, 2, &cx, v);
            place(&mut trips, n, 1, 0, &cy.transpose(), v);
            place(&mut trips, n, 2, 0, &cx.transpose(), -v);
            Ok(ComplexMatrix::sparse_from_triplets(3 * n, 3 * n, trips))
        }
    }
}

fn current_column(grid: &GridSpec, layout: Layout, src: &CurrentFn, t: f64) -> Vec<C64> {
    let slots = layout_slots(layout).expect("physical layout");
    let n = grid.points();
    let mut b = vec![C64::new(0.0, 0.0); slots.len() * n];
    for (blk, slot) in slots.iter().enumerate() {
        if slot.kind != FieldKind::E {
            continue;
        }
        for idx in 0..n {
            let s = src(t, grid.coord(grid.unflatten(idx), slot.offset));
            b[blk * n + idx] = -s.j[slot.axis];
        }
    }
    b
}

pub fn build_yee_periodic(
    grid: &GridSpec,
    medium: &MediumParams,
    initial: &FieldState,
    source: Option<CurrentFn>,
) -> Result<LinearSystem, AssemblyError> {
    grid.validate()?;
    let layout = yee_layout(grid)?;
    initial.expect_layout(layout)?;
    let v = constant_v(medium)?;
    let a = yee_periodic_matrix(grid, v)?;
    let sys = LinearSystem::homogeneous(a, initial.data.clone())?;
    Ok(match source {
        None => sys,
        Some(src) => {
            let grid = grid.clone();
            let f: SourceFn = Arc::new(move |t| current_column(&grid, layout, &src, t));
            sys.with_source(f)
        }
    })
}

/// Discrete divergence of the magnetic blocks: `−(C_xᵀB_x + C_yᵀB_y [+ C_zᵀB_z])`.
pub fn discrete_div(b_h: &FieldState) -> Result<Vec<C64>, AssemblyError> {
    let grid = &b_h.grid;
    let (first, count) = match b_h.layout {
        Layout::YeeEb => (3, 3),
        Layout::YeeTm2d => (1, 2),
        other => return Err(AssemblyError::LayoutMismatch { expected: Layout::YeeEb, got: other }),
    };
    let mut div = vec![C64::new(0.0, 0.0); grid.points()];
    for a in 0..count {
        let ct = difference_matrix(grid, a)?.transpose();
        for (d, x) in div.iter_mut().zip(ct.matvec(b_h.block(first + a))) {
            *d -= x;
        }
    }
    Ok(div)
}

/// Discrete divergence of the electric blocks, `C_xE_x + C_yE_y + C_zE_z` (3-D only).
pub fn discrete_div_e(e_h: &FieldState) -> Result<Vec<C64>, AssemblyError> {
    e_h.expect_layout(Layout::YeeEb)?;
    let mut div = vec![C64::new(0.0, 0.0); e_h.grid.points()];
    for a in 0..3 {
        let c = difference_matrix(&e_h.grid, a)?;
        for (d, x) in div.iter_mut().zip(c.matvec(e_h.block(a))) {
            *d += x;
        }
    }
    Ok(div)
}

/// Discrete curl of the electric blocks, stored in the magnetic blocks of the
/// same layout (`(M_B^E)ᵀE/v`); electric blocks of the result are zero.
pub fn discrete_curl(e_h: &FieldState) -> Result<FieldState, AssemblyError> {
    let grid = &e_h.grid;
    let n = grid.points();
    let mut out = FieldState::new(e_h.layout, vec![C64::new(0.0, 0.0); e_h.data.len()], grid.clone())?;
    match e_h.layout {
        Layout::YeeEb => {
            let m = curl_matrix(grid, 1.0)?.transpose();
            let curl = m.matvec(&e_h.data[..3 * n]);
            out.data[3 * n..].copy_from_slice(&curl);
        }
        Layout::YeeTm2d => {
            let cx = difference_matrix(grid, 0)?.transpose();
            let cy = difference_matrix(grid, 1)?.transpose();
            let ez = e_h.block(0);
            for (o, x) in out.block_mut(1).iter_mut().zip(cy.matvec(ez)) {
                *o = -x;
            }
            out.block_mut(2).copy_from_slice(&cx.matvec(ez));
        }
        other => return Err(AssemblyError::LayoutMismatch { expected: Layout::YeeEb, got: other }),
    }
    Ok(out)
}

/// `D_{x,L} = (1 − subdiagonal)/Δx`.
pub fn d_left(m: usize, dx: f64) -> ComplexMatrix {
    let mut trips = Vec::with_capacity(2 * m);
    for j in 0..m {
        trips.push((j, j, C64::new(1.0 / dx, 0.0)));
        if j > 0 {
            trips.push((j, j - 1, C64::new(-1.0 / dx, 0.0)));
        }
    }
    ComplexMatrix::sparse_from_triplets(m, m, trips)
}

/// `D_{x,R} = −D_{x,L}ᵀ`.
pub fn d_right(m: usize, dx: f64) -> ComplexMatrix {
    d_left(m, dx).transpose().scale(C64::new(-1.0, 0.0))
}

/// 1-D TE Yee scheme with unknowns `E_x` at `j+½`, `E_y` at `j+1` and `B_z` at `j+½`.
///
/// The left wall sits at `E_{y,0}`; a perfect conductor there is the implicit
/// `E_{y,0} = 0`. The right wall sits at `E_{y,M}`, the last `E_y` unknown; a
/// perfect conductor there decouples it, so it stays at its initial value.
pub fn build_yee_1d(
    grid: &GridSpec,
    medium: &MediumParams,
    bc: &BoundarySpec,
    initial: &FieldState,
    source: Option<CurrentFn>,
) -> Result<LinearSystem, AssemblyError> {
    grid.validate()?;
    bc.validate()?;
    if grid.dim != 1 {
        return Err(AssemblyError::InvalidGrid("build_yee_1d needs a 1-D grid".into()));
    }
    initial.expect_layout(Layout::Te1d)?;
    let v = constant_v(medium)?;
    let z = bc.impedance_z.unwrap_or(v);
    let m = grid.m;
    let dx = grid.dx()[0];
    let mut trips = Vec::new();
    place(&mut trips, m, 1, 2, &d_right(m, dx), -v);
    place(&mut trips, m, 2, 1, &d_left(m, dx), -v);
    let ey_last = 2 * m - 1;
    let bz_first = 2 * m;
    let mut pin_right = false;
    match bc.left {
        BoundaryKind::PerfectConductor => {}
        BoundaryKind::Impedance => {
            trips.push((bz_first, bz_first, C64::new(-1.5 * v * z / dx, 0.0)));
            trips.push((bz_first, bz_first + 1, C64::new(0.5 * v * z / dx, 0.0)));
        }
        BoundaryKind::Periodic => {
            trips.push((bz_first, ey_last, C64::new(v / dx, 0.0)));
        }
        BoundaryKind::InflowExact => {
            return Err(AssemblyError::UnsupportedBoundary("inflow_exact is not available for Yee".into()))
        }
    }
    match bc.right {
        BoundaryKind::Impedance => {
            trips.push((ey_last, ey_last, C64::new(-2.0 * v / (z * dx), 0.0)));
            trips.push((ey_last, 3 * m - 1, C64::new(v / dx, 0.0)));
        }
        BoundaryKind::PerfectConductor => pin_right = true,
        BoundaryKind::Periodic => {
            trips.push((ey_last, bz_first, C64::new(-v / dx, 0.0)));
        }
        BoundaryKind::InflowExact => {
            return Err(AssemblyError::UnsupportedBoundary("inflow_exact is not available for Yee".into()))
        }
    }
    if pin_right {
        trips.retain(|(i, j, _)| *i != ey_last && *j != ey_last);
    }
    let a = ComplexMatrix::from_triplets(3 * m, 3 * m, trips);
    let sys = LinearSystem::homogeneous(a, initial.data.clone())?;
    Ok(match source {
        None => sys,
        Some(src) => {
            let grid = grid.clone();
            let f: SourceFn = Arc::new(move |t| {
                let mut b = current_column(&grid, Layout::Te1d, &src, t);
                if pin_right {
                    b[ey_last] = C64::new(0.0, 0.0);
                }
                b
            });
            sys.with_source(f)
        }
    })
}
