//! Maxwell discretizations assembled as [`LinearSystem`](crate::schrodinger::LinearSystem)s.

pub mod interface;
pub mod profile;
pub mod rs;
pub mod spectral;
pub mod upwind;
pub mod yee;

use crate::linalg::{LinalgError, C64};
use crate::schrodinger::SchrodingerError;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub use rs::{build_transforms, gauss_monitors, rs_pack, rs_unpack, TransformMatrices};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("unsupported boundary combination: {0}")]
    UnsupportedBoundary(String),
    #[error("layout mismatch: expected {expected:?}, got {got:?}")]
    LayoutMismatch { expected: Layout, got: Layout },
    #[error("interface is not on the grid: {0}")]
    InterfaceOffGrid(String),
    #[error("interface matching system is singular")]
    SingularMatching,
    #[error("normal vector is not a unit vector (norm {0})")]
    NonUnitNormal(f64),
}

/// Uniform grid with `m` cells per axis; `x_j = origin + j·dx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub m: usize,
    pub lengths: Vec<f64>,
    #[serde(default)]
    pub origin: Vec<f64>,
}

impl GridSpec {
    pub fn new(dim: usize, m: usize, lengths: Vec<f64>) -> Result<Self, AssemblyError> {
        let g = GridSpec { dim, m, origin: vec![0.0; lengths.len()], lengths };
        g.validate()?;
        Ok(g)
    }

    pub fn line(m: usize, length: f64) -> Result<Self, AssemblyError> {
        Self::new(1, m, vec![length])
    }

    pub fn square(m: usize, length: f64) -> Result<Self, AssemblyError> {
        Self::new(2, m, vec![length, length])
    }

    pub fn with_origin(mut self, origin: Vec<f64>) -> Self {
        self.origin = origin;
        self
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        if !(1..=3).contains(&self.dim) {
            return Err(AssemblyError::InvalidGrid(format!("dim = {} must be 1, 2 or 3", self.dim)));
        }
        if self.m < 2 || self.m % 2 != 0 {
            return Err(AssemblyError::InvalidGrid(format!("M = {} must be even and at least 2", self.m)));
        }
        if self.lengths.len() != self.dim || self.lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(AssemblyError::InvalidGrid(format!(
                "need {} positive lengths, got {:?}",
                self.dim, self.lengths
            )));
        }
        if !self.origin.is_empty() && self.origin.len() != self.dim {
            return Err(AssemblyError::InvalidGrid("origin length must equal dim".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l / self.m as f64).collect()
    }

    pub fn origin_at(&self, axis: usize) -> f64 {
        self.origin.get(axis).copied().unwrap_or(0.0)
    }

    /// Number of grid points, `M^dim`.
    pub fn points(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    /// `(j1, j2, j3)` for a flat index with `j1` fastest; absent axes are 0.
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = idx;
        for axis in 0..self.dim {
            out[axis] = rest % self.m;
            rest /= self.m;
        }
        out
    }

    /// Physical coordinates of `j + offset` (offset in cells, per axis).
    pub fn coord(&self, j: [usize; 3], offset: [f64; 3]) -> [f64; 3] {
        let dx = self.dx();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.origin_at(axis) + (j[axis] as f64 + offset[axis]) * dx[axis];
        }
        x
    }
}

/// Permittivity and permeability, either constant (one sample) or sampled per grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
}

impl MediumParams {
    pub fn constant(eps: f64, mu: f64) -> Result<Self, AssemblyError> {
        Self::sampled(vec![eps], vec![mu])
    }

    pub fn vacuum() -> Self {
        MediumParams { eps: vec![1.0], mu: vec![1.0] }
    }

    pub fn sampled(eps: Vec<f64>, mu: Vec<f64>) -> Result<Self, AssemblyError> {
        if eps.is_empty() || mu.is_empty() {
            return Err(AssemblyError::InvalidMedium("empty parameter field".into()));
        }
        if let Some(x) = eps.iter().chain(&mu).find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(AssemblyError::InvalidMedium(format!("parameter {x} is not positive")));
        }
        if eps.len() != 1 && mu.len() != 1 && eps.len() != mu.len() {
            return Err(AssemblyError::InvalidMedium("eps and mu sample counts differ".into()));
        }
        Ok(MediumParams { eps, mu })
    }

    pub fn is_constant(&self) -> bool {
        let flat = |v: &Vec<f64>| v.iter().all(|x| *x == v[0]);
        flat(&self.eps) && flat(&self.mu)
    }

    pub fn eps_at(&self, i: usize) -> f64 {
        if self.eps.len() == 1 {
            self.eps[0]
        } else {
            self.eps[i]
        }
    }

    pub fn mu_at(&self, i: usize) -> f64 {
        if self.mu.len() == 1 {
            self.mu[0]
        } else {
            self.mu[i]
        }
    }

    pub fn v_at(&self, i: usize) -> f64 {
        1.0 / (self.eps_at(i) * self.mu_at(i)).sqrt()
    }

    pub fn eps_bar_at(&self, i: usize) -> f64 {
        0.5 * self.eps_at(i).ln()
    }

    pub fn mu_bar_at(&self, i: usize) -> f64 {
        0.5 * self.mu_at(i).ln()
    }

    pub fn sample_count(&self) -> usize {
        self.eps.len().max(self.mu.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Eight RS components, component-major, grid index with `j1` fastest.
    Rs8,
    /// `E_x, E_y, E_z, B_x, B_y, B_z` blocks on the 3-D Yee lattice.
    YeeEb,
    /// `E_z, B_x, B_y` blocks on the 2-D Yee lattice.
    YeeTm2d,
    /// `E_x, E_y, B_z` blocks of the 1-D staggered grid.
    Te1d,
    /// Eight characteristic components of the 1-D upwind scheme.
    Te1dChar,
    /// `E_x, E_y, E_z, B_x, B_y, B_z` blocks, all sampled at the grid nodes.
    Nodal,
}

impl Layout {
    pub fn blocks(self) -> usize {
        match self {
            Layout::Rs8 | Layout::Te1dChar => 8,
            Layout::YeeEb | Layout::Nodal => 6,
            Layout::YeeTm2d | Layout::Te1d => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub layout: Layout,
    pub data: Vec<C64>,
    pub grid: GridSpec,
}

impl FieldState {
    pub fn new(layout: Layout, data: Vec<C64>, grid: GridSpec) -> Result<Self, AssemblyError> {
        let expected = layout.blocks() * grid.points();
        if data.len() != expected {
            return Err(AssemblyError::InvalidGrid(format!(
                "{layout:?} on {} points needs {expected} entries, got {}",
                grid.points(),
                data.len()
            )));
        }
        Ok(FieldState { layout, data, grid })
    }

    pub fn block(&self, b: usize) -> &[C64] {
        let n = self.grid.points();
        &self.data[b * n..(b + 1) * n]
    }

    pub fn block_mut(&mut self, b: usize) -> &mut [C64] {
        let n = self.grid.points();
        &mut self.data[b * n..(b + 1) * n]
    }

    pub fn expect_layout(&self, layout: Layout) -> Result<(), AssemblyError> {
        if self.layout != layout {
            return Err(AssemblyError::LayoutMismatch { expected: layout, got: self.layout });
        }
        Ok(())
    }
}

/// Electric and magnetic field at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldSample {
    pub e: [C64; 3],
    pub b: [C64; 3],
}

impl FieldSample {
    pub fn real(e: [f64; 3], b: [f64; 3]) -> Self {
        FieldSample { e: e.map(|x| C64::new(x, 0.0)), b: b.map(|x| C64::new(x, 0.0)) }
    }
}

/// Current density and charge density at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurrentSample {
    pub j: [C64; 3],
    pub rho: C64,
}

impl CurrentSample {
    pub fn real(j: [f64; 3], rho: f64) -> Self {
        CurrentSample { j: j.map(|x| C64::new(x, 0.0)), rho: C64::new(rho, 0.0) }
    }
}

pub type FieldFn = Arc<dyn Fn(f64, [f64; 3]) -> FieldSample + Send + Sync>;
pub type CurrentFn = Arc<dyn Fn(f64, [f64; 3]) -> CurrentSample + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    PerfectConductor,
    Impedance,
    InflowExact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    #[serde(default = "default_normal")]
    pub surface_normal: [f64; 3],
    /// Surface impedance `Z_s`; `None` means the medium speed `v`.
    #[serde(default)]
    pub impedance_z: Option<f64>,
}

fn default_normal() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

impl BoundarySpec {
    pub fn new(left: BoundaryKind, right: BoundaryKind) -> Result<Self, AssemblyError> {
        let spec = BoundarySpec { left, right, surface_normal: default_normal(), impedance_z: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn periodic() -> Self {
        BoundarySpec {
            left: BoundaryKind::Periodic,
            right: BoundaryKind::Periodic,
            surface_normal: default_normal(),
            impedance_z: None,
        }
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        let lp = self.left == BoundaryKind::Periodic;
        let rp = self.right == BoundaryKind::Periodic;
        if lp != rp {
            return Err(AssemblyError::UnsupportedBoundary("periodic must be used on both sides".into()));
        }
        let n = self.surface_normal;
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(AssemblyError::NonUnitNormal(norm));
        }
        if let Some(z) = self.impedance_z {
            if !(z > 0.0) {
                return Err(AssemblyError::UnsupportedBoundary(format!("impedance {z} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    E,
    B,
}

/// One staggered block: which field component it holds and where it is sampled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slot {
    pub kind: FieldKind,
    pub axis: usize,
    /// Offset from the grid node, in cells.
    pub offset: [f64; 3],
}

impl Slot {
    pub const fn new(kind: FieldKind, axis: usize, offset: [f64; 3]) -> Self {
        Slot { kind, axis, offset }
    }

    pub fn name(&self) -> &'static str {
        match (self.kind, self.axis) {
            (FieldKind::E, 0) => "E_x",
            (FieldKind::E, 1) => "E_y",
            (FieldKind::E, _) => "E_z",
            (FieldKind::B, 0) => "B_x",
            (FieldKind::B, 1) => "B_y",
            (FieldKind::B, _) => "B_z",
        }
    }

    pub fn pick(&self, s: &FieldSample) -> C64 {
        match self.kind {
            FieldKind::E => s.e[self.axis],
            FieldKind::B => s.b[self.axis],
        }
    }
}

/// Block layout of the physical-field layouts; `None` for RS and characteristic layouts.
pub fn layout_slots(layout: Layout) -> Option<Vec<Slot>> {
    use FieldKind::{B, E};
    Some(match layout {
        Layout::YeeEb => vec![
            Slot::new(E, 0, [0.0, 0.5, 0.5]),
            Slot::new(E, 1, [0.5, 0.0, 0.5]),
            Slot::new(E, 2, [0.5, 0.5, 0.0]),
            Slot::new(B, 0, [0.5, 0.0, 0.0]),
            Slot::new(B, 1, [0.0, 0.5, 0.0]),
            Slot::new(B, 2, [0.0, 0.0, 0.5]),
        ],
        Layout::YeeTm2d => vec![
            Slot::new(E, 2, [0.5, 0.5, 0.0]),
            Slot::new(B, 0, [0.5, 0.0, 0.0]),
            Slot::new(B, 1, [0.0, 0.5, 0.0]),
        ],
        Layout::Te1d => vec![
            Slot::new(E, 0, [0.5, 0.0, 0.0]),
            Slot::new(E, 1, [1.0, 0.0, 0.0]),
            Slot::new(B, 2, [0.5, 0.0, 0.0]),
        ],
        Layout::Nodal => (0..6)
            .map(|k| Slot::new(if k < 3 { E } else { B }, k % 3, [0.0; 3]))
            .collect(),
        Layout::Rs8 | Layout::Te1dChar => return None,
    })
}

/// Samples `f(x)` at the staggered locations of a physical-field layout.
pub fn sample_fields(
    layout: Layout,
    grid: &GridSpec,
    f: &dyn Fn([f64; 3]) -> FieldSample,
) -> Result<FieldState, AssemblyError> {
    let slots = layout_slots(layout).ok_or_else(|| {
        AssemblyError::InvalidGrid(format!("{layout:?} has no staggered field blocks"))
    })?;
    let n = grid.points();
    let mut data = Vec::with_capacity(slots.len() * n);
    for slot in &slots {
        for idx in 0..n {
            data.push(slot.pick(&f(grid.coord(grid.unflatten(idx), slot.offset))));
        }
    }
    FieldState::new(layout, data, grid.clone())
}
