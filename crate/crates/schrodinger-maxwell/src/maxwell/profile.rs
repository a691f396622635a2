use super::{AssemblyError, GridSpec, MediumParams};
use serde::{Deserialize, Serialize};

/// `ε(x) = (ε₁+ε₂)/2 − (ε₁−ε₂)/2·tanh β(x−L)`.
pub fn tanh_permittivity(eps1: f64, eps2: f64, center: f64, beta: f64, x: f64) -> f64 {
    0.5 * (eps1 + eps2) - 0.5 * (eps1 - eps2) * (beta * (x - center)).tanh()
}

/// Tanh step, optionally followed by a mirrored step back to `eps1` so the profile is periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TanhProfile {
    pub eps1: f64,
    pub eps2: f64,
    pub center: f64,
    pub beta: f64,
    /// Position of the mirrored transition; `None` gives the plain step.
    #[serde(default)]
    pub mirror_center: Option<f64>,
}

impl TanhProfile {
    pub fn new(eps1: f64, eps2: f64, center: f64, beta: f64) -> Result<Self, AssemblyError> {
        let p = TanhProfile { eps1, eps2, center, beta, mirror_center: None };
        p.validate()?;
        Ok(p)
    }

    /// Mirrored transition at `fraction` of the domain `[origin, origin + length]`.
    pub fn periodic(mut self, origin: f64, length: f64, fraction: f64) -> Self {
        self.mirror_center = Some(origin + fraction * length);
        self
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(AssemblyError::InvalidMedium("permittivities must be positive".into()));
        }
        if !(self.beta > 0.0) {
            return Err(AssemblyError::InvalidMedium("beta must be positive".into()));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.mirror_center {
            None => tanh_permittivity(self.eps1, self.eps2, self.center, self.beta, x),
            Some(xm) => {
                let up = 0.5 * (1.0 + (self.beta * (x - self.center)).tanh());
                let down = 0.5 * (1.0 + (self.beta * (x - xm)).tanh());
                self.eps1 + (self.eps2 - self.eps1) * (up - down)
            }
        }
    }

    /// Samples `ε` on the grid points of a 1-D grid with constant `μ`.
    pub fn sample(&self, grid: &GridSpec, mu: f64) -> Result<MediumParams, AssemblyError> {
        self.validate()?;
        let eps: Vec<f64> = (0..grid.points())
            .map(|idx| self.eval(grid.coord(grid.unflatten(idx), [0.0; 3])[0]))
            .collect();
        MediumParams::sampled(eps, vec![mu])
    }
}
