//! Schrödingerisation of Maxwell's equations, emulated classically.
//!
//! A discretization ([`maxwell`]) produces a [`schrodinger::LinearSystem`];
//! [`schrodinger`] turns it into a family of Hermitian p-mode Hamiltonians,
//! [`evolution`] evolves them and [`diagnostics`] measures the result.

pub mod diagnostics;
pub mod evolution;
pub mod linalg;
pub mod maxwell;
pub mod runner;
pub mod schrodinger;
