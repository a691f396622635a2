//! Conducting walls in 1-D: upwind characteristic scheme against Yee under refinement.

use schrodinger_maxwell::runner::study::{convergence, SweepAxis};
use schrodinger_maxwell::runner::{presets, Scheme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = presets::load("pec-1d")?;
    let table = convergence(&base, &[Scheme::UpwindChar, Scheme::Yee1d], &[32, 64, 128], SweepAxis::Space, None)?;
    print!("{}", table.render());
    Ok(())
}
