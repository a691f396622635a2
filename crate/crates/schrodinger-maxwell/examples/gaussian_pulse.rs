//! Gaussian pulse through a smooth permittivity ramp, checked against direct RK4.

use schrodinger_maxwell::runner::{presets, run};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = presets::load("gaussian-pulse-inhomogeneous")?;
    cfg.reference = true;
    let out = run(&cfg)?;
    println!("energy drift   {:.3e}", out.report.energy_drift);
    println!("gap to RK4     {:.3e}", out.details.reference_gap.unwrap_or(f64::NAN));
    if let Some(last) = out.frames.last() {
        let peak = last
            .rows
            .iter()
            .filter(|r| r.component == "E_y")
            .max_by(|a, b| a.value.norm().total_cmp(&b.value.norm()))
            .map(|r| (r.coord[0], r.value.re));
        if let Some((x, e)) = peak {
            println!("peak E_y at t = {}: {e:.4} at x = {x:.3}", last.t);
        }
    }
    Ok(())
}
