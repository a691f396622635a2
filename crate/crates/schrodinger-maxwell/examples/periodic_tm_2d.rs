//! TM plane wave on the periodic square, spectral and Yee.
//!
//! `cargo run --release --example periodic_tm_2d [m]`

use schrodinger_maxwell::runner::{presets, run};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(16);
    for name in ["periodic-2d-tm", "periodic-2d-tm-yee"] {
        let mut cfg = presets::load(name)?;
        cfg.grid.m = m;
        let out = run(&cfg)?;
        let r = &out.report;
        println!("{name} (m = {m}, N = {})", cfg.pgrid.n);
        println!("  energy drift  {:.3e}", r.energy_drift);
        println!("  err_EB        {:.3e}", r.err_eb);
        if let (Some(f4), Some(f8)) = (r.gauss_f4, r.gauss_f8) {
            println!("  Gauss slots   {f4:.3e} {f8:.3e}");
        }
        if let Some(d) = r.div_b_drift {
            println!("  div B drift   {d:.3e}");
        }
    }
    Ok(())
}
