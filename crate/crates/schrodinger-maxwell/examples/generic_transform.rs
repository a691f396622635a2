//! The transform on a plain ODE: u' = −u + 1, whose solution is 1 + (u0 − 1)e^{−t}.

use schrodinger_maxwell::evolution::evolve_exact;
use schrodinger_maxwell::linalg::{r, ComplexMatrix};
use schrodinger_maxwell::schrodinger::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = 1.0;
    let u0 = 3.0;
    let exact = 1.0 + (u0 - 1.0) * (-t as f64).exp();
    let sys = LinearSystem::new(ComplexMatrix::from_real_rows(&[vec![-1.0]]), vec![r(1.0)], vec![r(u0)])?;
    let h = homogenize_scaled(&sys, auto_aux_scale(&sys, t));
    println!("{:>6} {:>14} {:>10}", "N", "u(1)", "error");
    for n in [16, 32, 64, 128, 256, 512] {
        let pg = PGrid::symmetric(10.0, n)?;
        let s = build(&h, &pg)?;
        let w = evolve_exact(&s, &initial_extension(&h.u0, &pg), t)?;
        let u = recover(&w, &pg, &RecoverySpec::pointwise(default_p_star(&s, t)))?;
        println!("{n:>6} {:>14.10} {:>10.2e}", u[0].re, (u[0].re - exact).abs());
    }
    println!("exact  {exact:>14.10}");
    Ok(())
}
