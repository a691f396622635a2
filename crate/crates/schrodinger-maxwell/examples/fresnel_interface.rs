//! Plane wave hitting a dielectric step; fitted amplitudes against Fresnel.
//!
//! `cargo run --release --example fresnel_interface [matched|contrast]`

use schrodinger_maxwell::runner::{presets, run};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = match std::env::args().nth(1).as_deref() {
        Some("contrast") => "interface-1d-contrast",
        _ => "interface-1d",
    };
    let out = run(&presets::load(name)?)?;
    let f = out.details.fresnel.expect("interface runs carry a Fresnel summary");
    println!("{name}");
    println!("  reflected    {:.4}  (Fresnel {:.4}, error {:.2e})", f.fit.reflected.norm(), f.expected_reflection, f.reflection_error);
    println!("  transmitted  {:.4}  (Fresnel {:.4}, error {:.2e})", f.fit.transmitted.norm(), f.expected_transmission, f.transmission_error);
    Ok(())
}
