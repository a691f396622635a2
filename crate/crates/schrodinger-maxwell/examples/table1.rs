//! Both Table 1 rows next to the reference values.
//!
//! `cargo run --release --example table1 [m]`

use schrodinger_maxwell::runner::study::{table1, Table1Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = std::env::args().nth(1).map(|s| s.parse()).transpose()?;
    let table = table1(&Table1Overrides { m, ..Default::default() })?;
    print!("{}", table.render());
    Ok(())
}
