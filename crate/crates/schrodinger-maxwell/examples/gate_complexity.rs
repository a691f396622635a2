//! Gate-count estimates for the spectral and Yee circuits.

use schrodinger_maxwell::diagnostics::{lemma_gates, lemma_queries, spectral_gate_count, yee_gate_count};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>4} {:>14} {:>14} {:>14}", "M", "m", "spectral", "Yee", "difference");
    for big_m in [16.0, 256.0, 4096.0] {
        for m in [4.0, 16.0, 64.0] {
            let s = spectral_gate_count(big_m, m, 2)?;
            let y = yee_gate_count(big_m, m, 2)?;
            println!("{big_m:>8} {m:>4} {s:>14.4e} {y:>14.4e} {:>14.4e}", s - y);
        }
    }
    println!();
    println!("{:>8} {:>8} {:>14} {:>14}", "tau", "delta", "queries", "gates (m_H=12)");
    for tau in [10.0, 100.0, 1000.0] {
        for delta in [1e-2, 1e-4, 1e-8] {
            println!("{tau:>8} {delta:>8.0e} {:>14.4e} {:>14.4e}", lemma_queries(tau, delta)?, lemma_gates(tau, delta, 12)?);
        }
    }
    Ok(())
}
