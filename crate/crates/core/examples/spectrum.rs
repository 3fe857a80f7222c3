//! Eigenvalues, dimensions and weights of the spectral terms, plus how the
//! truncated mass is spread over eigenvalues with and without the degree
//! correction.

use matchkern::kernel::{spectral_density_report, spectral_terms, Kappa, KernelConfig, Nu};

fn main() -> matchkern::Result<()> {
    let n = 10;
    let config = KernelConfig::new(n).nu(Nu::Finite(2.5));
    println!(
        "{:<16} {:>8} {:>14} {:>12}",
        "rho", "lambda", "dim", "rel. weight"
    );
    for t in spectral_terms(&config)?.iter().take(12) {
        println!(
            "{:<16} {:>8} {:>14} {:>12.4e}",
            t.rho.to_string(),
            t.eigenvalue.to_string(),
            t.dim.to_string(),
            t.relative_weight
        );
    }

    for dc in [true, false] {
        let rows = spectral_density_report(15, Nu::Finite(2.5), Kappa::Auto, dc)?;
        let peak = rows
            .iter()
            .max_by(|a, b| a.log_density.total_cmp(&b.log_density))
            .expect("non-empty");
        println!(
            "n = 15, degree correction {dc}: density peaks at rho = {} (lambda = {})",
            peak.rho, peak.eigenvalue
        );
    }
    Ok(())
}
