//! Brute-force checks of the closed-form kernel for small n.

use matchkern::kernel::{KernelConfig, Nu};
use matchkern::oracle::run_all;

fn main() -> matchkern::Result<()> {
    for n in 2..=4 {
        for nu in [Nu::Inf, Nu::Finite(1.5)] {
            let filter = KernelConfig::new(n).nu(nu).resolved_filter()?;
            let report = run_all(n as usize, &filter)?;
            for c in &report.checks {
                println!(
                    "n={n} nu={nu:<4} {} {:<32} {:.2e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.deviation
                );
            }
        }
    }
    Ok(())
}
