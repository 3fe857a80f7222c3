//! Relative truncation error against the number of retained partitions for
//! each selection heuristic.

use matchkern::kernel::{approximation_error_with, KernelConfig, Nu};
use matchkern::partition::{select_truncation_with, TruncationHeuristic};

fn main() -> matchkern::Result<()> {
    let n = 15;
    for nu in [Nu::Inf, Nu::Finite(2.5)] {
        let filter = KernelConfig::new(n).nu(nu).resolved_filter()?;
        println!("n = {n}, nu = {nu}, kappa = {:.5}", filter.kappa);
        for heuristic in [
            TruncationHeuristic::MaxPart,
            TruncationHeuristic::Length,
            TruncationHeuristic::MinPart,
        ] {
            let order = select_truncation_with(n, 60, heuristic)?;
            let errors: Vec<String> = [1, 5, 10, 20, 30, 45, 60]
                .iter()
                .map(|&k| {
                    format!(
                        "{k}:{:.1e}",
                        approximation_error_with(n, &filter, &order[..k])
                    )
                })
                .collect();
            println!("  {heuristic:<9} {}", errors.join("  "));
        }
    }
    Ok(())
}
