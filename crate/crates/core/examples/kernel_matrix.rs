//! Gram matrix of random matchings under a heat and a Matérn kernel.
//!
//! ```bash
//! cargo run --release --example kernel_matrix -- 8 6
//! ```

use matchkern::kernel::{Kernel, KernelConfig, Nu};
use matchkern::matching::random_matchings;

fn main() -> matchkern::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(6);
    let count = args.next().unwrap_or(5);
    let xs = random_matchings(n, count, 2024);

    for nu in [Nu::Inf, Nu::Finite(2.5)] {
        let kernel = Kernel::new(KernelConfig::new(n as u32).nu(nu))?;
        println!(
            "nu = {nu}, kappa = {:.4}, {} terms",
            kernel.filter().kappa,
            kernel.terms().len()
        );
        let gram = kernel.matrix(&xs)?;
        for i in 0..count {
            let row: Vec<String> = (0..count)
                .map(|j| format!("{:8.5}", gram[(i, j)]))
                .collect();
            println!("  {}", row.join(" "));
        }
    }
    for x in &xs {
        println!("{x}");
    }
    Ok(())
}
