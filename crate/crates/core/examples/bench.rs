//! Times a 100 × 100 Gram matrix for each backend; slow backends are skipped
//! above their size limits.

use matchkern::cli::{bench, peak_rss_kib};
use matchkern::zsf::BackendKind;

fn main() -> matchkern::Result<()> {
    let rows = bench(&[4, 5, 6, 8, 10], &BackendKind::ALL, 100, 3, 0)?;
    for r in rows {
        if r.skipped {
            println!("n={:<3} {:<9} —", r.n, r.backend);
        } else {
            println!(
                "n={:<3} {:<9} {:.4}s ± {:.4}s",
                r.n,
                r.backend,
                r.mean(),
                r.std_dev()
            );
        }
    }
    if let Some(kib) = peak_rss_kib() {
        println!("peak resident set: {:.1} MiB", kib as f64 / 1024.0);
    }
    Ok(())
}
