//! The three zonal spherical function backends side by side.

use matchkern::partition::enumerate_partitions;
use matchkern::zsf::BackendKind;
use num::ToPrimitive;

fn main() -> matchkern::Result<()> {
    let n: u32 = std::env::args().nth(1).map_or(4, |a| a.parse().expect("n"));
    let backends: Vec<_> = BackendKind::ALL.iter().map(|k| (k, k.build())).collect();
    let mus = enumerate_partitions(n);

    for rho in enumerate_partitions(n) {
        println!("rho = {rho}");
        let tables = backends
            .iter()
            .map(|(_, b)| b.table(&rho))
            .collect::<matchkern::Result<Vec<_>>>()?;
        for mu in &mus {
            let v = &tables[0][mu];
            let agree = tables.iter().all(|t| &t[mu] == v);
            println!(
                "  mu = {:<14} {:>10} {:>10.6} {}",
                mu.to_string(),
                v.to_string(),
                v.to_f64().unwrap_or(f64::NAN),
                if agree { "" } else { "(backends disagree)" }
            );
        }
    }
    Ok(())
}
