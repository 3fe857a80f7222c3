//! Acceptance suite. Runs each criterion in order, prints one PASS/FAIL line
//! per criterion and exits non-zero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use matchkern::cli::bench;
use matchkern::kernel::{approximation_error_with, Kappa, Kernel, KernelConfig, Nu};
use matchkern::matching::{
    act, all_matchings, generalized_distance, random_matchings, sphere_size, Matching, Permutation,
};
use matchkern::oracle::{quotient_graph, validate_spectral_identity};
use matchkern::partition::{enumerate_partitions, select_truncation, Partition};
use matchkern::phylo::{
    check_embedding_locality, counterexample_prop6, counterexample_prop7, dh_decode, dh_encode,
    enumerate_trees, PhyloTree,
};
use matchkern::zsf::{weighted_inner_product, BackendKind};
use nalgebra::SymmetricEigen;
use num::{BigInt, BigRational, BigUint, One};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `(2n − 1)!!` by direct product.
fn double_factorial_odd(n: u32) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * big(2 * k - 1))
}

/// Hook length formula computed from the Young diagram cell by cell.
fn hook_dimension(shape: &[u32]) -> BigUint {
    let m: u64 = shape.iter().map(|&p| p as u64).sum();
    let mut hooks = BigUint::one();
    for (i, &row) in shape.iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = shape[i + 1..].iter().filter(|&&r| r as usize > j).count();
            hooks *= big((arm + leg + 1) as u64);
        }
    }
    (1..=m).fold(BigUint::one(), |acc, k| acc * big(k)) / hooks
}

fn criterion_1() -> Outcome {
    for n in 1..=5u32 {
        let backends: Vec<_> = BackendKind::ALL.iter().map(|k| k.build()).collect();
        for rho in enumerate_partitions(n) {
            let tables: Vec<_> = backends
                .iter()
                .map(|b| b.table(&rho).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            ensure(tables[0].len() == enumerate_partitions(n).len(), || {
                format!("table for {rho} is incomplete")
            })?;
            for t in &tables[1..] {
                ensure(**t == *tables[0], || {
                    format!("backends disagree at n={n}, rho={rho}")
                })?;
            }
        }
    }
    let zp = BackendKind::Zp.build();
    let explicit = BackendKind::Explicit.build();
    let mut compared = 0;
    for rho in enumerate_partitions(6) {
        let a = zp.table(&rho).map_err(|e| e.to_string())?;
        let b = explicit.table(&rho).map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("zp and explicit disagree at n=6, rho={rho}")
        })?;
        compared += a.len();
    }
    Ok(format!(
        "n<=5 all backends identical; n=6 zp=explicit on {compared} (rho,mu) pairs"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2u32, 3] {
        for nu in [Nu::Inf, Nu::Finite(2.5), Nu::Finite(0.5)] {
            let filter = KernelConfig::new(n)
                .nu(nu)
                .resolved_filter()
                .map_err(|e| e.to_string())?;
            let check =
                validate_spectral_identity(n as usize, &filter).map_err(|e| e.to_string())?;
            worst = worst.max(check.deviation);
            ensure(check.deviation <= 1e-8, || {
                format!("n={n} nu={nu}: deviation {:e}", check.deviation)
            })?;
        }
    }
    Ok(format!("max abs difference {worst:.3e} <= 1e-8"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut total_pairs = 0;
    for n in [10u32, 15, 20] {
        let mut rhos = enumerate_partitions(n);
        rhos.shuffle(&mut rng);
        rhos.truncate(22);
        let backend = BackendKind::Zp.build();
        let tables: Vec<_> = rhos
            .iter()
            .map(|r| backend.table(r).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let size = BigRational::from_integer(BigInt::from(double_factorial_odd(n)));
        let mut pairs = 0;
        for i in 0..rhos.len() {
            for j in i..rhos.len() {
                let got = weighted_inner_product(&tables[i], &tables[j]);
                let want = if i == j {
                    let doubled: Vec<u32> = rhos[i].parts().iter().map(|p| 2 * p).collect();
                    &size / BigRational::from_integer(BigInt::from(hook_dimension(&doubled)))
                } else {
                    BigRational::from_integer(BigInt::from(0))
                };
                ensure(got == want, || {
                    format!("n={n}: <{}, {}> = {got}, expected {want}", rhos[i], rhos[j])
                })?;
                pairs += usize::from(i != j);
            }
        }
        ensure(pairs >= 200, || format!("only {pairs} pairs at n={n}"))?;
        total_pairs += pairs;
    }
    Ok(format!(
        "{total_pairs} distinct pairs exact over n=10,15,20 plus norms"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for n in [5u32, 10, 15] {
        let kernel = Kernel::new(KernelConfig::new(n)).map_err(|e| e.to_string())?;
        let xs = random_matchings(n as usize, 100, 40 + n as u64);
        let gram = kernel.matrix(&xs).map_err(|e| e.to_string())?;
        let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
        let max = eig.max();
        let min = eig.min();
        worst_ratio = worst_ratio.max(-min / max);
        ensure(min >= -1e-8 * max, || {
            format!("n={n}: min eigenvalue {min:e}, max {max:e}")
        })?;

        let sigma = Permutation::random(2 * n as usize, &mut rng);
        let moved: Vec<Matching> = xs.iter().map(|x| act(&sigma, x).unwrap()).collect();
        let relabeled = kernel.matrix(&moved).map_err(|e| e.to_string())?;
        let shift = (&gram - &relabeled).abs().max();
        worst_shift = worst_shift.max(shift);
        ensure(shift <= 1e-12, || {
            format!("n={n}: relabeling changed values by {shift:e}")
        })?;
    }
    Ok(format!(
        "min/max eigenvalue ratio >= {:.3e}; relabeling drift {worst_shift:.1e}",
        -worst_ratio
    ))
}

fn criterion_5() -> Outcome {
    let n = 15;
    let filter = KernelConfig::new(n)
        .nu(Nu::Inf)
        .kappa(Kappa::Auto)
        .resolved_filter()
        .map_err(|e| e.to_string())?;
    let order = select_truncation(n, 60).map_err(|e| e.to_string())?;
    let errors: Vec<f64> = (1..=60)
        .map(|k| approximation_error_with(n, &filter, &order[..k]))
        .collect();
    let at30 = errors[29];
    ensure((1e-4..=1e-2).contains(&at30), || {
        format!("error at |R|=30 is {at30:e}")
    })?;
    for k in 1..errors.len() {
        ensure(errors[k] <= errors[k - 1], || {
            format!(
                "error rises from {:e} to {:e} at |R|={}",
                errors[k - 1],
                errors[k],
                k + 1
            )
        })?;
    }
    Ok(format!(
        "error at |R|=30 is {at30:.3e}; non-increasing over |R|=1..60"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let kernel = Kernel::new(KernelConfig::new(10)).map_err(|e| e.to_string())?;
    let gram = kernel
        .matrix(&random_matchings(10, 100, 6))
        .map_err(|e| e.to_string())?;
    let n10 = start.elapsed();
    ensure(gram.nrows() == 100, || "wrong Gram size".into())?;
    ensure(n10 < Duration::from_secs(600), || {
        format!("n=10 took {n10:?}")
    })?;

    let rows = bench(&[6], &BackendKind::ALL, 100, 3, 6).map_err(|e| e.to_string())?;
    let mean: HashMap<BackendKind, f64> = rows.iter().map(|r| (r.backend, r.mean())).collect();
    let zp = mean[&BackendKind::Zp];
    for kind in [BackendKind::Explicit, BackendKind::Avg] {
        let ratio = mean[&kind] / zp;
        ensure(ratio >= 3.0, || {
            format!("n=6: {kind} only {ratio:.2}x slower than zp")
        })?;
    }
    Ok(format!(
        "n=10 in {:.2}s; n=6 speedup {:.1}x over explicit, {:.1}x over avg",
        n10.as_secs_f64(),
        mean[&BackendKind::Explicit] / zp,
        mean[&BackendKind::Avg] / zp
    ))
}

fn criterion_7() -> Outcome {
    for n in 1..=6usize {
        let (nodes, adjacency) = quotient_graph(n);
        let index: HashMap<&Matching, usize> =
            nodes.iter().enumerate().map(|(i, x)| (x, i)).collect();
        ensure(nodes.len() == index.len(), || "duplicate vertices".into())?;
        for (i, nb) in adjacency.iter().enumerate() {
            ensure(nb.len() == n * (n - 1), || {
                format!("n={n}: vertex {} has degree {}", nodes[i], nb.len())
            })?;
            for &j in nb {
                ensure(adjacency[j].contains(&i), || {
                    "adjacency is not symmetric".into()
                })?;
                let d = generalized_distance(&nodes[i], &nodes[j]).map_err(|e| e.to_string())?;
                ensure(
                    d.parts().iter().filter(|&&p| p > 1).count() == 1 && d.first() == 2,
                    || format!("neighbors at distance {d}"),
                )?;
            }
        }
    }
    Ok("n(n-1)-regular and symmetric for n=1..6".into())
}

fn criterion_8() -> Outcome {
    let mut matchings = 0;
    for n in 1..=6 {
        for x in all_matchings(n) {
            let t = dh_decode(&x).map_err(|e| e.to_string())?;
            ensure(dh_encode(&t).map_err(|e| e.to_string())? == x, || {
                format!("roundtrip fails at {x}")
            })?;
            matchings += 1;
        }
    }
    let mut trees = 0;
    for leaves in 2..=7 {
        for t in enumerate_trees(leaves) {
            let x = dh_encode(&t).map_err(|e| e.to_string())?;
            ensure(dh_decode(&x).map_err(|e| e.to_string())? == t, || {
                format!("roundtrip fails at {t}")
            })?;
            trees += 1;
        }
    }
    let fig: PhyloTree = "(((1,5),4),(3,2));"
        .parse()
        .map_err(|e: matchkern::Error| e.to_string())?;
    let want = Matching::new(vec![[1, 5], [2, 3], [4, 6], [7, 8]]).map_err(|e| e.to_string())?;
    let got = dh_encode(&fig).map_err(|e| e.to_string())?;
    ensure(got == want, || format!("worked example encodes to {got}"))?;
    Ok(format!(
        "{matchings} matchings and {trees} trees roundtrip; worked example exact"
    ))
}

fn criterion_9() -> Outcome {
    let mut details = Vec::new();
    for n in [7usize, 8, 12] {
        let w = counterexample_prop6(n).map_err(|e| e.to_string())?;
        ensure(w.nni_adjacent, || {
            format!("n={n}: trees are not NNI-adjacent")
        })?;
        ensure(2 * w.distance.value() as usize >= n - 1, || {
            format!(
                "n={n}: quotient distance {} below (n-1)/2",
                w.distance.value()
            )
        })?;
        details.push(format!("d{}={}", n, w.distance.value()));
    }
    for n in [9usize, 10, 14] {
        let w = counterexample_prop7(n).map_err(|e| e.to_string())?;
        ensure(2 * w.gap() >= n as i64 - 4, || {
            format!("n={n}: height gap {} below n/2-2", w.gap())
        })?;
        details.push(format!("gap{}={}", n, w.gap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let check = check_embedding_locality(1000, 12, &mut rng).map_err(|e| e.to_string())?;
    ensure(check.failures == 0, || {
        format!("{} embedding failures", check.failures)
    })?;
    Ok(format!("{}; 1000 NNI moves local", details.join(" ")))
}

fn criterion_10() -> Outcome {
    for n in 1..=12u32 {
        let total: BigUint = enumerate_partitions(n).iter().map(sphere_size).sum();
        let mut want = BigUint::one();
        for k in 1..=2 * n as u64 {
            want *= big(k);
        }
        want /=
            (BigUint::one() << n as usize) * (1..=n as u64).fold(BigUint::one(), |a, k| a * big(k));
        ensure(total == want, || {
            format!("n={n}: sphere sizes sum to {total}, expected {want}")
        })?;
    }
    for n in 1..=6usize {
        let x0 = Matching::base_point(n);
        let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
        for y in all_matchings(n) {
            *counts
                .entry(generalized_distance(&x0, &y).map_err(|e| e.to_string())?)
                .or_default() += 1;
        }
        for mu in enumerate_partitions(n as u32) {
            let seen = big(counts.get(&mu).copied().unwrap_or(0));
            ensure(seen == sphere_size(&mu), || {
                format!("n={n}, mu={mu}: {seen} cells enumerated")
            })?;
        }
    }
    Ok("sphere sums exact for n<=12; cell counts match for n<=6".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("backend equivalence", criterion_1),
        ("spectral identity", criterion_2),
        ("orthogonality at scale", criterion_3),
        ("PSD and stationarity", criterion_4),
        ("approximation error", criterion_5),
        ("performance scaling", criterion_6),
        ("degree formula", criterion_7),
        ("tree encodings", criterion_8),
        ("negative results", criterion_9),
        ("sphere-size consistency", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS [{}] {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
