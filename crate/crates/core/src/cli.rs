//! The `matchkern` command line.
//!
//! Every table is CSV with a fixed header, floats printed with 12
//! significant digits and partitions written dot-separated (`3.1.1`).
//! `MATCHKERN_THREADS` caps the worker pool used for kernel matrices.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fmt::g12;
use crate::kernel::{
    approximation_error_with, spectral_density_report, Kappa, Kernel, KernelConfig, Nu,
};
use crate::matching::{random_matchings, Matching};
use crate::oracle;
use crate::partition::{
    enumerate_partitions, select_truncation_with, Partition, TruncationHeuristic,
};
use crate::phylo::{
    check_embedding_locality, counterexample_prop6, counterexample_prop7, dh_decode, dh_encode,
    richman_embed, PhyloTree,
};
use crate::zsf::BackendKind;

#[derive(Debug, Parser)]
#[command(
    name = "matchkern",
    version,
    about = "Heat and Matérn kernels on perfect matchings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrix of a set of matchings.
    Kernel(KernelArgs),
    /// Zonal spherical function table for one partition.
    Zsf(ZsfArgs),
    /// Eigenvalues, dimensions and weights of the spectral terms.
    Spectrum(SpectrumArgs),
    /// Relative L2 truncation error against the number of terms.
    ApproxError(ApproxArgs),
    /// Wall-clock time and peak memory of Gram matrix computation.
    Bench(BenchArgs),
    /// Brute-force spectral checks for small n.
    Oracle(OracleArgs),
    /// Tree and matching conversions and checks.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Matching size.
    #[arg(long)]
    pub n: u32,
    /// Smoothness; "inf" selects the heat kernel.
    #[arg(long, default_value = "inf")]
    pub nu: Nu,
    /// Lengthscale or "auto".
    #[arg(long, default_value = "auto")]
    pub kappa: Kappa,
    /// Use the plain Matérn exponent ν instead of ν + n(n−1)/2.
    #[arg(long)]
    pub no_degree_correction: bool,
}

impl FilterArgs {
    fn config(&self) -> KernelConfig {
        KernelConfig::new(self.n)
            .nu(self.nu)
            .kappa(self.kappa)
            .degree_correction(!self.no_degree_correction)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Number of partitions kept (default min(30, p(n))).
    #[arg(long)]
    pub truncation_size: Option<usize>,
    #[arg(long, default_value = "max-part")]
    pub heuristic: TruncationHeuristic,
    #[arg(long, default_value = "zp")]
    pub backend: BackendKind,
    /// JSON file holding an array of matchings.
    #[arg(long, conflicts_with = "random")]
    pub input: Option<PathBuf>,
    /// Number of uniformly random matchings to draw.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ZsfArgs {
    #[arg(long)]
    pub n: u32,
    /// Partition such as 3,1 or 3.1.
    #[arg(long)]
    pub rho: Partition,
    #[arg(long, default_value = "zp")]
    pub backend: BackendKind,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Restrict to this many partitions (default: all of them).
    #[arg(long)]
    pub truncation_size: Option<usize>,
    #[arg(long, default_value = "max-part")]
    pub heuristic: TruncationHeuristic,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, default_value = "max-part")]
    pub heuristic: TruncationHeuristic,
    /// Largest truncation size reported.
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "5,6")]
    pub n_list: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "zp,explicit,avg")]
    pub backend_list: Vec<BackendKind>,
    #[arg(long, default_value_t = 100)]
    pub matrix_size: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the CSV table here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Debug, Subcommand)]
pub enum TreeAction {
    /// Newick tree to its Diaconis–Holmes matching (JSON).
    Encode(TreeInput),
    /// Matching (JSON) to its Diaconis–Holmes tree (Newick).
    Decode(MatchingInput),
    /// Newick tree to its Richman-style matching (JSON).
    Embed(TreeInput),
    /// Random NNI moves must move embedded matchings by at most two
    /// transpositions.
    NniCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Executable counterexamples showing the bijection distorts distances.
    Counterexample {
        #[arg(long, value_parser = ["6", "7"])]
        prop: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct TreeInput {
    /// Newick string, e.g. "((1,5),(2,(3,4)));".
    #[arg(long, conflicts_with = "input")]
    pub newick: Option<String>,
    /// File holding one Newick tree.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchingInput {
    /// JSON matching, e.g. "[[1,5],[2,3],[4,6],[7,8]]".
    #[arg(long, conflicts_with = "input")]
    pub matching: Option<String>,
    /// File holding one JSON matching.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn inline_or_file(inline: &Option<String>, file: &Option<PathBuf>, what: &str) -> Result<String> {
    match (inline, file) {
        (Some(s), _) => Ok(s.clone()),
        (None, Some(path)) => Ok(fs::read_to_string(path)?),
        (None, None) => Err(Error::InvalidArgument(format!("no {what} given"))),
    }
}

impl TreeInput {
    fn tree(&self) -> Result<PhyloTree> {
        inline_or_file(&self.newick, &self.input, "tree")?
            .trim()
            .parse()
    }
}

impl MatchingInput {
    fn matching(&self) -> Result<Matching> {
        Ok(serde_json::from_str(&inline_or_file(
            &self.matching,
            &self.input,
            "matching",
        )?)?)
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

/// Parses arguments and runs one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() {
    if let Some(threads) = std::env::var("MATCHKERN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
    {
        // A second initialization (e.g. in tests) is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

/// Runs a parsed command; `Ok(false)` means a requested check failed.
pub fn execute(command: &Command) -> Result<bool> {
    match command {
        Command::Kernel(args) => cmd_kernel(args).map(|_| true),
        Command::Zsf(args) => cmd_zsf(args).map(|_| true),
        Command::Spectrum(args) => cmd_spectrum(args).map(|_| true),
        Command::ApproxError(args) => cmd_approx_error(args).map(|_| true),
        Command::Bench(args) => cmd_bench(args).map(|_| true),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Tree { action } => cmd_tree(action),
    }
}

fn cmd_kernel(args: &KernelArgs) -> Result<()> {
    let n = args.filter.n;
    let xs: Vec<Matching> = match (&args.input, args.random) {
        (Some(path), _) => serde_json::from_str(&fs::read_to_string(path)?)?,
        (None, Some(count)) => random_matchings(n as usize, count, args.seed),
        (None, None) => {
            return Err(Error::InvalidArgument(
                "give --input FILE or --random COUNT".into(),
            ))
        }
    };
    let mut config = args
        .filter
        .config()
        .heuristic(args.heuristic)
        .backend(args.backend);
    config.truncation_size = args.truncation_size;
    let kernel = Kernel::new(config)?;
    let matrix = kernel.matrix(&xs)?;
    let rhos: Vec<Partition> = kernel.terms().iter().map(|t| t.rho.clone()).collect();
    let error = approximation_error_with(n, kernel.filter(), &rhos);
    eprintln!(
        "n={n} nu={} kappa={} terms={} degree_correction={} backend={} predicted_error={}",
        kernel.filter().nu,
        g12(kernel.filter().kappa),
        rhos.len(),
        kernel.filter().degree_correction,
        args.backend,
        g12(error)
    );
    let mut out = sink(&args.output)?;
    match args.format {
        Format::Csv => {
            let header: Vec<String> = (0..xs.len()).map(|j| j.to_string()).collect();
            writeln!(out, "index,{}", header.join(","))?;
            for i in 0..xs.len() {
                let row: Vec<String> = (0..xs.len()).map(|j| g12(matrix[(i, j)])).collect();
                writeln!(out, "{i},{}", row.join(","))?;
            }
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> = (0..xs.len())
                .map(|i| (0..xs.len()).map(|j| matrix[(i, j)]).collect())
                .collect();
            let doc = json!({
                "n": n,
                "kappa": kernel.filter().kappa,
                "terms": rhos.len(),
                "matchings": xs,
                "matrix": rows,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_zsf(args: &ZsfArgs) -> Result<()> {
    if args.rho.size() != args.n {
        return Err(Error::PartitionSizeMismatch {
            left: args.rho.size(),
            right: args.n,
        });
    }
    let backend = args.backend.build();
    let table = backend.table(&args.rho)?;
    let mut out = sink(&args.output)?;
    writeln!(out, "mu,fraction,value")?;
    for (mu, v) in table.iter().rev() {
        writeln!(
            out,
            "{},{},{}",
            mu.dotted(),
            v,
            g12(v.to_f64().unwrap_or(f64::NAN))
        )?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let n = args.filter.n;
    let rhos = match args.truncation_size {
        Some(size) => select_truncation_with(n, size, args.heuristic)?,
        None => enumerate_partitions(n),
    };
    let config = args.filter.config().truncation(rhos);
    let terms = crate::kernel::spectral_terms(&config)?;
    let density: std::collections::HashMap<Partition, f64> = spectral_density_report(
        n,
        args.filter.nu,
        args.filter.kappa,
        !args.filter.no_degree_correction,
    )?
    .into_iter()
    .map(|row| (row.rho, row.log_density))
    .collect();
    let mut out = sink(&args.output)?;
    writeln!(
        out,
        "rho,eigenvalue,dimension,weight,relative_weight,log_density"
    )?;
    for t in terms {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.rho.dotted(),
            t.eigenvalue,
            t.dim,
            g12(t.weight),
            g12(t.relative_weight),
            g12(density[&t.rho])
        )?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_approx_error(args: &ApproxArgs) -> Result<()> {
    let n = args.filter.n;
    let filter = args.filter.config().resolved_filter()?;
    let total = enumerate_partitions(n).len();
    let max = args.max_terms.unwrap_or(total).min(total);
    let order = select_truncation_with(n, max, args.heuristic)?;
    let mut out = sink(&args.output)?;
    writeln!(out, "terms,relative_error")?;
    for k in 1..=max {
        writeln!(
            out,
            "{k},{}",
            g12(approximation_error_with(n, &filter, &order[..k]))
        )?;
    }
    out.flush()?;
    Ok(())
}

/// One `(n, backend)` cell of the benchmark.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BenchRow {
    pub n: u32,
    pub backend: BackendKind,
    /// Seconds per trial; empty when skipped.
    pub seconds: Vec<f64>,
    /// Peak resident set size in KiB over the trials, if measurable.
    pub peak_rss_kib: Option<u64>,
    pub skipped: bool,
}

impl BenchRow {
    pub fn mean(&self) -> f64 {
        self.seconds.iter().sum::<f64>() / self.seconds.len().max(1) as f64
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let k = self.seconds.len();
        if k < 2 {
            return 0.0;
        }
        (self.seconds.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    }
}

/// Peak resident set size of this process in KiB (Linux only).
pub fn peak_rss_kib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn reset_peak_rss() {
    let _ = fs::write("/proc/self/clear_refs", "5");
}

/// Times Gram matrix computation (kernel construction included) with a cold
/// backend per trial. Backends are skipped above their size guards.
pub fn bench(
    n_list: &[u32],
    backends: &[BackendKind],
    matrix_size: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let xs = random_matchings(n as usize, matrix_size, seed);
        for &backend in backends {
            let skipped = backend
                .default_limit()
                .is_some_and(|limit| n as usize > limit);
            let mut row = BenchRow {
                n,
                backend,
                seconds: Vec::new(),
                peak_rss_kib: None,
                skipped,
            };
            if !skipped {
                for _ in 0..trials {
                    reset_peak_rss();
                    let start = Instant::now();
                    let kernel = Kernel::new(KernelConfig::new(n).backend(backend))?;
                    let matrix = kernel.matrix(&xs)?;
                    std::hint::black_box(&matrix);
                    row.seconds.push(start.elapsed().as_secs_f64());
                    row.peak_rss_kib = row.peak_rss_kib.max(peak_rss_kib());
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let rows = bench(
        &args.n_list,
        &args.backend_list,
        args.matrix_size,
        args.trials,
        args.seed,
    )?;
    let mut csv = String::from("n,backend,trials,mean_seconds,std_seconds,peak_rss_kib,status\n");
    println!(
        "{:>4}  {:<9} {:>24}  {:>12}",
        "n", "backend", "seconds", "peak MiB"
    );
    for r in &rows {
        if r.skipped {
            println!(
                "{:>4}  {:<9} {:>24}  {:>12}",
                r.n,
                r.backend.to_string(),
                "—",
                "—"
            );
            csv += &format!("{},{},0,,,,skipped\n", r.n, r.backend);
            continue;
        }
        let mem = r.peak_rss_kib.map(|k| format!("{:.1}", k as f64 / 1024.0));
        println!(
            "{:>4}  {:<9} {:>24}  {:>12}",
            r.n,
            r.backend.to_string(),
            format!("{:.4} ± {:.4}", r.mean(), r.std_dev()),
            mem.as_deref().unwrap_or("n/a")
        );
        csv += &format!(
            "{},{},{},{},{},{},ok\n",
            r.n,
            r.backend,
            r.seconds.len(),
            g12(r.mean()),
            g12(r.std_dev()),
            r.peak_rss_kib.map(|k| k.to_string()).unwrap_or_default()
        );
    }
    println!();
    print!("{csv}");
    if let Some(path) = &args.output {
        fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<bool> {
    let n = args.filter.n as usize;
    let filter = args.filter.config().resolved_filter()?;
    let report = oracle::run_all(n, &filter)?;
    for check in &report.checks {
        println!(
            "{} {}: deviation {} (tolerance {})",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            g12(check.deviation),
            g12(check.tolerance)
        );
    }
    Ok(report.passed())
}

fn cmd_tree(action: &TreeAction) -> Result<bool> {
    match action {
        TreeAction::Encode(input) => {
            println!("{}", serde_json::to_string(&dh_encode(&input.tree()?)?)?);
            Ok(true)
        }
        TreeAction::Decode(input) => {
            println!("{}", dh_decode(&input.matching()?)?);
            Ok(true)
        }
        TreeAction::Embed(input) => {
            println!(
                "{}",
                serde_json::to_string(&richman_embed(&input.tree()?)?)?
            );
            Ok(true)
        }
        TreeAction::NniCheck {
            trials,
            max_n,
            seed,
        } => {
            if *max_n < 2 {
                return Err(Error::InvalidArgument("--max-n must be at least 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let check = check_embedding_locality(*trials, *max_n, &mut rng)?;
            let ok = check.failures == 0;
            println!(
                "{} embedding locality: {} trials, {} failures, at most {} pairs changed",
                if ok { "PASS" } else { "FAIL" },
                check.trials,
                check.failures,
                check.max_changed_pairs
            );
            Ok(ok)
        }
        TreeAction::Counterexample { prop, n } => {
            if prop == "6" {
                let w = counterexample_prop6(*n)?;
                println!("left:  {}", w.left);
                println!("right: {}", w.right);
                println!("x: {}", serde_json::to_string(&w.x)?);
                println!("y: {}", serde_json::to_string(&w.y)?);
                println!("nni adjacent: {}", w.nni_adjacent);
                let kind = if w.distance.is_exact() {
                    "exact"
                } else {
                    "lower bound"
                };
                println!("quotient distance ({kind}): {}", w.distance.value());
                println!(
                    "{} distance >= (n-1)/2 = {}",
                    if w.holds() { "PASS" } else { "FAIL" },
                    w.required
                );
                Ok(w.holds())
            } else {
                let w = counterexample_prop7(*n)?;
                println!("x1: {}", serde_json::to_string(&w.x1)?);
                println!("x2: {}", serde_json::to_string(&w.x2)?);
                println!(
                    "transposition: ({} {})",
                    w.transposition[0], w.transposition[1]
                );
                println!("t1: {} (height {})", w.t1, w.height1);
                println!("t2: {} (height {})", w.t2, w.height2);
                println!(
                    "{} height gap {} >= n/2 - 2 = {}",
                    if w.holds() { "PASS" } else { "FAIL" },
                    w.gap(),
                    w.required
                );
                Ok(w.holds())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_kernel_flags() {
        let cli = Cli::try_parse_from([
            "matchkern",
            "kernel",
            "--n",
            "6",
            "--nu",
            "2.5",
            "--kappa",
            "auto",
            "--backend",
            "explicit",
            "--random",
            "10",
            "--seed",
            "7",
            "--no-degree-correction",
            "--format",
            "json",
            "--heuristic",
            "length",
        ])
        .unwrap();
        let Command::Kernel(args) = cli.command else {
            panic!("expected kernel command");
        };
        assert_eq!(args.filter.nu, Nu::Finite(2.5));
        assert_eq!(args.backend, BackendKind::Explicit);
        assert_eq!(args.heuristic, TruncationHeuristic::Length);
        assert!(args.filter.no_degree_correction);
    }

    #[test]
    fn bad_flags_fail() {
        assert_ne!(
            run([
                "matchkern",
                "kernel",
                "--n",
                "2",
                "--nu=-3",
                "--random",
                "2"
            ]),
            0
        );
        assert_ne!(run(["matchkern", "zsf", "--n", "3", "--rho", "2,1,1"]), 0);
        assert_ne!(run(["matchkern", "nonsense"]), 0);
    }
}
