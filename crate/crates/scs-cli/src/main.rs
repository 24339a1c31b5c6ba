//! Experiment driver for the scs toolkit.
//!
//! `bench` sweeps the solver variants over the nonsmooth test problems,
//! `ct` runs the simulated reconstruction study, `profile` rebuilds
//! performance profiles from either aggregate results CSV, and `recon`
//! reconstructs a single scenario to an image file. Studies are configured
//! by a plain `[section] key = value` file layered over built-in defaults;
//! the effective config is echoed into the output directory.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, config, or
//! input schema), 3 for runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scs::ct::{self, io as ct_io, metrics, phantom, projector, CtObjective, Geometry, Image};
use scs::oracle::CountingOracle;
use scs::profiles::ProfileMetric;
use scs::solver::{solve, ScsConfig};
use scs::study::{self, BenchConfig, CtConfig, RawConfig, SolverId, StudyError};

#[derive(Parser)]
#[command(name = "scs", version, about = "Spectral conjugate subgradient experiment runner")]
struct Cli {
    /// Cap the worker thread count (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark sweep over the nonsmooth test problems.
    Bench(BenchArgs),
    /// CT reconstruction sweep over simulated scenarios.
    Ct(CtArgs),
    /// Rebuild a performance profile from an aggregate results CSV.
    Profile(ProfileArgs),
    /// Reconstruct a single scenario and write the image.
    Recon(ReconArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Config file with a [bench] section; defaults run the full sweep.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for results and profiles.
    #[arg(long, default_value = "bench_out")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// 64x64 images, minutes of compute.
    Desk,
    /// 400x400 images, the full protocol; hours of compute.
    Full,
}

#[derive(Args)]
struct CtArgs {
    /// Config file with a [ct] section, layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Baseline the config starts from.
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    /// Output directory for results, images, and profiles.
    #[arg(long, default_value = "ct_out")]
    out: PathBuf,
    /// Base seed for phantom and noise generation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Aggregate results CSV written by `bench` or `ct`.
    results: PathBuf,
    /// Performance measure: error, evals, cpu, or fmin.
    #[arg(long, default_value = "error")]
    metric: String,
    /// Directory for the profile CSV and SVG.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ReconArgs {
    /// Phantom id: shepplogan, threephases, or grains.
    #[arg(long, default_value = "shepplogan")]
    phantom: String,
    /// Image side length.
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Number of projection angles over half a turn.
    #[arg(long, default_value_t = 90)]
    views: usize,
    /// Detector bins per view (default: wide enough for the diagonal).
    #[arg(long)]
    n_det: Option<usize>,
    /// Relative Gaussian noise level on the data.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Total-variation regularization weight.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Solver variant code, e.g. nm_b2 or w_b0.
    #[arg(long, default_value = "nm_b2")]
    solver: String,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Seed for phantom and noise generation.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output image path (16-bit PGM plus a range sidecar).
    #[arg(long, default_value = "recon.pgm")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        init_threads(threads);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

#[cfg(feature = "parallel")]
fn init_threads(threads: usize) {
    // Only fails if a global pool already exists, which cannot happen this
    // early; the default pool is fine in that case anyway.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

#[cfg(not(feature = "parallel"))]
fn init_threads(_threads: usize) {}

fn run(command: Command) -> Result<(), StudyError> {
    match command {
        Command::Bench(args) => {
            let mut cfg = BenchConfig::default();
            if let Some(path) = &args.config {
                cfg.apply_config(RawConfig::load(path)?)?;
            }
            let n = study::run_bench(&cfg, &args.out)?;
            println!("bench study: {n} runs -> {}", args.out.display());
            Ok(())
        }
        Command::Ct(args) => {
            let mut cfg = match args.preset {
                Preset::Desk => CtConfig::desk(),
                Preset::Full => CtConfig::full_scale(),
            };
            if let Some(path) = &args.config {
                cfg.apply_config(RawConfig::load(path)?)?;
            }
            if let Some(seed) = args.seed {
                cfg.base_seed = seed;
            }
            let n = study::run_ct(&cfg, &args.out)?;
            println!("ct study: {n} runs -> {}", args.out.display());
            Ok(())
        }
        Command::Profile(args) => {
            let metric = ProfileMetric::from_code(&args.metric).ok_or_else(|| {
                StudyError::Usage(format!(
                    "unknown metric `{}` (expected error, evals, cpu, or fmin)",
                    args.metric
                ))
            })?;
            study::make_profiles(&args.results, metric, &args.out)?;
            println!("profile_{}.csv/.svg -> {}", metric.code(), args.out.display());
            Ok(())
        }
        Command::Recon(args) => recon(args),
    }
}

fn recon(args: ReconArgs) -> Result<(), StudyError> {
    if args.n < 16 {
        return Err(StudyError::Usage(format!(
            "image side {} too small for the scan geometry (needs n >= 16)",
            args.n
        )));
    }
    if args.views == 0 {
        return Err(StudyError::Usage("views must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&args.noise) {
        return Err(StudyError::Usage(format!("noise level {} outside [0, 1]", args.noise)));
    }
    if !(args.mu >= 0.0) {
        return Err(StudyError::Usage("regularization weight must be nonnegative".into()));
    }
    let solver = SolverId::parse(&args.solver)
        .ok_or_else(|| StudyError::Usage(format!("unknown solver id `{}`", args.solver)))?;
    let truth = phantom::by_name(&args.phantom, args.n, args.seed)
        .ok_or_else(|| StudyError::Usage(format!("unknown phantom id `{}`", args.phantom)))?;

    let n_det = args.n_det.unwrap_or_else(|| ct::default_detector_count(args.n));
    let geom = Geometry::new(args.n, args.views, n_det);
    let clean = projector::forward_project(&truth, &geom);
    let b = ct::add_gaussian_noise(&clean, args.noise, args.seed);
    let oracle = CountingOracle::new(CtObjective::new(geom, b, args.mu));
    let cfg = ScsConfig {
        beta: solver.beta,
        line_search: solver.line_search,
        max_iter: args.iterations,
        grad_norm_stop: 1e-10,
        box_constrain: true,
        ..ScsConfig::default()
    };
    let result = solve(&oracle, &vec![0.0; args.n * args.n], &cfg);
    let recon = Image::from_vec(args.n, result.x_best.clone());
    ct_io::write_pgm(&args.out, &recon)
        .map_err(|e| StudyError::Runtime(format!("cannot write `{}`: {e}", args.out.display())))?;
    println!(
        "{} {} {}: f_min {:.6e} in {} evaluations, psnr {:.2} dB, ssim {:.4} -> {}",
        args.phantom,
        solver.code(),
        if args.noise > 0.0 { format!("noise {}", args.noise) } else { "noiseless".into() },
        result.f_min,
        result.fevals,
        metrics::psnr(&recon, &truth),
        metrics::ssim(&recon, &truth),
        args.out.display()
    );
    Ok(())
}
