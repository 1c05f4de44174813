//! `bench`: isolates solver wall time across problem sizes.
//!
//! For each size the command draws a standard-normal signal matrix,
//! performs all data preparation (pairwise costs, candidate sets)
//! *outside* the timed region, and times a fixed number of solver
//! iterations, repeated `reps` times with the minimum reported. Sizes
//! run sequentially so one measurement never steals cycles from another.
//! Fixed iteration counts make per-iteration cost comparable across
//! sizes regardless of convergence behavior.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use signet::datagen::derive_seed;
use signet::solver::fast::{
    build_candidates, candidate_costs, solve_fast_from_costs, BruteForceNeighbors,
};
use signet::solver::{compute_k, solve_from_costs, StopRule};

use crate::config::{self, SolverConfig, PURPOSE_BENCH_DATA};
use crate::manifest::{atomic_write, digest_comment, ensure_dir, write_manifest};
use crate::tables::BENCH_HEADER;
use crate::Failure;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Config with a [bench] table (TOML)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,

    /// Output directory (overrides the config's output_dir)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Root seed (overrides the config's root_seed)
    #[arg(long)]
    root_seed: Option<u64>,
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    let cfg = config::load(&args.config)?;
    let bench = config::resolve_bench(&cfg)?;
    let settings = config::resolve_solver(cfg.solver.as_ref(), &SolverConfig::default())?;
    // No truth graph exists here, so a density-derived k is unavailable.
    let k = settings.concrete_k("bench")?;
    let root_seed = config::require_root_seed(&cfg, args.root_seed)?;
    let out = config::require_output_dir(Some(&cfg), args.out.clone())?;

    let manifest = serde_json::json!({
        "tool": "signet-cli",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "bench",
        "root_seed": root_seed,
        "solver": settings.manifest(),
        "bench": {
            "sizes": bench.sizes,
            "iterations": bench.iterations,
            "reps": bench.reps,
            "columns": bench.columns,
        },
        "data_seeds": bench
            .sizes
            .iter()
            .map(|&n| {
                serde_json::json!({
                    "n": n,
                    "seed": derive_seed(root_seed, PURPOSE_BENCH_DATA, n as u64),
                })
            })
            .collect::<Vec<_>>(),
    });
    ensure_dir(&out)?;
    let digest = write_manifest(&out, &manifest)?;

    let mut csv = String::new();
    csv.push_str(&format!("# {}\n", digest_comment(&digest)));
    csv.push_str("# total_seconds: minimum over reps of one timed solve; varies run to run\n");
    csv.push_str(&format!(
        "# timed region: {} solver iterations, data preparation excluded\n",
        bench.iterations
    ));
    csv.push_str(BENCH_HEADER);
    csv.push('\n');

    for &n in &bench.sizes {
        let seed = derive_seed(root_seed, PURPOSE_BENCH_DATA, n as u64);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x: Array2<f64> =
            Array2::from_shape_fn((n, bench.columns), |_| StandardNormal.sample(&mut rng));
        let stop = StopRule::FixedIterations(bench.iterations);

        // Everything size-dependent but iteration-independent happens
        // before the clock starts.
        let mut total = f64::INFINITY;
        match k {
            None => {
                let costs = compute_k(&x).map_err(Failure::from_core)?;
                for _ in 0..bench.reps {
                    let start = Instant::now();
                    solve_from_costs(&costs, &settings.admm, stop, None)
                        .map_err(Failure::from_core)?;
                    total = total.min(start.elapsed().as_secs_f64());
                }
            }
            Some(k) => {
                let provider = BruteForceNeighbors::new(&x).map_err(Failure::from_core)?;
                let candidates = build_candidates(&provider, k).map_err(Failure::from_core)?;
                let costs = candidate_costs(&x, &candidates).map_err(Failure::from_core)?;
                for _ in 0..bench.reps {
                    let start = Instant::now();
                    solve_fast_from_costs(&candidates, &costs, &settings.admm, stop, None)
                        .map_err(Failure::from_core)?;
                    total = total.min(start.elapsed().as_secs_f64());
                }
            }
        }
        let per_iteration = total / bench.iterations as f64;
        csv.push_str(&format!(
            "{n},{},{},{},{},{},{total},{per_iteration}\n",
            settings.label(),
            k.map(|k| k.to_string()).unwrap_or_default(),
            bench.iterations,
            bench.reps,
            bench.columns,
        ));
        eprintln!(
            "n={n}: {:.3} ms/iteration ({} iterations, best of {})",
            per_iteration * 1e3,
            bench.iterations,
            bench.reps
        );
    }

    let csv_path = out.join("bench.csv");
    atomic_write(&csv_path, csv.as_bytes())?;
    println!("wrote {}", csv_path.display());
    Ok(())
}
