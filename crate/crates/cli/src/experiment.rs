//! `experiment`: sweeps every case of a config over a regularization
//! grid, `repeats` random draws per case, and aggregates the scores.
//!
//! The unit of work is one `(case, repeat)` cell: draw the truth graph
//! and signals from that cell's derived seeds, sweep the grid, score
//! every point against the truth. Cells run in a parallel pool; each
//! finished cell is written atomically to `cells/` and stamped with the
//! manifest digest, so an interrupted run resumes by reusing every cell
//! whose file matches the current manifest. Aggregation into
//! `experiment.csv` happens single-threaded after all cells are in.
//!
//! A solver failure in any grid point aborts the run (with the case and
//! repeat named) rather than polluting the aggregate with NaNs.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use signet::datagen::{gen_graph, gen_signals};
use signet::metrics::{grid_search, SolverChoice};
use signet::solver::fast::choose_k;

use crate::config::{self, Case, Mode, SolverConfig};
use crate::manifest::{atomic_write, digest_comment, ensure_dir, write_manifest};
use crate::tables::{
    opt_cell, parse_score_table, render_score_table, summarize, ScoreRow, EXPERIMENT_HEADER,
};
use crate::Failure;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config (TOML)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,

    /// Output directory (overrides the config's output_dir)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Root seed (overrides the config's root_seed)
    #[arg(long)]
    root_seed: Option<u64>,

    /// Repeats per case (overrides the config's repeats)
    #[arg(long)]
    repeats: Option<usize>,
}

fn cell_file(cells: &Path, case: usize, repeat: usize) -> PathBuf {
    cells.join(format!("scores_c{case:03}_r{repeat:03}.csv"))
}

/// Appends the `<metric>_mean,<metric>_ci95` cell pair for one column.
fn push_stat(row: &mut Vec<String>, rows: &[&ScoreRow], f: impl Fn(&ScoreRow) -> f64) {
    let vals: Vec<f64> = rows.iter().map(|r| f(r)).collect();
    let s = summarize(&vals);
    row.push(s.mean.to_string());
    row.push(s.ci95.to_string());
}

/// Computes (or reuses) one `(case, repeat)` cell and returns its rows in
/// grid order.
fn run_cell(
    cells_dir: &Path,
    digest: &str,
    case_index: usize,
    repeat: usize,
    case: &Case,
    settings: &config::SolverSettings,
    grid: &signet::metrics::GridSpec,
    root_seed: u64,
    grid_points: usize,
) -> Result<Vec<ScoreRow>, Failure> {
    let path = cell_file(cells_dir, case_index, repeat);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Some(rows) = parse_score_table(&text, digest) {
            if rows.len() == grid_points {
                eprintln!("case {case_index} repeat {repeat}: reusing {}", path.display());
                return Ok(rows);
            }
        }
        eprintln!(
            "case {case_index} repeat {repeat}: {} is stale or damaged, recomputing",
            path.display()
        );
    }

    let with_cell = |f: Failure| -> Failure {
        let msg = format!("case {case_index} repeat {repeat}: {}", f.message());
        match f {
            Failure::Schema(_) => Failure::Schema(msg),
            Failure::Io(_) => Failure::Io(msg),
            Failure::Solver(_) => Failure::Solver(msg),
            Failure::NotConverged(_) => Failure::NotConverged(msg),
        }
    };
    let core = |e: signet::Error| with_cell(Failure::from_core(e));

    let graph_seed = config::graph_seed(root_seed, case_index, repeat);
    let signal_seed = config::signal_seed(root_seed, case_index, repeat);
    let truth = gen_graph::<f64>(&case.graph.spec(graph_seed)).map_err(core)?;
    let x = gen_signals(&truth, &case.signals.spec(signal_seed)).map_err(core)?;

    let choice = match settings.mode {
        Mode::Exact => SolverChoice::Exact,
        Mode::FastK(k) => SolverChoice::Fast { k },
        Mode::FastBeta(beta) => SolverChoice::Fast {
            k: choose_k(
                truth.node_count(),
                truth.positive_edge_count(),
                truth.negative_edge_count(),
                beta,
            )
            .map_err(core)?,
        },
    };
    let outcome = grid_search(&x, grid, &truth, choice, &settings.admm).map_err(core)?;
    let rows: Vec<ScoreRow> = outcome
        .cells
        .iter()
        .map(ScoreRow::from_cell)
        .collect::<Result<_, _>>()
        .map_err(with_cell)?;

    let context = vec![format!(
        "case {case_index} ({}, {}(eta={}) m={} noise={}%), repeat {repeat}",
        case.graph.label,
        case.signals.filter.kind.name(),
        case.signals.filter.eta,
        case.signals.m,
        case.signals.noise_pct,
    )];
    atomic_write(
        &path,
        render_score_table(digest, &context, &rows).as_bytes(),
    )?;
    eprintln!("case {case_index} repeat {repeat}: wrote {}", path.display());
    Ok(rows)
}

pub fn run(args: ExperimentArgs) -> Result<(), Failure> {
    let cfg = config::load(&args.config)?;
    let cases = config::resolve_cases(&cfg)?;
    let settings = config::resolve_solver(cfg.solver.as_ref(), &SolverConfig::default())?;
    let grid = config::resolve_grid(&cfg, &settings)?;
    let repeats = config::resolve_repeats(&cfg, args.repeats)?;
    let root_seed = config::require_root_seed(&cfg, args.root_seed)?;
    let out = config::require_output_dir(Some(&cfg), args.out.clone())?;
    let grid_points = grid.alpha1_values.len() * grid.alpha2_values.len();

    let seed_table: Vec<serde_json::Value> = (0..cases.len())
        .map(|c| {
            let per_repeat: Vec<serde_json::Value> = (0..repeats)
                .map(|r| {
                    serde_json::json!({
                        "repeat": r,
                        "graph": config::graph_seed(root_seed, c, r),
                        "signals": config::signal_seed(root_seed, c, r),
                    })
                })
                .collect();
            serde_json::json!({
                "index": c,
                "graph": cases[c].graph.manifest(),
                "signals": cases[c].signals.manifest(),
                "seeds": per_repeat,
            })
        })
        .collect();
    let manifest = serde_json::json!({
        "tool": "signet-cli",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "experiment",
        "root_seed": root_seed,
        "repeats": repeats,
        "solver": settings.manifest(),
        "grid": {
            "alpha1": grid.alpha1_values,
            "alpha2": grid.alpha2_values,
            "metric": match grid.metric {
                signet::metrics::SelectionMetric::MacroF1 => "macro_f1",
                signet::metrics::SelectionMetric::AuprcRatio => "auprc_ratio",
            },
        },
        "cases": seed_table,
    });
    ensure_dir(&out)?;
    let cells_dir = out.join("cells");
    ensure_dir(&cells_dir)?;
    let digest = write_manifest(&out, &manifest)?;

    // One job per (case, repeat); results come back in job order.
    let jobs: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|c| (0..repeats).map(move |r| (c, r)))
        .collect();
    let per_job: Vec<Vec<ScoreRow>> = jobs
        .par_iter()
        .map(|&(c, r)| {
            run_cell(
                &cells_dir,
                &digest,
                c,
                r,
                &cases[c],
                &settings,
                &grid,
                root_seed,
                grid_points,
            )
        })
        .collect::<Result<_, _>>()?;

    // Single-threaded aggregation over the finished pool.
    let mut csv = String::new();
    csv.push_str(&format!("# {}\n", digest_comment(&digest)));
    csv.push_str(
        "# ci95 columns: 1.96 * sample standard deviation (n-1 denominator) / sqrt(repeats); \
         0 when repeats < 2\n",
    );
    csv.push_str("# runtime_ms columns are wall-clock measurements and vary from run to run\n");
    csv.push_str("# auprc_ratio cells are empty when the metric was undefined in every repeat\n");
    csv.push_str(EXPERIMENT_HEADER);
    csv.push('\n');
    for (c, case) in cases.iter().enumerate() {
        for g in 0..grid_points {
            let rows: Vec<&ScoreRow> = (0..repeats)
                .map(|r| &per_job[c * repeats + r][g])
                .collect();
            let converged_runs = rows.iter().filter(|r| r.converged).count();
            let mut row: Vec<String> = vec![
                case.graph.label.clone(),
                case.graph.n.to_string(),
                opt_cell(case.graph.zeta),
                case.signals.filter.kind.name().to_string(),
                case.signals.filter.eta.to_string(),
                case.signals.m.to_string(),
                case.signals.noise_pct.to_string(),
                settings.label(),
                rows[0].alpha1.to_string(),
                rows[0].alpha2.to_string(),
                repeats.to_string(),
                converged_runs.to_string(),
            ];
            push_stat(&mut row, &rows, |r| r.macro_f1);
            push_stat(&mut row, &rows, |r| r.f1_pos);
            push_stat(&mut row, &rows, |r| r.f1_neg);
            let auprc_vals: Vec<f64> = rows.iter().filter_map(|r| r.auprc_ratio).collect();
            if auprc_vals.is_empty() {
                row.push(String::new());
                row.push(String::new());
            } else {
                let s = summarize(&auprc_vals);
                row.push(s.mean.to_string());
                row.push(s.ci95.to_string());
            }
            push_stat(&mut row, &rows, |r| r.frob_error);
            push_stat(&mut row, &rows, |r| r.iterations as f64);
            push_stat(&mut row, &rows, |r| r.runtime_ms);
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
    }
    let csv_path = out.join("experiment.csv");
    atomic_write(&csv_path, csv.as_bytes())?;

    println!("wrote {}", csv_path.display());
    println!(
        "{} case(s) x {} grid point(s) x {} repeat(s); cells under {}",
        cases.len(),
        grid_points,
        repeats,
        cells_dir.display()
    );
    Ok(())
}
