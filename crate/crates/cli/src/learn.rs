//! `learn`: recovers a signed graph from a signal matrix.
//!
//! Reads a CSV matrix (one node per row), runs the exact solver or the
//! reduced candidate-set solver, and writes the recovered split
//! Laplacian, the thresholded signed adjacency, and solve diagnostics.
//! Solver settings come from an optional config's `[solver]` section with
//! command-line flags overriding it field by field.
//!
//! A solve that stops at the iteration cap still writes every artifact —
//! the diagnostics then say `converged: false` — and the command exits
//! with the not-converged code so pipelines can tell the two apart.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use signet::graph::{Sign, SignedEdge, SignedGraph};
use signet::halfvec::pair_iter;
use signet::io::{read_matrix_csv, read_pairs_tsv, write_graph_tsv, write_pair_vectors_tsv, write_pairs_tsv};
use signet::metrics::default_classification_tol;
use signet::solver::fast::{build_candidates, solve_fast_on, BruteForceNeighbors, CandidateEdgeSet};
use signet::solver::{solve_with, AdmmState, SolveResult, StopRule};

use crate::config::{self, Mode, ModeName, SolverConfig};
use crate::manifest::{atomic_write, digest_comment, ensure_dir, sha256_file, write_manifest};
use crate::Failure;

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Signal matrix (CSV, one node per row)
    #[arg(long, value_name = "FILE")]
    signals: PathBuf,

    /// Config supplying [solver] defaults and output_dir (optional)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output_dir)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Solver mode (overrides the config)
    #[arg(long, value_enum)]
    mode: Option<ModeName>,

    /// Neighbors per rule for the fast solver
    #[arg(long)]
    k: Option<usize>,

    /// Candidate pair list (TSV) to restrict the fast solver to
    #[arg(long, value_name = "FILE")]
    candidates: Option<PathBuf>,

    /// Positive-part regularization weight
    #[arg(long)]
    alpha1: Option<f64>,

    /// Negative-part regularization weight
    #[arg(long)]
    alpha2: Option<f64>,

    /// Splitting penalty
    #[arg(long)]
    rho: Option<f64>,

    /// Iteration cap
    #[arg(long)]
    max_iter: Option<usize>,

    /// Objective-settling tolerance
    #[arg(long)]
    eps: Option<f64>,

    /// Primal-residual tolerance
    #[arg(long)]
    residual_tol: Option<f64>,
}

/// What the solver ran on, for the manifest and diagnostics.
enum Dispatch {
    Exact,
    /// Fast solver on a set built from the signals; the set is an output.
    FastBuilt(CandidateEdgeSet),
    /// Fast solver on a caller-provided set.
    FastGiven(PathBuf, CandidateEdgeSet),
}

impl Dispatch {
    fn label(&self, k: Option<usize>) -> String {
        match self {
            Dispatch::Exact => "exact".into(),
            Dispatch::FastBuilt(_) => format!(
                "fast(k={})",
                k.expect("a built candidate set always has k")
            ),
            Dispatch::FastGiven(path, _) => format!("fast(candidates={})", path.display()),
        }
    }
}

pub fn run(args: LearnArgs) -> Result<(), Failure> {
    let cfg = args.config.as_deref().map(config::load).transpose()?;
    let overrides = SolverConfig {
        mode: args.mode,
        k: args.k,
        beta: None,
        alpha1: args.alpha1,
        alpha2: args.alpha2,
        rho: args.rho,
        max_iter: args.max_iter,
        eps: args.eps,
        residual_tol: args.residual_tol,
    };

    let x = read_matrix_csv::<f64>(&args.signals).map_err(Failure::from_core)?;
    let n = x.nrows();
    let m = x.ncols();
    let signals_sha = sha256_file(&args.signals)?;

    // Resolve the dispatch. A candidate file fixes the pair set itself, so
    // mode/k/beta must not also be given; only the numeric solver settings
    // are folded in.
    let file_solver = cfg.as_ref().and_then(|c| c.solver.as_ref());
    let (settings, k, dispatch) = if let Some(cand_path) = &args.candidates {
        if args.mode == Some(ModeName::Exact) {
            return Err(Failure::Schema(
                "--candidates runs the fast solver; drop --mode exact".into(),
            ));
        }
        if args.k.is_some() {
            return Err(Failure::Schema(
                "--candidates already fixes the pair set; drop --k".into(),
            ));
        }
        let numeric_only = file_solver.map(|s| SolverConfig {
            mode: None,
            k: None,
            beta: None,
            ..s.clone()
        });
        let numeric_overrides = SolverConfig {
            mode: None,
            k: None,
            ..overrides
        };
        let settings = config::resolve_solver(numeric_only.as_ref(), &numeric_overrides)?;
        let set = read_pairs_tsv(cand_path).map_err(Failure::from_core)?;
        if set.node_count() != n {
            return Err(Failure::Schema(format!(
                "candidate list is over {} nodes but the signal matrix has {n} rows",
                set.node_count()
            )));
        }
        (settings, None, Dispatch::FastGiven(cand_path.clone(), set))
    } else {
        let settings = config::resolve_solver(file_solver, &overrides)?;
        let k = settings.concrete_k("learn")?;
        let dispatch = match settings.mode {
            Mode::Exact => Dispatch::Exact,
            _ => {
                let k = k.expect("fast mode resolved to a concrete k");
                let provider = BruteForceNeighbors::new(&x).map_err(Failure::from_core)?;
                let set = build_candidates(&provider, k).map_err(Failure::from_core)?;
                Dispatch::FastBuilt(set)
            }
        };
        (settings, k, dispatch)
    };

    let out = config::require_output_dir(cfg.as_ref(), args.out.clone())?;
    let solver_label = dispatch.label(k);

    // The timed region is the solve alone; reading, candidate
    // construction and writing stay outside it.
    let start = Instant::now();
    let (result, state): (SolveResult<f64>, AdmmState<f64>) = match &dispatch {
        Dispatch::Exact => solve_with(&x, &settings.admm, StopRule::Tolerance, None),
        Dispatch::FastBuilt(set) | Dispatch::FastGiven(_, set) => {
            solve_fast_on(&x, set, &settings.admm, StopRule::Tolerance, None)
        }
    }
    .map_err(Failure::from_core)?;
    let timed_ms = start.elapsed().as_secs_f64() * 1e3;

    let manifest = serde_json::json!({
        "tool": "signet-cli",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "learn",
        "signals": { "path": args.signals.display().to_string(), "sha256": signals_sha },
        "candidates": args.candidates.as_ref().map(|p| {
            serde_json::json!({
                "path": p.display().to_string(),
                "sha256": sha256_file(p).ok(),
            })
        }),
        "solver": settings.manifest(),
        "solver_label": solver_label,
        "n": n,
        "m": m,
    });
    ensure_dir(&out)?;
    let digest = write_manifest(&out, &manifest)?;
    let comment = digest_comment(&digest);

    let pair_path = out.join("pair.tsv");
    write_pair_vectors_tsv(&result.pair, &pair_path, &[comment.as_str()])
        .map_err(Failure::from_core)?;

    let adjacency = threshold_adjacency(&result)?;
    let adjacency_path = out.join("adjacency.tsv");
    write_graph_tsv(&adjacency, &adjacency_path, &[comment.as_str()])
        .map_err(Failure::from_core)?;

    if let Dispatch::FastBuilt(set) = &dispatch {
        let cand_path = out.join("candidates.tsv");
        write_pairs_tsv(set, &cand_path, &[comment.as_str()]).map_err(Failure::from_core)?;
        println!("wrote {}", cand_path.display());
    }

    let (res_pos_trace, res_neg_trace): (Vec<f64>, Vec<f64>) =
        state.residual_history.iter().copied().unzip();
    let diagnostics = serde_json::json!({
        "manifest_sha256": digest,
        "solver": solver_label,
        "n": n,
        "m": m,
        "converged": result.converged,
        "iterations": result.iterations,
        "final_objective": result.final_objective,
        "residual_pos": result.residuals.0,
        "residual_neg": result.residuals.1,
        "wall_time_ms": timed_ms,
        "objective_trace": state.objective_history,
        "residual_pos_trace": res_pos_trace,
        "residual_neg_trace": res_neg_trace,
    });
    let diag_path = out.join("diagnostics.json");
    let mut diag_bytes = serde_json::to_vec_pretty(&diagnostics)
        .map_err(|e| Failure::Io(format!("encoding diagnostics: {e}")))?;
    diag_bytes.push(b'\n');
    atomic_write(&diag_path, &diag_bytes)?;

    println!("wrote {}", pair_path.display());
    println!("wrote {}", adjacency_path.display());
    println!("wrote {}", diag_path.display());
    println!(
        "solver {solver_label}: {} after {} iterations (objective {:.6e})",
        if result.converged {
            "converged"
        } else {
            "stopped without converging"
        },
        result.iterations,
        result.final_objective,
    );

    if result.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "solver stopped after {} iterations without meeting the tolerances \
             (all artifacts were still written to {})",
            result.iterations,
            out.display()
        )))
    }
}

/// Thresholds the recovered pair into a signed adjacency, with the same
/// rule and default threshold the evaluation metrics use.
fn threshold_adjacency(result: &SolveResult<f64>) -> Result<SignedGraph<f64>, Failure> {
    let n = result.pair.node_count();
    let tol = default_classification_tol(n);
    let mut edges = Vec::new();
    for (e, (i, j)) in pair_iter(n).enumerate() {
        let wpos = -result.pair.lpos.array()[e];
        let wneg = -result.pair.lneg.array()[e];
        if wpos > tol {
            edges.push(SignedEdge::new(i, j, wpos, Sign::Positive).map_err(Failure::from_core)?);
        } else if wneg > tol {
            edges.push(SignedEdge::new(i, j, wneg, Sign::Negative).map_err(Failure::from_core)?);
        }
    }
    SignedGraph::new(n, edges).map_err(Failure::from_core)
}
