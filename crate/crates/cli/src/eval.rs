//! `eval`: scores a recovered split Laplacian against a truth graph.
//!
//! Reads the pair and the truth from disk — both can come from this
//! tool's own outputs or from external files in the same formats — and
//! reports sign-classification F1, ranking quality, and Laplacian
//! estimation error as JSON on stdout (optionally also to a file).
//!
//! The ranking ratio is `null` when the truth has no edges of either
//! sign, which leaves the metric undefined; that is a reported outcome,
//! not an error.

use std::path::PathBuf;

use clap::Args;
use signet::io::{read_graph_tsv, read_pair_vectors_tsv};
use signet::metrics::{auprc_ratio, classify_edges, frob_error, macro_f1};
use signet::Error;

use crate::manifest::{atomic_write, sha256_file};
use crate::Failure;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Recovered pair (TSV, as written by `learn`)
    #[arg(long, value_name = "FILE")]
    pair: PathBuf,

    /// Truth graph (TSV, as written by `generate`)
    #[arg(long, value_name = "FILE")]
    truth: PathBuf,

    /// Classification threshold on recovered edge weights
    /// (default: scales with the problem size)
    #[arg(long)]
    tol: Option<f64>,

    /// Also write the report to this file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<(), Failure> {
    let pair = read_pair_vectors_tsv::<f64>(&args.pair).map_err(Failure::from_core)?;
    let truth = read_graph_tsv::<f64>(&args.truth).map_err(Failure::from_core)?;
    if pair.node_count() != truth.node_count() {
        return Err(Failure::Schema(format!(
            "pair is over {} nodes but the truth graph has {}",
            pair.node_count(),
            truth.node_count()
        )));
    }

    let pred = classify_edges(&pair, args.tol);
    let f1 = macro_f1(&pred, &truth).map_err(Failure::from_core)?;
    let auprc = match auprc_ratio(&pred, &truth) {
        Ok(scores) => Some(scores),
        Err(Error::UndefinedMetric) => None,
        Err(other) => return Err(Failure::from_core(other)),
    };
    let frob = frob_error(&pair, &truth).map_err(Failure::from_core)?;

    let report = serde_json::json!({
        "pair_path": args.pair.display().to_string(),
        "pair_sha256": sha256_file(&args.pair)?,
        "truth_path": args.truth.display().to_string(),
        "truth_sha256": sha256_file(&args.truth)?,
        "n": truth.node_count(),
        "tol": args.tol,
        "macro_f1": f1.macro_f1,
        "f1_pos": f1.f1_pos,
        "f1_neg": f1.f1_neg,
        "auprc_ratio": auprc.map(|s| s.ratio),
        "auprc_pos": auprc.and_then(|s| s.auprc_pos),
        "auprc_neg": auprc.and_then(|s| s.auprc_neg),
        "frob_error": frob,
    });
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::Io(format!("encoding report: {e}")))?;
    println!("{text}");
    if let Some(out) = &args.out {
        atomic_write(out, format!("{text}\n").as_bytes())?;
    }
    Ok(())
}
