//! `generate`: draws one dataset — a truth graph and a matrix of smooth
//! signals — and writes it to disk with its manifest.
//!
//! The dataset of experiment cell `(case, repeat)` is reproduced bitwise
//! by `generate --case <case> --repeat <repeat>` with the same config,
//! because both derive their seeds through the same tree (see the
//! [`crate::config`] docs).

use std::path::PathBuf;

use clap::Args;
use signet::datagen::{gen_graph, gen_signals};
use signet::io::{write_graph_tsv, write_matrix_csv};

use crate::config;
use crate::manifest::{digest_comment, ensure_dir, write_manifest};
use crate::Failure;

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Experiment config (TOML)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,

    /// Output directory (overrides the config's output_dir)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Case index into the graph × signals cross product
    #[arg(long, default_value_t = 0)]
    case: usize,

    /// Repeat index within the case
    #[arg(long, default_value_t = 0)]
    repeat: usize,

    /// Root seed (overrides the config's root_seed)
    #[arg(long)]
    root_seed: Option<u64>,
}

pub fn run(args: GenerateArgs) -> Result<(), Failure> {
    let cfg = config::load(&args.config)?;
    let cases = config::resolve_cases(&cfg)?;
    if args.case >= cases.len() {
        return Err(Failure::Schema(format!(
            "--case {}: config has only {} case(s)",
            args.case,
            cases.len()
        )));
    }
    let case = &cases[args.case];
    let root_seed = config::require_root_seed(&cfg, args.root_seed)?;
    let out = config::require_output_dir(Some(&cfg), args.out.clone())?;

    let graph_seed = config::graph_seed(root_seed, args.case, args.repeat);
    let signal_seed = config::signal_seed(root_seed, args.case, args.repeat);
    let graph = gen_graph::<f64>(&case.graph.spec(graph_seed)).map_err(Failure::from_core)?;
    let x = gen_signals(&graph, &case.signals.spec(signal_seed)).map_err(Failure::from_core)?;

    let manifest = serde_json::json!({
        "tool": "signet-cli",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "generate",
        "root_seed": root_seed,
        "case_index": args.case,
        "repeat": args.repeat,
        "graph": case.graph.manifest(),
        "signals": case.signals.manifest(),
        "seeds": { "graph": graph_seed, "signals": signal_seed },
    });
    ensure_dir(&out)?;
    let digest = write_manifest(&out, &manifest)?;
    let comment = digest_comment(&digest);

    let graph_path = out.join("graph.tsv");
    write_graph_tsv(&graph, &graph_path, &[comment.as_str()]).map_err(Failure::from_core)?;
    let signals_path = out.join("signals.csv");
    write_matrix_csv(&x, &signals_path, &[comment.as_str()]).map_err(Failure::from_core)?;

    println!("wrote {}", graph_path.display());
    println!("wrote {}", signals_path.display());
    println!("wrote {}", out.join("manifest.json").display());
    println!(
        "graph: {} nodes, {} positive / {} negative edges; signals: {} columns",
        graph.node_count(),
        graph.positive_edge_count(),
        graph.negative_edge_count(),
        x.ncols()
    );
    Ok(())
}
