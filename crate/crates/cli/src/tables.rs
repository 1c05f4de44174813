//! Frozen CSV layouts and the summary statistics behind them.
//!
//! Column orders here are part of the output contract: downstream
//! plotting reads them positionally, so they never change. Numeric cells
//! use the shortest round-trip decimal form, which makes files
//! byte-stable across reruns and lossless to parse back — checkpoint
//! reuse in the experiment runner depends on both.

use signet::metrics::GridCell;

use crate::manifest::digest_comment;
use crate::Failure;

/// Column order of per-run score tables (one row per grid point).
pub const SCORE_TABLE_HEADER: &str =
    "alpha1,alpha2,macro_f1,f1_pos,f1_neg,auprc_ratio,frob_error,iterations,runtime_ms,converged";

/// Column order of the aggregated experiment table (one row per case and
/// grid point; `_ci95` columns follow [`Summary::ci95`]).
pub const EXPERIMENT_HEADER: &str = "graph,n,zeta,filter,eta,m,noise_pct,solver,alpha1,alpha2,\
     repeats,converged_runs,macro_f1_mean,macro_f1_ci95,f1_pos_mean,f1_pos_ci95,\
     f1_neg_mean,f1_neg_ci95,auprc_ratio_mean,auprc_ratio_ci95,frob_error_mean,\
     frob_error_ci95,iterations_mean,iterations_ci95,runtime_ms_mean,runtime_ms_ci95";

/// Column order of the benchmark table (`k` is empty for the exact
/// solver; times are seconds).
pub const BENCH_HEADER: &str = "n,solver,k,iterations,reps,columns,total_seconds,per_iteration_seconds";

/// One score row; `auprc_ratio` renders as an empty cell when the metric
/// is undefined for the truth graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub alpha1: f64,
    pub alpha2: f64,
    pub macro_f1: f64,
    pub f1_pos: f64,
    pub f1_neg: f64,
    pub auprc_ratio: Option<f64>,
    pub frob_error: f64,
    pub iterations: usize,
    pub runtime_ms: f64,
    pub converged: bool,
}

impl ScoreRow {
    /// Lifts a successful grid cell; a failed cell (its `error` set) has
    /// no scores to tabulate.
    pub fn from_cell(cell: &GridCell) -> Result<Self, Failure> {
        if let Some(err) = &cell.error {
            return Err(Failure::Solver(format!(
                "grid point (alpha1={}, alpha2={}): {err}",
                cell.alpha1, cell.alpha2
            )));
        }
        Ok(ScoreRow {
            alpha1: cell.alpha1,
            alpha2: cell.alpha2,
            macro_f1: cell.macro_f1,
            f1_pos: cell.f1_pos,
            f1_neg: cell.f1_neg,
            auprc_ratio: cell.auprc_ratio,
            frob_error: cell.frob_error,
            iterations: cell.iterations,
            runtime_ms: cell.runtime_ms,
            converged: cell.converged,
        })
    }

    fn render(&self) -> String {
        let ratio = opt_cell(self.auprc_ratio);
        format!(
            "{},{},{},{},{},{ratio},{},{},{},{}",
            self.alpha1,
            self.alpha2,
            self.macro_f1,
            self.f1_pos,
            self.f1_neg,
            self.frob_error,
            self.iterations,
            self.runtime_ms,
            self.converged
        )
    }

    fn parse(line: &str) -> Option<Self> {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 10 {
            return None;
        }
        Some(ScoreRow {
            alpha1: cells[0].parse().ok()?,
            alpha2: cells[1].parse().ok()?,
            macro_f1: cells[2].parse().ok()?,
            f1_pos: cells[3].parse().ok()?,
            f1_neg: cells[4].parse().ok()?,
            auprc_ratio: if cells[5].is_empty() {
                None
            } else {
                Some(cells[5].parse().ok()?)
            },
            frob_error: cells[6].parse().ok()?,
            iterations: cells[7].parse().ok()?,
            runtime_ms: cells[8].parse().ok()?,
            converged: cells[9].parse().ok()?,
        })
    }
}

/// Renders an empty cell for `None`, the shortest round-trip decimal
/// otherwise.
pub fn opt_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Renders a score table: digest comment, context comments, header, rows.
pub fn render_score_table(digest: &str, context: &[String], rows: &[ScoreRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", digest_comment(digest)));
    for line in context {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(SCORE_TABLE_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.render());
        out.push('\n');
    }
    out
}

/// Parses a score table back, returning `None` unless the digest comment
/// matches `expect_digest`, the header is the frozen one, and every row
/// parses — the callers treat `None` as "recompute".
pub fn parse_score_table(text: &str, expect_digest: &str) -> Option<Vec<ScoreRow>> {
    let mut lines = text.lines();
    let first = lines.next()?;
    if first != format!("# {}", digest_comment(expect_digest)) {
        return None;
    }
    let mut rows = Vec::new();
    let mut seen_header = false;
    for line in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line != SCORE_TABLE_HEADER {
                return None;
            }
            seen_header = true;
            continue;
        }
        rows.push(ScoreRow::parse(line)?);
    }
    seen_header.then_some(rows)
}

/// Mean and half-width of a normal-approximation 95% confidence
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// `1.96 · s / √count` with `s` the sample standard deviation
    /// (n−1 denominator); 0 when fewer than two values.
    pub ci95: f64,
}

/// Summarizes a sample; empty input yields NaN mean and zero width.
pub fn summarize(values: &[f64]) -> Summary {
    let count = values.len();
    if count == 0 {
        return Summary {
            mean: f64::NAN,
            ci95: 0.0,
        };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    if count < 2 {
        return Summary { mean, ci95: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    Summary {
        mean,
        ci95: 1.96 * var.sqrt() / (count as f64).sqrt(),
    }
}
