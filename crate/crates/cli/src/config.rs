//! TOML configuration schema and its resolution into library types.
//!
//! A config is strict: unknown keys are rejected, every parameter is
//! validated against its domain, and error messages name the offending
//! field. The variant-bearing sections `[[graph]]` and `[[signals]]` are
//! arrays of tables; an experiment runs their cross product as its cases.
//!
//! ```toml
//! root_seed = 42            # all randomness derives from this
//! output_dir = "out"        # where artifacts land (--out overrides)
//! repeats = 20              # seeds per case (experiment; default 20)
//!
//! [[graph]]
//! model = "er"              # "er" | "ba" | "rgg"
//! n = 100
//! p = 0.1                   # er: p; ba: m_ba; rgg: k_rgg
//! zeta = 0.1                # sign-flip fraction (er/ba only; default 0)
//! # label = "sparse-er"     # row label in reports (default "er(p=0.1)")
//!
//! [[signals]]
//! filter = "heat"           # "gaussian" | "heat" | "tikhonov"
//! eta = 2.0                 # filter sharpness
//! m = 2000                  # column count, or m_per_node = 20 for m = 20·n
//! noise_pct = 10.0          # ℓ2-relative noise percentage (default 0)
//!
//! [solver]                  # optional; defaults shown
//! mode = "exact"            # "exact" | "fast"
//! # k = 20                  # fast: neighbors per rule
//! # beta = 1.5              # fast: derive k from the truth's densities
//! alpha1 = 0.1
//! alpha2 = 0.1
//! rho = 1.0
//! max_iter = 10000
//! eps = 1e-6
//! residual_tol = 1e-6
//!
//! [grid]                    # optional sweep; default: the single
//! alpha1 = [0.05, 0.1]      # (alpha1, alpha2) point of [solver]
//! alpha2 = [0.05, 0.1]
//! metric = "macro_f1"       # "macro_f1" | "auprc_ratio"
//!
//! [bench]                   # bench command only
//! sizes = [200, 400, 600, 800, 1000]
//! iterations = 100
//! reps = 3                  # timing repetitions, min is reported
//! columns = 50              # signal columns of the timing matrices
//! ```
//!
//! Seed derivation is counter-based so any cell of a run is reproducible
//! in isolation and independent of execution order: with `c` the case
//! index and `r` the repeat index,
//!
//! ```text
//! case_root   = derive_seed(root_seed, PURPOSE_CASE, c)
//! graph_seed  = derive_seed(case_root, PURPOSE_GRAPH_DRAW, r)
//! signal_seed = derive_seed(case_root, PURPOSE_SIGNAL_DRAW, r)
//! bench_seed  = derive_seed(root_seed, PURPOSE_BENCH_DATA, n)
//! ```
//!
//! `generate --case c --repeat r` therefore writes bitwise the same
//! dataset that `experiment` uses for that cell.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use signet::datagen::{derive_seed, GraphModel, GraphModelSpec, SignalGenSpec};
use signet::gsp::{FilterKind, FilterSpec};
use signet::metrics::{GridSpec, SelectionMetric};
use signet::solver::AdmmConfig;

use crate::Failure;

/// Purpose tag deriving one root per case.
pub const PURPOSE_CASE: u64 = 1;
/// Purpose tag deriving a graph draw from a case root.
pub const PURPOSE_GRAPH_DRAW: u64 = 2;
/// Purpose tag deriving a signal draw from a case root.
pub const PURPOSE_SIGNAL_DRAW: u64 = 3;
/// Purpose tag deriving a benchmark data matrix from the root seed.
pub const PURPOSE_BENCH_DATA: u64 = 4;

/// Repeats per case when the config does not say.
pub const DEFAULT_REPEATS: usize = 20;

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

/// Top-level document. Sections a command does not use may be omitted;
/// the command errors when a section it needs is missing.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Root of the seed-derivation tree.
    pub root_seed: Option<u64>,
    /// Artifact directory (the `--out` flag overrides it).
    pub output_dir: Option<PathBuf>,
    /// Seeds per case.
    pub repeats: Option<usize>,
    /// Graph variants (`[[graph]]` tables).
    #[serde(default)]
    pub graph: Vec<GraphConfig>,
    /// Signal variants (`[[signals]]` tables).
    #[serde(default)]
    pub signals: Vec<SignalsConfig>,
    /// Solver settings.
    pub solver: Option<SolverConfig>,
    /// Regularization sweep.
    pub grid: Option<GridConfig>,
    /// Benchmark settings.
    pub bench: Option<BenchConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Er,
    Ba,
    Rgg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub model: ModelName,
    pub n: usize,
    /// Edge probability (`er` only).
    pub p: Option<f64>,
    /// Attachments per new node (`ba` only).
    pub m_ba: Option<usize>,
    /// Neighbors per proximity rule (`rgg` only).
    pub k_rgg: Option<usize>,
    /// Sign-flip fraction (`er`/`ba` only; default 0).
    pub zeta: Option<f64>,
    /// Report-row label; defaults to the model and its parameter.
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterName {
    Gaussian,
    Heat,
    Tikhonov,
}

impl FilterName {
    fn kind(self) -> FilterKind {
        match self {
            FilterName::Gaussian => FilterKind::Gaussian,
            FilterName::Heat => FilterKind::Heat,
            FilterName::Tikhonov => FilterKind::Tikhonov,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalsConfig {
    pub filter: FilterName,
    pub eta: f64,
    /// Absolute column count; exclusive with `m_per_node`.
    pub m: Option<usize>,
    /// Columns per node: `m = m_per_node · n` of the paired graph.
    pub m_per_node: Option<usize>,
    /// ℓ2-relative noise percentage (default 0).
    #[serde(default)]
    pub noise_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Fast,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: Option<ModeName>,
    /// Neighbors per rule for the reduced solver; exclusive with `beta`.
    pub k: Option<usize>,
    /// Safety factor deriving `k` from the truth graph's sign densities
    /// (only where a truth graph exists, i.e. `experiment`).
    pub beta: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub rho: Option<f64>,
    pub max_iter: Option<usize>,
    pub eps: Option<f64>,
    pub residual_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    MacroF1,
    AuprcRatio,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub metric: Option<MetricName>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Node counts to time.
    pub sizes: Vec<usize>,
    /// Fixed iteration count per timed solve.
    pub iterations: usize,
    /// Timing repetitions; the minimum is reported.
    pub reps: Option<usize>,
    /// Columns of the random timing matrices.
    pub columns: Option<usize>,
}

/// Reads and parses a config file. TOML errors come back with line and
/// column pointing into the document.
pub fn load(path: &Path) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Resolved views
// ---------------------------------------------------------------------------

/// One graph variant, validated, ready to be seeded.
#[derive(Debug, Clone)]
pub struct GraphCase {
    /// Report-row label.
    pub label: String,
    /// Model family and parameter.
    pub kind: GraphModel,
    /// Node count.
    pub n: usize,
    /// Sign-flip fraction; `None` for the geometric model.
    pub zeta: Option<f64>,
}

impl GraphCase {
    /// The drawing spec for one seed.
    pub fn spec(&self, seed: u64) -> GraphModelSpec {
        GraphModelSpec {
            kind: self.kind,
            n: self.n,
            zeta: self.zeta.unwrap_or(0.0),
            seed,
        }
    }

    /// Resolved parameters for manifests.
    pub fn manifest(&self) -> serde_json::Value {
        let (model, param_name, param) = match self.kind {
            GraphModel::SignedEr { p } => ("er", "p", serde_json::json!(p)),
            GraphModel::SignedBa { m_ba } => ("ba", "m_ba", serde_json::json!(m_ba)),
            GraphModel::SignedRgg { k_rgg } => ("rgg", "k_rgg", serde_json::json!(k_rgg)),
        };
        serde_json::json!({
            "label": self.label,
            "model": model,
            "n": self.n,
            param_name: param,
            "zeta": self.zeta,
        })
    }
}

/// One signal variant with its column count already resolved against the
/// paired graph's node count.
#[derive(Debug, Clone)]
pub struct SignalsCase {
    /// Filter family plus sharpness.
    pub filter: FilterSpec,
    /// Column count.
    pub m: usize,
    /// ℓ2-relative noise percentage.
    pub noise_pct: f64,
}

impl SignalsCase {
    /// The drawing spec for one seed.
    pub fn spec(&self, seed: u64) -> SignalGenSpec {
        SignalGenSpec {
            filter: self.filter,
            m: self.m,
            noise_pct: self.noise_pct,
            seed,
        }
    }

    /// Resolved parameters for manifests.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "filter": self.filter.kind.name(),
            "eta": self.filter.eta,
            "m": self.m,
            "noise_pct": self.noise_pct,
        })
    }
}

/// One cell of the graph × signals cross product.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: GraphCase,
    pub signals: SignalsCase,
}

/// Solver dispatch: full pair space, or the reduced candidate-set solver
/// with an explicit or density-derived neighbor count.
#[derive(Debug, Clone, Copy)]
pub enum Mode {
    Exact,
    FastK(usize),
    FastBeta(f64),
}

/// Validated solver settings.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub mode: Mode,
    pub admm: AdmmConfig,
}

impl SolverSettings {
    /// Report label, e.g. `exact`, `fast(k=20)`, `fast(beta=1.5)`.
    pub fn label(&self) -> String {
        match self.mode {
            Mode::Exact => "exact".into(),
            Mode::FastK(k) => format!("fast(k={k})"),
            Mode::FastBeta(beta) => format!("fast(beta={beta})"),
        }
    }

    /// The explicit neighbor count, for commands that have no truth graph
    /// to derive one from.
    pub fn concrete_k(&self, command: &str) -> Result<Option<usize>, Failure> {
        match self.mode {
            Mode::Exact => Ok(None),
            Mode::FastK(k) => Ok(Some(k)),
            Mode::FastBeta(_) => Err(Failure::Schema(format!(
                "solver.beta derives k from a truth graph, which `{command}` does not have; \
                 set solver.k explicitly"
            ))),
        }
    }

    /// Resolved parameters for manifests.
    pub fn manifest(&self) -> serde_json::Value {
        let mode = match self.mode {
            Mode::Exact => serde_json::json!({"mode": "exact"}),
            Mode::FastK(k) => serde_json::json!({"mode": "fast", "k": k}),
            Mode::FastBeta(beta) => serde_json::json!({"mode": "fast", "beta": beta}),
        };
        serde_json::json!({
            "mode": mode["mode"],
            "k": mode.get("k"),
            "beta": mode.get("beta"),
            "alpha1": self.admm.alpha1,
            "alpha2": self.admm.alpha2,
            "rho": self.admm.rho,
            "max_iter": self.admm.max_iter,
            "eps": self.admm.eps,
            "residual_tol": self.admm.residual_tol,
        })
    }
}

/// Validated benchmark settings.
#[derive(Debug, Clone)]
pub struct BenchSettings {
    pub sizes: Vec<usize>,
    pub iterations: usize,
    pub reps: usize,
    pub columns: usize,
}

fn schema(msg: impl Into<String>) -> Failure {
    Failure::Schema(msg.into())
}

fn check_label(context: &str, label: &str) -> Result<(), Failure> {
    if label.is_empty() || label.contains(',') || label.contains('\n') {
        return Err(schema(format!(
            "{context}.label: must be non-empty and free of commas and newlines"
        )));
    }
    Ok(())
}

fn resolve_graph(index: usize, g: &GraphConfig) -> Result<GraphCase, Failure> {
    let ctx = format!("graph[{index}]");
    // Exactly the parameter of the chosen model may be present.
    let forbid = |name: &str, present: bool| -> Result<(), Failure> {
        if present {
            Err(schema(format!(
                "{ctx}.{name}: not a parameter of model \"{}\"",
                match g.model {
                    ModelName::Er => "er",
                    ModelName::Ba => "ba",
                    ModelName::Rgg => "rgg",
                }
            )))
        } else {
            Ok(())
        }
    };
    let kind = match g.model {
        ModelName::Er => {
            forbid("m_ba", g.m_ba.is_some())?;
            forbid("k_rgg", g.k_rgg.is_some())?;
            let p = g
                .p
                .ok_or_else(|| schema(format!("{ctx}.p: required for model \"er\"")))?;
            GraphModel::SignedEr { p }
        }
        ModelName::Ba => {
            forbid("p", g.p.is_some())?;
            forbid("k_rgg", g.k_rgg.is_some())?;
            let m_ba = g
                .m_ba
                .ok_or_else(|| schema(format!("{ctx}.m_ba: required for model \"ba\"")))?;
            GraphModel::SignedBa { m_ba }
        }
        ModelName::Rgg => {
            forbid("p", g.p.is_some())?;
            forbid("m_ba", g.m_ba.is_some())?;
            forbid("zeta", g.zeta.is_some())?;
            let k_rgg = g
                .k_rgg
                .ok_or_else(|| schema(format!("{ctx}.k_rgg: required for model \"rgg\"")))?;
            GraphModel::SignedRgg { k_rgg }
        }
    };
    let case = GraphCase {
        label: match &g.label {
            Some(l) => {
                check_label(&ctx, l)?;
                l.clone()
            }
            None => match kind {
                GraphModel::SignedEr { p } => format!("er(p={p})"),
                GraphModel::SignedBa { m_ba } => format!("ba(m_ba={m_ba})"),
                GraphModel::SignedRgg { k_rgg } => format!("rgg(k_rgg={k_rgg})"),
            },
        },
        kind,
        n: g.n,
        zeta: match g.model {
            ModelName::Rgg => None,
            _ => Some(g.zeta.unwrap_or(0.0)),
        },
    };
    // Domain checks live in the library; prefix its field name with the
    // table path so the message points into the document.
    case.spec(0)
        .validate()
        .map_err(|e| schema(format!("{ctx}: {e}")))?;
    Ok(case)
}

fn resolve_signals(index: usize, s: &SignalsConfig, n: usize) -> Result<SignalsCase, Failure> {
    let ctx = format!("signals[{index}]");
    let m = match (s.m, s.m_per_node) {
        (Some(m), None) => m,
        (None, Some(per)) => {
            if per == 0 {
                return Err(schema(format!("{ctx}.m_per_node: must be ≥ 1")));
            }
            per * n
        }
        (Some(_), Some(_)) => {
            return Err(schema(format!(
                "{ctx}: set either m or m_per_node, not both"
            )));
        }
        (None, None) => {
            return Err(schema(format!("{ctx}: one of m or m_per_node is required")));
        }
    };
    let filter = FilterSpec::new(s.filter.kind(), s.eta)
        .map_err(|e| schema(format!("{ctx}: {e}")))?;
    let case = SignalsCase {
        filter,
        m,
        noise_pct: s.noise_pct,
    };
    case.spec(0)
        .validate()
        .map_err(|e| schema(format!("{ctx}: {e}")))?;
    Ok(case)
}

/// Cross product of the `[[graph]]` and `[[signals]]` tables, graph outer,
/// in declaration order. `m_per_node` resolves against each graph's `n`.
pub fn resolve_cases(cfg: &FileConfig) -> Result<Vec<Case>, Failure> {
    if cfg.graph.is_empty() {
        return Err(schema("config needs at least one [[graph]] table"));
    }
    if cfg.signals.is_empty() {
        return Err(schema("config needs at least one [[signals]] table"));
    }
    let mut cases = Vec::with_capacity(cfg.graph.len() * cfg.signals.len());
    for (gi, g) in cfg.graph.iter().enumerate() {
        let graph = resolve_graph(gi, g)?;
        for (si, s) in cfg.signals.iter().enumerate() {
            let signals = resolve_signals(si, s, graph.n)?;
            cases.push(Case {
                graph: graph.clone(),
                signals,
            });
        }
    }
    Ok(cases)
}

/// Folds the optional `[solver]` section and command-line overrides into
/// validated settings. Flag overrides win over the file; defaults fill
/// the rest.
pub fn resolve_solver(
    file: Option<&SolverConfig>,
    overrides: &SolverConfig,
) -> Result<SolverSettings, Failure> {
    let base = AdmmConfig::default();
    let empty = SolverConfig::default();
    let file = file.unwrap_or(&empty);
    let pick = |o: Option<f64>, f: Option<f64>, d: f64| o.or(f).unwrap_or(d);
    let admm = AdmmConfig {
        alpha1: pick(overrides.alpha1, file.alpha1, base.alpha1),
        alpha2: pick(overrides.alpha2, file.alpha2, base.alpha2),
        rho: pick(overrides.rho, file.rho, base.rho),
        max_iter: overrides.max_iter.or(file.max_iter).unwrap_or(base.max_iter),
        eps: pick(overrides.eps, file.eps, base.eps),
        residual_tol: pick(overrides.residual_tol, file.residual_tol, base.residual_tol),
    };
    admm.validate()
        .map_err(|e| schema(format!("solver: {e}")))?;

    let mode = overrides.mode.or(file.mode).unwrap_or(ModeName::Exact);
    let k = overrides.k.or(file.k);
    let beta = overrides.beta.or(file.beta);
    let mode = match mode {
        ModeName::Exact => {
            if k.is_some() || beta.is_some() {
                return Err(schema(
                    "solver.k / solver.beta only apply to mode = \"fast\"",
                ));
            }
            Mode::Exact
        }
        ModeName::Fast => match (k, beta) {
            (Some(k), None) => {
                if k == 0 {
                    return Err(schema("solver.k: must be ≥ 1"));
                }
                Mode::FastK(k)
            }
            (None, Some(beta)) => {
                if !beta.is_finite() || beta <= 1.0 {
                    return Err(schema("solver.beta: must be finite and > 1"));
                }
                Mode::FastBeta(beta)
            }
            (Some(_), Some(_)) => {
                return Err(schema("solver: set either k or beta, not both"));
            }
            (None, None) => {
                return Err(schema("solver: mode = \"fast\" needs k or beta"));
            }
        },
    };
    Ok(SolverSettings { mode, admm })
}

/// The sweep to run: the `[grid]` section, or the single point of the
/// solver settings when the section is absent.
pub fn resolve_grid(cfg: &FileConfig, solver: &SolverSettings) -> Result<GridSpec, Failure> {
    let grid = match &cfg.grid {
        Some(g) => GridSpec {
            alpha1_values: g.alpha1.clone(),
            alpha2_values: g.alpha2.clone(),
            metric: match g.metric.unwrap_or(MetricName::MacroF1) {
                MetricName::MacroF1 => SelectionMetric::MacroF1,
                MetricName::AuprcRatio => SelectionMetric::AuprcRatio,
            },
        },
        None => GridSpec {
            alpha1_values: vec![solver.admm.alpha1],
            alpha2_values: vec![solver.admm.alpha2],
            metric: SelectionMetric::MacroF1,
        },
    };
    grid.validate()
        .map_err(|e| schema(format!("grid: {e}")))?;
    Ok(grid)
}

/// Validates the `[bench]` section.
pub fn resolve_bench(cfg: &FileConfig) -> Result<BenchSettings, Failure> {
    let b = cfg
        .bench
        .as_ref()
        .ok_or_else(|| schema("config needs a [bench] table"))?;
    if b.sizes.is_empty() {
        return Err(schema("bench.sizes: must be non-empty"));
    }
    if b.sizes.iter().any(|n| *n < 3) {
        return Err(schema("bench.sizes: every size must be ≥ 3"));
    }
    if b.iterations == 0 {
        return Err(schema("bench.iterations: must be ≥ 1"));
    }
    let reps = b.reps.unwrap_or(3);
    if reps == 0 {
        return Err(schema("bench.reps: must be ≥ 1"));
    }
    let columns = b.columns.unwrap_or(50);
    if columns == 0 {
        return Err(schema("bench.columns: must be ≥ 1"));
    }
    Ok(BenchSettings {
        sizes: b.sizes.clone(),
        iterations: b.iterations,
        reps,
        columns,
    })
}

/// The root seed, which commands with random draws insist on.
pub fn require_root_seed(cfg: &FileConfig, flag: Option<u64>) -> Result<u64, Failure> {
    flag.or(cfg.root_seed)
        .ok_or_else(|| schema("root_seed is required (config key or --root-seed)"))
}

/// The artifact directory: flag, else config, else an error.
pub fn require_output_dir(
    cfg: Option<&FileConfig>,
    flag: Option<PathBuf>,
) -> Result<PathBuf, Failure> {
    flag.or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .ok_or_else(|| schema("an output directory is required (output_dir key or --out)"))
}

/// Repeat count: flag, else config, else [`DEFAULT_REPEATS`].
pub fn resolve_repeats(cfg: &FileConfig, flag: Option<usize>) -> Result<usize, Failure> {
    let repeats = flag.or(cfg.repeats).unwrap_or(DEFAULT_REPEATS);
    if repeats == 0 {
        return Err(schema("repeats: must be ≥ 1"));
    }
    Ok(repeats)
}

/// Per-case seed root (see the module docs for the derivation tree).
pub fn case_root(root_seed: u64, case_index: usize) -> u64 {
    derive_seed(root_seed, PURPOSE_CASE, case_index as u64)
}

/// Graph seed of one (case, repeat) cell.
pub fn graph_seed(root_seed: u64, case_index: usize, repeat: usize) -> u64 {
    derive_seed(
        case_root(root_seed, case_index),
        PURPOSE_GRAPH_DRAW,
        repeat as u64,
    )
}

/// Signal seed of one (case, repeat) cell.
pub fn signal_seed(root_seed: u64, case_index: usize, repeat: usize) -> u64 {
    derive_seed(
        case_root(root_seed, case_index),
        PURPOSE_SIGNAL_DRAW,
        repeat as u64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> FileConfig {
        toml::from_str(text).expect("config parses")
    }

    const FULL: &str = r#"
        root_seed = 42
        output_dir = "out"
        repeats = 5

        [[graph]]
        model = "er"
        n = 30
        p = 0.2
        zeta = 0.1

        [[graph]]
        model = "rgg"
        n = 20
        k_rgg = 3

        [[signals]]
        filter = "heat"
        eta = 2.0
        m = 100
        noise_pct = 10.0

        [[signals]]
        filter = "gaussian"
        eta = 0.5
        m_per_node = 4

        [solver]
        mode = "fast"
        k = 6
        alpha1 = 0.05

        [grid]
        alpha1 = [0.01, 0.1]
        alpha2 = [0.02]
        metric = "auprc_ratio"

        [bench]
        sizes = [50, 100]
        iterations = 20
    "#;

    #[test]
    fn full_config_resolves() {
        let cfg = parse(FULL);
        let cases = resolve_cases(&cfg).unwrap();
        assert_eq!(cases.len(), 4, "2 graphs x 2 signal variants");
        // Graph outer, signals inner.
        assert_eq!(cases[0].graph.label, "er(p=0.2)");
        assert_eq!(cases[0].signals.m, 100);
        assert_eq!(cases[1].graph.label, "er(p=0.2)");
        assert_eq!(cases[1].signals.m, 4 * 30, "m_per_node scales with n");
        assert_eq!(cases[3].graph.label, "rgg(k_rgg=3)");
        assert_eq!(cases[3].signals.m, 4 * 20);
        assert_eq!(cases[3].graph.zeta, None, "geometric model has no zeta");

        let solver = resolve_solver(cfg.solver.as_ref(), &SolverConfig::default()).unwrap();
        assert!(matches!(solver.mode, Mode::FastK(6)));
        assert_eq!(solver.admm.alpha1, 0.05);
        assert_eq!(solver.admm.alpha2, AdmmConfig::default().alpha2);
        assert_eq!(solver.label(), "fast(k=6)");

        let grid = resolve_grid(&cfg, &solver).unwrap();
        assert_eq!(grid.alpha1_values, vec![0.01, 0.1]);
        assert_eq!(grid.metric, SelectionMetric::AuprcRatio);

        let bench = resolve_bench(&cfg).unwrap();
        assert_eq!(bench.sizes, vec![50, 100]);
        assert_eq!((bench.reps, bench.columns), (3, 50), "defaults fill in");

        assert_eq!(resolve_repeats(&cfg, None).unwrap(), 5);
        assert_eq!(require_root_seed(&cfg, None).unwrap(), 42);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<FileConfig>("root_seed = 1\ntypo_key = 2\n")
            .expect_err("unknown key must fail");
        assert!(err.to_string().contains("typo_key"), "{err}");
    }

    #[test]
    fn model_parameter_mismatches_name_the_field() {
        let cfg = parse(
            r#"
            [[graph]]
            model = "ba"
            n = 10
            p = 0.5
            m_ba = 2
            [[signals]]
            filter = "heat"
            eta = 1.0
            m = 10
            "#,
        );
        let err = resolve_cases(&cfg).unwrap_err();
        assert!(matches!(&err, Failure::Schema(m) if m.contains("graph[0].p")), "{err:?}");

        let cfg = parse(
            r#"
            [[graph]]
            model = "rgg"
            n = 10
            k_rgg = 2
            zeta = 0.5
            [[signals]]
            filter = "heat"
            eta = 1.0
            m = 10
            "#,
        );
        let err = resolve_cases(&cfg).unwrap_err();
        assert!(matches!(&err, Failure::Schema(m) if m.contains("graph[0].zeta")), "{err:?}");
    }

    #[test]
    fn domain_violations_name_the_field() {
        let cfg = parse(
            r#"
            [[graph]]
            model = "er"
            n = 10
            p = 0.5
            zeta = 1.5
            [[signals]]
            filter = "heat"
            eta = 1.0
            m = 10
            "#,
        );
        let err = resolve_cases(&cfg).unwrap_err();
        match &err {
            Failure::Schema(m) => {
                assert!(m.contains("graph[0]"), "{m}");
                assert!(m.contains("zeta"), "{m}");
            }
            other => panic!("expected schema failure, got {other:?}"),
        }
    }

    #[test]
    fn m_and_m_per_node_are_exclusive_and_one_is_required() {
        let base = r#"
            [[graph]]
            model = "er"
            n = 10
            p = 0.5
        "#;
        let both = format!(
            "{base}\n[[signals]]\nfilter = \"heat\"\neta = 1.0\nm = 10\nm_per_node = 2\n"
        );
        let err = resolve_cases(&parse(&both)).unwrap_err();
        assert!(matches!(&err, Failure::Schema(m) if m.contains("not both")), "{err:?}");

        let neither = format!("{base}\n[[signals]]\nfilter = \"heat\"\neta = 1.0\n");
        let err = resolve_cases(&parse(&neither)).unwrap_err();
        assert!(matches!(&err, Failure::Schema(m) if m.contains("m or m_per_node")), "{err:?}");
    }

    #[test]
    fn solver_fast_needs_exactly_one_neighbor_rule() {
        let fast = |body: &str| {
            let text = format!("[solver]\nmode = \"fast\"\n{body}");
            let cfg = parse(&text);
            resolve_solver(cfg.solver.as_ref(), &SolverConfig::default())
        };
        assert!(fast("").is_err(), "k or beta required");
        assert!(fast("k = 5\nbeta = 2.0\n").is_err(), "not both");
        assert!(matches!(fast("k = 5\n").unwrap().mode, Mode::FastK(5)));
        assert!(matches!(fast("beta = 1.5\n").unwrap().mode, Mode::FastBeta(_)));
        assert!(fast("beta = 1.0\n").is_err(), "beta must exceed 1");

        let exact_with_k = parse("[solver]\nk = 5\n");
        assert!(
            resolve_solver(exact_with_k.solver.as_ref(), &SolverConfig::default()).is_err(),
            "k is meaningless for the exact solver"
        );
    }

    #[test]
    fn defaults_apply_without_a_solver_section() {
        let solver = resolve_solver(None, &SolverConfig::default()).unwrap();
        assert!(matches!(solver.mode, Mode::Exact));
        let d = AdmmConfig::default();
        assert_eq!(solver.admm.alpha1, d.alpha1);
        assert_eq!(solver.admm.max_iter, d.max_iter);

        let cfg = parse("root_seed = 1\n");
        assert_eq!(resolve_repeats(&cfg, None).unwrap(), DEFAULT_REPEATS);

        let grid = resolve_grid(&cfg, &solver).unwrap();
        assert_eq!(grid.alpha1_values, vec![d.alpha1], "singleton fallback");
        assert_eq!(grid.alpha2_values, vec![d.alpha2]);
    }

    #[test]
    fn flag_overrides_beat_the_file() {
        let cfg = parse("[solver]\nalpha1 = 0.5\nmax_iter = 7\n");
        let overrides = SolverConfig {
            alpha1: Some(0.25),
            ..SolverConfig::default()
        };
        let solver = resolve_solver(cfg.solver.as_ref(), &overrides).unwrap();
        assert_eq!(solver.admm.alpha1, 0.25, "flag wins");
        assert_eq!(solver.admm.max_iter, 7, "file fills the rest");
    }

    #[test]
    fn seed_tree_is_a_pure_function_of_indices() {
        let a = graph_seed(9, 2, 7);
        assert_eq!(a, graph_seed(9, 2, 7));
        assert_ne!(a, graph_seed(9, 2, 8));
        assert_ne!(a, graph_seed(9, 3, 7));
        assert_ne!(a, signal_seed(9, 2, 7), "purposes separate streams");
    }
}
