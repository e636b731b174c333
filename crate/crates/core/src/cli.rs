//! Command-line front end. Subcommands load CSV data, run the information,
//! certification, mutual-information, clustering, and expansion checks, and
//! write a structured key/value report (stdout or `--output`). Reports embed
//! the fully resolved configuration and contain no timestamps, so a rerun
//! with the same flags and seed is byte-identical.
//!
//! Exit codes: 0 success (or certification consistent), 1 certification
//! refuted, 2 input/validation error, 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::certifier::{self, Verdict};
use crate::clustering;
use crate::divergence::{self, DivergenceFn};
use crate::domain::DomainKind;
use crate::error::Error;
use crate::generator::ConvexGenerator;
use crate::information::{
    self, divergence_information, jensen_gap_information, JointDistribution,
};
use crate::linalg::Matrix;
use crate::report::Report;
use crate::sampler::{self, TrialSampler};
use crate::dataset::WeightedDataset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const KNOWN_GENERATORS: &str = "mahalanobis, negentropy, sqnorm";
const KNOWN_DIVERGENCES: &str = "abs, bregman-of-generator, kl, sqeuclidean";
const CLUSTER_REL_TOL: f64 = 1e-10;
const METRIC_SCALES: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Parser, Debug)]
#[command(
    name = "bregman",
    about = "Bregman divergences: informations, certification, mutual information, clustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Jensen-gap and divergence informations of a weighted CSV dataset.
    Info(CommonArgs),
    /// Test whether a divergence matches the Bregman divergence of a
    /// generator on sampled datasets.
    Certify(CommonArgs),
    /// Mutual information of a joint distribution (CSV conditionals with a
    /// leading weight column), in both formulations.
    Mi(CommonArgs),
    /// Bregman hard clustering of a weighted CSV dataset.
    Cluster(CommonArgs),
    /// Small-step quadratic-expansion check of a generator Hessian.
    MetricCheck(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Generator: sqnorm | negentropy | mahalanobis.
    #[arg(long)]
    pub generator: Option<String>,

    /// Generator parameter: dimension for sqnorm/negentropy, path to a CSV
    /// matrix W for mahalanobis.
    #[arg(long)]
    pub gen_param: Option<String>,

    /// Divergence: bregman-of-generator | kl | sqeuclidean | abs.
    #[arg(long, default_value = "bregman-of-generator")]
    pub divergence: String,

    /// Input CSV path.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Weights column (0-based index or header name). Without it, a header
    /// column named "weight" is used when present, otherwise weights are
    /// uniform.
    #[arg(long)]
    pub weights_column: Option<String>,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    /// Certification tolerance on the normalized information gap.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Number of clusters.
    #[arg(long)]
    pub k: Option<usize>,

    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,

    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Logarithm base for information quantities. Only "nat" is supported.
    #[arg(long, default_value = "nat")]
    pub log_base: String,
}

struct RunError {
    kind: &'static str,
    message: String,
    exit: i32,
}

impl RunError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            kind: "validation",
            message: message.into(),
            exit: EXIT_INVALID,
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: "numerical",
            message: message.into(),
            exit: EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let numerical = matches!(
            e,
            Error::CentroidNotInterior
                | Error::SecondArgumentNotInterior
                | Error::SecondArgumentHasZero
                | Error::GradientAtBoundary { .. }
                | Error::StepLeavesDomain
                | Error::HessianUnavailable
                | Error::RankDeficientProbes { .. }
                | Error::NotAffine { .. }
                | Error::EmptyCluster(_)
        );
        if numerical {
            RunError::numerical(e.to_string())
        } else {
            RunError::invalid(e.to_string())
        }
    }
}

/// Run a parsed command line, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (name, args) = match &cli.command {
        Command::Info(a) => ("info", a),
        Command::Certify(a) => ("certify", a),
        Command::Mi(a) => ("mi", a),
        Command::Cluster(a) => ("cluster", a),
        Command::MetricCheck(a) => ("metric-check", a),
    };
    let mut report = Report::new();
    report.push_text("command", name);
    push_config(&mut report, name, args);
    let outcome = match &cli.command {
        Command::Info(a) => cmd_info(&mut report, a),
        Command::Certify(a) => cmd_certify(&mut report, a),
        Command::Mi(a) => cmd_mi(&mut report, a),
        Command::Cluster(a) => cmd_cluster(&mut report, a),
        Command::MetricCheck(a) => cmd_metric_check(&mut report, a),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            report.push_text("error.kind", e.kind);
            report.push_text("error.message", &e.message);
            report.push_int("error.exit_code", i64::from(e.exit));
            e.exit
        }
    };
    if emit(&report, args.output.as_deref()).is_err() {
        eprintln!("error: could not write report");
        return EXIT_INVALID;
    }
    code
}

fn push_config(report: &mut Report, command: &str, args: &CommonArgs) {
    let opt = |o: &Option<String>| o.clone().unwrap_or_else(|| "none".into());
    report.push_text("config.command", command);
    report.push_text("config.generator", opt(&args.generator));
    report.push_text("config.gen_param", opt(&args.gen_param));
    report.push_text("config.divergence", &args.divergence);
    report.push_text(
        "config.input",
        args.input
            .as_ref()
            .map_or_else(|| "none".into(), |p| p.display().to_string()),
    );
    report.push_text("config.weights_column", opt(&args.weights_column));
    report.push_int("config.seed", args.seed as i64);
    report.push_int("config.trials", args.trials as i64);
    report.push_float("config.tol", args.tol);
    report.push_text(
        "config.k",
        args.k.map_or_else(|| "none".into(), |k| k.to_string()),
    );
    report.push_int("config.max_iters", args.max_iters as i64);
    report.push_text(
        "config.output",
        args.output
            .as_ref()
            .map_or_else(|| "none".into(), |p| p.display().to_string()),
    );
    report.push_text("config.log_base", &args.log_base);
}

fn emit(report: &Report, output: Option<&Path>) -> std::io::Result<()> {
    let text = report.render();
    match output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_log_base(args: &CommonArgs) -> Result<(), RunError> {
    if args.log_base != "nat" {
        return Err(RunError::invalid(format!(
            "unknown log base '{}'; known bases: nat",
            args.log_base
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV handling
// ---------------------------------------------------------------------------

struct CsvTable {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn read_csv(path: &Path) -> Result<CsvTable, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text, path)
}

fn parse_csv(text: &str, path: &Path) -> Result<CsvTable, RunError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    let mut header = None;
    if let Some(first) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields.iter().any(|f| f.parse::<f64>().is_err()) {
            header = Some(fields.iter().map(|s| s.to_string()).collect());
            lines.next();
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| {
            RunError::invalid(format!(
                "{}: data line {} does not parse as numbers: {e}",
                path.display(),
                i + 1
            ))
        })?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(RunError::invalid(format!(
                    "{}: ragged row {} ({} fields, expected {})",
                    path.display(),
                    i + 1,
                    row.len(),
                    prev.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(RunError::invalid(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(CsvTable { header, rows })
}

/// Split a table into weights and points. Weights are normalized to sum one;
/// absent weights are uniform.
fn split_weights(
    table: &CsvTable,
    weights_column: Option<&str>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), RunError> {
    let ncols = table.rows[0].len();
    let col = match weights_column {
        Some(selector) => {
            let idx = if let Ok(i) = selector.parse::<usize>() {
                i
            } else {
                let header = table.header.as_ref().ok_or_else(|| {
                    RunError::invalid(format!(
                        "weights column '{selector}' named but the file has no header"
                    ))
                })?;
                header
                    .iter()
                    .position(|h| h.eq_ignore_ascii_case(selector))
                    .ok_or_else(|| {
                        RunError::invalid(format!("no column named '{selector}' in header"))
                    })?
            };
            if idx >= ncols {
                return Err(RunError::invalid(format!(
                    "weights column index {idx} out of range ({ncols} columns)"
                )));
            }
            Some(idx)
        }
        None => table.header.as_ref().and_then(|h| {
            h.iter()
                .position(|name| name.eq_ignore_ascii_case("weight"))
        }),
    };
    match col {
        Some(idx) => {
            if ncols < 2 {
                return Err(RunError::invalid(
                    "weights column present but no point columns remain",
                ));
            }
            let raw: Vec<f64> = table.rows.iter().map(|r| r[idx]).collect();
            let weights = normalize_weights(&raw)?;
            let points = table
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != idx)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            Ok((weights, points))
        }
        None => {
            let n = table.rows.len();
            Ok((vec![1.0 / n as f64; n], table.rows.clone()))
        }
    }
}

fn normalize_weights(raw: &[f64]) -> Result<Vec<f64>, RunError> {
    if let Some(w) = raw.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(RunError::invalid(format!(
            "weights must be finite and nonnegative, got {w}"
        )));
    }
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 {
        return Err(RunError::invalid("weights sum to zero"));
    }
    Ok(raw.iter().map(|w| w / sum).collect())
}

// ---------------------------------------------------------------------------
// Generator / divergence resolution
// ---------------------------------------------------------------------------

fn resolve_generator(
    args: &CommonArgs,
    inferred_dim: Option<usize>,
) -> Result<ConvexGenerator, RunError> {
    let name = args
        .generator
        .as_deref()
        .ok_or_else(|| RunError::invalid("--generator is required for this command"))?;
    let dim_param = || -> Result<usize, RunError> {
        match &args.gen_param {
            Some(p) => p.parse::<usize>().map_err(|_| {
                RunError::invalid(format!("--gen-param '{p}' is not a dimension"))
            }),
            None => inferred_dim.ok_or_else(|| {
                RunError::invalid("--gen-param (dimension) is required without input data")
            }),
        }
    };
    let gen = match name {
        "sqnorm" => ConvexGenerator::squared_norm(dim_param()?)?,
        "negentropy" => ConvexGenerator::negative_entropy(dim_param()?)?,
        "mahalanobis" => {
            let path = args.gen_param.as_deref().ok_or_else(|| {
                RunError::invalid("mahalanobis needs --gen-param <csv-path-of-W>")
            })?;
            let table = read_csv(Path::new(path))?;
            let rows = table.rows.len();
            let cols = table.rows[0].len();
            if rows != cols {
                return Err(RunError::invalid(format!(
                    "W must be square, got {rows}x{cols}"
                )));
            }
            let w = Matrix::from_rows(&table.rows)?;
            ConvexGenerator::squared_mahalanobis(w)?
        }
        other => {
            return Err(RunError::invalid(format!(
                "unknown generator '{other}'; known generators: {KNOWN_GENERATORS}"
            )))
        }
    };
    if let Some(d) = inferred_dim {
        if gen.dim() != d {
            return Err(RunError::invalid(format!(
                "generator dimension {} does not match data dimension {d}",
                gen.dim()
            )));
        }
    }
    Ok(gen)
}

fn resolve_divergence(
    args: &CommonArgs,
    gen: &ConvexGenerator,
) -> Result<DivergenceFn, RunError> {
    let d = match args.divergence.as_str() {
        "bregman-of-generator" => DivergenceFn::bregman(gen),
        "kl" => DivergenceFn::kl(gen.dim())?,
        "sqeuclidean" => DivergenceFn::squared_euclidean(gen.dim())?,
        "abs" => {
            if gen.dim() != 1 {
                return Err(RunError::invalid(
                    "abs distance is one-dimensional; use a dimension-1 generator",
                ));
            }
            DivergenceFn::abs_distance()
        }
        other => {
            return Err(RunError::invalid(format!(
                "unknown divergence '{other}'; known divergences: {KNOWN_DIVERGENCES}"
            )))
        }
    };
    if !d.domain().same_shape(gen.domain()) {
        return Err(RunError::invalid(format!(
            "divergence domain {} does not match generator domain {}",
            d.domain(),
            gen.domain()
        )));
    }
    Ok(d)
}

fn load_dataset(
    gen: &ConvexGenerator,
    weights: Vec<f64>,
    points: Vec<Vec<f64>>,
) -> Result<WeightedDataset, RunError> {
    let matrix = Matrix::from_rows(&points)?;
    Ok(WeightedDataset::new(
        gen.domain().clone(),
        weights,
        matrix,
    )?)
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn require_input(args: &CommonArgs) -> Result<&Path, RunError> {
    args.input
        .as_deref()
        .ok_or_else(|| RunError::invalid("--input is required for this command"))
}

fn cmd_info(report: &mut Report, args: &CommonArgs) -> Result<i32, RunError> {
    check_log_base(args)?;
    let table = read_csv(require_input(args)?)?;
    let (weights, points) = split_weights(&table, args.weights_column.as_deref())?;
    let dim = points[0].len();
    let gen = resolve_generator(args, Some(dim))?;
    let d = resolve_divergence(args, &gen)?;
    let ds = load_dataset(&gen, weights, points)?;
    let i_phi = jensen_gap_information(&gen, &ds)?;
    let i_d = divergence_information(&d, &ds)?;
    let centroid = ds.centroid();
    report.push_int("n", ds.len() as i64);
    report.push_int("l", ds.dim() as i64);
    report.push_float("i_phi", i_phi);
    report.push_float("i_d", i_d);
    report.push_float("gap", i_phi - i_d);
    report.push_float_vec("centroid", centroid.point);
    report.push_bool("centroid_interior", centroid.interior);
    Ok(EXIT_OK)
}

fn cmd_certify(report: &mut Report, args: &CommonArgs) -> Result<i32, RunError> {
    check_log_base(args)?;
    let gen = resolve_generator(args, None)?;
    let d = resolve_divergence(args, &gen)?;
    divergence::validate_sampled(&d, sampler::sub_seed(args.seed, 0x5A11D), 1000)
        .map_err(|e| RunError::invalid(e.to_string()))?;
    let trial_sampler =
        TrialSampler::new(gen.domain().clone(), args.seed).with_trials(args.trials);
    let cert = certifier::certify(&gen, &d, &trial_sampler, args.tol)?;
    report.push_text("verdict", cert.verdict.to_string());
    report.push_int("trials", cert.trials_run as i64);
    report.push_float("max_abs_gap", cert.max_abs_gap);
    report.push_float("tolerance", cert.tolerance_used);
    report.push_text("verdict_basis", "sampled trials; consistency is evidence, not proof");
    match &cert.counterexample {
        Some(ce) => {
            report.push_int("counterexample.n", ce.dataset.len() as i64);
            report.push_float_vec("counterexample.mu", ce.dataset.weights().to_vec());
            let rows: Vec<Vec<f64>> = (0..ce.dataset.len())
                .map(|i| ce.dataset.row(i).to_vec())
                .collect();
            report.push_float_matrix("counterexample.X", rows);
            report.push_float("counterexample.I_phi", ce.i_phi);
            report.push_float("counterexample.I_d", ce.i_d);
            report.push_float("counterexample.normalized_gap", ce.normalized_gap);
            report.push_bool("counterexample.minimized", ce.minimized);
        }
        None => report.push_text("counterexample", "none"),
    }
    report.push_int("diagnostics.points", cert.diagnostics.points_checked as i64);
    report.push_float("diagnostics.oddness", cert.diagnostics.oddness);
    report.push_float("diagnostics.homogeneity", cert.diagnostics.homogeneity);
    report.push_float("diagnostics.affine_fit", cert.diagnostics.affine_fit);
    report.push_float("diagnostics.h2_consistency", cert.diagnostics.h2_consistency);
    report.push_float("diagnostics.grad_recovery", cert.diagnostics.grad_recovery);
    report.push_bool("diagnostics.all_pass", cert.diagnostics.all_pass);
    report.push_text("summary", cert.summary());
    Ok(match cert.verdict {
        Verdict::ConsistentWithBregman => EXIT_OK,
        Verdict::RefutedWithCounterexample => EXIT_REFUTED,
    })
}

fn cmd_mi(report: &mut Report, args: &CommonArgs) -> Result<i32, RunError> {
    check_log_base(args)?;
    let table = read_csv(require_input(args)?)?;
    if table.rows[0].len() < 2 {
        return Err(RunError::invalid(
            "mi input needs a leading weight column plus at least one conditional column",
        ));
    }
    let raw_mu: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let mu = normalize_weights(&raw_mu)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for (i, r) in table.rows.iter().enumerate() {
        let row = normalize_weights(&r[1..])
            .map_err(|e| RunError::invalid(format!("conditional row {}: {}", i + 1, e.message)))?;
        rows.push(row);
    }
    let joint = JointDistribution::new(mu, Matrix::from_rows(&rows)?)?;
    let entropy_form = information::mutual_information_entropy_reduction(&joint);
    let divergence_form = information::mutual_information_divergence_form(&joint);
    let diff = (entropy_form - divergence_form).abs();
    report.push_int("k", joint.rows() as i64);
    report.push_int("l", joint.cols() as i64);
    report.push_float("mi_nats", entropy_form);
    report.push_float("mi_divergence_form", divergence_form);
    report.push_float("abs_difference", diff);
    if diff > 1e-10 {
        return Err(RunError::numerical(format!(
            "mutual-information formulations disagree by {diff:e}"
        )));
    }
    Ok(EXIT_OK)
}

fn cmd_cluster(report: &mut Report, args: &CommonArgs) -> Result<i32, RunError> {
    check_log_base(args)?;
    let k = args
        .k
        .ok_or_else(|| RunError::invalid("--k is required for cluster"))?;
    let table = read_csv(require_input(args)?)?;
    let (weights, points) = split_weights(&table, args.weights_column.as_deref())?;
    let dim = points[0].len();
    let gen = resolve_generator(args, Some(dim))?;
    let ds = load_dataset(&gen, weights, points)?;
    let state = clustering::bregman_lloyd(&gen, &ds, k, args.seed, args.max_iters, CLUSTER_REL_TOL)?;
    report.push_int("n", ds.len() as i64);
    report.push_int("l", ds.dim() as i64);
    report.push_int("k", k as i64);
    report.push_float("loss", state.loss);
    report.push_int("iterations", state.iteration as i64);
    report.push_bool("converged", state.converged);
    report.push_int_vec(
        "assignments",
        state.assignments.iter().map(|&a| a as i64).collect(),
    );
    let centroids: Vec<Vec<f64>> = (0..state.centroids.rows())
        .map(|j| state.centroids.row(j).to_vec())
        .collect();
    report.push_float_matrix("centroids", centroids);
    report.push_float_vec("loss_trace", state.loss_trace.clone());
    report.push_int("empty_cluster_repairs", state.empty_cluster_repairs as i64);
    report.push_int("boundary_clamps", state.boundary_clamps as i64);
    Ok(EXIT_OK)
}

fn cmd_metric_check(report: &mut Report, args: &CommonArgs) -> Result<i32, RunError> {
    check_log_base(args)?;
    let (point, gen) = match &args.input {
        Some(path) => {
            let table = read_csv(path)?;
            let dim = table.rows[0].len();
            let gen = resolve_generator(args, Some(dim))?;
            (table.rows[0].clone(), gen)
        }
        None => {
            let gen = resolve_generator(args, None)?;
            let l = gen.dim();
            let point = match gen.domain().kind() {
                DomainKind::Simplex => vec![1.0 / l as f64; l],
                _ => vec![0.5; l],
            };
            (point, gen)
        }
    };
    if !gen.domain().contains_interior(&point) {
        return Err(RunError::numerical(format!(
            "expansion point is not interior to {}",
            gen.domain()
        )));
    }
    // Seeded direction toward a random interior point; tangent on the simplex
    // because both endpoints have unit coordinate sum.
    let mut rng = sampler::stream_rng(args.seed, 0);
    let target = sampler::sample_interior_point(&mut rng, gen.domain(), 1.0);
    let mut direction: Vec<f64> = target.iter().zip(&point).map(|(t, p)| t - p).collect();
    let max_component = direction.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_component == 0.0 {
        return Err(RunError::numerical("degenerate expansion direction"));
    }
    for v in &mut direction {
        *v /= max_component;
    }
    let ratios = divergence::local_metric_check(&gen, &point, &direction, &METRIC_SCALES)?;
    let non_increasing = ratios.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    report.push_float_vec("point", point);
    report.push_float_vec("direction", direction);
    report.push_float_vec("scales", ratios.iter().map(|r| r.0).collect());
    report.push_float_vec("ratios", ratios.iter().map(|r| r.1).collect());
    report.push_bool("ratios_non_increasing", non_increasing);
    Ok(EXIT_OK)
}
