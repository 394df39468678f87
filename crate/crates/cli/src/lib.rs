//! The `rank` command-line tool.
//!
//! [`run`] holds the whole program so tests can drive it in-process; the
//! binary only forwards `std::env::args` and the standard streams.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use totalrank_core::dense_verify::suite::{run_suite, SuiteConfig, SuiteReport, DEFAULT_SEED};
use totalrank_core::metrics::ranking;
use totalrank_core::pagerank::{dense_solve, default_max_iter, power_iteration};
use totalrank_core::quadrature::marginalize_pagerank;
use totalrank_core::totalrank::series_sum;
use totalrank_core::{
    parse_edge_list, DampingFactor, GraphEdges, QuadratureConfig, RankResult, SeriesConfig,
    StochasticVector, TransitionMatrix,
};

mod format;

pub use format::format_score;
pub use totalrank_core::metrics::{kendall_tau, RankComparison};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

const DEFAULT_SERIES_TOL: f64 = 1e-4;
const DEFAULT_POWER_TOL: f64 = 1e-10;
const DEFAULT_QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "rank", version, about = "PageRank and damping-free TotalRank on edge-list graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a graph and report its size, dangling nodes and column sums.
    Stats {
        file: PathBuf,
        #[arg(long)]
        teleport: Option<PathBuf>,
    },
    /// Damped PageRank at a fixed alpha.
    Pagerank {
        file: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_POWER_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = PagerankMethod::Power)]
        method: PagerankMethod,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        teleport: Option<PathBuf>,
    },
    /// PageRank averaged over alpha in (0, 1).
    Totalrank {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TotalrankMethod::Series)]
        method: TotalrankMethod,
        /// Series: tail mass. Quadrature: largest accepted error estimate.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        no_renormalize: bool,
        #[arg(long)]
        teleport: Option<PathBuf>,
    },
    /// Compare the rankings produced by two methods.
    Compare {
        file: PathBuf,
        /// Two of: power, dense, series, quadrature.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        methods: Vec<MethodName>,
        #[arg(long, default_value_t = 0.85)]
        alpha: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        teleport: Option<PathBuf>,
    },
    /// Check the series, logarithm and closed-form identities on random matrices.
    Verify {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PagerankMethod {
    Power,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TotalrankMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Power,
    Dense,
    Series,
    Quadrature,
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodName::Power => "power",
            MethodName::Dense => "dense",
            MethodName::Series => "series",
            MethodName::Quadrature => "quadrature",
        })
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    Io(io::Error),
}

impl From<totalrank_core::Error> for CliError {
    fn from(e: totalrank_core::Error) -> Self {
        use totalrank_core::Error as E;
        match e {
            E::Parse { .. }
            | E::Validation { .. }
            | E::DimensionMismatch { .. }
            | E::InvalidParameter(_)
            | E::NotStochastic(_) => CliError::Usage(e.to_string()),
            E::Singular { .. } | E::Domain(_) | E::InnerSolve { .. } | E::Undefined(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = Result<i32, CliError>;

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code: 0 success, 1 usage error, 2 numerical or domain error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };

    let result = match cli.command {
        Command::Stats { file, teleport } => stats(&file, teleport.as_deref(), out),
        Command::Pagerank {
            file,
            alpha,
            tol,
            method,
            max_iter,
            teleport,
        } => pagerank(&file, teleport.as_deref(), alpha, tol, method, max_iter, out, err),
        Command::Totalrank {
            file,
            method,
            tol,
            no_renormalize,
            teleport,
        } => totalrank(&file, teleport.as_deref(), method, tol, !no_renormalize, out, err),
        Command::Compare {
            file,
            methods,
            alpha,
            tol,
            top_k,
            json,
            teleport,
        } => compare(&file, teleport.as_deref(), &methods, alpha, tol, top_k, json, out, err),
        Command::Verify {
            n,
            trials,
            seed,
            json,
        } => verify(SuiteConfig { n, trials, seed }, json, out),
    };

    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Numerical(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_NUMERICAL
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

struct Loaded {
    graph: GraphEdges,
    teleport: StochasticVector,
    matrix: TransitionMatrix,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// One nonnegative weight per line; `#` comments and blank lines skipped.
fn parse_teleport(text: &str, n: usize) -> Result<StochasticVector, CliError> {
    let mut weights = Vec::with_capacity(n);
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w: f64 = line.parse().map_err(|_| {
            CliError::Usage(format!("teleport file line {}: malformed weight `{line}`", idx + 1))
        })?;
        weights.push(w);
    }
    if weights.len() != n {
        return Err(CliError::Usage(format!(
            "teleport file has {} weights for {n} nodes",
            weights.len()
        )));
    }
    Ok(StochasticVector::from_weights(weights)?)
}

fn load(file: &Path, teleport: Option<&Path>) -> Result<Loaded, CliError> {
    let graph = parse_edge_list(&read(file)?)?;
    let n = graph.node_count();
    if n == 0 {
        return Err(CliError::Usage(format!("{} has no nodes", file.display())));
    }
    let teleport = match teleport {
        Some(p) => parse_teleport(&read(p)?, n)?,
        None => StochasticVector::uniform(n)?,
    };
    let matrix = TransitionMatrix::build(&graph, &teleport)?;
    Ok(Loaded {
        graph,
        teleport,
        matrix,
    })
}

fn write_tsv(out: &mut dyn Write, scores: &[f64]) -> io::Result<()> {
    for i in ranking(scores) {
        writeln!(out, "{i}\t{}", format_score(scores[i]))?;
    }
    Ok(())
}

fn report_result(err: &mut dyn Write, r: &RankResult) -> io::Result<i32> {
    writeln!(
        err,
        "# method={} iterations_or_terms={} error_bound={} renormalized={}",
        r.method.as_str(),
        r.iterations_or_terms,
        format_score(r.error_bound),
        r.renormalized
    )?;
    if r.converged {
        Ok(EXIT_OK)
    } else {
        writeln!(
            err,
            "warning: {} stopped at its iteration cap before reaching the tolerance",
            r.method.as_str()
        )?;
        Ok(EXIT_NUMERICAL)
    }
}

fn stats(file: &Path, teleport: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let graph = parse_edge_list(&read(file)?)?;
    let row = |out: &mut dyn Write, k: &str, v: &dyn fmt::Display| writeln!(out, "{k:<26}{v}");
    row(out, "nodes", &graph.node_count())?;
    row(out, "edges", &graph.edges().len())?;
    if graph.node_count() == 0 {
        return Ok(EXIT_OK);
    }
    let loaded = load(file, teleport)?;
    let dev = loaded.matrix.max_column_sum_deviation();
    row(out, "dangling", &loaded.matrix.dangling_columns().len())?;
    row(out, "link_entries", &loaded.matrix.nnz())?;
    row(out, "max_column_sum_deviation", &format_score(dev))?;
    let ok = dev <= totalrank_core::graph_io::STOCHASTIC_TOL;
    row(out, "column_sums", &if ok { "ok" } else { "FAILED" })?;
    Ok(if ok { EXIT_OK } else { EXIT_NUMERICAL })
}

#[allow(clippy::too_many_arguments)]
fn pagerank(
    file: &Path,
    teleport: Option<&Path>,
    alpha: f64,
    tol: f64,
    method: PagerankMethod,
    max_iter: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let alpha = DampingFactor::new(alpha)?;
    let loaded = load(file, teleport)?;
    let result = match method {
        PagerankMethod::Power => {
            let max_iter = max_iter.unwrap_or_else(|| default_max_iter(alpha, tol));
            power_iteration(&loaded.matrix, &loaded.teleport, alpha, tol, max_iter)?
        }
        PagerankMethod::Dense => dense_solve(&loaded.matrix.to_dense(), &loaded.teleport, alpha)?,
    };
    write_tsv(out, &result.vector)?;
    Ok(report_result(err, &result)?)
}

fn run_totalrank(
    loaded: &Loaded,
    method: TotalrankMethod,
    tol: Option<f64>,
    renormalize: bool,
) -> Result<RankResult, CliError> {
    match method {
        TotalrankMethod::Series => {
            let cfg = SeriesConfig {
                tol: tol.unwrap_or(DEFAULT_SERIES_TOL),
                renormalize,
                ..SeriesConfig::default()
            };
            Ok(series_sum(&loaded.matrix, &loaded.teleport, &cfg)?)
        }
        TotalrankMethod::Quadrature => {
            let r = marginalize_pagerank(
                &loaded.matrix,
                &loaded.teleport,
                &QuadratureConfig::default(),
            )?;
            let tol = tol.unwrap_or(DEFAULT_QUADRATURE_TOL);
            if r.error_bound > tol {
                return Err(CliError::Numerical(format!(
                    "quadrature error estimate {} exceeds --tol {}",
                    format_score(r.error_bound),
                    format_score(tol)
                )));
            }
            Ok(r)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn totalrank(
    file: &Path,
    teleport: Option<&Path>,
    method: TotalrankMethod,
    tol: Option<f64>,
    renormalize: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let loaded = load(file, teleport)?;
    let result = run_totalrank(&loaded, method, tol, renormalize)?;
    write_tsv(out, &result.vector)?;
    Ok(report_result(err, &result)?)
}

fn run_method(
    loaded: &Loaded,
    method: MethodName,
    alpha: f64,
    tol: Option<f64>,
) -> Result<RankResult, CliError> {
    match method {
        MethodName::Power | MethodName::Dense => {
            let alpha = DampingFactor::new(alpha)?;
            if method == MethodName::Power {
                let tol = tol.unwrap_or(DEFAULT_POWER_TOL);
                let r = power_iteration(
                    &loaded.matrix,
                    &loaded.teleport,
                    alpha,
                    tol,
                    default_max_iter(alpha, tol),
                )?;
                Ok(r)
            } else {
                Ok(dense_solve(&loaded.matrix.to_dense(), &loaded.teleport, alpha)?)
            }
        }
        MethodName::Series => run_totalrank(loaded, TotalrankMethod::Series, tol, true),
        // --tol is the series tolerance here; quadrature keeps its default check
        MethodName::Quadrature => run_totalrank(loaded, TotalrankMethod::Quadrature, None, false),
    }
}

#[derive(Serialize)]
struct CompareReport<'a> {
    nodes: usize,
    edges: usize,
    comparison: &'a RankComparison,
    error_bounds: [f64; 2],
}

#[allow(clippy::too_many_arguments)]
fn compare(
    file: &Path,
    teleport: Option<&Path>,
    methods: &[MethodName],
    alpha: f64,
    tol: Option<f64>,
    top_k: usize,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let [m1, m2] = methods else {
        return Err(CliError::Usage(format!(
            "--methods takes exactly two methods, got {}",
            methods.len()
        )));
    };
    let loaded = load(file, teleport)?;
    let a = run_method(&loaded, *m1, alpha, tol)?;
    let b = run_method(&loaded, *m2, alpha, tol)?;
    let cmp = RankComparison::new((m1.to_string(), m2.to_string()), &a.vector, &b.vector, top_k)?;

    if json {
        let report = CompareReport {
            nodes: loaded.graph.node_count(),
            edges: loaded.graph.edges().len(),
            comparison: &cmp,
            error_bounds: [a.error_bound, b.error_bound],
        };
        serde_json::to_writer_pretty(&mut *out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
    } else {
        let tau = cmp
            .kendall_tau
            .map_or_else(|| "undefined".to_string(), format_score);
        let rows = [
            ("methods".to_string(), format!("{} vs {}", cmp.methods.0, cmp.methods.1)),
            ("nodes".to_string(), loaded.graph.node_count().to_string()),
            ("kendall_tau".to_string(), tau),
            ("l1_distance".to_string(), format_score(cmp.l1_distance)),
            ("top_k".to_string(), cmp.top_k.to_string()),
            ("top_k_overlap".to_string(), cmp.top_k_overlap.to_string()),
            (format!("error_bound[{}]", cmp.methods.0), format_score(a.error_bound)),
            (format!("error_bound[{}]", cmp.methods.1), format_score(b.error_bound)),
        ];
        for (k, v) in rows {
            writeln!(out, "{k:<26}{v}")?;
        }
    }

    let mut code = EXIT_OK;
    for r in [&a, &b] {
        if !r.converged {
            writeln!(err, "warning: {} did not reach its tolerance", r.method.as_str())?;
            code = EXIT_NUMERICAL;
        }
    }
    Ok(code)
}

fn verify(cfg: SuiteConfig, json: bool, out: &mut dyn Write) -> CliResult {
    if cfg.n == 0 || cfg.trials == 0 {
        return Err(CliError::Usage("--n and --trials must be positive".into()));
    }
    let report = run_suite(&cfg)?;
    if json {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
    } else {
        write_verify_text(out, &report)?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_NUMERICAL })
}

fn write_verify_text(out: &mut dyn Write, report: &SuiteReport) -> io::Result<()> {
    writeln!(
        out,
        "# n={} trials={} seed={}",
        report.n, report.trials, report.seed
    )?;
    writeln!(
        out,
        "{:<32}{:>7}  {:<20}{:<20}{:<22}result",
        "identity", "cases", "max_residual", "worst_ratio", "threshold"
    )?;
    for c in &report.identities {
        writeln!(
            out,
            "{:<32}{:>7}  {:<20}{:<20}{:<22}{}",
            c.name,
            c.cases,
            format_score(c.max_residual),
            format_score(c.worst_ratio),
            c.threshold,
            if c.passed { "pass" } else { "FAIL" }
        )?;
    }
    writeln!(out, "overall{:>63}", if report.passed { "pass" } else { "FAIL" })
}
