//! The `qslchan` command line.
//!
//! Every command is split into three phases: flags are turned into a
//! validated config (usage errors, exit 2), the config is evaluated into a
//! string (numerical failures, exit 1), and only then is anything written.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{
    apply, correlated_kraus, evolved_closed_form, ChannelSpec, DecayPoint, Family,
};
use crate::error::{Error, Result};
use crate::output::{format_number, render, to_json_value, Format};
use crate::qslt::{
    oracle_mixed, oracle_ratio, qslt_mixed, qslt_pure_ratio, MixedBoundQuery, PureBoundQuery,
    QsltResult,
};
use crate::scan::{
    figure_dataset, find_c_c, find_mu_critical, find_p_tau_c, CriticalResult, FigureId, ScanGrid,
};
use crate::state::{bell_like_density, concurrence, BellLikeState, DensityMatrix};
use crate::validate::{self, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qslchan",
    version,
    about = "Quantum speed limits of two-qubit states in correlated noise channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a Bell-like state through one correlated channel use.
    Evolve(EvolveArgs),
    /// Speed-limit time for a single parameter point.
    Qslt(QsltArgs),
    /// Sweep the pure bound over (mu, C, endpoint), or run a critical-value search.
    Scan(ScanArgs),
    /// Regenerate the dataset behind one figure.
    Figure(FigureArgs),
    /// Run the self-check suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Amplitude of |00⟩; β = √(1 − α²).
    #[arg(long, conflicts_with = "concurrence")]
    pub alpha: Option<f64>,
    /// Concurrence C, mapped to the α ≤ 1/√2 branch.
    #[arg(long)]
    pub concurrence: Option<f64>,
}

impl StateArgs {
    fn state(&self) -> Result<BellLikeState> {
        match (self.alpha, self.concurrence) {
            (Some(a), _) => BellLikeState::new(a),
            (None, Some(c)) => BellLikeState::from_concurrence(c),
            (None, None) => Err(Error::Domain(
                "one of --alpha or --concurrence is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(Format))]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub mu: f64,
    #[command(flatten)]
    pub state: StateArgs,
    /// Final decay parameter P_τ or p_τ in (0, 1].
    #[arg(long)]
    pub endpoint: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, Args)]
pub struct QsltArgs {
    #[arg(long, value_enum, default_value = "pure")]
    pub bound: BoundArg,
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub mu: f64,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub endpoint: Option<f64>,
    /// Window start (mixed bound).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Window length (mixed bound).
    #[arg(long = "tau-d")]
    pub tau_d: Option<f64>,
    /// Decay rate; defaults to 1 for amplitude damping and 1/2 otherwise.
    #[arg(long)]
    pub rate: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriticalArg {
    /// Critical excited population of amplitude damping.
    PTauC,
    /// Critical concurrence of amplitude damping.
    #[value(name = "c-c")]
    CC,
    /// Critical correlation strength of depolarizing.
    Mu,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "ad")]
    pub family: Family,
    /// Comma-separated correlation strengths.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<f64>,
    /// Comma-separated concurrences; defaults to k/points, k = 1..points.
    #[arg(long, value_delimiter = ',')]
    pub concurrence: Vec<f64>,
    /// Comma-separated endpoints.
    #[arg(long, value_delimiter = ',')]
    pub endpoint: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Run a critical-value search instead of a sweep.
    #[arg(long, value_enum)]
    pub critical: Option<CriticalArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_parser = clap::value_parser!(FigureId))]
    pub id: FigureId,
    /// Grid intervals along the swept axis.
    #[arg(long, default_value_t = crate::scan::DEFAULT_POINTS)]
    pub points: usize,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = validate::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "perturb-kraus", hide = true)]
    pub perturb_kraus: Option<f64>,
}

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(e: Error) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }

    fn failure(e: Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

/// Destination and body of one file to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub body: String,
}

/// Everything a command produces; written only after evaluation succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub code: i32,
}

impl Outcome {
    fn single(path: Option<PathBuf>, body: String) -> Self {
        Self {
            artifacts: vec![Artifact { path, body }],
            code: EXIT_OK,
        }
    }
}

fn pick_format(requested: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = requested.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Error::Domain(format!(
            "format {f:?} is not supported by this command"
        )))
    }
}

#[derive(Serialize)]
struct MatrixDump {
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

fn dump(rho: &DensityMatrix) -> MatrixDump {
    let m = rho.matrix();
    MatrixDump {
        real: (0..4)
            .map(|i| (0..4).map(|j| m[(i, j)].re).collect())
            .collect(),
        imag: (0..4)
            .map(|i| (0..4).map(|j| m[(i, j)].im).collect())
            .collect(),
    }
}

#[derive(Serialize)]
struct EvolveReport {
    family: Family,
    mu: f64,
    alpha: f64,
    endpoint: f64,
    rho: MatrixDump,
    trace: f64,
    min_eigenvalue: f64,
    max_discrepancy: f64,
}

pub struct EvolveConfig {
    spec: ChannelSpec,
    state: BellLikeState,
    endpoint: DecayPoint,
    format: Format,
    out: Option<PathBuf>,
}

impl EvolveConfig {
    pub fn from_args(a: &EvolveArgs) -> Result<Self> {
        Ok(Self {
            spec: ChannelSpec::with_default_rate(a.family, a.mu)?,
            state: a.state.state()?,
            endpoint: DecayPoint::new(a.endpoint)?,
            format: pick_format(a.output.format, Format::Json, &[Format::Json, Format::Csv])?,
            out: a.output.out.clone(),
        })
    }
}

pub fn cmd_evolve(cfg: &EvolveConfig) -> Result<Outcome> {
    let closed = evolved_closed_form(&cfg.spec, &cfg.state, cfg.endpoint);
    let kraus = apply(
        &correlated_kraus(&cfg.spec, cfg.endpoint),
        &bell_like_density(&cfg.state),
    )?;
    let report = EvolveReport {
        family: cfg.spec.family,
        mu: cfg.spec.mu,
        alpha: cfg.state.alpha(),
        endpoint: cfg.endpoint.value(),
        rho: dump(&closed),
        trace: closed.matrix().trace().re,
        min_eigenvalue: closed.min_eigenvalue(),
        max_discrepancy: closed.matrix().max_abs_diff(kraus.matrix()),
    };
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("row,col,re,im\n");
            for i in 0..4 {
                for j in 0..4 {
                    s.push_str(&format!(
                        "{i},{j},{},{}\n",
                        format_number(report.rho.real[i][j]),
                        format_number(report.rho.imag[i][j])
                    ));
                }
            }
            s
        }
        _ => to_json_value(&report)?,
    };
    Ok(Outcome::single(cfg.out.clone(), body))
}

#[derive(Serialize)]
struct QsltReport {
    family: Family,
    mu: f64,
    alpha: f64,
    concurrence: f64,
    #[serde(flatten)]
    result: QsltResult,
    oracle: Option<f64>,
}

pub enum QsltConfig {
    Pure(PureBoundQuery, Format, Option<PathBuf>),
    Mixed(MixedBoundQuery, Format, Option<PathBuf>),
}

impl QsltConfig {
    pub fn from_args(a: &QsltArgs) -> Result<Self> {
        let rate = a.rate.unwrap_or(a.family.default_rate());
        let spec = ChannelSpec::new(a.family, a.mu, rate)?;
        let state = a.state.state()?;
        let format = pick_format(a.output.format, Format::Json, &[Format::Json, Format::Csv])?;
        let out = a.output.out.clone();
        match a.bound {
            BoundArg::Pure => {
                let e = a
                    .endpoint
                    .ok_or_else(|| Error::Domain("--bound pure requires --endpoint".into()))?;
                Ok(Self::Pure(
                    PureBoundQuery {
                        spec,
                        state,
                        endpoint: DecayPoint::new(e)?,
                    },
                    format,
                    out,
                ))
            }
            BoundArg::Mixed => {
                let (Some(tau), Some(tau_d)) = (a.tau, a.tau_d) else {
                    return Err(Error::Domain(
                        "--bound mixed requires --tau and --tau-d".into(),
                    ));
                };
                Ok(Self::Mixed(
                    MixedBoundQuery::new(spec, state, tau, tau_d)?,
                    format,
                    out,
                ))
            }
        }
    }
}

pub fn cmd_qslt(cfg: &QsltConfig) -> Result<Outcome> {
    let (spec, state, result, oracle, format, out) = match cfg {
        QsltConfig::Pure(q, f, o) => (
            q.spec,
            q.state,
            qslt_pure_ratio(q)?,
            oracle_ratio(&q.spec, &q.state, q.endpoint),
            *f,
            o,
        ),
        QsltConfig::Mixed(q, f, o) => (
            q.spec,
            q.state,
            qslt_mixed(q)?,
            oracle_mixed(&q.spec, &q.state, q.tau, q.tau_d),
            *f,
            o,
        ),
    };
    let report = QsltReport {
        family: spec.family,
        mu: spec.mu,
        alpha: state.alpha(),
        concurrence: concurrence(&state),
        oracle: if result.stationary && matches!(cfg, QsltConfig::Pure(..)) {
            None
        } else {
            oracle
        },
        result,
    };
    let body = match format {
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
            format!(
                "bound,family,mu,alpha,numerator,denominator,value,stationary,oracle\n{},{},{},{},{},{},{},{},{}\n",
                if matches!(cfg, QsltConfig::Pure(..)) { "pure" } else { "mixed" },
                report.family,
                format_number(report.mu),
                format_number(report.alpha),
                format_number(report.result.numerator),
                format_number(report.result.denominator),
                opt(report.result.value),
                report.result.stationary,
                opt(report.oracle)
            )
        }
        _ => to_json_value(&report)?,
    };
    Ok(Outcome::single(out.clone(), body))
}

pub enum ScanConfig {
    Sweep(ScanGrid, Format, Option<PathBuf>),
    Critical(CriticalQuery, Format, Option<PathBuf>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriticalQuery {
    PTauC { c: f64, mu: f64 },
    CC { mu: f64, p_tau: f64 },
    Mu { c: f64, p_tau: f64 },
}

fn single(name: &str, values: &[f64]) -> Result<f64> {
    match values {
        [v] => Ok(*v),
        _ => Err(Error::Domain(format!(
            "--critical needs exactly one --{name} value"
        ))),
    }
}

impl ScanConfig {
    pub fn from_args(a: &ScanArgs) -> Result<Self> {
        let out = a.output.out.clone();
        if let Some(kind) = a.critical {
            let format = pick_format(a.output.format, Format::Json, &[Format::Json, Format::Csv])?;
            let q = match kind {
                CriticalArg::PTauC => CriticalQuery::PTauC {
                    c: single("concurrence", &a.concurrence)?,
                    mu: single("mu", &a.mu)?,
                },
                CriticalArg::CC => CriticalQuery::CC {
                    mu: single("mu", &a.mu)?,
                    p_tau: single("endpoint", &a.endpoint)?,
                },
                CriticalArg::Mu => CriticalQuery::Mu {
                    c: single("concurrence", &a.concurrence)?,
                    p_tau: single("endpoint", &a.endpoint)?,
                },
            };
            // Domain checks up front, before the search runs.
            match q {
                CriticalQuery::PTauC { c, mu } => {
                    BellLikeState::from_concurrence(c)?;
                    if !(c > 0.0 && c < 1.0 && mu > 0.0 && mu <= 1.0) {
                        return Err(Error::Domain(
                            "p-tau-c needs C in (0, 1) and mu in (0, 1]".into(),
                        ));
                    }
                }
                CriticalQuery::CC { mu, p_tau } => {
                    ChannelSpec::with_default_rate(Family::AmplitudeDamping, mu)?;
                    if !(p_tau > 0.0 && p_tau < 1.0) {
                        return Err(Error::Domain("c-c needs an endpoint in (0, 1)".into()));
                    }
                }
                CriticalQuery::Mu { c, p_tau } => {
                    if !(c > 0.0 && c < 1.0 && p_tau > 0.0 && p_tau < 1.0) {
                        return Err(Error::Domain("mu needs C and endpoint in (0, 1)".into()));
                    }
                }
            }
            return Ok(Self::Critical(q, format, out));
        }
        if a.points < 1 {
            return Err(Error::Domain("--points must be positive".into()));
        }
        let grid = ScanGrid {
            family: a.family,
            mu_values: if a.mu.is_empty() {
                crate::scan::FIGURE_MU_VALUES.to_vec()
            } else {
                a.mu.clone()
            },
            c_values: if a.concurrence.is_empty() {
                (1..=a.points).map(|k| k as f64 / a.points as f64).collect()
            } else {
                a.concurrence.clone()
            },
            endpoint_values: if a.endpoint.is_empty() {
                vec![0.5]
            } else {
                a.endpoint.clone()
            },
            fixed: Vec::new(),
        };
        grid.validate()?;
        let format = pick_format(a.output.format, Format::Csv, &[Format::Csv, Format::Json])?;
        Ok(Self::Sweep(grid, format, out))
    }
}

#[derive(Serialize)]
struct CriticalReport {
    kind: &'static str,
    #[serde(flatten)]
    inputs: serde_json::Value,
    #[serde(flatten)]
    result: CriticalResult,
}

pub fn cmd_scan(cfg: &ScanConfig) -> Result<Outcome> {
    match cfg {
        ScanConfig::Sweep(grid, format, out) => {
            let d = grid.run()?;
            Ok(Outcome::single(
                out.clone(),
                render(&d, *format, ("C", "tau_QSL / tau"))?,
            ))
        }
        ScanConfig::Critical(q, format, out) => {
            let (kind, inputs, result) = match *q {
                CriticalQuery::PTauC { c, mu } => (
                    "p_tau_c",
                    serde_json::json!({"concurrence": c, "mu": mu}),
                    find_p_tau_c(c, mu)?,
                ),
                CriticalQuery::CC { mu, p_tau } => (
                    "c_c",
                    serde_json::json!({"mu": mu, "p_tau": p_tau}),
                    find_c_c(mu, p_tau)?,
                ),
                CriticalQuery::Mu { c, p_tau } => (
                    "mu_critical",
                    serde_json::json!({"concurrence": c, "p_tau": p_tau}),
                    find_mu_critical(c, p_tau)?,
                ),
            };
            let body = match format {
                Format::Csv => {
                    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
                    let (lo, hi) = result
                        .bracket
                        .map(|(a, b)| (Some(a), Some(b)))
                        .unwrap_or((None, None));
                    format!(
                        "kind,exists,value,bracket_lo,bracket_hi,iterations\n{kind},{},{},{},{},{}\n",
                        result.exists,
                        opt(result.value),
                        opt(lo),
                        opt(hi),
                        result.iterations
                    )
                }
                _ => to_json_value(&CriticalReport {
                    kind,
                    inputs,
                    result,
                })?,
            };
            Ok(Outcome::single(out.clone(), body))
        }
    }
}

pub struct FigureConfig {
    id: FigureId,
    points: usize,
    format: Format,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
}

impl FigureConfig {
    pub fn from_args(a: &FigureArgs) -> Result<Self> {
        if a.points < 2 {
            return Err(Error::Domain("--points must be at least 2".into()));
        }
        Ok(Self {
            id: a.id,
            points: a.points,
            format: a.output.format.unwrap_or(Format::Csv),
            out: a.output.out.clone(),
            svg: a.svg.clone(),
        })
    }
}

pub fn cmd_figure(cfg: &FigureConfig) -> Result<Outcome> {
    let d = figure_dataset(cfg.id, cfg.points)?;
    let labels = cfg.id.axis_labels();
    let mut artifacts = vec![Artifact {
        path: cfg.out.clone(),
        body: render(&d, cfg.format, labels)?,
    }];
    if let Some(svg) = &cfg.svg {
        artifacts.push(Artifact {
            path: Some(svg.clone()),
            body: render(&d, Format::Svg, labels)?,
        });
    }
    Ok(Outcome {
        artifacts,
        code: EXIT_OK,
    })
}

pub fn cmd_validate(a: &ValidateArgs) -> Result<Outcome> {
    let report = validate::run(&ValidateOptions {
        seed: a.seed,
        perturb_kraus: a.perturb_kraus,
    });
    let body = if a.json {
        to_json_value(&report)?
    } else {
        report.render()
    };
    Ok(Outcome {
        artifacts: vec![Artifact {
            path: a.out.clone(),
            body,
        }],
        code: if report.passed() {
            EXIT_OK
        } else {
            EXIT_FAILURE
        },
    })
}

/// Validates and evaluates a parsed command without writing anything.
pub fn execute(cmd: &Command) -> std::result::Result<Outcome, CliError> {
    match cmd {
        Command::Evolve(a) => cmd_evolve(&EvolveConfig::from_args(a).map_err(CliError::usage)?),
        Command::Qslt(a) => cmd_qslt(&QsltConfig::from_args(a).map_err(CliError::usage)?),
        Command::Scan(a) => cmd_scan(&ScanConfig::from_args(a).map_err(CliError::usage)?),
        Command::Figure(a) => cmd_figure(&FigureConfig::from_args(a).map_err(CliError::usage)?),
        Command::Validate(a) => cmd_validate(a),
    }
    .map_err(|e| match e {
        Error::Domain(_) | Error::Unknown { .. } => CliError::usage(e),
        _ => CliError::failure(e),
    })
}

fn write_artifacts(artifacts: &[Artifact]) -> std::io::Result<()> {
    for a in artifacts {
        match &a.path {
            Some(p) => std::fs::write(p, &a.body)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(a.body.as_bytes())?;
                out.flush()?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => match write_artifacts(&outcome.artifacts) {
            Ok(()) => outcome.code,
            Err(e) => {
                eprintln!("qslchan: cannot write output: {e}");
                EXIT_FAILURE
            }
        },
        Err(e) => {
            eprintln!("qslchan: {}", e.message);
            e.code
        }
    }
}
