//! `adiabatic` — command-line front end for the adiabatic error-bound
//! toolkit.
//!
//! Subcommands: `sweep` (exact error plus bounds over a T grid), `bounds`
//! (bound table only), `simulate` (evolution only), `phases` (one-jump
//! phasor dump), `pathcheck` (discretised path-product convergence), and
//! `cancel` (predicted cancellation times).
//!
//! Exit codes: 0 on success, 1 on configuration or validation errors, 2 on
//! numerical failures (budget exhaustion, degeneracies, step underflow) and
//! I/O problems.

mod config;
mod sweep;
mod table;

use std::fmt;
use std::fs;
use std::path::PathBuf;

use adiabatic::bounds::cancellation_times;
use adiabatic::models::ModelConfig;
use adiabatic::pathsum::{one_jump_phasors, path_product_check, JumpPath};
use clap::{Args, Parser, Subcommand};

use config::{parse_config, resolve, Outputs, SweepConfig};
use sweep::{records_table, run_sweep};
use table::{Cell, Format, Table};

/// Front-end failure, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed JSON or flag text (exit 1).
    Parse(String),
    /// Semantic configuration violations, all of them (exit 1).
    Validation(Vec<String>),
    /// Failure inside the numerical library (exit 1 for bad parameters,
    /// 2 for numerical breakdown).
    Numeric(adiabatic::Error),
    /// Filesystem failure (exit 2).
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Validation(violations) => {
                write!(f, "invalid configuration:")?;
                for v in violations {
                    write!(f, "\n  - {v}")?;
                }
                Ok(())
            }
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<adiabatic::Error> for CliError {
    fn from(e: adiabatic::Error) -> CliError {
        CliError::Numeric(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        use adiabatic::Error as E;
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numeric(e) => match e {
                E::InvalidParameter(_)
                | E::UnknownModel(_)
                | E::ParseError(_)
                | E::InvalidPath(_)
                | E::TimesNotOnGrid { .. }
                | E::NonHermitian { .. }
                | E::DimensionMismatch { .. }
                | E::NoAnalytics(_) => 1,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "adiabatic",
    version,
    about = "Adiabatic evolution toolkit: exact errors, rigorous bounds, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep T: exact error, bounds, first-order norm, and comparison columns
    Sweep(SweepArgs),
    /// Bound table over T without running the evolution
    Bounds(SweepArgs),
    /// Exact evolution only: adiabatic error and step count per T
    Simulate(SweepArgs),
    /// One-jump phasors at a fixed T (two-level models)
    Phases(PhasesArgs),
    /// Grid convergence of discretised jump-path products
    Pathcheck(PathcheckArgs),
    /// Predicted error-cancellation times
    Cancel(CancelArgs),
}

/// Flags shared by the sweep-shaped subcommands. Inline flags override the
/// corresponding config-file fields.
#[derive(Args)]
struct SweepArgs {
    /// JSON config file (see README for the schema)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Model family: search | marzlin_sanders | toy
    #[arg(long, value_name = "NAME")]
    model: Option<String>,
    /// Dimension of the search family
    #[arg(long = "N", value_name = "INT")]
    n: Option<usize>,
    /// Comma-separated total times, ascending (e.g. 20,40,80)
    #[arg(long = "T", value_name = "LIST", allow_hyphen_values = true)]
    t: Option<String>,
    /// Start of a logarithmic T range
    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    t_min: Option<f64>,
    /// End of a logarithmic T range
    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// Number of points in the logarithmic T range
    #[arg(long, value_name = "INT")]
    points: Option<usize>,
    /// Product-step schedule: uniform | phi
    #[arg(long, value_name = "KIND")]
    schedule: Option<String>,
    /// Richardson tolerance of the adaptive evolution (default 0.01)
    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    rel_tol: Option<f64>,
    /// Quadrature tolerance for the c1/c2 columns (default 1e-6)
    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    quad_tol: Option<f64>,
    /// Columns to compute: error,bounds,first_order,c1,c2,jrs
    #[arg(long, value_name = "LIST")]
    outputs: Option<String>,
    /// Output format: csv | json
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for the sweep (0 = automatic)
    #[arg(long, value_name = "INT")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PhasesArgs {
    /// Total evolution time T
    #[arg(long = "T", value_name = "FLOAT", allow_hyphen_values = true)]
    t: f64,
    /// Number of phasors (jump times evenly spaced on [0, 1])
    #[arg(long, value_name = "INT", default_value_t = 21)]
    count: usize,
    /// Two-level model: toy | marzlin_sanders | search (N = 2)
    #[arg(long, value_name = "NAME", default_value = "toy")]
    model: String,
    /// Output format: csv | json
    #[arg(long, value_name = "FMT", default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathcheckArgs {
    /// Model family: search | marzlin_sanders | toy
    #[arg(long, value_name = "NAME", default_value = "search")]
    model: String,
    /// Dimension of the search family
    #[arg(long = "N", value_name = "INT")]
    n: Option<usize>,
    /// Comma-separated step counts (each jump time must sit on each grid)
    #[arg(long = "L", value_name = "LIST", default_value = "512,1024,2048")]
    l: String,
    /// Jump levels for a custom path (e.g. 0,1,0); default: three built-in
    /// one- and two-jump paths
    #[arg(long, value_name = "LIST")]
    labels: Option<String>,
    /// Jump times for a custom path (same length as --labels, starting at 0)
    #[arg(long, value_name = "LIST")]
    times: Option<String>,
    /// Output format: csv | json
    #[arg(long, value_name = "FMT", default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CancelArgs {
    /// Model family: search | marzlin_sanders | toy
    #[arg(long, value_name = "NAME", default_value = "search")]
    model: String,
    /// Dimension of the search family
    #[arg(long = "N", value_name = "INT")]
    n: Option<usize>,
    /// Number of cancellation times to print
    #[arg(long = "n", value_name = "INT", default_value_t = 3)]
    count: usize,
    /// Output format: csv | json
    #[arg(long, value_name = "FMT", default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => run_table(&args, None, false),
        Command::Bounds(args) => {
            // Keep any requested c1/c2 columns; drop the evolution.
            let fixup = |outputs: Outputs| Outputs { error: false, ..outputs };
            run_table(&args, Some(&fixup), false)
        }
        Command::Simulate(args) => {
            let fixup = |_: Outputs| Outputs { error: true, ..Outputs::default() };
            run_table(&args, Some(&fixup), true)
        }
        Command::Phases(args) => run_phases(&args),
        Command::Pathcheck(args) => run_pathcheck(&args),
        Command::Cancel(args) => run_cancel(&args),
    }
}

/// Shared driver for sweep, bounds, and simulate.
fn run_table(
    args: &SweepArgs,
    outputs_fixup: Option<&dyn Fn(Outputs) -> Outputs>,
    allow_zero_t: bool,
) -> Result<(), CliError> {
    let cfg = effective_config(args)?;
    let mut resolved = resolve(&cfg, allow_zero_t)?;
    if let Some(fixup) = outputs_fixup {
        resolved.outputs = fixup(resolved.outputs);
    }
    let records = run_sweep(&resolved)?;
    write_out(&records_table(&records), resolved.format, resolved.out.as_deref())
}

/// Merge the config file (when given) with inline flag overrides.
fn effective_config(args: &SweepArgs) -> Result<SweepConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => {
            let name = args.model.as_deref().ok_or_else(|| {
                CliError::Validation(vec![
                    "model: give --model NAME or a --config file".to_string()
                ])
            })?;
            SweepConfig::bare(model_by_name(name, args.n)?)
        }
    };
    if args.config.is_some() {
        if let Some(name) = &args.model {
            cfg.model = model_by_name(name, args.n)?;
        } else if let Some(n) = args.n {
            if cfg.model.model == "search" {
                cfg.model.n = Some(n);
            } else {
                return Err(CliError::Validation(vec![format!(
                    "N: applies to the search family, not '{}'",
                    cfg.model.model
                )]));
            }
        }
    }
    if let Some(list) = &args.t {
        cfg.t_values = Some(parse_f64_list("T", list)?);
        cfg.t_min = None;
        cfg.t_max = None;
        cfg.points = None;
    }
    if args.t_min.is_some() || args.t_max.is_some() || args.points.is_some() {
        if args.t.is_some() {
            return Err(CliError::Validation(vec![
                "T: give either --T or --t-min/--t-max/--points, not both".to_string(),
            ]));
        }
        cfg.t_values = None;
        cfg.t_min = args.t_min.or(cfg.t_min);
        cfg.t_max = args.t_max.or(cfg.t_max);
        cfg.points = args.points.or(cfg.points);
    }
    if let Some(v) = &args.schedule {
        cfg.schedule = Some(v.clone());
    }
    if let Some(v) = args.rel_tol {
        cfg.rel_tol = Some(v);
    }
    if let Some(v) = args.quad_tol {
        cfg.quad_tol = Some(v);
    }
    if let Some(list) = &args.outputs {
        cfg.outputs = Some(list.split(',').map(|s| s.trim().to_string()).collect());
    }
    if let Some(v) = &args.format {
        cfg.format = Some(v.clone());
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = args.jobs {
        cfg.jobs = Some(v);
    }
    Ok(cfg)
}

/// Inline model names. Richer settings (softening exponents, custom
/// matrices) come from a config file.
fn model_by_name(name: &str, n: Option<usize>) -> Result<ModelConfig, CliError> {
    match name {
        "search" => Ok(ModelConfig::search(n.unwrap_or(4))),
        "marzlin_sanders" | "ms" => {
            if n.is_some() {
                return Err(CliError::Validation(vec![
                    "N: applies to the search family, not 'marzlin_sanders'".to_string(),
                ]));
            }
            Ok(ModelConfig::marzlin_sanders(1.0, 1.0))
        }
        "toy" => {
            if n.is_some() {
                return Err(CliError::Validation(vec![
                    "N: applies to the search family, not 'toy'".to_string(),
                ]));
            }
            Ok(toy_config())
        }
        other => Err(CliError::Validation(vec![format!(
            "model: unknown family '{other}' (expected search, marzlin_sanders, or toy)"
        )])),
    }
}

/// The diagnostic two-level ramp (gap 1 + s) as a linear-family config.
fn toy_config() -> ModelConfig {
    ModelConfig {
        model: "linear".to_string(),
        n: None,
        omega0: None,
        softening: None,
        h0: Some(vec![
            vec![[0.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [1.0, 0.0]],
        ]),
        h1: Some(vec![
            vec![[0.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [2.0, 0.0]],
        ]),
    }
}

fn parse_f64_list(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Parse(format!("{name}: cannot parse '{item}' as a number")))
        })
        .collect()
}

fn parse_usize_list(name: &str, text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|item| {
            item.trim().parse::<usize>().map_err(|_| {
                CliError::Parse(format!("{name}: cannot parse '{item}' as an integer"))
            })
        })
        .collect()
}

fn parse_format(name: &str) -> Result<Format, CliError> {
    match name {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Validation(vec![format!(
            "format: expected 'csv' or 'json', got '{other}'"
        )])),
    }
}

fn write_out(table: &Table, format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_phases(args: &PhasesArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format)?;
    let n = if args.model == "search" { Some(2) } else { None };
    let model = model_by_name(&args.model, n)?.build(args.t)?;
    let phasors = one_jump_phasors(&model, args.t, args.count)?;
    let mut table = Table::new(&["index", "s1", "re", "im"]);
    let denom = (args.count - 1) as f64;
    for (j, z) in phasors.iter().enumerate() {
        table.push(vec![
            Cell::Int(j),
            Cell::Num(j as f64 / denom),
            Cell::Num(z.re),
            Cell::Num(z.im),
        ]);
    }
    write_out(&table, format, args.out.as_deref())
}

fn run_pathcheck(args: &PathcheckArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format)?;
    let model = model_by_name(&args.model, args.n)?.build(1.0)?;
    let ls = parse_usize_list("L", &args.l)?;
    let paths: Vec<JumpPath> = match (&args.labels, &args.times) {
        (Some(labels), Some(times)) => {
            vec![JumpPath::new(
                parse_usize_list("labels", labels)?,
                parse_f64_list("times", times)?,
            )?]
        }
        (None, None) => vec![
            JumpPath::new(vec![0, 1], vec![0.0, 0.5])?,
            JumpPath::new(vec![0, 1], vec![0.0, 0.25])?,
            JumpPath::new(vec![0, 1, 0], vec![0.0, 0.25, 0.75])?,
        ],
        _ => {
            return Err(CliError::Validation(vec![
                "path: --labels and --times must be given together".to_string(),
            ]))
        }
    };
    let mut table =
        Table::new(&["path", "jump_times", "L", "jumps", "residual", "normalized_residual"]);
    for path in &paths {
        let labels_text = text_list(path.labels().iter(), "-");
        let times_text = text_list(path.times().iter().skip(1), ";");
        for &l in &ls {
            let check = path_product_check(&model, path, l)?;
            table.push(vec![
                Cell::Text(labels_text.clone()),
                Cell::Text(times_text.clone()),
                Cell::Int(l),
                Cell::Int(path.jumps()),
                Cell::Num(check.residual),
                Cell::Num(check.normalized_residual),
            ]);
        }
    }
    write_out(&table, format, args.out.as_deref())
}

fn text_list<T: ToString>(items: impl Iterator<Item = T>, sep: &str) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn run_cancel(args: &CancelArgs) -> Result<(), CliError> {
    let format = parse_format(&args.format)?;
    let model = model_by_name(&args.model, args.n)?.build(1.0)?;
    let times = cancellation_times(&model, args.count)?;
    let mut table = Table::new(&["n", "T"]);
    for (i, &t) in times.iter().enumerate() {
        table.push(vec![Cell::Int(i + 1), Cell::Num(t)]);
    }
    write_out(&table, format, args.out.as_deref())
}
