use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlob_core::verify::{
    classical_limit, eval_function, reports_to_csv, run_all, run_check, CheckParams, EvalParams,
    EvalRow, LimitRow, VerificationReport,
};
use qlob_core::{QContext, QError};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] QError),
    #[error("cannot read config {path}: {source}")]
    ConfigIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("bad grid: {0}")]
    Grid(String),
    #[error("output: {0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "qlob",
    version,
    about = "Numerical checks for q-Fourier analysis on the quantum Lobachevsky space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named check, or `all`.
    Verify {
        check: String,
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// JSON file with any of q, delta, nu, s, cutoff, tol; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report runtime_ms as 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Tabulate a function over a grid.
    Eval {
        function: String,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        grid: GridFlags,
        /// The H argument of pkernel and qnu.
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Distance of q-objects from their classical limits.
    Limit {
        #[arg(long, default_value_t = 0.5)]
        nu: f64,
        /// Comma-separated values of q in (0, 1).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        q: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Default)]
struct ParamFlags {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    delta: Option<u8>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    cutoff: Option<i32>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct GridFlags {
    /// Explicit points, comma-separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["lattice", "linspace"])]
    x: Vec<f64>,
    /// Lattice points q^m for m in `M0:M1`.
    #[arg(long, conflicts_with = "linspace")]
    lattice: Option<String>,
    /// `START:STOP:N` evenly spaced points.
    #[arg(long)]
    linspace: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    q: Option<f64>,
    delta: Option<u8>,
    nu: Option<f64>,
    s: Option<f64>,
    cutoff: Option<i32>,
    tol: Option<f64>,
}

fn load_params(config: Option<&PathBuf>, flags: &ParamFlags) -> Result<CheckParams, CliError> {
    let file = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigIo {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|source| CliError::ConfigParse {
                path: path.clone(),
                source,
            })?
        }
        None => ConfigFile::default(),
    };
    let d = CheckParams::default();
    Ok(CheckParams {
        q: flags.q.or(file.q).unwrap_or(d.q),
        delta: flags.delta.or(file.delta).unwrap_or(d.delta),
        nu: flags.nu.or(file.nu).unwrap_or(d.nu),
        s: flags.s.or(file.s).unwrap_or(d.s),
        cutoff: flags.cutoff.or(file.cutoff).unwrap_or(d.cutoff),
        tol: flags.tol.or(file.tol).or(d.tol),
    })
}

fn parse_grid(grid: &GridFlags, q: f64) -> Result<Vec<f64>, CliError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Grid(format!("{s}: {e}")))
    };
    if let Some(text) = &grid.lattice {
        let (a, b) = text
            .split_once(':')
            .ok_or_else(|| CliError::Grid("lattice needs M0:M1".into()))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|e| CliError::Grid(format!("{s}: {e}")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        return Ok((a.min(b)..=a.max(b)).map(|m| q.powi(m)).collect());
    }
    if let Some(text) = &grid.linspace {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, n] = parts.as_slice() else {
            return Err(CliError::Grid("linspace needs START:STOP:N".into()));
        };
        let (start, stop) = (num(start)?, num(stop)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| CliError::Grid(format!("{n}: {e}")))?;
        return Ok(match n {
            0 => vec![],
            1 => vec![start],
            _ => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        });
    }
    Ok(grid.x.clone())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Output(e.to_string()))
}

fn csv_table<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| CliError::Output(e.to_string()))?;
    for r in rows {
        w.write_record(r)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn eval_csv(rows: &[EvalRow]) -> Result<String, CliError> {
    csv_table(
        ["x", "re", "im", "error"],
        rows.iter().map(|r| {
            [
                format!("{:e}", r.x),
                opt(r.re),
                opt(r.im),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

fn limit_csv(rows: &[LimitRow]) -> Result<String, CliError> {
    csv_table(
        ["q", "qgamma", "pkernel", "k2_shape"],
        rows.iter().map(|r| {
            [
                r.q.to_string(),
                format!("{:e}", r.qgamma),
                format!("{:e}", r.pkernel),
                format!("{:e}", r.k2_shape),
            ]
        }),
    )
}

fn verify(
    check: &str,
    params: CheckParams,
    format: Format,
    no_timing: bool,
) -> Result<(String, bool), CliError> {
    let mut reports: Vec<VerificationReport> = if check == "all" {
        run_all(&params)?
    } else {
        vec![run_check(check, &params)?]
    };
    if no_timing {
        reports.iter_mut().for_each(|r| r.runtime_ms = 0);
    }
    let passed = reports.iter().all(|r| r.passed);
    let text = match format {
        Format::Csv => reports_to_csv(&reports)?,
        Format::Json if check == "all" => json(&reports)?,
        Format::Json => reports[0].to_json()?,
    };
    Ok((text, passed))
}

/// Returns the text to print and whether the run counts as passing.
fn run(cli: Cli) -> Result<(String, bool), CliError> {
    match cli.command {
        Command::Verify {
            check,
            params,
            format,
            config,
            no_timing,
        } => verify(
            &check,
            load_params(config.as_ref(), &params)?,
            format,
            no_timing,
        ),
        Command::Eval {
            function,
            params,
            grid,
            h,
            format,
            config,
        } => {
            let p = load_params(config.as_ref(), &params)?;
            let ctx = QContext::new(p.q, p.delta)?
                .with_s(p.s)?
                .with_cutoff(p.cutoff)?;
            let xs = parse_grid(&grid, p.q)?;
            let rows = eval_function(&function, &xs, EvalParams { nu: p.nu, h }, &ctx)?;
            let ok = rows.iter().all(|r| r.error.is_none());
            let text = match format {
                Format::Json => json(&rows)?,
                Format::Csv => eval_csv(&rows)?,
            };
            Ok((text, ok))
        }
        Command::Limit { nu, q, format } => {
            let rows = classical_limit(nu, &q)?;
            let text = match format {
                Format::Json => json(&rows)?,
                Format::Csv => limit_csv(&rows)?,
            };
            Ok((text, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok((text, passed)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
