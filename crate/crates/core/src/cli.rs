//! The `divbound` command line.
//!
//! Exit codes: 0 on success, 2 for usage and input-parsing errors, 3 when the
//! inputs are well formed but outside an operation's domain (for example
//! `μ` not absolutely continuous with respect to `ν`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{
    certify_bretagnolle_huber, certify_hellinger, invert, lower_bound, TvCertificate,
};
use crate::divergence::d_f;
use crate::error::Error;
use crate::extended::ExtendedReal;
use crate::generator::Builtin;
use crate::io::{self, FormatError};
use crate::jointrange::{scan_binary, verify_bound};
use crate::measure::hahn_jordan;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "divbound",
    version,
    about = "f-divergences and certified total-variation bounds"
)]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Significant digits in printed numbers.
    #[arg(long, global = true, env = "DIVBOUND_PRECISION", default_value_t = io::DEFAULT_PRECISION,
          value_parser = parse_precision)]
    pub precision: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Args)]
pub struct GeneratorArg {
    /// Generator: he, tv, kl, pe or sh (case-insensitive).
    #[arg(long = "gen", value_parser = parse_builtin)]
    pub generator: Builtin,
}

fn parse_builtin(s: &str) -> Result<Builtin, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_precision(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(p) if (1..=17).contains(&p) => Ok(p),
        _ => Err(format!("precision must be an integer in 1..=17, got {s:?}")),
    }
}

fn parse_extended(s: &str) -> Result<ExtendedReal<f64>, String> {
    s.parse()
        .map_err(|e: crate::extended::ParseExtendedRealError| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence D_f(mu, nu) between two measure files.
    Compute {
        #[command(flatten)]
        generator: GeneratorArg,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Lower bound f(1 + tv/2) + f(1 - tv/2) on D_f at a given total variation.
    Bound {
        #[command(flatten)]
        generator: GeneratorArg,
        #[arg(long, allow_negative_numbers = true)]
        tv: f64,
    },
    /// Upper bound on the total variation implied by a divergence value.
    Invert {
        #[command(flatten)]
        generator: GeneratorArg,
        /// Divergence value, a number or `inf`.
        #[arg(long, allow_negative_numbers = true, value_parser = parse_extended)]
        d: ExtendedReal<f64>,
        /// Use the closed form (sh: Bretagnolle-Huber, he: Hellinger) instead of bisection.
        #[arg(long)]
        closed_form: bool,
    },
    /// Check the bound on seeded random pairs.
    Verify {
        #[command(flatten)]
        generator: GeneratorArg,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_support: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Both sides of the bound on a grid of Bernoulli pairs.
    Scan {
        #[command(flatten)]
        generator: GeneratorArg,
        #[arg(long, default_value_t = 99)]
        resolution: usize,
    },
    /// Hahn-Jordan decomposition of a signed measure file.
    Decompose {
        #[arg(long)]
        nu: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Input(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(FormatError::Measure(e)) | CliError::Core(e) => match e {
                Error::UnknownGenerator(_)
                | Error::InvalidMeasure(_)
                | Error::InvalidGenerator(_) => EXIT_USAGE,
                Error::AbsoluteContinuityViolation { .. }
                | Error::Domain(_)
                | Error::NonMonotoneGenerator(_)
                | Error::OracleTooLarge { .. } => EXIT_DOMAIN,
            },
            CliError::Input(_) | CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
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
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn fmt(x: f64, digits: usize) -> String {
    io::format_sig(x, digits)
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn csv_lines(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn certificate_text(c: &TvCertificate<f64>, format: OutputFormat, digits: usize) -> String {
    match format {
        OutputFormat::Json => to_json(&io::certificate_json(c, digits)),
        OutputFormat::Plain => format!("{}\n", fmt(c.tv_upper_bound, digits)),
        OutputFormat::Csv => {
            let method = io::certificate_json(c, digits)["method"]
                .as_str()
                .unwrap_or_default()
                .to_string();
            csv_lines(
                &["divergence", "value", "tv_upper_bound", "method"],
                &[vec![
                    c.divergence_name.clone(),
                    io::format_extended(c.divergence_value, digits),
                    fmt(c.tv_upper_bound, digits),
                    method,
                ]],
            )
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let digits = cli.precision;
    match &cli.command {
        Command::Compute { generator, mu, nu } => {
            let f = generator.generator.generator::<f64>();
            let mu = io::read_probability::<f64>(mu)?;
            let nu = io::read_probability::<f64>(nu)?;
            let d = d_f(&f, &mu, &nu)?;
            Ok(match cli.format.unwrap_or(OutputFormat::Plain) {
                OutputFormat::Plain => format!("{}\n", io::format_extended(d.value, digits)),
                OutputFormat::Json => to_json(&json!({
                    "divergence": d.generator_name,
                    "value": io::json_extended(d.value, digits),
                })),
                OutputFormat::Csv => csv_lines(
                    &["divergence", "value"],
                    &[vec![d.generator_name, io::format_extended(d.value, digits)]],
                ),
            })
        }
        Command::Bound { generator, tv } => {
            let f = generator.generator.generator::<f64>();
            let lb = lower_bound(&f, *tv)?;
            Ok(match cli.format.unwrap_or(OutputFormat::Plain) {
                OutputFormat::Plain => format!("{}\n", io::format_extended(lb, digits)),
                OutputFormat::Json => to_json(&json!({
                    "divergence": f.name(),
                    "tv": io::json_number(*tv, digits),
                    "lower_bound": io::json_extended(lb, digits),
                })),
                OutputFormat::Csv => csv_lines(
                    &["divergence", "tv", "lower_bound"],
                    &[vec![
                        f.name().to_string(),
                        fmt(*tv, digits),
                        io::format_extended(lb, digits),
                    ]],
                ),
            })
        }
        Command::Invert {
            generator,
            d,
            closed_form,
        } => {
            let certificate = if *closed_form {
                match generator.generator {
                    Builtin::Shannon => certify_bretagnolle_huber(*d)?,
                    Builtin::Hellinger => certify_hellinger(*d)?,
                    other => {
                        return Err(CliError::Usage(format!(
                            "no closed form for generator {other}; use sh or he"
                        )))
                    }
                }
            } else {
                invert(&generator.generator.generator::<f64>(), *d)?
            };
            Ok(certificate_text(
                &certificate,
                cli.format.unwrap_or(OutputFormat::Json),
                digits,
            ))
        }
        Command::Verify {
            generator,
            trials,
            max_support,
            seed,
        } => {
            let f = generator.generator.generator::<f64>();
            let report = verify_bound(&f, *trials, *max_support, *seed)?;
            Ok(match cli.format.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&io::report_json(&report, digits)),
                OutputFormat::Plain => format!(
                    "{} {} trials, max violation {}: {}\n",
                    report.generator_name,
                    report.trials,
                    fmt(report.max_violation, digits),
                    if report.passed() { "pass" } else { "FAIL" }
                ),
                OutputFormat::Csv => csv_lines(
                    &[
                        "generator",
                        "trials",
                        "max_support",
                        "seed",
                        "max_violation",
                        "passed",
                        "worst_trial",
                    ],
                    &[vec![
                        report.generator_name.clone(),
                        report.trials.to_string(),
                        report.max_support.to_string(),
                        report.seed.to_string(),
                        fmt(report.max_violation, digits),
                        report.passed().to_string(),
                        report.worst_trial.to_string(),
                    ]],
                ),
            })
        }
        Command::Scan {
            generator,
            resolution,
        } => {
            let f = generator.generator.generator::<f64>();
            let records = scan_binary(&f, *resolution)?;
            Ok(match cli.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => io::scan_csv(&records, digits),
                OutputFormat::Plain => records
                    .iter()
                    .map(|r| io::scan_row(r, digits).join(" ") + "\n")
                    .collect(),
                OutputFormat::Json => {
                    let rows: Vec<Value> = records
                        .iter()
                        .map(|r| {
                            json!({
                                "p": io::json_number(r.p, digits),
                                "q": io::json_number(r.q, digits),
                                "tv": io::json_number(r.tv, digits),
                                "divergence": io::json_extended(r.divergence, digits),
                                "lower_bound": io::json_extended(r.lower_bound, digits),
                                "slack": io::json_number(r.slack, digits),
                            })
                        })
                        .collect();
                    to_json(&Value::Array(rows))
                }
            })
        }
        Command::Decompose { nu } => {
            let nu = io::read_signed::<f64>(nu)?;
            let h = hahn_jordan(&nu);
            Ok(match cli.format.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => to_json(&io::decomposition_json(&h, digits)),
                OutputFormat::Plain => format!(
                    "P: {}\nN: {}\nupper_mass: {}\nlower_mass: {}\ntotal_variation: {}\n",
                    h.positive.join(" "),
                    h.negative.join(" "),
                    fmt(h.upper_mass(), digits),
                    fmt(h.lower_mass(), digits),
                    fmt(h.upper_mass() + h.lower_mass(), digits),
                ),
                OutputFormat::Csv => {
                    let rows: Vec<Vec<String>> = h
                        .upper
                        .atoms()
                        .iter()
                        .zip(h.lower.atoms())
                        .map(|((id, u), (_, l))| {
                            let part = if h.positive.contains(id) { "P" } else { "N" };
                            vec![
                                id.clone(),
                                part.to_string(),
                                fmt(*u, digits),
                                fmt(*l, digits),
                            ]
                        })
                        .collect();
                    csv_lines(&["id", "part", "upper", "lower"], &rows)
                }
            })
        }
    }
}
