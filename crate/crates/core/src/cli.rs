//! Command-line front end.
//!
//! `run` never touches the process: it returns the exit code and the text
//! destined for stdout and stderr, which keeps every subcommand testable.
//! Exit codes: 0 success, 1 usage error, 2 computation or file error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::io::{load_state, LoadedState};
use crate::linalg::{partial_transpose_op, schmidt_coefficients, Subsystem};
use crate::majorization::{majorizes, weakly_submajorizes};
use crate::monotones::{
    concurrence_from_schmidt, concurrence_lower_bound, monotone_report, negativity,
    tangle_lower_bound, MonotoneOrder,
};
use crate::roof::{minimize_roof, Objective, RoofConfig};
use crate::states::{isotropic_m2pt, isotropic_n2pt, isotropic_state, IsotropicParams};
use crate::tcm::{run_trace, TcmConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;

/// Largest isotropic dimension for which `--numeric-check` builds ρ_F.
pub const NUMERIC_CHECK_MAX_D: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "ptmono",
    version,
    about = "Partial-transpose entanglement monotones"
)]
struct Cli {
    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Emit JSON with the same fields as the CSV output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PtSide {
    A,
    B,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundKind {
    Concurrence,
    Tangle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Concurrence,
    Tangle,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// M_p and N_p of a (partially transposed) state.
    Monotone {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "b", ignore_case = true)]
        pt: PtSide,
    },
    /// Negativity M_1 of the partial transpose.
    Negativity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Concurrence or tangle lower bound.
    Bound {
        #[arg(long, value_enum)]
        kind: BoundKind,
        #[arg(long)]
        input: PathBuf,
    },
    /// Schmidt coefficients, concurrence and tangle of a pure state.
    Pure {
        #[arg(long)]
        input: PathBuf,
    },
    /// Closed-form bounds on isotropic states over a fidelity grid.
    Isotropic {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        f_min: f64,
        #[arg(long, default_value_t = 1.0)]
        f_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long)]
        numeric_check: bool,
    },
    /// Two-atom Tavis-Cummings trace of the tangle lower bound.
    Tcm {
        #[arg(long, default_value_t = 100.0)]
        nbar: f64,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Numerical convex-roof upper estimate.
    Roof {
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Majorization test x ≺ y (or x ≺_w y with --weak).
    Majorize {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[arg(long)]
        weak: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// `%.{sig}g` formatting: shortest of fixed or scientific notation with
/// `sig` significant digits, trailing zeros removed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV number format.
pub fn csv_num(x: f64) -> String {
    format_sig(x, 17)
}

/// Standalone scalar results.
fn scalar(x: f64) -> String {
    format_sig(x, 15)
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<crate::io::FileError> for Failure {
    fn from(e: crate::io::FileError) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Parses `args` (including the program name) and executes the subcommand.
pub fn run<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CliOutcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => CliOutcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut stderr = String::new();
    match execute(&cli, &mut stderr) {
        Ok(text) => match &cli.output {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => CliOutcome {
                    code: EXIT_OK,
                    stdout: String::new(),
                    stderr,
                },
                Err(e) => CliOutcome {
                    code: EXIT_COMPUTE,
                    stdout: String::new(),
                    stderr: format!("{stderr}error: {}: {e}\n", path.display()),
                },
            },
            None => CliOutcome {
                code: EXIT_OK,
                stdout: text,
                stderr,
            },
        },
        Err(Failure::Usage(msg)) => CliOutcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("{stderr}error: {msg}\n"),
        },
        Err(Failure::Compute(msg)) => CliOutcome {
            code: EXIT_COMPUTE,
            stdout: String::new(),
            stderr: format!("{stderr}error: {msg}\n"),
        },
    }
}

fn load(path: &Path) -> Result<LoadedState, Failure> {
    Ok(load_state(path)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn execute(cli: &Cli, stderr: &mut String) -> Result<String, Failure> {
    match &cli.command {
        Command::Monotone { p, input, pt } => {
            let order = MonotoneOrder::new(*p).map_err(|e| Failure::Usage(format!("--p: {e}")))?;
            let rho = load(input)?.to_density();
            let side = match pt {
                PtSide::A => Some(Subsystem::A),
                PtSide::B => Some(Subsystem::B),
                PtSide::None => None,
            };
            let matrix = match side {
                Some(side) => partial_transpose_op(rho.matrix(), rho.dims(), side)?,
                None => rho.matrix().clone(),
            };
            let report = monotone_report(&matrix, order)?;
            if cli.json {
                return Ok(to_json(&report));
            }
            let negs: Vec<String> = report
                .negative_eigenvalues
                .iter()
                .map(|v| csv_num(*v))
                .collect();
            Ok(csv(
                "p,m_value,n_value,neg_count,negative_eigenvalues",
                [vec![
                    csv_num(report.p),
                    csv_num(report.m_value),
                    csv_num(report.n_value),
                    report.neg_count.to_string(),
                    negs.join(";"),
                ]],
            ))
        }
        Command::Negativity { input } => {
            let value = negativity(&load(input)?.to_density())?;
            Ok(scalar_output(cli.json, "negativity", value))
        }
        Command::Bound { kind, input } => {
            let rho = load(input)?.to_density();
            let (name, value) = match kind {
                BoundKind::Concurrence => ("concurrence_bound", concurrence_lower_bound(&rho)?),
                BoundKind::Tangle => ("tangle_bound", tangle_lower_bound(&rho)?),
            };
            Ok(scalar_output(cli.json, name, value))
        }
        Command::Pure { input } => {
            let LoadedState::Pure(psi) = load(input)? else {
                return Err(Failure::Compute(format!(
                    "{}: `pure` needs a file with \"kind\": \"pure\"",
                    input.display()
                )));
            };
            let coeffs = schmidt_coefficients(&psi)?;
            let c = concurrence_from_schmidt(&coeffs);
            #[derive(Serialize)]
            struct PureReport {
                schmidt_coefficients: Vec<f64>,
                concurrence: f64,
                tangle: f64,
            }
            let report = PureReport {
                schmidt_coefficients: coeffs,
                concurrence: c,
                tangle: c * c,
            };
            if cli.json {
                return Ok(to_json(&report));
            }
            let cs: Vec<String> = report
                .schmidt_coefficients
                .iter()
                .map(|v| csv_num(*v))
                .collect();
            Ok(csv(
                "schmidt_coefficients,concurrence,tangle",
                [vec![
                    cs.join(";"),
                    csv_num(report.concurrence),
                    csv_num(report.tangle),
                ]],
            ))
        }
        Command::Isotropic {
            d,
            f_min,
            f_max,
            steps,
            numeric_check,
        } => isotropic_table(cli.json, *d, *f_min, *f_max, *steps, *numeric_check, stderr),
        Command::Tcm {
            nbar,
            n_max,
            g,
            t_max,
            steps,
        } => {
            if !(*t_max >= 0.0) {
                return Err(Failure::Usage(format!("--t-max must be >= 0, got {t_max}")));
            }
            if *steps == 0 {
                return Err(Failure::Usage("--steps must be positive".into()));
            }
            let cfg = TcmConfig::uniform(*g, *nbar, *n_max, *t_max, *steps);
            let trace = run_trace(&cfg)?;
            if cli.json {
                return Ok(to_json(&trace.rows));
            }
            Ok(csv(
                "gt,n2pt,rank,purity",
                trace.rows.iter().map(|r| {
                    vec![
                        csv_num(r.gt),
                        csv_num(r.n2pt),
                        r.rank.to_string(),
                        csv_num(r.purity),
                    ]
                }),
            ))
        }
        Command::Roof {
            objective,
            input,
            m,
            restarts,
            iters,
            seed,
        } => {
            let rho = load(input)?.to_density();
            let objective = match objective {
                ObjectiveArg::Concurrence => Objective::Concurrence,
                ObjectiveArg::Tangle => Objective::Tangle,
            };
            let cfg = RoofConfig {
                ensemble_size: *m,
                restarts: *restarts,
                max_iters: *iters,
                seed: *seed,
                ..RoofConfig::new(objective)
            };
            let res = minimize_roof(&rho, &cfg)?;
            #[derive(Serialize)]
            struct RoofReport {
                value: f64,
                residual: f64,
                ensemble_size: usize,
            }
            let report = RoofReport {
                value: res.value,
                residual: res.reconstruction_error,
                ensemble_size: res.ensemble.len(),
            };
            if cli.json {
                return Ok(to_json(&report));
            }
            Ok(csv(
                "value,residual,ensemble_size",
                [vec![
                    csv_num(report.value),
                    csv_num(report.residual),
                    report.ensemble_size.to_string(),
                ]],
            ))
        }
        Command::Majorize { x, y, weak } => {
            let result = if *weak {
                weakly_submajorizes(y, x)
            } else {
                majorizes(y, x)
            }
            .map_err(|e| Failure::Usage(format!("--x/--y: {e}")))?;
            if cli.json {
                return Ok(format!("{{\"result\": {result}}}\n"));
            }
            Ok(format!("{result}\n"))
        }
    }
}

fn scalar_output(json: bool, name: &str, value: f64) -> String {
    if json {
        format!(
            "{{\"{name}\": {}}}\n",
            serde_json::to_string(&value).expect("finite")
        )
    } else {
        format!("{}\n", scalar(value))
    }
}

#[derive(Serialize)]
struct IsotropicRow {
    d: usize,
    #[serde(rename = "F")]
    fidelity: f64,
    lambda: f64,
    m2pt: f64,
    n2pt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m2pt_numeric: Option<f64>,
}

fn isotropic_table(
    json: bool,
    d: usize,
    f_min: f64,
    f_max: f64,
    steps: usize,
    numeric_check: bool,
    stderr: &mut String,
) -> Result<String, Failure> {
    if steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    if !(0.0..=1.0).contains(&f_min) || !(0.0..=1.0).contains(&f_max) || f_min > f_max {
        return Err(Failure::Usage(format!(
            "fidelity range [{f_min}, {f_max}] must lie inside [0, 1]"
        )));
    }
    let numeric = numeric_check && d <= NUMERIC_CHECK_MAX_D;
    if numeric_check && !numeric {
        let _ = writeln!(
            stderr,
            "note: --numeric-check skipped for d = {d} > {NUMERIC_CHECK_MAX_D}"
        );
    }
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let f = if steps == 1 {
            f_min
        } else {
            f_min + (f_max - f_min) * k as f64 / (steps - 1) as f64
        };
        let params = IsotropicParams::new(d, f).map_err(|e| Failure::Usage(e.to_string()))?;
        let m2pt_numeric = if numeric {
            Some(concurrence_lower_bound(&isotropic_state(&params)?)?)
        } else {
            None
        };
        rows.push(IsotropicRow {
            d,
            fidelity: f,
            lambda: params.lambda(),
            m2pt: isotropic_m2pt(&params),
            n2pt: isotropic_n2pt(&params),
            m2pt_numeric,
        });
    }
    if json {
        return Ok(to_json(&rows));
    }
    let header = if numeric {
        "d,F,lambda,m2pt,n2pt,m2pt_numeric"
    } else {
        "d,F,lambda,m2pt,n2pt"
    };
    Ok(csv(
        header,
        rows.iter().map(|r| {
            let mut cols = vec![
                r.d.to_string(),
                csv_num(r.fidelity),
                csv_num(r.lambda),
                csv_num(r.m2pt),
                csv_num(r.n2pt),
            ];
            if let Some(v) = r.m2pt_numeric {
                cols.push(csv_num(v));
            }
            cols
        }),
    ))
}
