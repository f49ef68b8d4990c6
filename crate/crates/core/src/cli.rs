//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a checked property is false, 2 on usage,
//! input or precondition errors (with a one-line message on stderr).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    a_bounds, phi_closed_form, phi_oracle, BoundsReport, PhiOracle, DEFAULT_TRIALS,
};
use crate::construct::{build_basis, build_family, psd_window, BasisSeed, PsdWindow};
use crate::dual::{describe_dual, dual_family, normalized_dual, DualParameters};
use crate::error::{Error, Result};
use crate::example_d2::{sweep, write_csv};
use crate::family::{
    fit_parameters, positivity_flags, verify_decomposition, DecompositionReport, FamilySummary,
};
use crate::hermitian::HermitianMatrix;
use crate::io::{parse_operator, read_family, read_json, to_json, write_json};
use crate::welch::{
    holder_welch, min_angle_bound, simplex_bound, weighted_welch, WeightVector, WelchOptions,
};

/// Agreement required between `phi` and its oracle for exit code 0.
pub const PHI_AGREEMENT_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(
    name = "symdec",
    version,
    about = "Symmetric decompositions of self-adjoint operators"
)]
pub struct Cli {
    /// Numerical tolerance for every check.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive_f64)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit (a, b) to a family and check that it decomposes T.
    Verify(VerifyArgs),
    /// Build a symmetric decomposition T/N + x R_i.
    Construct(ConstructArgs),
    /// Evaluate the bounds on a for (T, N).
    Bounds(BoundsArgs),
    /// Dual or normalized dual of a symmetric family.
    Dual(DualArgs),
    /// Welch-type lower bounds for a family.
    Welch(WelchArgs),
    /// phi(B) for a positive spectrum.
    Phi(PhiArgs),
    /// Sweep the d = 2 example over u.
    #[command(name = "example-u")]
    ExampleU(ExampleArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub family: PathBuf,
    /// Target operator: a matrix file or identity:d. Overrides a T stored in the family file.
    #[arg(long = "T")]
    pub t: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XMode {
    Suf,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedArg(pub BasisSeed);

impl FromStr for SeedArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "canonical" {
            return Ok(SeedArg(BasisSeed::Canonical));
        }
        s.parse::<u64>()
            .map(|n| SeedArg(BasisSeed::Random(n)))
            .map_err(|_| format!("seed must be 'canonical' or a non-negative integer, got '{s}'"))
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long = "T")]
    pub t: String,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, conflicts_with = "x_mode", required_unless_present = "x_mode")]
    pub x: Option<f64>,
    #[arg(long, value_enum)]
    pub x_mode: Option<XMode>,
    #[arg(long, default_value = "canonical")]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the basis (T, F, R, mu, rho).
    #[arg(long)]
    pub basis_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "T")]
    pub t: String,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub family: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    pub family: PathBuf,
    #[arg(long = "T")]
    pub t: Option<String>,
    /// Rescale by t2/N so the dual decomposes T again.
    #[arg(long)]
    pub normalized: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WelchArgs {
    pub family: PathBuf,
    /// Weights file {"v": [...]}; the weighted bound is used when given.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Hölder exponent p > 1.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, conflicts_with = "p")]
    pub min_angle: bool,
    /// Rescale members to unit Hilbert-Schmidt norm.
    #[arg(long)]
    pub auto_normalize: bool,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub spectrum: Vec<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub u_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    family: FamilySummary,
    decomposition: Option<DecompositionReport>,
}

#[derive(Serialize)]
struct ConstructOutput {
    #[serde(rename = "T")]
    t: HermitianMatrix,
    members: Vec<HermitianMatrix>,
    x: f64,
    a: f64,
    b: f64,
    window: Option<PsdWindow>,
}

#[derive(Serialize)]
struct DualOutput {
    #[serde(rename = "T")]
    t: Option<HermitianMatrix>,
    members: Vec<HermitianMatrix>,
    parameters: DualParameters,
    /// Member-wise positivity; duals of positive families need not be positive.
    positive: Vec<bool>,
}

#[derive(Serialize)]
struct PhiOutput {
    closed_form: f64,
    oracle: PhiOracle,
    agree: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, S, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{first}");
                    2
                }
            };
        }
    };
    configure_threads();
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Caps the rayon pool at `SYMDEC_THREADS` when set.
fn configure_threads() {
    if let Some(n) = std::env::var("SYMDEC_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn emit<W: Write>(out: &mut W, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn symmetric_tol(tol: f64, a: f64) -> f64 {
    tol * (1.0 + a.abs())
}

pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<i32> {
    let tol = cli.tol;
    match &cli.command {
        Command::Verify(args) => {
            let file = read_family(&args.family)?;
            let t = match &args.t {
                Some(spec) => Some(parse_operator(spec)?),
                None => file.t,
            };
            let family = fit_parameters(file.members)?;
            let summary = family.summary(symmetric_tol(tol, family.a()));
            let decomposition = t
                .map(|t| verify_decomposition(&family, &t, tol))
                .transpose()?;
            let ok = summary.symmetric && decomposition.as_ref().is_none_or(|r| r.is_decomposition);
            out.write_all(
                to_json(&VerifyOutput {
                    family: summary,
                    decomposition,
                })?
                .as_bytes(),
            )?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Construct(args) => {
            let t = parse_operator(&args.t)?;
            let basis = build_basis(&t, args.n, args.seed.0)?;
            let window = match args.x_mode {
                Some(_) => Some(psd_window(&basis)?),
                // the window is informative only; a singular T still admits any x
                None => psd_window(&basis).ok(),
            };
            let x = match (args.x, args.x_mode, &window) {
                (Some(x), _, _) => x,
                (None, Some(XMode::Suf), Some(w)) => w.x_sufficient,
                (None, Some(XMode::Exact), Some(w)) => w.x_exact,
                _ => {
                    return Err(Error::InvalidParameter(
                        "one of --x or --x-mode is required".into(),
                    ))
                }
            };
            let family = build_family(&basis, x)?;
            if let Some(p) = &args.basis_out {
                write_json(p, &basis)?;
            }
            let doc = ConstructOutput {
                t,
                x,
                a: family.a(),
                b: family.b(),
                members: family.into_members(),
                window,
            };
            emit(out, args.output.as_deref(), &to_json(&doc)?)?;
            Ok(0)
        }
        Command::Bounds(args) => {
            let t = parse_operator(&args.t)?;
            let family = match &args.family {
                Some(p) => Some(fit_parameters(read_family(p)?.members)?),
                None => None,
            };
            let report: BoundsReport = a_bounds(&t, args.n, family.as_ref(), tol)?;
            out.write_all(to_json(&report)?.as_bytes())?;
            Ok(match report.family_within_bounds {
                Some(false) => 1,
                _ => 0,
            })
        }
        Command::Dual(args) => {
            let file = read_family(&args.family)?;
            let t = match &args.t {
                Some(spec) => Some(parse_operator(spec)?),
                None => file.t,
            };
            let family = fit_parameters(file.members)?;
            let parameters = describe_dual(&family, t.as_ref(), None)?;
            let doc = if args.normalized {
                let t = t.ok_or_else(|| Error::InvalidParameter("--normalized needs T".into()))?;
                let dual = normalized_dual(&family, &t, tol)?;
                DualOutput {
                    t: Some(t),
                    positive: positivity_flags(dual.members(), tol)?,
                    members: dual.into_members(),
                    parameters,
                }
            } else {
                let dual = dual_family(&family, tol)?;
                DualOutput {
                    t: None,
                    positive: positivity_flags(dual.members(), tol)?,
                    members: dual.into_members(),
                    parameters,
                }
            };
            emit(out, args.output.as_deref(), &to_json(&doc)?)?;
            Ok(0)
        }
        Command::Welch(args) => {
            let members = read_family(&args.family)?.members;
            let weights = match &args.weights {
                Some(p) => read_json::<WeightVector>(p)?,
                None => WeightVector::uniform(members.len()),
            };
            let opts = WelchOptions {
                tol,
                auto_normalize: args.auto_normalize,
            };
            let report = if args.min_angle {
                min_angle_bound(&members, &weights, opts)?
            } else if let Some(p) = args.p {
                holder_welch(&members, &weights, p, opts)?
            } else if args.weights.is_some() || args.auto_normalize {
                weighted_welch(&members, &weights, opts)?
            } else {
                simplex_bound(&members, tol)?
            };
            out.write_all(to_json(&report)?.as_bytes())?;
            Ok(if report.slack < -tol { 1 } else { 0 })
        }
        Command::Phi(args) => {
            let value = phi_closed_form(&args.spectrum)?;
            if !args.oracle {
                writeln!(out, "{value}")?;
                return Ok(0);
            }
            let oracle = phi_oracle(&args.spectrum, args.trials, args.seed)?;
            let agree =
                (oracle.value - value).abs() <= PHI_AGREEMENT_TOL && oracle.mc_violations == 0;
            out.write_all(
                to_json(&PhiOutput {
                    closed_form: value,
                    oracle,
                    agree,
                })?
                .as_bytes(),
            )?;
            Ok(if agree { 0 } else { 1 })
        }
        Command::ExampleU(args) => {
            let rows = sweep(args.u_min, args.u_max, args.steps)?;
            match &args.output {
                Some(p) => write_csv(&rows, BufWriter::new(File::create(p)?))?,
                None => write_csv(&rows, &mut *out)?,
            }
            Ok(0)
        }
    }
}
