//! `rotadrop` command-line front end.
//!
//! Every command writes machine-readable output to stdout (or `--out`) and
//! reports errors as a JSON object on stderr. Exit codes: 0 success,
//! 1 failed verification, 2 argument or I/O error, 3 numeric failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analytic::{classify, critical_radii, find_c0, first_integral, DropParams, SurfaceType};
use crate::bounds::{tolerance_from_env, verify, BoundReport};
use crate::error::DropError;
use crate::mesh::{export_obj, laplace_residual, revolve, revolve_closed};
use crate::ode::{close_profile, solve_profile, ProfileCurve, ProfileSample, StepControl, StopCondition, StopReason};
use crate::quantities::QuantityReport;

#[derive(Debug, Parser)]
#[command(
    name = "rotadrop",
    version,
    about = "Axisymmetric rotating drop profiles, quantities and meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Surface type, c0 and critical radii.
    Classify(RunArgs),
    /// Profile samples (CSV by default).
    Solve(RunArgs),
    /// Area, volume, height, energy and related scalars.
    Report(RunArgs),
    /// Inequality checks; exit status 1 if any evaluated check fails.
    Verify(RunArgs),
    /// Revolved OBJ mesh plus curvature residual summary.
    Mesh(RunArgs),
    /// Reports over a grid; --a and --b take comma-separated lists.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    a: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    b: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    u0: f64,
    /// Truncation radius.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// First-integral constant (classify only, evaluated at --c).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    d: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e-4)]
    step: f64,
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    n_theta: usize,
    #[arg(long, default_value_t = 64)]
    n_s: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification,
    Drop(DropError),
}

impl From<DropError> for Failure {
    fn from(e: DropError) -> Self {
        Failure::Drop(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Drop(DropError::Io(e))
    }
}

fn exit_code(e: &DropError) -> i32 {
    match e {
        DropError::InvalidParameter(_) | DropError::OutOfRange { .. } | DropError::Io(_) => 2,
        DropError::Domain(_) | DropError::NotClosed(_) | DropError::DegenerateMesh(_) => 3,
    }
}

fn error_kind(e: &DropError) -> &'static str {
    match e {
        DropError::InvalidParameter(_) => "invalid_parameter",
        DropError::Domain(_) => "domain",
        DropError::OutOfRange { .. } => "out_of_range",
        DropError::NotClosed(_) => "not_closed",
        DropError::DegenerateMesh(_) => "degenerate_mesh",
        DropError::Io(_) => "io",
    }
}

fn emit_error(err: &mut dyn Write, kind: &str, message: &str) {
    let _ = writeln!(err, "{}", json!({ "error": kind, "message": message }));
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
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
                    emit_error(err, "usage", e.to_string().trim_end());
                    2
                }
            };
        }
    };
    let result = dispatch(cli.command, out, err);
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            emit_error(err, "usage", &msg);
            2
        }
        Err(Failure::Verification) => 1,
        Err(Failure::Drop(e)) => {
            emit_error(err, error_kind(&e), &e.to_string());
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Classify(args) => cmd_classify(&args, out, err),
        Command::Solve(args) => cmd_solve(&args, out, err),
        Command::Report(args) => cmd_report(&args, out, err),
        Command::Verify(args) => cmd_verify(&args, out, err),
        Command::Mesh(args) => cmd_mesh(&args, out, err),
        Command::Sweep(args) => cmd_sweep(&args, out),
    }
}

fn single(values: &[f64], name: &str) -> Result<f64, Failure> {
    match values {
        [v] => Ok(*v),
        _ => Err(Failure::Usage(format!(
            "--{name} takes a single value for this command"
        ))),
    }
}

impl RunArgs {
    fn control(&self) -> Result<StepControl, Failure> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Failure::Usage(format!("--step must be positive (got {})", self.step)));
        }
        if self.samples < 2 {
            return Err(Failure::Usage(format!(
                "--samples must be at least 2 (got {})",
                self.samples
            )));
        }
        Ok(StepControl::default().with_step(self.step).with_samples(self.samples))
    }

    fn json_only(&self) -> Result<(), Failure> {
        if self.format == Some(Format::Csv) {
            return Err(Failure::Usage("csv output is only available for solve".into()));
        }
        Ok(())
    }

    fn no_d(&self) -> Result<(), Failure> {
        if self.d != 0.0 {
            return Err(Failure::Usage("--d is only accepted by classify".into()));
        }
        Ok(())
    }

    /// Canonical parameters of the single `(a, b, u0)` point, announcing a flip on stderr.
    fn params(&self, err: &mut dyn Write) -> Result<DropParams, Failure> {
        Ok(self.params_flipped(err)?.0)
    }

    fn params_flipped(&self, err: &mut dyn Write) -> Result<(DropParams, bool), Failure> {
        let p = DropParams::new(single(&self.a, "a")?, single(&self.b, "b")?, self.u0).with_d(self.d);
        p.validate_finite()?;
        let (q, flipped) = p.canonicalize();
        if flipped {
            let _ = writeln!(
                err,
                "{}",
                json!({ "note": "flipped", "a": q.a, "b": q.b, "u0": q.u0, "d": q.d })
            );
        }
        Ok((q, flipped))
    }
}

/// Writes `text` to `--out` when given, otherwise to stdout.
fn emit(args: &RunArgs, out: &mut dyn Write, text: &[u8]) -> Result<(), Failure> {
    match &args.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(text)?;
            f.flush()?;
        }
        None => out.write_all(text)?,
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec(value).expect("serialisable value");
    v.push(b'\n');
    v
}

#[derive(Serialize)]
struct ClassifyOutput {
    #[serde(rename = "type")]
    kind: SurfaceType,
    c0: f64,
    r1: Option<f64>,
    r2: Option<f64>,
    flipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_integral: Option<f64>,
}

fn cmd_classify(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    args.json_only()?;
    if args.d != 0.0 && args.c.is_none() {
        return Err(Failure::Usage(
            "--d needs --c: the first integral is evaluated at r = c".into(),
        ));
    }
    let (p, flipped) = args.params_flipped(err)?;
    let kind = classify(p.a, p.b)?;
    let (r1, r2) = match kind {
        SurfaceType::TypeIIa | SurfaceType::TypeIIb => {
            let (r1, r2) = critical_radii(p.a, p.b)?;
            (Some(r1), Some(r2))
        }
        _ => (None, None),
    };
    let fi = match args.c {
        Some(c) => Some(first_integral(c, &p)?),
        None => None,
    };
    let record = ClassifyOutput {
        kind,
        c0: find_c0(p.a, p.b)?,
        r1,
        r2,
        flipped,
        r: args.c,
        first_integral: fi,
    };
    emit(args, out, &json_line(&record))
}

fn stop_for(c: Option<f64>) -> StopCondition {
    match c {
        Some(c) => StopCondition::Radius(c),
        None => StopCondition::VerticalTangent,
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    params: &'a DropParams,
    c_end: f64,
    stop_reason: StopReason,
    samples: &'a [ProfileSample],
}

fn cmd_solve(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    args.no_d()?;
    let p = args.params(err)?;
    let curve = solve_profile(p, stop_for(args.c), args.control()?)?;
    let bytes = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            buf
        }
        Format::Json => json_line(&SolveOutput {
            params: curve.params(),
            c_end: curve.c_end(),
            stop_reason: curve.stop_reason(),
            samples: curve.samples(),
        }),
    };
    emit(args, out, &bytes)
}

fn require_closable(p: &DropParams) -> crate::Result<()> {
    if p.is_degenerate() {
        return Err(DropError::InvalidParameter(
            "a = b = 0 is a flat graph with no closed profile; pass --c".into(),
        ));
    }
    Ok(())
}

fn report_for(p: DropParams, c: Option<f64>, control: StepControl) -> crate::Result<QuantityReport> {
    match c {
        Some(c) => {
            let curve = solve_profile(p, StopCondition::Radius(c), control)?;
            QuantityReport::for_truncated(&curve, c)
        }
        None => {
            require_closable(&p)?;
            let curve = solve_profile(p, StopCondition::VerticalTangent, control)?;
            QuantityReport::for_closed(&close_profile(curve)?)
        }
    }
}

fn cmd_report(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    args.json_only()?;
    args.no_d()?;
    let p = args.params(err)?;
    let report = report_for(p, args.c, args.control()?)?;
    emit(args, out, &json_line(&report))
}

fn verification(curve: &ProfileCurve, c: Option<f64>, tol: f64) -> crate::Result<BoundReport> {
    let c = c.unwrap_or(curve.c_end());
    let closed = if curve.stop_reason() == StopReason::VerticalTangent {
        Some(close_profile(curve.clone())?)
    } else {
        None
    };
    verify(curve, c, closed.as_ref(), tol)
}

fn cmd_verify(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    args.json_only()?;
    args.no_d()?;
    let p = args.params(err)?;
    require_closable(&p)?;
    let curve = solve_profile(p, StopCondition::VerticalTangent, args.control()?)?;
    let report = verification(&curve, args.c, tolerance_from_env())?;
    emit(args, out, &json_line(&report))?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_mesh(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    args.json_only()?;
    args.no_d()?;
    let path = args
        .out
        .as_ref()
        .ok_or_else(|| Failure::Usage("mesh needs --out for the OBJ file".into()))?;
    let p = args.params(err)?;
    let control = args.control()?;
    let mesh = match args.c {
        Some(c) => revolve(
            &solve_profile(p, StopCondition::Radius(c), control)?,
            args.n_theta,
            args.n_s,
        )?,
        None => {
            require_closable(&p)?;
            let curve = solve_profile(p, StopCondition::VerticalTangent, control)?;
            revolve_closed(&close_profile(curve)?, args.n_theta, args.n_s)?
        }
    };
    let residual = laplace_residual(&mesh)?;
    export_obj(&mesh, path)?;
    out.write_all(&json_line(&residual))?;
    Ok(())
}

#[derive(Serialize)]
struct SweepLine {
    a: f64,
    b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    flipped: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<QuantityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_sweep(args: &RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    args.json_only()?;
    args.no_d()?;
    let control = args.control()?;
    let grid: Vec<(f64, f64)> = args
        .a
        .iter()
        .flat_map(|&a| args.b.iter().map(move |&b| (a, b)))
        .collect();
    let lines: Vec<SweepLine> = grid
        .par_iter()
        .map(|&(a, b)| {
            let raw = DropParams::new(a, b, args.u0);
            let result = raw.validate_finite().and_then(|_| {
                let (p, flipped) = raw.canonicalize();
                report_for(p, args.c, control).map(|r| (r, flipped))
            });
            match result {
                Ok((report, flipped)) => SweepLine {
                    a,
                    b,
                    flipped: Some(flipped),
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepLine {
                    a,
                    b,
                    flipped: None,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut buf = Vec::new();
    for line in &lines {
        buf.extend(json_line(line));
    }
    emit(args, out, &buf)?;
    if lines.iter().any(|l| l.error.is_some()) {
        return Err(DropError::Domain("some grid points failed; see their error fields".into()).into());
    }
    Ok(())
}
