//! Command-line surface. Exit codes: 0 pass, 1 criteria or golden mismatch,
//! 2 usage or input error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use symdiv_core::chan::{classify_channel, family_label, spec_from_eigenvalues, ChannelFamily, MixtureSpec, Variant};
use symdiv_core::dynamics::{classify_trajectory, ClassifyOptions, RateTrajectory};
use symdiv_core::measure::{
    conical_design_check, describe, gellmann_basis, gellmann_mum_povm, mub_povm, pauli_15_2_povm, povm_from_basis,
    verify_symmetric, SymmetricPovm,
};
use symdiv_core::scenarios::{mub_qutrit_golden, mum_gellmann_golden, ququart_golden, Check};

use crate::format::{read_json, read_trajectory_csv, time_series_csv, write_json, BasisFile, PovmFile};
use crate::report::{default_tolerance, parse_tolerance, to_value, write_atomic, Provenance, Report, Tolerances};
use crate::{Error, Result};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "symdiv", version, about = "Symmetric measurements, their channels and divisibility of the dynamics they generate")]
pub struct Cli {
    /// PSD tolerance; defaults to $SYMDIV_TOL, then 1e-9.
    #[arg(long, global = true, value_parser = parse_tolerance)]
    tol: Option<f64>,

    /// Record wall time in the report provenance (breaks byte-identical output).
    #[arg(long, global = true)]
    wall_time: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or verify an (N, M)-POVM.
    #[command(subcommand)]
    Povm(PovmCommand),
    /// Classify a single mixture channel.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Classify dynamics or run a golden example.
    #[command(subcommand)]
    Dynamics(DynamicsCommand),
}

#[derive(Debug, Subcommand)]
enum PovmCommand {
    Build {
        #[command(flatten)]
        family: FamilyArgs,
        /// Where to write the POVM JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the report; stdout otherwise.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ChannelCommand {
    Classify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Channel eigenvalues, one per group.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "probs", required_unless_present = "probs")]
        lambda: Option<String>,
        /// Mixture weights p0, p1, ..., pN.
        #[arg(long, allow_hyphen_values = true)]
        probs: Option<String>,
        #[arg(long, value_enum, default_value = "L")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum DynamicsCommand {
    Classify {
        #[command(flatten)]
        family: Box<FamilyArgs>,
        /// CSV with header t,gamma_1,...,gamma_N.
        #[arg(long, conflicts_with = "gamma_const", required_unless_present = "gamma_const")]
        gamma_csv: Option<PathBuf>,
        /// Constant rates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        gamma_const: Option<String>,
        /// `0:T:K`, K steps from 0 to T.
        #[arg(long)]
        grid: Option<String>,
        /// Number of trace-norm probe operators.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_tolerance)]
        derivative_tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-snapshot CSV for plotting.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    Example {
        #[arg(long, value_enum)]
        example: ExampleArg,
        /// Random samples for region comparisons.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum, conflicts_with = "povm_file")]
    family: Option<FamilyKind>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Basis JSON for `--family custom`.
    #[arg(long)]
    basis_file: Option<PathBuf>,
    /// Previously written POVM JSON.
    #[arg(long)]
    povm_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyKind {
    Mub,
    GellmannMum,
    #[value(name = "pauli-15-2")]
    Pauli152,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    #[value(name = "L")]
    Lambda,
    #[value(name = "Ltilde")]
    LambdaTilde,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleArg {
    MubQutrit,
    MumGellmann,
    #[value(name = "ququart-15-2")]
    Ququart152,
}

struct Context {
    tol: f64,
    wall_time: bool,
    start: Instant,
}

impl Context {
    fn provenance(&self, seed: Option<u64>, derivative: Option<f64>) -> Provenance {
        Provenance {
            seed,
            tolerances: Tolerances {
                psd: self.tol,
                derivative: derivative.unwrap_or(Tolerances::default().derivative),
            },
            wall_time_s: self.wall_time.then(|| self.start.elapsed().as_secs_f64()),
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    let ctx = Context {
        tol: match cli.tol {
            Some(t) => t,
            None => default_tolerance()?,
        },
        wall_time: cli.wall_time,
        start: Instant::now(),
    };
    match cli.command {
        Command::Povm(PovmCommand::Build { family, out, report }) => povm(&ctx, "povm build", &family, out, report),
        Command::Povm(PovmCommand::Verify { family, report }) => povm(&ctx, "povm verify", &family, None, report),
        Command::Channel(ChannelCommand::Classify {
            family,
            lambda,
            probs,
            variant,
            out,
        }) => channel(&ctx, &family, lambda, probs, variant, out),
        Command::Dynamics(DynamicsCommand::Classify {
            family,
            gamma_csv,
            gamma_const,
            grid,
            samples,
            seed,
            derivative_tol,
            out,
            csv_out,
        }) => {
            let traj = trajectory(gamma_csv, gamma_const.as_deref(), grid.as_deref())?;
            let opts = ClassifyOptions {
                samples,
                seed,
                psd_tol: ctx.tol,
                derivative_tol: derivative_tol.unwrap_or(Tolerances::default().derivative),
            };
            dynamics_classify(&ctx, &family, &traj, opts, out, csv_out)
        }
        Command::Dynamics(DynamicsCommand::Example {
            example,
            samples,
            seed,
            out,
        }) => dynamics_example(&ctx, example, samples, seed, out),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn family_inputs(a: &FamilyArgs) -> Value {
    json!({
        "family": a.family.and_then(|f| f.to_possible_value()).map(|v| v.get_name().to_string()),
        "d": a.d,
        "M": a.m,
        "N": a.n,
        "t": a.t,
        "basis_file": a.basis_file,
        "povm_file": a.povm_file,
    })
}

fn expect_eq(flag: &str, given: Option<usize>, actual: usize) -> Result<()> {
    match given {
        Some(v) if v != actual => Err(usage(format!("--{flag} {v} is inconsistent with the family ({flag} = {actual})"))),
        _ => Ok(()),
    }
}

fn resolve_povm(a: &FamilyArgs, tol: f64) -> Result<(SymmetricPovm, String)> {
    if let Some(path) = &a.povm_file {
        let file: PovmFile = read_json(path)?;
        let povm = file.to_povm(tol)?;
        return Ok((povm, file.metadata.family));
    }
    let kind = a.family.ok_or_else(|| usage("one of --family or --povm-file is required"))?;
    let povm = match kind {
        FamilyKind::Mub => {
            let d = a.d.ok_or_else(|| usage("--family mub needs --d"))?;
            if a.t.is_some() {
                return Err(usage("--t is fixed for mutually unbiased bases"));
            }
            mub_povm(d)?
        }
        FamilyKind::GellmannMum => {
            let d = a.d.unwrap_or(3);
            match a.t {
                Some(t) => povm_from_basis(&gellmann_basis(d)?, d + 1, d, t)?,
                None => gellmann_mum_povm(d)?,
            }
        }
        FamilyKind::Pauli152 => {
            expect_eq("d", a.d, 4)?;
            if a.t.is_some() {
                return Err(usage("--t is fixed for the (15, 2) projectors"));
            }
            pauli_15_2_povm()
        }
        FamilyKind::Custom => {
            let path = a.basis_file.as_ref().ok_or_else(|| usage("--family custom needs --basis-file"))?;
            let basis = read_json::<BasisFile>(path)?.to_basis()?;
            expect_eq("d", a.d, basis.dim())?;
            let n = a.n.unwrap_or(basis.n());
            let m = a.m.unwrap_or(basis.group_size() + 1);
            let t = a.t.ok_or_else(|| usage("--family custom needs --t"))?;
            return Ok((povm_from_basis(&basis, n, m, t)?, "custom".into()));
        }
    };
    expect_eq("d", a.d, povm.dim())?;
    expect_eq("N", a.n, povm.n())?;
    expect_eq("M", a.m, povm.m())?;
    let label = match kind {
        FamilyKind::Mub => "mub",
        FamilyKind::GellmannMum => "gellmann-mum",
        FamilyKind::Pauli152 => "pauli-15-2",
        FamilyKind::Custom => unreachable!(),
    };
    Ok((povm, label.into()))
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<()> {
    let text = report.to_json()?;
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn povm(ctx: &Context, command: &str, a: &FamilyArgs, out: Option<PathBuf>, report: Option<PathBuf>) -> Result<u8> {
    let (p, label) = resolve_povm(a, ctx.tol)?;
    let file = PovmFile::from_povm(&p, &label);
    if let Some(path) = &out {
        write_json(path, &file)?;
    }
    let symmetry = verify_symmetric(&p);
    let design = conical_design_check(&p);
    let pass = symmetry.residual <= ctx.tol && design.residual.is_none_or(|r| r <= ctx.tol);
    let results = json!({
        "description": describe(&p),
        "metadata": to_value(&file.metadata)?,
        "symmetry": to_value(&symmetry)?,
        "design": to_value(&design)?,
        "pass": pass,
    });
    let mut inputs = family_inputs(a);
    inputs["out"] = json!(out);
    let r = Report::new(command, inputs, results, ctx.provenance(None, None));
    emit(&r, report.as_ref())?;
    Ok(if pass { EXIT_PASS } else { EXIT_MISMATCH })
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("--{flag}: `{v}` is not a finite number")))
        })
        .collect()
}

fn family_from(a: &FamilyArgs, tol: f64) -> Result<ChannelFamily> {
    Ok(ChannelFamily::build(resolve_povm(a, tol)?.0)?)
}

fn channel(
    ctx: &Context,
    a: &FamilyArgs,
    lambda: Option<String>,
    probs: Option<String>,
    variant: VariantArg,
    out: Option<PathBuf>,
) -> Result<u8> {
    let f = family_from(a, ctx.tol)?;
    let variant = match variant {
        VariantArg::Lambda => Variant::Lambda,
        VariantArg::LambdaTilde => Variant::LambdaTilde,
    };
    let spec = match (&lambda, &probs) {
        (Some(l), _) => spec_from_eigenvalues(&f, &parse_list("lambda", l)?, variant)?,
        (None, Some(p)) => MixtureSpec::from_probs(&f, variant, parse_list("probs", p)?)?,
        (None, None) => return Err(usage("one of --lambda or --probs is required")),
    };
    let report = classify_channel(&f, &spec, ctx.tol);
    let mut inputs = family_inputs(a);
    inputs["lambda"] = json!(lambda);
    inputs["probs"] = json!(probs);
    inputs["variant"] = json!(format!("{variant:?}"));
    let results = json!({
        "family": family_label(&f),
        "channel": to_value(&report)?,
    });
    emit(&Report::new("channel classify", inputs, results, ctx.provenance(None, None)), out.as_ref())?;
    Ok(EXIT_PASS)
}

/// Parses `0:T:K` into `K + 1` evenly spaced times.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || usage(format!("--grid `{s}` is not of the form 0:T:K"));
    let [start, end, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let end: f64 = end.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if start != 0.0 {
        return Err(usage("--grid must start at 0"));
    }
    Ok(RateTrajectory::uniform_grid(end, steps)?)
}

fn trajectory(csv: Option<PathBuf>, constant: Option<&str>, grid: Option<&str>) -> Result<RateTrajectory> {
    let grid = grid.map(parse_grid).transpose()?;
    match (csv, constant) {
        (Some(path), _) => {
            let traj = read_trajectory_csv(&path)?;
            if let Some(g) = grid {
                let matches = g.len() == traj.times().len()
                    && g.iter().zip(traj.times()).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
                if !matches {
                    return Err(usage(format!(
                        "grid/trajectory mismatch: grid has {} points, {} has {}",
                        g.len(),
                        path.display(),
                        traj.times().len()
                    )));
                }
            }
            Ok(traj)
        }
        (None, Some(c)) => {
            let gamma = parse_list("gamma-const", c)?;
            let times = grid.ok_or_else(|| usage("--gamma-const needs --grid"))?;
            Ok(RateTrajectory::constant(&gamma, times)?)
        }
        (None, None) => Err(usage("one of --gamma-csv or --gamma-const is required")),
    }
}

fn dynamics_classify(
    ctx: &Context,
    a: &FamilyArgs,
    traj: &RateTrajectory,
    opts: ClassifyOptions,
    out: Option<PathBuf>,
    csv_out: Option<PathBuf>,
) -> Result<u8> {
    let f = family_from(a, ctx.tol)?;
    if traj.n() != f.n() {
        return Err(usage(format!(
            "trajectory has {} rates, the family has N = {}",
            traj.n(),
            f.n()
        )));
    }
    let report = classify_trajectory(&f, traj, &opts)?;
    if let Some(path) = &csv_out {
        write_atomic(path, time_series_csv(&report)?.as_bytes())?;
    }
    let mut inputs = family_inputs(a);
    inputs["times"] = json!(traj.times());
    inputs["gammas"] = json!(traj.samples());
    inputs["samples"] = json!(opts.samples);
    let results = json!({
        "family": family_label(&f),
        "divisibility": to_value(&report)?,
    });
    let prov = ctx.provenance(Some(opts.seed), Some(opts.derivative_tol));
    emit(&Report::new("dynamics classify", inputs, results, prov), out.as_ref())?;
    Ok(EXIT_PASS)
}

fn dynamics_example(ctx: &Context, example: ExampleArg, samples: usize, seed: u64, out: Option<PathBuf>) -> Result<u8> {
    let (name, checks): (&str, Vec<Check>) = match example {
        ExampleArg::MubQutrit => ("mub-qutrit", mub_qutrit_golden()?),
        ExampleArg::MumGellmann => ("mum-gellmann", mum_gellmann_golden(samples, seed)?),
        ExampleArg::Ququart152 => ("ququart-15-2", ququart_golden(seed)?),
    };
    let pass = checks.iter().all(|c| c.pass);
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("MISMATCH {}\n  expected: {}\n  observed: {}", c.name, c.expected, c.observed);
    }
    let inputs = json!({ "example": name, "samples": samples });
    let results = json!({ "checks": to_value(&checks)?, "pass": pass });
    emit(
        &Report::new("dynamics example", inputs, results, ctx.provenance(Some(seed), None)),
        out.as_ref(),
    )?;
    Ok(if pass { EXIT_PASS } else { EXIT_MISMATCH })
}
