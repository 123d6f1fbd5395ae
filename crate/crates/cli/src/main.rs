use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetcurv_cli::commands::{run, CliError, Command, RunConfig};
use jetcurv_cli::specfile::{parse_seed, parse_spec, positive_float};

/// Curvature and splitting analysis for systems of second-order PDEs.
#[derive(Parser)]
#[command(name = "jetcurv", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Horizontal coefficients and frame checks for each slice.
    Split(Common),
    /// Curvature, torsion and Jacobi endomorphism.
    Curvature(Common),
    /// Bracket identities between the curvature operators.
    Identities(Common),
    /// Compatibility of each slice with the first-order reduction.
    Compatibility(Common),
    /// Separable form and its directional slices.
    Separability(Common),
    /// Numeric eigenstructure of the deformation at sampled points.
    EigenVerify(Common),
    /// Harmonic-map system built from the metrics.
    Harmonic(Common),
}

#[derive(Args)]
struct Common {
    /// System description file.
    spec: PathBuf,
    /// Restrict to one `[slice NAME]` block.
    #[arg(long)]
    slice: Option<String>,
    /// Also write the report as JSON.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Number of sample points for eigen-verify.
    #[arg(long)]
    points: Option<usize>,
    /// Seed in hex; overrides JETCURV_SEED and the spec.
    #[arg(long, value_name = "HEX")]
    seed: Option<String>,
    /// Tolerance for both the symbolic and numeric tiers.
    #[arg(long)]
    tol: Option<String>,
    /// Print nothing; rely on the exit code and --json.
    #[arg(long)]
    quiet: bool,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Split(c) => (Command::Split, c),
            Sub::Curvature(c) => (Command::Curvature, c),
            Sub::Identities(c) => (Command::Identities, c),
            Sub::Compatibility(c) => (Command::Compatibility, c),
            Sub::Separability(c) => (Command::Separability, c),
            Sub::EigenVerify(c) => (Command::EigenVerify, c),
            Sub::Harmonic(c) => (Command::Harmonic, c),
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("jetcurv: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let (command, args) = Cli::parse().command.split();
    let bytes = match std::fs::read(&args.spec) {
        Ok(b) => b,
        Err(e) => return input_error(format!("{}: {e}", args.spec.display())),
    };
    let text = match String::from_utf8(bytes.clone()) {
        Ok(t) => t,
        Err(_) => return input_error(format!("{}: not UTF-8", args.spec.display())),
    };
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => return input_error(format!("{}: {e}", args.spec.display())),
    };

    let seed = match (&args.seed, std::env::var("JETCURV_SEED").ok()) {
        (Some(s), _) => parse_seed(s).ok_or_else(|| format!("--seed: bad hex value {s:?}")),
        (None, Some(s)) => parse_seed(&s).ok_or_else(|| format!("JETCURV_SEED: bad hex value {s:?}")),
        (None, None) => Ok(spec.options.seed),
    };
    let seed = match seed {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let tol = match &args.tol {
        Some(t) => match positive_float(t) {
            Some(x) => Some(x),
            None => return input_error(format!("--tol: expected a positive number, got {t:?}")),
        },
        None => None,
    };
    let cfg = RunConfig {
        slice: args.slice.clone(),
        points: args.points.unwrap_or(spec.options.probe_points),
        seed,
        tol_sym: tol.unwrap_or(spec.options.tol_sym),
        tol_num: tol.unwrap_or(spec.options.tol_num),
        probes: spec.options.probe_points,
    };

    if !args.quiet && command.uses_f() {
        for w in &spec.warnings {
            eprintln!("warning: {w}");
        }
    }

    let report = match run(command, &spec, &bytes, &cfg) {
        Ok(r) => r,
        Err(CliError::Input(msg)) => return input_error(msg),
        Err(CliError::Assertion(msg)) => {
            eprintln!("jetcurv: {msg}");
            return ExitCode::FAILURE;
        }
    };
    if !args.quiet {
        print!("{}", report.text());
    }
    if let Some(path) = &args.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return input_error(format!("{}: {e}", path.display()));
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
