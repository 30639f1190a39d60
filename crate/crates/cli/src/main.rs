use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use biconformal_cli::commands::{self, Output, EXIT_ERROR};
use biconformal_cli::{CliError, Settings};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "biconformal", version, about = "Bi-conformal analysis of a metric and projector pair")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file.
    problem: PathBuf,
    /// Seed for sample points and generic function bindings [default: 42].
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per zero test [default: 32].
    #[arg(long)]
    samples: Option<usize>,
    /// Relative tolerance of the sampled zero test [default: 1e-9].
    #[arg(long)]
    tol: Option<f64>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings { seed: self.seed, samples: self.samples, tolerance: self.tol }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dump the nonzero components of every bi-conformal object as JSON.
    Analyze(Common),
    /// Test conformal separability and report the class.
    Classify(Common),
    /// Check the identity battery; exits 1 if any identity fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Seed of the polynomial test field [default: the sampling seed].
        #[arg(long)]
        field_seed: Option<u64>,
    },
    /// Transport a normal-form state along a polyline; CSV by default.
    Transport {
        #[command(flatten)]
        common: Common,
        /// JSON initial state: xi, psi, phi, chi, phi_star, phi_bar, chi_star, chi_bar.
        #[arg(long)]
        state: PathBuf,
        /// JSON curve: points, step, integrator.
        #[arg(long)]
        curve: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<(Output, &Common), CliError> {
    let common = match &cli.command {
        Command::Analyze(c) | Command::Classify(c) => c,
        Command::Verify { common, .. } | Command::Transport { common, .. } => common,
    };
    let problem = commands::load(&common.problem)?;
    let flags = common.settings();
    let out = match &cli.command {
        Command::Analyze(_) => commands::analyze(&problem, flags)?,
        Command::Classify(c) => commands::classify_cmd(&problem, flags, c.json)?,
        Command::Verify { common, field_seed } => commands::verify(&problem, flags, *field_seed, common.json)?,
        Command::Transport { common, state, curve } => {
            commands::transport(&problem, flags, state, curve, common.json)?
        }
    };
    Ok((out, common))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, common) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            let origin = match &cli.command {
                Command::Analyze(c) | Command::Classify(c) => &c.problem,
                Command::Verify { common, .. } | Command::Transport { common, .. } => &common.problem,
            };
            eprintln!("error: {}: {e}", origin.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    eprint!("{}", out.stderr);
    let written = match &common.out {
        Some(path) => std::fs::write(path, &out.stdout)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(out.stdout.as_bytes())
            .map_err(|source| CliError::Io { path: "stdout".into(), source }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(out.status as u8)
}
