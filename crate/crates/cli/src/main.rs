//! `baroflow` command-line experiment runner.
//!
//! Every experiment writes CSV tables and a `<experiment>.json` manifest into
//! the output directory: `--out`, else `$BAROFLOW_OUT`, else the config `out`
//! entry, else `./results`. Exit codes: 0 success, 1 numerical failure, 2 usage.

mod config;
mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::Settings;
use experiments::*;
use output::Artifacts;

/// Environment variable overriding the output directory.
const OUT_ENV: &str = "BAROFLOW_OUT";
const DEFAULT_OUT: &str = "results";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(baroflow::Error),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<baroflow::Error> for CliError {
    fn from(e: baroflow::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    /// Library rejections of the inputs count as usage errors.
    fn exit_code(&self) -> u8 {
        use baroflow::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(E::Invalid(_) | E::Unsupported(_) | E::GridMismatch(_)) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Numerical(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "baroflow",
    version,
    about = "Compressible Euler flows as geodesics: batch experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// key = value file; flags take precedence over its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides $BAROFLOW_OUT and the config `out` entry)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geodesic (compressible Euler) trajectory on the circle
    Geodesic {
        #[command(flatten)]
        args: GeodesicArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Linearized (Jacobi) field along a circle geodesic
    Jacobi {
        #[command(flatten)]
        args: JacobiArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Exact γ = 3 solution by characteristics
    BurgersExact {
        #[command(flatten)]
        args: BurgersArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate points along the constant γ = 3 geodesic
    Conjugate {
        #[command(flatten)]
        args: ConjugateArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sectional curvature sign over random 1D sections
    CurvatureScan {
        #[command(flatten)]
        args: CurvatureScanArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Jacobi fields along the torus shear flow
    TorusModes {
        #[command(flatten)]
        args: TorusModesArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Radial spectrum and frequencies of the rotating disc
    DiscSpectrum {
        #[command(flatten)]
        args: DiscSpectrumArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the experiment named by the `experiment` entry of a config file
    Run {
        #[arg(long, required = true)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Experiment {
    Geodesic(GeodesicArgs),
    Jacobi(JacobiArgs),
    BurgersExact(BurgersArgs),
    Conjugate(ConjugateArgs),
    CurvatureScan(CurvatureScanArgs),
    TorusModes(TorusModesArgs),
    DiscSpectrum(DiscSpectrumArgs),
}

impl Experiment {
    fn by_name(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "geodesic" => Self::Geodesic(Default::default()),
            "jacobi" => Self::Jacobi(Default::default()),
            "burgers-exact" => Self::BurgersExact(Default::default()),
            "conjugate" => Self::Conjugate(Default::default()),
            "curvature-scan" => Self::CurvatureScan(Default::default()),
            "torus-modes" => Self::TorusModes(Default::default()),
            "disc-spectrum" => Self::DiscSpectrum(Default::default()),
            other => {
                return Err(CliError::Usage(format!(
                "unknown experiment '{other}'; expected one of geodesic, jacobi, burgers-exact, \
                     conjugate, curvature-scan, torus-modes, disc-spectrum"
            )))
            }
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Geodesic(_) => "geodesic",
            Self::Jacobi(_) => "jacobi",
            Self::BurgersExact(_) => "burgers-exact",
            Self::Conjugate(_) => "conjugate",
            Self::CurvatureScan(_) => "curvature-scan",
            Self::TorusModes(_) => "torus-modes",
            Self::DiscSpectrum(_) => "disc-spectrum",
        }
    }

    fn run(&self, s: &mut Settings) -> Result<Artifacts, CliError> {
        match self {
            Self::Geodesic(a) => geodesic(a, s),
            Self::Jacobi(a) => jacobi(a, s),
            Self::BurgersExact(a) => burgers_exact(a, s),
            Self::Conjugate(a) => conjugate(a, s),
            Self::CurvatureScan(a) => curvature_scan(a, s),
            Self::TorusModes(a) => torus_modes(a, s),
            Self::DiscSpectrum(a) => disc_spectrum(a, s),
        }
    }
}

fn split(command: Command) -> Result<(Experiment, Common), CliError> {
    Ok(match command {
        Command::Geodesic { args, common } => (Experiment::Geodesic(args), common),
        Command::Jacobi { args, common } => (Experiment::Jacobi(args), common),
        Command::BurgersExact { args, common } => (Experiment::BurgersExact(args), common),
        Command::Conjugate { args, common } => (Experiment::Conjugate(args), common),
        Command::CurvatureScan { args, common } => (Experiment::CurvatureScan(args), common),
        Command::TorusModes { args, common } => (Experiment::TorusModes(args), common),
        Command::DiscSpectrum { args, common } => (Experiment::DiscSpectrum(args), common),
        Command::Run { config, out } => {
            let settings = Settings::load(&config)?;
            let name = settings.reserved("experiment").ok_or_else(|| {
                CliError::Usage(format!("{} has no 'experiment' entry", config.display()))
            })?;
            let exp = Experiment::by_name(name)?;
            (
                exp,
                Common {
                    config: Some(config),
                    out,
                },
            )
        }
    })
}

fn output_dir(flag: Option<PathBuf>, settings: &Settings) -> PathBuf {
    flag.or_else(|| {
        std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
    .or_else(|| settings.reserved("out").map(PathBuf::from))
    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn execute(command: Command) -> Result<PathBuf, CliError> {
    let (exp, common) = split(command)?;
    let mut settings = match &common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Some(name) = settings.reserved("experiment") {
        if name != exp.name() {
            return Err(CliError::Usage(format!(
                "config names experiment '{name}' but '{}' was requested",
                exp.name()
            )));
        }
    }
    let dir = output_dir(common.out, &settings);
    let artifacts = exp.run(&mut settings)?;
    let parameters = settings.finish()?;
    output::write(Path::new(&dir), exp.name(), &parameters, &artifacts)
}

fn report(err: &CliError, usage: Option<String>) -> ExitCode {
    if let Some(text) = usage {
        eprint!("{text}");
    }
    let code = err.exit_code();
    let body = json!({ "error": err.kind(), "message": err.message(), "exit_code": code });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return report(&CliError::Usage(first.to_string()), Some(text));
        }
    };
    match execute(cli.command) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => report(&e, None),
    }
}
