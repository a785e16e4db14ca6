mod commands;
mod output_dir;
mod spec;

use std::fs;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcollide::model::ModelParams;

use crate::spec::{parse_angle, UnitarySpec};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<qcollide::Error> for CliError {
    fn from(e: qcollide::Error) -> Self {
        use qcollide::Error as E;
        match e {
            E::DegenerateSteadyState { .. } | E::NonConvergence { .. } | E::NotSteady { .. } => CliError::Numerical(e.to_string()),
            E::InvalidParameter(_) | E::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

/// Collision-model thermal machines driven by correlated flying-qubit baths.
#[derive(Parser, Debug)]
#[command(name = "qcollide", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan the partial-swap angle of the bath preparation.
    SwapSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0", value_parser = parse_angle)]
        phi_min: f64,
        #[arg(long, default_value = "pi", value_parser = parse_angle)]
        phi_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Sample Haar-random bath unitaries.
    RandomEnsemble {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        /// Also compute mutual information, discord and concurrence.
        #[arg(long)]
        correlations: bool,
    },
    /// Compare the collision steady state with its continuous-time limit.
    LindbladCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.1,0.05,0.025")]
        tau_list: Vec<f64>,
        #[arg(long, default_value = "0.05", value_parser = parse_angle)]
        phi: f64,
    },
    /// Steady state and bookkeeping for one bath unitary.
    SteadyState {
        #[command(flatten)]
        common: Common,
        /// identity, swap(PHI), I..VIII or haar(SEED)
        #[arg(long, default_value = "identity")]
        unitary: UnitarySpec,
    },
    /// The eight non-correlating operations and their convex hull.
    Octagon {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with any of J, Delta, B1, B2, gamma, n1, n2, tau.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    outdir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "QCOLLIDE_WORKERS", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long)]
    b1: Option<f64>,
    #[arg(long)]
    b2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long)]
    n2: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
}

impl Common {
    fn params(&self, base: ModelParams) -> Result<ModelParams, CliError> {
        let mut p = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                base.merge_config_str(&text)?
            }
            None => base,
        };
        let overrides = [
            (self.j, &mut p.j),
            (self.delta, &mut p.delta),
            (self.b1, &mut p.b1),
            (self.b2, &mut p.b2),
            (self.gamma, &mut p.gamma),
            (self.n1, &mut p.n1),
            (self.n2, &mut p.n2),
            (self.tau, &mut p.tau),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        p.validate()?;
        Ok(p)
    }

    fn workers(&self) -> usize {
        match self.workers {
            Some(w) => w as usize,
            None => std::thread::available_parallelism().map_or(1, NonZeroUsize::get),
        }
    }
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    match cli.command {
        Command::SwapSweep { common, phi_min, phi_max, steps } => {
            let p = common.params(ModelParams::default())?;
            commands::swap_sweep(&common, &p, phi_min, phi_max, steps)
        }
        Command::RandomEnsemble { common, samples, bins, correlations } => {
            let p = common.params(ModelParams::random_unitary_point())?;
            commands::random_ensemble(&common, &p, samples, bins, correlations)
        }
        Command::LindbladCheck { common, tau_list, phi } => {
            let p = common.params(ModelParams::default())?;
            commands::lindblad_check(&common, &p, &tau_list, phi)
        }
        Command::SteadyState { common, unitary } => {
            let p = common.params(ModelParams::default())?;
            commands::steady_state(&common, &p, &unitary)
        }
        Command::Octagon { common } => {
            let p = common.params(ModelParams::random_unitary_point())?;
            commands::octagon(&common, &p)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qcollide: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
