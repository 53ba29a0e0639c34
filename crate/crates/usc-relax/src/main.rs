use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use usc_relax::{Command, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "usc-relax",
    version,
    about = "Relaxation of an asymmetric dipole ultrastrongly coupled to a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set g=2.5`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,

    /// Worker threads; defaults to the hardware parallelism.
    #[arg(long, env = "USC_RELAX_JOBS", global = true)]
    jobs: Option<usize>,

    /// Raise log verbosity; repeatable.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Liouvillian gap over a (g, ε) grid.
    GapScan,
    /// Exact and gRWA polaron-frame levels.
    Spectrum,
    /// Damped multi-photon Rabi oscillation of ⟨s_x⟩.
    Evolve,
    /// Current transmission |T(ω)| of the loaded cavity.
    Transmission,
    /// Dipole structure factor and radiation impedance.
    DipoleResponse,
    /// Cavity-assisted cooling and heating rates of the multi-well dipole.
    EdmRates,
    /// Effective cascaded relaxation of the multi-well dipole.
    EdmEvolve,
    /// Two-level parameters of the double well.
    Tla,
    /// Multi-photon Rabi frequencies Ω_(k,n).
    RabiFreq,
    /// Print the merged configuration.
    Config,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let mut config = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(f) = cli.format {
        config.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(path) = &cli.output {
        config.output = Some(path.display().to_string());
    }
    let mut out: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {path}"))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let command = match cli.command {
        Sub::GapScan => Command::GapScan,
        Sub::Spectrum => Command::Spectrum,
        Sub::Evolve => Command::Evolve,
        Sub::Transmission => Command::Transmission,
        Sub::DipoleResponse => Command::DipoleResponse,
        Sub::EdmRates => Command::EdmRates,
        Sub::EdmEvolve => Command::EdmEvolve,
        Sub::Tla => Command::Tla,
        Sub::RabiFreq => Command::RabiFreq,
        Sub::Config => {
            write!(out, "{}", config.emit())?;
            out.flush()?;
            return Ok(());
        }
    };
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    log::info!("{} on {} worker(s)", command.name(), jobs);
    let result = command.run(&config, jobs)?;
    result.write(config.format, &mut out)?;
    out.flush()?;
    Ok(())
}
