//! `eqwalk`: run electric quantum walks and their spectra from configs or
//! figure presets.

mod commands;
mod config;
mod presets;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{CliError, Manifest};
use config::{Angle, Phase, RunConfig, Written};
use eqwalk::spectrum::Axis;
use presets::Kind;
use std::path::PathBuf;
use std::process::ExitCode;

/// Output root when neither `--out` nor `output` is given.
const OUT_ENV: &str = "EQWALK_OUT";
const DEFAULT_OUT: &str = "eqwalk-out";

#[derive(Parser)]
#[command(
    name = "eqwalk",
    version,
    about = "Electric discrete-time quantum walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and write widths, snapshots, periods and a manifest.
    Run(RunArgs),
    /// Run every point of the config's [sweep] grid in a worker pool.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Entries run concurrently (default: one per CPU).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Sample dispersion sheets on a k-grid and check them against the
    /// eigenphases of the momentum unitary.
    Spectrum(SpectrumArgs),
    /// List or print the figure presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print a preset's config as TOML.
    Show {
        name: String,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML run configuration.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// A figure preset (see `eqwalk presets list`).
    #[arg(long, short)]
    preset: Option<String>,
    /// A manifest.json written by an earlier run.
    #[arg(long, short)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Output directory (default: $EQWALK_OUT/<name>, or eqwalk-out/<name>).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    steps: Option<u64>,
    /// Field along x: "2pi*q/p" or radians.
    #[arg(long, allow_hyphen_values = true)]
    phi_x: Option<String>,
    /// Field along y: "2pi*q/p" or radians.
    #[arg(long, allow_hyphen_values = true)]
    phi_y: Option<String>,
    /// Coin angle (1D and alternate walks): radians or "pi/4".
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Alternate walk detuning: theta_x,y = pi/4 +- delta.
    #[arg(long, allow_hyphen_values = true)]
    delta_theta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Points per momentum axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Stroboscopic sheets for the field 2pi/p.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    /// Skip the eigenphase comparison.
    #[arg(long)]
    no_oracle: bool,
}

/// A config with the directory its outputs go to.
struct Job {
    config: RunConfig,
    dir: PathBuf,
}

fn load(common: &Common, kind: Kind) -> Result<Vec<Job>, CliError> {
    let s = &common.source;
    let configs: Vec<RunConfig> = if let Some(path) = &s.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg = RunConfig::from_toml(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        vec![cfg]
    } else if let Some(name) = &s.preset {
        let found = presets::expand(name)?;
        if let Some(p) = found.iter().find(|p| p.kind != kind) {
            return Err(CliError::Config(format!(
                "preset '{}' is for `eqwalk {}`",
                p.name,
                p.kind.command()
            )));
        }
        found.iter().map(|p| p.config()).collect()
    } else if let Some(path) = &s.manifest {
        vec![Manifest::load(path)?.config]
    } else {
        unreachable!("clap requires a source")
    };
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let single = configs.len() == 1;
    Ok(configs
        .into_iter()
        .map(|config| {
            let name = config.name.clone().unwrap_or_else(|| kind.command().into());
            let dir = match (&common.out, &config.output) {
                (Some(out), _) if single => out.clone(),
                (Some(out), _) => out.join(&name),
                (None, Some(output)) => PathBuf::from(output),
                (None, None) => root.join(&name),
            };
            Job { config, dir }
        })
        .collect())
}

fn apply_run_overrides(cfg: &mut RunConfig, args: &RunArgs) -> Result<(), CliError> {
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    if let Some(v) = &args.phi_x {
        cfg.field.x = Phase::parse(v)?;
    }
    if let Some(v) = &args.phi_y {
        cfg.field.y = Phase::parse(v)?;
    }
    if let Some(v) = &args.theta {
        cfg.set_theta(&Angle::try_from(Written::Text(v.clone()))?)?;
    }
    if let Some(d) = args.delta_theta {
        cfg.set_delta_theta(d)?;
    }
    Ok(())
}

fn run(args: &RunArgs, sweep: Option<Option<usize>>) -> Result<(), CliError> {
    for mut job in load(&args.common, Kind::Run)? {
        apply_run_overrides(&mut job.config, args)?;
        match sweep {
            Some(workers) => commands::sweep(&job.config, &job.dir, workers)?,
            None => commands::run(&job.config, &job.dir)?,
        }
    }
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    for mut job in load(&args.common, Kind::Spectrum)? {
        let sc = &mut job.config.spectrum;
        if let Some(grid) = args.grid {
            sc.grid = grid;
        }
        if let Some(p) = args.p {
            sc.p = Some(p);
        }
        if let Some(axis) = args.axis {
            sc.axis = match axis {
                AxisArg::X => Axis::X,
                AxisArg::Y => Axis::Y,
            };
        }
        if args.no_oracle {
            sc.oracle = false;
        }
        commands::spectrum(&job.config, &job.dir)?;
    }
    Ok(())
}

fn presets(action: &PresetAction) -> Result<(), CliError> {
    match action {
        PresetAction::List => {
            for p in presets::PRESETS {
                println!("{:<7} {:<9} {}", p.name, p.kind.command(), p.about);
            }
            for (group, members) in presets::GROUPS {
                println!("{group:<7} {:<9} {}", "group", members.join(" "));
            }
        }
        PresetAction::Show { name } => {
            for p in presets::expand(name)? {
                println!(
                    "# eqwalk {} --preset {}\n{}",
                    p.kind.command(),
                    p.name,
                    p.toml
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args, None),
        Command::Sweep { run: args, workers } => run(args, Some(*workers)),
        Command::Spectrum(args) => spectrum(args),
        Command::Presets { action } => presets(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eqwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
