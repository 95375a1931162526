//! Subcommands behind the `fortress` binary: `simulate`, `evolve`,
//! `replay` and `validate`.
//!
//! Exit codes: 0 on success, 1 for configuration or save-file errors, 2 for
//! runtime failures such as unwritable output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{serialize_config, ConfigError, SimConfig};
use crate::engine;
use crate::evolution::{self, coverage_stats, metrics_csv, MutationParams};
use crate::fsm::ParseError;
use crate::render::render;
use crate::rng::Rng;
use crate::world::{self, init_fortress, render_log, save_text, Fortress, StopReason, WorldError};

#[derive(Debug, Parser)]
#[command(
    name = "fortress",
    version,
    about = "Finite-state-machine artificial life on an ASCII grid"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one fortress until it terminates or hits the tick limit.
    Simulate(SimulateArgs),
    /// Hillclimb fortresses toward higher graph coverage.
    Evolve(EvolveArgs),
    /// Rerun a saved fortress with its embedded seed.
    Replay(ReplayArgs),
    /// Parse a configuration and print it with defaults resolved.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, env = "AF_OUT_DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Draw the map after every tick.
    #[arg(long)]
    pub render: bool,
    #[arg(long, default_value_t = 100)]
    pub delay_ms: u64,
    /// List each instance's current node under the map.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1000)]
    pub ticks: u64,
    #[command(flatten)]
    pub view: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1000)]
    pub generations: usize,
    #[arg(long, default_value_t = 20)]
    pub ticks: u64,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.5)]
    pub node_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    pub instance_prob: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Save file written by `simulate` or `evolve`.
    #[arg(long)]
    pub fortress: PathBuf,
    /// Configuration of the original run (supplies pop_perc and inactive_limit).
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1000)]
    pub ticks: u64,
    #[command(flatten)]
    pub view: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("bad fortress file {path}: {source}")]
    Save { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    World(#[from] WorldError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Save { .. } | CliError::Usage(_) => 1,
            CliError::World(_) | CliError::Io { .. } => 2,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) {
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

/// File name of the configured log, placed inside the output directory.
pub fn log_file_name(config: &SimConfig) -> String {
    Path::new(&config.log_file)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "fortress.log".to_string())
}

pub const START_SAVE: &str = "start.fortress";
pub const RESOLVED_CONFIG: &str = "resolved.cfg";
pub const REPLAY_LOG: &str = "replay.log";

fn run_with_view(
    fortress: &mut Fortress,
    config: &SimConfig,
    ticks: u64,
    view: &RenderArgs,
    out: &mut dyn Write,
) -> StopReason {
    let mut rng = Rng::new(fortress.seed);
    if view.render {
        emit(out, &render(fortress, view.verbose));
    }
    engine::run_observed(fortress, config, &mut rng, ticks, |f, _| {
        if view.render {
            emit(out, "\x1b[2J\x1b[H");
            emit(out, &render(f, view.verbose));
            if view.delay_ms > 0 {
                std::thread::sleep(Duration::from_millis(view.delay_ms));
            }
        }
    })
}

/// Writes `start.fortress`, `resolved.cfg` and, when the run is long
/// enough and logging is on, the log named by `log_file`.
pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<StopReason, CliError> {
    let config = SimConfig::from_path(&args.config)?;
    let mut rng = Rng::new(config.seed);
    let mut fortress = init_fortress(&config, &mut rng)?;
    ensure_dir(&args.output.out)?;
    write_file(&args.output.out.join(START_SAVE), &save_text(&fortress))?;
    write_file(&args.output.out.join(RESOLVED_CONFIG), &serialize_config(&config))?;

    let stop = run_with_view(&mut fortress, &config, args.ticks, &args.view, out);
    emit(
        out,
        &format!(
            "seed {} stopped: {stop} at tick {}\n",
            config.seed,
            fortress.tick()
        ),
    );
    if config.save_log && fortress.tick() >= config.min_log {
        write_file(
            &args.output.out.join(log_file_name(&config)),
            &render_log(&fortress, stop),
        )?;
    }
    Ok(stop)
}

pub fn replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<StopReason, CliError> {
    let config = SimConfig::from_path(&args.config)?;
    let text = std::fs::read_to_string(&args.fortress).map_err(|source| CliError::Io {
        path: args.fortress.display().to_string(),
        source,
    })?;
    let mut fortress = world::parse_save(&text).map_err(|source| CliError::Save {
        path: args.fortress.display().to_string(),
        source,
    })?;
    let stop = run_with_view(&mut fortress, &config, args.ticks, &args.view, out);
    ensure_dir(&args.output.out)?;
    write_file(&args.output.out.join(REPLAY_LOG), &render_log(&fortress, stop))?;
    emit(out, &format!("stopped: {stop} at tick {}\n", fortress.tick()));
    Ok(stop)
}

pub fn trial_file(trial: usize, suffix: &str) -> String {
    format!("trial_{trial}{suffix}")
}

/// Runs the hillclimbing trials in parallel. Trial `i` is seeded with the
/// config seed plus `i`; each writes `trial_<i>.csv`,
/// `trial_<i>_best.fortress` and `trial_<i>_best.log`.
pub fn evolve(args: &EvolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = SimConfig::from_path(&args.config)?;
    let params = MutationParams {
        node_prob: args.node_prob,
        edge_prob: args.edge_prob,
        instance_prob: args.instance_prob,
    };
    for (name, p) in [
        ("--node-prob", params.node_prob),
        ("--edge-prob", params.edge_prob),
        ("--instance-prob", params.instance_prob),
    ] {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Usage(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    if args.generations == 0 {
        return Err(CliError::Usage("--generations must be at least 1".into()));
    }
    ensure_dir(&args.output.out)?;
    write_file(&args.output.out.join(RESOLVED_CONFIG), &serialize_config(&config))?;

    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..args.trials)
            .map(|trial| {
                let config = &config;
                scope.spawn(move || {
                    let mut rng = Rng::new(config.seed.wrapping_add(trial as u64));
                    evolution::hillclimb(config, &params, args.generations, args.ticks, &mut rng)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trial thread panicked"))
            .collect()
    });

    for (trial, result) in results.into_iter().enumerate() {
        let result = result?;
        let dir = &args.output.out;
        write_file(
            &dir.join(trial_file(trial, ".csv")),
            &metrics_csv(&result.records),
        )?;
        write_file(
            &dir.join(trial_file(trial, "_best.fortress")),
            &save_text(&result.best_start(&config)),
        )?;
        write_file(
            &dir.join(trial_file(trial, "_best.log")),
            &render_log(&result.best_eval.fortress, result.best_eval.stop),
        )?;
        let stats = coverage_stats(&result.best_eval.fortress);
        let first = result.records.first().map_or(0.0, |r| r.best_fitness);
        emit(
            out,
            &format!(
                "trial {trial}: start {first:.2} best {:.2} entities {} node coverage {:.0}% edge coverage {:.0}%\n",
                result.best_eval.score,
                result.best_eval.num_entities,
                stats.mean_node * 100.0,
                stats.mean_edge * 100.0
            ),
        );
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = SimConfig::from_path(&args.config)?;
    emit(out, &serialize_config(&config));
    Ok(())
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(a, out).map(|_| ()),
        Command::Evolve(a) => evolve(a, out),
        Command::Replay(a) => replay(a, out).map(|_| ()),
        Command::Validate(a) => validate(a, out),
    }
}
