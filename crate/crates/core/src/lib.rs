//! Artificial life on a bordered ASCII grid where every agent is a
//! finite-state machine, plus a (1+1) hillclimber that evolves the agents'
//! graphs and the starting population.
//!
//! - [`rng`]: the single SplitMix64 stream behind every random choice
//! - [`fsm`]: entity graphs, random generation, pruning, text format
//! - [`config`]: the `key: value` configuration file
//! - [`world`]: fortress state, termination, coverage, saves and logs
//! - [`engine`]: the tick loop
//! - [`evolution`]: mutation operators, fitness and the hillclimber
//! - [`render`]: terminal drawing
//! - [`cli`]: the `fortress` binary's subcommands
//!
//! Runs are deterministic: the same configuration and seed give
//! byte-identical logs, saves and metrics.

pub mod cli;
pub mod config;
pub mod engine;
pub mod evolution;
pub mod fsm;
pub mod render;
pub mod rng;
pub mod world;

pub use config::{parse_config, SimConfig};
pub use engine::{run, step};
pub use evolution::{evaluate, hillclimb, mutate, Genome, MutationParams};
pub use fsm::{generate_fsm, parse_fsm, serialize_fsm, Action, Condition, EntityDef};
pub use rng::Rng;
pub use world::{init_fortress, Cause, Fortress, StopReason};
