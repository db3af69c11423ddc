//! Deterministic agent-based simulation of fear-driven collective violence.
//!
//! Agents on a toroidal grid learn affect from local threats, estimate risk
//! from a memory of recent activation, and pick up their peers' dispositions
//! over a weighted tie network. A positive disposition triggers a destructive
//! action; high risk with low disposition can trigger flight instead.
//!
//! The crate is organized by subsystem: [`environment`] (patch grid),
//! [`cognition`] (per-agent internals), [`network`] (ties and contagion),
//! [`conflict`] (actions and retaliation), [`engine`] (phase loop), and the
//! IO layer ([`config`], [`output`], [`plot`], [`experiment`], [`cli`]).

pub mod cli;
pub mod cognition;
pub mod config;
pub mod conflict;
pub mod engine;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod network;
pub mod output;
pub mod plot;
pub mod rng;

pub use config::{parse_config, parse_scenario, Scenario, SimConfig};
pub use engine::{run, MetricsFrame, Model, RunResult};
pub use error::{ConfigError, Error, Result};

/// Engine version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
