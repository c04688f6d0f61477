//! Experiment harness behind the `hostcolor` command.

pub mod adversary;
pub mod experiment;
pub mod verify;

pub use adversary::{adversary_menu, Adversary};
pub use experiment::{run_experiment, Algo, ExperimentConfig, Report};
pub use verify::verify;

/// Environment variable that overrides the master seed.
pub const SEED_ENV: &str = "HOSTCOLOR_SEED";
