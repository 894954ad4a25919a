//! Experiment harness for the `qkg-core` numerics: configuration files,
//! initial data, sweeps, verification runs and their on-disk formats.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod output;
pub mod workflows;

pub use config::ExperimentConfig;
pub use data::GroundStateCache;
pub use error::{LabError, LabResult};
