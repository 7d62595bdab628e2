//! Configuration, experiment drivers and reproducible output for `qsigma`.

pub mod config;
pub mod drivers;
pub mod run;

pub use config::{validate, Experiment, FieldError, RunConfig, FORMAT_VERSION};
pub use run::{load_config, run, RunError, RunManifest};
