//! Statistics, exact moment formulas and named end-to-end experiments.

pub mod experiments;
pub mod report;
pub mod rogers;
pub mod stats;

pub use experiments::{default_config, run_experiment, ExperimentConfig, EXPERIMENTS};
pub use report::{Check, ExperimentReport, Relation};
pub use rogers::rogers_second_moment;
