//! Configuration loading and report emission for the `ekor` binary.

pub mod config;
pub mod report;

pub use config::{parse_config, AnalysisConfig, ConfigError};
pub use report::{recheck_report, render_json, render_text, run_analysis, AnalysisReport, Command, RunError};
