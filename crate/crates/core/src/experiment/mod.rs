//! Multi-trial experiment suites: configuration, the per-trial pipeline and
//! result files.

mod config;
mod emit;
mod trial;

pub use config::{load_config, ExperimentConfig, Suite};
pub use emit::{emit_results, summarize, EmittedFiles, SummaryRow};
pub use trial::{
    run_suite, run_suite_with, run_trial, setup_trial, CombinedModels, Pipeline, RatioRow,
    SuiteResults, TrialFailure, TrialResult, TrialSetup, METHODS,
};
