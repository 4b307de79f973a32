//! A short run of the baseline suite, printed as a summary table.
//!
//! cargo run --release --example experiment_suite [trials]

use multiagent_gmm::experiment::{run_suite_with, summarize, ExperimentConfig, Suite};
use multiagent_gmm::{GameFixture, Result};

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::with_fixture("<built-in>");
    cfg.trials = std::env::args().nth(1).and_then(|t| t.parse().ok()).unwrap_or(3);
    let results = run_suite_with(Suite::Baseline, &cfg, &GameFixture::default_fixture())?;
    println!("{:<8} {:<5} {:>8} {:>8}", "method", "base", "mean R", "sd");
    for row in summarize(&results) {
        println!("{:<8} {:<5} {:>8.4} {:>8.4}", row.method, row.baseline, row.mean_ratio, row.std_ratio);
    }
    Ok(())
}
