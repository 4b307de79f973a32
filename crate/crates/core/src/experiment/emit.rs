use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{GmmError, Result};

use super::config::ExperimentConfig;
use super::trial::{SuiteResults, TrialFailure};

/// Mean and spread of one `(setting, method, baseline)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub setting: String,
    pub method: String,
    pub baseline: String,
    pub trials: usize,
    pub mean_ratio: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_ratio: f64,
    pub mean_score_base: f64,
    pub mean_score_combined: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Summary rows in order of first appearance.
pub fn summarize(results: &SuiteResults) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str, &str)> = Vec::new();
    for (_, r) in results.rows() {
        let key = (r.setting.as_str(), r.method.as_str(), r.baseline.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(setting, method, baseline)| {
            let cell: Vec<_> = results
                .rows()
                .map(|(_, r)| r)
                .filter(|r| r.setting == setting && r.method == method && r.baseline == baseline)
                .collect();
            let ratios: Vec<f64> = cell.iter().map(|r| r.ratio).collect();
            SummaryRow {
                setting: setting.to_string(),
                method: method.to_string(),
                baseline: baseline.to_string(),
                trials: cell.len(),
                mean_ratio: mean(&ratios),
                std_ratio: sample_std(&ratios),
                mean_score_base: mean(&cell.iter().map(|r| r.score_base).collect::<Vec<_>>()),
                mean_score_combined: mean(&cell.iter().map(|r| r.score_combined).collect::<Vec<_>>()),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct TrialCsvRow<'a> {
    trial: u32,
    setting: &'a str,
    method: &'a str,
    baseline: &'a str,
    score_base: f64,
    score_combined: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    suite: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    trials: Vec<ManifestTrial<'a>>,
    failures: &'a [TrialFailure],
}

#[derive(Serialize)]
struct ManifestTrial<'a> {
    trial: u32,
    seeds: &'a std::collections::BTreeMap<&'static str, u64>,
    wall_time_secs: f64,
}

/// Paths written by [`emit_results`].
#[derive(Debug, Clone)]
pub struct EmittedFiles {
    pub trials: PathBuf,
    pub summary: PathBuf,
    pub failures: PathBuf,
    pub manifest: PathBuf,
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| GmmError::io(path, e))
}

/// Writes `<suite>_trials.csv`, `<suite>_summary.csv`, `<suite>_failures.csv`
/// and `<suite>_manifest.json` into `out`. The CSVs depend only on the config
/// and seeds; wall times go to the manifest.
pub fn emit_results(results: &SuiteResults, out: impl AsRef<Path>) -> Result<EmittedFiles> {
    let out = out.as_ref();
    fs::create_dir_all(out).map_err(|e| GmmError::io(out, e))?;
    let name = results.suite.name();
    let files = EmittedFiles {
        trials: out.join(format!("{name}_trials.csv")),
        summary: out.join(format!("{name}_summary.csv")),
        failures: out.join(format!("{name}_failures.csv")),
        manifest: out.join(format!("{name}_manifest.json")),
    };

    write_csv(
        &files.trials,
        results.rows().map(|(trial, r)| TrialCsvRow {
            trial,
            setting: &r.setting,
            method: &r.method,
            baseline: &r.baseline,
            score_base: r.score_base,
            score_combined: r.score_combined,
            ratio: r.ratio,
        }),
    )?;
    write_csv(&files.summary, summarize(results))?;

    // header only when nothing failed
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_path(&files.failures)?;
    w.write_record(["trial", "setting", "message"])?;
    for f in &results.failures {
        w.serialize(f)?;
    }
    w.flush().map_err(|e| GmmError::io(&files.failures, e))?;

    let manifest = Manifest {
        suite: name,
        version: env!("CARGO_PKG_VERSION"),
        config: &results.config,
        trials: results
            .trials
            .iter()
            .map(|t| ManifestTrial {
                trial: t.trial,
                seeds: &t.seeds,
                wall_time_secs: t.wall_time_secs,
            })
            .collect(),
        failures: &results.failures,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&files.manifest, text + "\n").map_err(|e| GmmError::io(&files.manifest, e))?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_is_sample_std() {
        assert_eq!(sample_std(&[1.0]), 0.0);
        assert!((sample_std(&[1.0, 3.0]) - 2f64.sqrt()).abs() < 1e-15);
    }
}
