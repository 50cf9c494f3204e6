//! Result rows and their files.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::BenchError;

/// One trained trial at one load.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub load: u64,
    pub converged: bool,
    pub epochs_used: usize,
    pub final_accuracy: f64,
    /// Held-out accuracy, for experiments that have a test set.
    pub test_accuracy: Option<f64>,
    pub fallback_count: usize,
    pub skipped_count: usize,
}

/// One point of a per-epoch trace, in long format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub method: String,
    pub trial: usize,
    pub load: u64,
    pub epoch: usize,
    pub metric: &'static str,
    pub value: f64,
}

/// Wall time of a trial. Kept apart from the records, which must not change
/// between reruns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub method: String,
    pub trial: usize,
    pub load: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub records: Vec<TrialRecord>,
    pub curves: Vec<CurvePoint>,
    pub timings: Vec<Timing>,
    pub summary: Value,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

impl Outcome {
    /// Writes `records.csv`, `curves.csv`, `timings.csv` and `summary.json`
    /// into `dir`, creating it if needed.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), BenchError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_csv(
            &dir.join("records.csv"),
            &self.records,
            &[
                "experiment",
                "method",
                "trial",
                "seed",
                "load",
                "converged",
                "epochs_used",
                "final_accuracy",
                "test_accuracy",
                "fallback_count",
                "skipped_count",
            ],
        )?;
        write_csv(
            &dir.join("curves.csv"),
            &self.curves,
            &["method", "trial", "load", "epoch", "metric", "value"],
        )?;
        write_csv(&dir.join("timings.csv"), &self.timings, &["method", "trial", "load", "seconds"])?;
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        fs::write(dir.join("summary.json"), text)?;
        Ok(())
    }
}

/// Mean and sample standard deviation; `(NaN, NaN)` when empty.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}
