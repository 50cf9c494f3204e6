//! IRIS classification with one output neuron per class.

use std::time::Instant;

use dta::datagen::{bundled_iris, load_iris, population_encode, split, Dataset, PopulationSpec};
use dta::learning::WtaNetwork;
use dta::neuron::InputPattern;
use rayon::prelude::*;
use serde_json::json;

use super::capacity::{initial_weights, trial_seed};
use crate::config::ExperimentConfig;
use crate::records::{mean_sd, CurvePoint, Outcome, Timing, TrialRecord};
use crate::seeds::{self, Stream};
use crate::BenchError;

fn dataset(cfg: &ExperimentConfig) -> Result<Dataset, BenchError> {
    Ok(match &cfg.iris_path {
        Some(p) => load_iris(p)?,
        None => bundled_iris(),
    })
}

struct TrialOut {
    record: TrialRecord,
    curves: Vec<CurvePoint>,
    timing: Timing,
}

fn run_trial(cfg: &ExperimentConfig, data: &Dataset, trial: usize) -> Result<TrialOut, BenchError> {
    let start = Instant::now();
    let ts = trial_seed(cfg, trial);
    let parts = split(&data.labels, cfg.train_fraction, &mut seeds::rng(ts, Stream::Split, 0));
    let rows: Vec<Vec<f64>> = parts.train.iter().map(|&i| data.features[i].clone()).collect();
    let spec = PopulationSpec {
        fields_per_feature: cfg.fields_per_feature,
        beta: cfg.beta,
        window: cfg.window,
        ..PopulationSpec::fit(&rows)?
    };
    spec.validate()?;
    let encode = |idx: &[usize]| -> Result<Vec<InputPattern>, BenchError> {
        idx.iter()
            .map(|&i| Ok(population_encode(&data.features[i], &spec)?))
            .collect()
    };
    let (x_train, x_test) = (encode(&parts.train)?, encode(&parts.test)?);
    let y_train: Vec<usize> = parts.train.iter().map(|&i| data.labels[i]).collect();
    let y_test: Vec<usize> = parts.test.iter().map(|&i| data.labels[i]).collect();

    let n_classes = data.n_classes();
    let params = cfg.params()?.with_n_channels(spec.n_channels());
    let sized = ExperimentConfig {
        n_channels: spec.n_channels(),
        ..cfg.clone()
    };
    let w0 = (0..n_classes as u64).map(|k| initial_weights(&sized, ts, k)).collect();
    let mut net = WtaNetwork::new(w0, cfg.target_spikes);
    let dta = cfg.dta_config();
    let mut order = seeds::rng(ts, Stream::Order, 0);
    let (mut fallbacks, mut skipped) = (0, 0);
    let mut curves = Vec::with_capacity(2 * cfg.max_epochs);
    let (mut train_acc, mut test_acc) = (0.0, 0.0);
    for epoch in 1..=cfg.max_epochs {
        let rep = net.train_epoch(&params, &x_train, &y_train, &dta, &mut order)?;
        fallbacks += rep.fallback_count.iter().sum::<usize>();
        skipped += rep.skipped_count.iter().sum::<usize>();
        train_acc = net.accuracy(&params, &x_train, &y_train)?;
        test_acc = net.accuracy(&params, &x_test, &y_test)?;
        for (metric, value) in [("train_accuracy", train_acc), ("test_accuracy", test_acc)] {
            curves.push(CurvePoint {
                method: "dta-psp".into(),
                trial,
                load: x_train.len() as u64,
                epoch,
                metric,
                value,
            });
        }
    }
    let record = TrialRecord {
        experiment: cfg.kind.id().into(),
        method: format!("dta-{}", dta.kernel.name()),
        trial,
        seed: ts,
        load: x_train.len() as u64,
        converged: train_acc >= 1.0,
        epochs_used: cfg.max_epochs,
        final_accuracy: train_acc,
        test_accuracy: Some(test_acc),
        fallback_count: fallbacks,
        skipped_count: skipped,
    };
    let timing = Timing {
        method: record.method.clone(),
        trial,
        load: record.load,
        seconds: start.elapsed().as_secs_f64(),
    };
    for c in &mut curves {
        c.method.clone_from(&record.method);
    }
    Ok(TrialOut {
        record,
        curves,
        timing,
    })
}

/// Stratified split, population coding and a winner-take-all network per
/// trial; train and test accuracy after every epoch.
pub fn run_iris(cfg: &ExperimentConfig) -> Result<Outcome, BenchError> {
    let data = dataset(cfg)?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &data, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    for t in trials {
        out.records.push(t.record);
        out.curves.extend(t.curves);
        out.timings.push(t.timing);
    }
    let train: Vec<f64> = out.records.iter().map(|r| r.final_accuracy).collect();
    let test: Vec<f64> = out.records.iter().filter_map(|r| r.test_accuracy).collect();
    let ((train_mean, train_sd), (test_mean, test_sd)) = (mean_sd(&train), mean_sd(&test));
    out.summary = json!({
        "experiment": cfg.kind.id(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "epochs": cfg.max_epochs,
        "train_accuracy_mean": train_mean,
        "train_accuracy_sd": train_sd,
        "test_accuracy_mean": test_mean,
        "test_accuracy_sd": test_sd,
    });
    Ok(out)
}
