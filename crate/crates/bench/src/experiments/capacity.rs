//! Load sweeps: grow the problem until too many trials fail.

use std::time::Instant;

use dta::datagen::{gaussian_weights, poisson_train};
use dta::learning::{
    train_decoding_with, train_encoding_with, DecodingProblem, EncodingProblem, TrainResult,
};
use dta::neuron::{InputPattern, NeuronParams, SpikeTrain, WeightVector};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, ExperimentKind, Method};
use crate::records::{mean_sd, Outcome, Timing, TrialRecord};
use crate::seeds::{self, child, Stream};
use crate::BenchError;

/// Input pattern whose channels each have their own stream, so a longer
/// pattern from the same seed extends the shorter one.
pub fn input_pattern(n: usize, duration: f64, rate: f64, seed: u64) -> Result<InputPattern, BenchError> {
    let channels = (0..n as u64)
        .map(|c| poisson_train(duration, rate, &mut seeds::rng(seed, Stream::Channel, c)))
        .collect();
    Ok(InputPattern::new(channels, duration)?)
}

pub fn trial_seed(cfg: &ExperimentConfig, trial: usize) -> u64 {
    child(cfg.seed, Stream::Trial, trial as u64)
}

pub fn initial_weights(cfg: &ExperimentConfig, trial_seed: u64, neuron: u64) -> WeightVector {
    gaussian_weights(
        cfg.n_channels,
        cfg.init_mean,
        cfg.init_sd,
        &mut seeds::rng(trial_seed, Stream::Weights, neuron),
    )
}

fn encoding_pair(cfg: &ExperimentConfig, ts: u64, k: u64, duration: f64) -> Result<(InputPattern, SpikeTrain), BenchError> {
    let x = input_pattern(cfg.n_channels, duration, cfg.rate_in, child(ts, Stream::Pattern, k))?;
    let y = poisson_train(duration, cfg.rate_out, &mut seeds::rng(ts, Stream::Target, k));
    Ok((x, y))
}

enum Task {
    Encode(EncodingProblem),
    Decode(DecodingProblem),
}

/// The problem a trial faces at `load`.
fn task(cfg: &ExperimentConfig, ts: u64, load: u64) -> Result<Task, BenchError> {
    let pattern = |k: u64| input_pattern(cfg.n_channels, cfg.duration, cfg.rate_in, child(ts, Stream::Pattern, k));
    Ok(match cfg.kind {
        ExperimentKind::EncodeCapacityShort => {
            let (xs, ys) = (0..load)
                .map(|k| encoding_pair(cfg, ts, k, cfg.duration))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .unzip();
            Task::Encode(EncodingProblem::new(xs, ys)?)
        }
        ExperimentKind::EncodeCapacityLong => {
            let (x, y) = encoding_pair(cfg, ts, 0, load as f64)?;
            Task::Encode(EncodingProblem::new(vec![x], vec![y])?)
        }
        ExperimentKind::DecodeCapacity => {
            let classes = cfg.classes as u64;
            let mut xs = Vec::new();
            let mut labels = Vec::new();
            for i in 0..load {
                for c in 0..classes {
                    xs.push(pattern(i * classes + c)?);
                    labels.push(c as usize + 1);
                }
            }
            Task::Decode(DecodingProblem::new(xs, labels)?)
        }
        ExperimentKind::CAlpha => {
            let xs = (0..load).map(pattern).collect::<Result<Vec<_>, _>>()?;
            let labels = (1..=load as usize).collect();
            Task::Decode(DecodingProblem::new(xs, labels)?)
        }
        other => return Err(BenchError::Config(format!("{} is not a load sweep", other.id()))),
    })
}

/// Trains one trial at one load.
pub fn run_trial(
    cfg: &ExperimentConfig,
    params: &NeuronParams,
    method: Method,
    trial: usize,
    load: u64,
) -> Result<(TrialRecord, Timing), BenchError> {
    let start = Instant::now();
    let ts = trial_seed(cfg, trial);
    let w0 = initial_weights(cfg, ts, 0);
    let rule = method.rule(&cfg.dta, cfg.eta);
    let order = child(ts, Stream::Order, load);
    let result: TrainResult = match task(cfg, ts, load)? {
        Task::Encode(p) => train_encoding_with(&rule, &p, params, &w0, cfg.max_epochs, order)?,
        Task::Decode(p) => train_decoding_with(&rule, &p, params, &w0, cfg.max_epochs, order)?,
    };
    let record = TrialRecord {
        experiment: cfg.kind.id().into(),
        method: method.to_string(),
        trial,
        seed: ts,
        load,
        converged: result.converged,
        epochs_used: result.epochs_used,
        final_accuracy: result.final_accuracy(),
        test_accuracy: None,
        fallback_count: result.fallback_count,
        skipped_count: result.skipped_count,
    };
    let timing = Timing {
        method: method.to_string(),
        trial,
        load,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((record, timing))
}

/// All trials of one method at one load, in trial order.
pub fn run_load(
    cfg: &ExperimentConfig,
    method: Method,
    load: u64,
) -> Result<(Vec<TrialRecord>, Vec<Timing>), BenchError> {
    let params = cfg.params()?;
    let done = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &params, method, t, load))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(done.into_iter().unzip())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadStats {
    pub load: u64,
    pub converged_fraction: f64,
    pub mean_epochs: f64,
}

/// Where one method's sweep ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub method: String,
    /// Largest load that passed before the first failing one.
    pub last_converged_load: Option<u64>,
    /// First failing load; `None` when the schedule ran out first.
    pub stop_load: Option<u64>,
    /// Capacity in the experiment's own unit (ms, patterns or classes).
    pub capacity: f64,
    pub loads: Vec<LoadStats>,
}

fn passes(cfg: &ExperimentConfig, converged: usize) -> bool {
    let frac = converged as f64 / cfg.trials as f64;
    match cfg.kind {
        // the long-pattern protocol keeps a load while at least half converge
        ExperimentKind::EncodeCapacityLong => frac >= 1.0 - cfg.stop_fraction,
        _ => 1.0 - frac < cfg.stop_fraction,
    }
}

fn capacity_of(cfg: &ExperimentConfig, load: Option<u64>) -> f64 {
    let Some(l) = load else { return 0.0 };
    match cfg.kind {
        ExperimentKind::EncodeCapacityShort => l as f64 * cfg.duration,
        ExperimentKind::DecodeCapacity => (l as usize * cfg.classes) as f64,
        _ => l as f64,
    }
}

/// Runs the load schedule for every configured method (same seeds for all)
/// and stops each at its first failing load.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Outcome, BenchError> {
    let mut out = Outcome::default();
    let mut sweeps = Vec::new();
    for &method in &cfg.methods {
        let mut sweep = Sweep {
            method: method.to_string(),
            last_converged_load: None,
            stop_load: None,
            capacity: 0.0,
            loads: Vec::new(),
        };
        for load in cfg.loads() {
            let (records, timings) = run_load(cfg, method, load)?;
            let converged = records.iter().filter(|r| r.converged).count();
            let epochs: Vec<f64> = records.iter().map(|r| r.epochs_used as f64).collect();
            sweep.loads.push(LoadStats {
                load,
                converged_fraction: converged as f64 / cfg.trials as f64,
                mean_epochs: mean_sd(&epochs).0,
            });
            log::info!("{method} load {load}: {converged}/{} converged", cfg.trials);
            out.records.extend(records);
            out.timings.extend(timings);
            if passes(cfg, converged) {
                sweep.last_converged_load = Some(load);
            } else {
                sweep.stop_load = Some(load);
                break;
            }
        }
        sweep.capacity = capacity_of(cfg, sweep.last_converged_load);
        sweeps.push(sweep);
    }
    let mut summary = json!({
        "experiment": cfg.kind.id(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "max_epochs": cfg.max_epochs,
        "methods": sweeps,
    });
    if cfg.kind == ExperimentKind::CAlpha {
        summary["nu_in_tau"] = json!(cfg.rate_in * (cfg.tau_m * cfg.tau_s).sqrt());
    }
    if matches!(cfg.kind, ExperimentKind::EncodeCapacityShort | ExperimentKind::EncodeCapacityLong) {
        summary["theoretical_capacity"] =
            json!(super::theoretical_capacity(cfg.n_channels, cfg.rate_out, cfg.tau_m, cfg.tau_s));
    }
    out.summary = summary;
    Ok(out)
}

/// Every method at the single load `load`, without the stop rule.
pub fn run_fixed_load(cfg: &ExperimentConfig, load: u64) -> Result<Outcome, BenchError> {
    let mut out = Outcome::default();
    let mut per_method = serde_json::Map::new();
    for &method in &cfg.methods {
        let (records, timings) = run_load(cfg, method, load)?;
        let converged = records.iter().filter(|r| r.converged).count();
        let acc: Vec<f64> = records.iter().map(|r| r.final_accuracy).collect();
        let epochs: Vec<f64> = records.iter().map(|r| r.epochs_used as f64).collect();
        let (acc_mean, acc_sd) = mean_sd(&acc);
        per_method.insert(
            method.to_string(),
            json!({
                "converged": converged,
                "accuracy_mean": acc_mean,
                "accuracy_sd": acc_sd,
                "mean_epochs": mean_sd(&epochs).0,
            }),
        );
        out.records.extend(records);
        out.timings.extend(timings);
    }
    out.summary = json!({
        "experiment": cfg.kind.id(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "load": load,
        "methods": per_method,
    });
    Ok(out)
}
