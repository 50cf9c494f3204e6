//! Refit of the convergence threshold: distance between random trains and
//! jittered copies, regressed on mean displacement and duration.

use dta::datagen::poisson_train;
use dta::metrics::{vrd, VrdConfig};
use dta::neuron::SpikeTrain;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::records::{CurvePoint, Outcome};
use crate::seeds::{self, Stream};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub duration: f64,
    pub delta_t: f64,
    pub distance: f64,
}

/// `distance ≈ c₁·delta_t + c₂·duration` by least squares (no intercept).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub c1: f64,
    pub c2: f64,
    pub rms_residual: f64,
}

pub fn fit(samples: &[Sample]) -> Option<Fit> {
    let (mut sxx, mut sxy, mut syy, mut sxv, mut syv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let (x, y, v) = (s.delta_t, s.duration, s.distance);
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxv += x * v;
        syv += y * v;
    }
    let det = sxx * syy - sxy * sxy;
    if !(det.abs() > 1e-12 * (sxx * syy).max(1.0)) {
        return None;
    }
    let c1 = (sxv * syy - syv * sxy) / det;
    let c2 = (syv * sxx - sxv * sxy) / det;
    let sse: f64 = samples
        .iter()
        .map(|s| (s.distance - c1 * s.delta_t - c2 * s.duration).powi(2))
        .sum();
    Some(Fit {
        c1,
        c2,
        rms_residual: (sse / samples.len() as f64).sqrt(),
    })
}

/// A template and its jittered copy; `None` for an empty template.
fn sample(cfg: &ExperimentConfig, index: u64) -> Option<Sample> {
    let mut rng = seeds::rng(cfg.seed, Stream::Pattern, index);
    let [d0, d1] = cfg.template_durations;
    let [j0, j1] = cfg.jitter;
    let duration = if d1 > d0 { rng.random_range(d0..=d1) } else { d0 };
    let sigma = if j1 > j0 { rng.random_range(j0..=j1) } else { j0 };
    let template = poisson_train(duration, cfg.template_rate, &mut rng);
    if template.is_empty() {
        return None;
    }
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    let moved: Vec<f64> = template
        .iter()
        .map(|t| (t + noise.sample(&mut rng)).max(0.0))
        .collect();
    let delta_t = template
        .iter()
        .zip(&moved)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / template.len() as f64;
    let jittered = SpikeTrain::from_unsorted(moved).ok()?;
    Some(Sample {
        duration,
        delta_t,
        distance: vrd(&template, &jittered, VrdConfig::default()),
    })
}

pub fn run_vrd_refit(cfg: &ExperimentConfig) -> Result<Outcome, BenchError> {
    let samples: Vec<Sample> = (0..cfg.templates as u64)
        .into_par_iter()
        .filter_map(|j| sample(cfg, j))
        .collect();
    let fitted = fit(&samples).ok_or_else(|| BenchError::Config("too few samples to fit".into()))?;
    let mut out = Outcome::default();
    for (j, s) in samples.iter().enumerate() {
        for (metric, value) in [("duration", s.duration), ("delta_t", s.delta_t), ("vrd", s.distance)] {
            out.curves.push(CurvePoint {
                method: "jitter".into(),
                trial: j,
                load: s.duration.round() as u64,
                epoch: 0,
                metric,
                value,
            });
        }
    }
    out.summary = json!({
        "experiment": cfg.kind.id(),
        "seed": cfg.seed,
        "samples": samples.len(),
        "template_rate": cfg.template_rate,
        "c_delta_t": fitted.c1,
        "c_duration": fitted.c2,
        "rms_residual": fitted.rms_residual,
    });
    Ok(out)
}
