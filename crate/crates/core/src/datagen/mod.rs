//! Input generation: Poisson patterns, receptive-field and latency encoders,
//! the bundled Iris table and stratified splits.

mod iris;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use thiserror::Error;

use crate::neuron::{InputPattern, NeuronError, SpikeTrain, WeightVector};

pub use iris::{bundled_iris, load_iris, load_iris_from_reader, Dataset};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("feature {index} is not finite")]
    NonFiniteFeature { index: usize },
    #[error("activation {index} = {value} outside [0, 1]")]
    ActivationOutOfRange { index: usize, value: f64 },
    #[error("expected {expected} features, got {actual}")]
    FeatureCount { expected: usize, actual: usize },
    #[error("invalid encoder settings: {0}")]
    InvalidSpec(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Neuron(#[from] NeuronError),
}

/// Homogeneous Poisson train on `[0, duration]` with `rate` spikes per ms.
pub fn poisson_train<R: Rng + ?Sized>(duration: f64, rate: f64, rng: &mut R) -> SpikeTrain {
    if rate <= 0.0 {
        return SpikeTrain::empty();
    }
    let gaps = Exp::new(rate).expect("positive rate");
    let mut times = Vec::new();
    let mut t = 0.0;
    loop {
        t += gaps.sample(rng);
        if t > duration {
            break;
        }
        if times.last().is_none_or(|&last| t > last) {
            times.push(t);
        }
    }
    SpikeTrain::new(times).expect("increasing by construction")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonSpec {
    pub n_channels: usize,
    pub duration: f64,
    pub rate: f64,
    pub seed: u64,
}

/// `n_channels` independent trains drawn from one stream seeded by `spec.seed`.
pub fn poisson_pattern(spec: &PoissonSpec) -> Result<InputPattern, NeuronError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    poisson_pattern_with(spec.n_channels, spec.duration, spec.rate, &mut rng)
}

pub fn poisson_pattern_with<R: Rng + ?Sized>(
    n_channels: usize,
    duration: f64,
    rate: f64,
    rng: &mut R,
) -> Result<InputPattern, NeuronError> {
    let channels = (0..n_channels)
        .map(|_| poisson_train(duration, rate, rng))
        .collect();
    InputPattern::new(channels, duration)
}

/// Gaussian weights, e.g. `gaussian_weights(n, 0.01, 0.01, rng)`.
pub fn gaussian_weights<R: Rng + ?Sized>(n: usize, mean: f64, sd: f64, rng: &mut R) -> WeightVector {
    let dist = Normal::new(mean, sd).expect("finite mean and non-negative sd");
    WeightVector::new((0..n).map(|_| dist.sample(rng)).collect()).expect("finite samples")
}

/// Gaussian receptive-field encoder: every feature drives `fields_per_feature`
/// channels, each firing once at `T − G·T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub fields_per_feature: usize,
    pub beta: f64,
    pub window: f64,
    /// Per-feature `(min, max)`.
    pub ranges: Vec<(f64, f64)>,
}

impl PopulationSpec {
    /// Ranges taken from `rows`, with `M = 10`, `β = 1.5`, `T = 10`.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self, DataError> {
        let n = rows.first().map_or(0, Vec::len);
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
        for row in rows {
            if row.len() != n {
                return Err(DataError::FeatureCount {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (r, &v) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        let spec = Self {
            fields_per_feature: 10,
            beta: 1.5,
            window: 10.0,
            ranges,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.fields_per_feature < 3 {
            return Err(DataError::InvalidSpec("need at least 3 fields per feature".into()));
        }
        if !(1.0..=2.0).contains(&self.beta) {
            return Err(DataError::InvalidSpec(format!("beta {} outside [1, 2]", self.beta)));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(DataError::InvalidSpec(format!("window {}", self.window)));
        }
        if let Some(j) = self.ranges.iter().position(|&(lo, hi)| !(hi > lo)) {
            return Err(DataError::InvalidSpec(format!("feature {j} has an empty range")));
        }
        Ok(())
    }

    pub fn n_channels(&self) -> usize {
        self.fields_per_feature * self.ranges.len()
    }

    /// Centre of field `j` (1-based) and the shared width for feature `f`.
    pub fn field(&self, f: usize, j: usize) -> (f64, f64) {
        let (lo, hi) = self.ranges[f];
        let step = (hi - lo) / (self.fields_per_feature - 2) as f64;
        let mu = lo + (2.0 * j as f64 - 3.0) / 2.0 * step;
        (mu, step / self.beta)
    }
}

/// Encodes one sample; channel `f·M + (j−1)` belongs to field `j` of feature `f`.
pub fn population_encode(features: &[f64], spec: &PopulationSpec) -> Result<InputPattern, DataError> {
    if features.len() != spec.ranges.len() {
        return Err(DataError::FeatureCount {
            expected: spec.ranges.len(),
            actual: features.len(),
        });
    }
    if let Some(index) = features.iter().position(|v| !v.is_finite()) {
        return Err(DataError::NonFiniteFeature { index });
    }
    let t = spec.window;
    let mut channels = Vec::with_capacity(spec.n_channels());
    for (f, &v) in features.iter().enumerate() {
        for j in 1..=spec.fields_per_feature {
            let (mu, sigma) = spec.field(f, j);
            let g = (-(v - mu).powi(2) / (2.0 * sigma * sigma)).exp();
            let time = (t - g * t).clamp(0.0, t);
            channels.push(SpikeTrain::new(vec![time])?);
        }
    }
    Ok(InputPattern::new(channels, t)?)
}

/// Linear latency code `T − T·A`; zero activations stay silent.
pub fn latency_encode(activations: &[f64], duration: f64) -> Result<Vec<Option<f64>>, DataError> {
    activations
        .iter()
        .enumerate()
        .map(|(index, &a)| {
            if !(0.0..=1.0).contains(&a) {
                return Err(DataError::ActivationOutOfRange { index, value: a });
            }
            Ok((a > 0.0).then(|| duration - duration * a))
        })
        .collect()
}

/// Turns a latency code into a pattern with one channel per activation.
pub fn latency_pattern(activations: &[f64], duration: f64) -> Result<InputPattern, DataError> {
    let channels = latency_encode(activations, duration)?
        .into_iter()
        .map(|t| SpikeTrain::new(t.into_iter().collect()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InputPattern::new(channels, duration)?)
}

/// Index partition of a labelled dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified split: each class contributes `round(fraction·size)` shuffled
/// members to `train`. Both index lists come back sorted.
pub fn split<R: Rng + ?Sized>(labels: &[usize], fraction: f64, rng: &mut R) -> Split {
    assert!(fraction > 0.0 && fraction < 1.0, "fraction must lie in (0, 1)");
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rand::seq::SliceRandom::shuffle(members.as_mut_slice(), rng);
        let k = (fraction * members.len() as f64).round() as usize;
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Split { train, test }
}
