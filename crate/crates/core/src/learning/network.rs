use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::neuron::{simulate, InputPattern, NeuronParams, WeightVector};

use super::{decoding_step, DtaConfig, LearningError, TrainResult};

/// Index of the largest count; ties go to the lowest index.
pub fn wta_predict(counts: &[usize]) -> usize {
    assert!(!counts.is_empty(), "need at least one neuron");
    counts
        .iter()
        .enumerate()
        .fold(0, |best, (k, &c)| if c > counts[best] { k } else { best })
}

/// One output neuron per class. A neuron should fire `target_spikes` times
/// for its own class and stay silent otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct WtaNetwork {
    pub neurons: Vec<WeightVector>,
    pub target_spikes: usize,
}

/// Per-neuron counts for one epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpochReport {
    pub fallback_count: Vec<usize>,
    pub skipped_count: Vec<usize>,
}

impl WtaNetwork {
    pub fn new(neurons: Vec<WeightVector>, target_spikes: usize) -> Self {
        assert!(target_spikes >= 1, "target spike count must be positive");
        Self {
            neurons,
            target_spikes,
        }
    }

    pub fn label_for(&self, neuron: usize, class: usize) -> usize {
        if neuron == class {
            self.target_spikes
        } else {
            0
        }
    }

    pub fn counts(&self, params: &NeuronParams, x: &InputPattern) -> Result<Vec<usize>, LearningError> {
        self.neurons
            .iter()
            .map(|w| Ok(simulate(params, w, x, None)?.len()))
            .collect()
    }

    pub fn predict(&self, params: &NeuronParams, x: &InputPattern) -> Result<usize, LearningError> {
        Ok(wta_predict(&self.counts(params, x)?))
    }

    /// Fraction of patterns classified correctly.
    pub fn accuracy(
        &self,
        params: &NeuronParams,
        patterns: &[InputPattern],
        classes: &[usize],
    ) -> Result<f64, LearningError> {
        if patterns.is_empty() {
            return Ok(1.0);
        }
        let mut hits = 0;
        for (x, &c) in patterns.iter().zip(classes) {
            hits += usize::from(self.predict(params, x)? == c);
        }
        Ok(hits as f64 / patterns.len() as f64)
    }

    /// Presents every pattern once in shuffled order. Every neuron whose
    /// count is wrong is updated, whatever the network's prediction.
    pub fn train_epoch<R: Rng + ?Sized>(
        &mut self,
        params: &NeuronParams,
        patterns: &[InputPattern],
        classes: &[usize],
        cfg: &DtaConfig,
        rng: &mut R,
    ) -> Result<EpochReport, LearningError> {
        let mut order: Vec<usize> = (0..patterns.len()).collect();
        order.shuffle(rng);
        let n = self.neurons.len();
        let mut report = EpochReport {
            fallback_count: vec![0; n],
            skipped_count: vec![0; n],
        };
        for p in order {
            for k in 0..n {
                let label = self.label_for(k, classes[p]);
                let r = decoding_step(params, &self.neurons[k], &patterns[p], label, cfg)?;
                report.fallback_count[k] += usize::from(r.used_fallback);
                report.skipped_count[k] += usize::from(r.search_failed);
                self.neurons[k] = r.weights;
            }
        }
        Ok(report)
    }
}

/// Trains one neuron per class until every neuron produces its label on
/// every pattern or `cfg.max_epochs` is reached. Returns the final weights
/// and one result per neuron (its accuracy is the fraction of exact counts).
#[allow(clippy::too_many_arguments)]
pub fn train_wta_network(
    patterns: &[InputPattern],
    classes: &[usize],
    n_classes: usize,
    target_spikes: usize,
    params: &NeuronParams,
    w0: Vec<WeightVector>,
    cfg: &DtaConfig,
    seed: u64,
) -> Result<(Vec<WeightVector>, Vec<TrainResult>), LearningError> {
    cfg.validate()?;
    if w0.len() != n_classes {
        return Err(LearningError::Shape(format!(
            "{} initial weight vectors for {n_classes} classes",
            w0.len()
        )));
    }
    if patterns.len() != classes.len() || classes.iter().any(|&c| c >= n_classes) {
        return Err(LearningError::Shape("class labels do not fit the patterns".into()));
    }
    let mut net = WtaNetwork::new(w0, target_spikes);
    let mut results: Vec<TrainResult> = net
        .neurons
        .iter()
        .map(|w| TrainResult {
            converged: false,
            epochs_used: 0,
            accuracy_per_epoch: Vec::new(),
            final_weights: w.clone(),
            violations_per_iteration: Vec::new(),
            fallback_count: 0,
            skipped_count: 0,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.max_epochs {
        let report = net.train_epoch(params, patterns, classes, cfg, &mut rng)?;
        let mut all_done = true;
        for (k, r) in results.iter_mut().enumerate() {
            let mut hits = 0;
            for (x, &c) in patterns.iter().zip(classes) {
                let n = simulate(params, &net.neurons[k], x, None)?.len();
                hits += usize::from(n == net.label_for(k, c));
            }
            let acc = if patterns.is_empty() {
                1.0
            } else {
                hits as f64 / patterns.len() as f64
            };
            r.epochs_used += 1;
            r.fallback_count += report.fallback_count[k];
            r.skipped_count += report.skipped_count[k];
            r.accuracy_per_epoch.push(acc);
            r.converged = acc >= 1.0;
            all_done &= r.converged;
        }
        if all_done {
            break;
        }
    }
    for (r, w) in results.iter_mut().zip(&net.neurons) {
        r.final_weights = w.clone();
    }
    Ok((net.neurons, results))
}
