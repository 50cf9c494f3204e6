//! Weight learning by linear constraint satisfaction.
//!
//! Each iteration simulates the neuron, pairs actual with desired spikes, and
//! solves a small linear program for one learning rate per spike time so that
//! the reset-free potential meets the moving threshold exactly at every
//! desired time and stays below it at every stray output spike. Count-based
//! targets are turned into timed targets by searching for the threshold that
//! yields one spike more or fewer.

mod decoding;
mod encoding;
mod matching;
mod network;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines;
use crate::linsolve::LpError;
use crate::neuron::{InputPattern, KernelKind, NeuronError, NeuronParams, SpikeTrain, WeightVector};

pub use decoding::{
    decoding_step, decoding_step_with, find_theta_star, theta_scan, train_decoding,
    train_decoding_with, DecodeReport, Direction, SCAN_POINTS,
};
pub use encoding::{
    build_encoding_lp, encoding_step, train_encoding, train_encoding_with, EncodingLp, StepReport,
};
pub use matching::{match_spikes, Matching};
pub use network::{train_wta_network, wta_predict, EpochReport, WtaNetwork};

/// Spikes closer than this (ms) count as the same spike.
pub const DEFAULT_MATCH_TOL: f64 = 1.0;
/// Default gap below the threshold at stray spikes, as a fraction of ϑ.
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Error)]
pub enum LearningError {
    #[error(transparent)]
    Neuron(#[from] NeuronError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed problem: {0}")]
    Shape(String),
    #[error("no threshold in [{lo}, {hi}] produced {target} spikes")]
    ThetaSearchFailed { lo: f64, hi: f64, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Any feasible point.
    Feasibility,
    /// Smallest total `Σ|η|`.
    MinAbsEta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtaConfig {
    pub kernel: KernelKind,
    pub lb_d: f64,
    pub ub_d: f64,
    pub lb_o: f64,
    pub ub_o: f64,
    /// Learning rate applied at every constraint time when the program is
    /// infeasible.
    pub fallback_eta: f64,
    /// Gap kept below the threshold at stray spikes; `None` means `0.05·ϑ`.
    pub ineq_margin: Option<f64>,
    pub match_tol: f64,
    #[serde(skip)]
    pub max_epochs: usize,
    pub objective: ObjectiveMode,
}

impl Default for DtaConfig {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Psp,
            lb_d: 1e-4,
            ub_d: 1.0,
            lb_o: -1.0,
            ub_o: -1e-4,
            fallback_eta: 1e-3,
            ineq_margin: None,
            match_tol: DEFAULT_MATCH_TOL,
            max_epochs: 500,
            objective: ObjectiveMode::MinAbsEta,
        }
    }
}

impl DtaConfig {
    pub fn with_kernel(kernel: KernelKind) -> Self {
        Self {
            kernel,
            ..Self::default()
        }
    }

    pub fn margin(&self, params: &NeuronParams) -> f64 {
        self.ineq_margin.unwrap_or(DEFAULT_MARGIN * params.threshold())
    }

    pub fn validate(&self) -> Result<(), LearningError> {
        let bad = |m: &str| Err(LearningError::InvalidConfig(m.into()));
        if !(self.lb_d > 0.0 && self.lb_d <= self.ub_d) {
            return bad("need 0 < lb_d ≤ ub_d");
        }
        if !(self.ub_o < 0.0 && self.lb_o <= self.ub_o) {
            return bad("need lb_o ≤ ub_o < 0");
        }
        if !(self.fallback_eta > 0.0) {
            return bad("fallback_eta must be positive");
        }
        if self.ineq_margin.is_some_and(|m| !(m > 0.0)) {
            return bad("ineq_margin must be positive");
        }
        if !(self.match_tol > 0.0) {
            return bad("match_tol must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        Ok(())
    }
}

/// How a single presentation turns (pattern, target train) into new weights.
#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRule {
    Dta(DtaConfig),
    /// Shared Widrow-Hoff form: LTP at every desired time, LTD at every
    /// actual spike.
    WidrowHoff { kernel: KernelKind, eta: f64 },
    /// Only the earliest violation is corrected.
    FirstError { kernel: KernelKind, eta: f64 },
}

impl UpdateRule {
    pub fn match_tol(&self) -> f64 {
        match self {
            UpdateRule::Dta(cfg) => cfg.match_tol,
            _ => DEFAULT_MATCH_TOL,
        }
    }

    pub fn name(&self) -> String {
        match self {
            UpdateRule::Dta(cfg) => format!("dta-{}", cfg.kernel.name()),
            UpdateRule::WidrowHoff { kernel, .. } => match kernel {
                KernelKind::Psp => "psd".into(),
                KernelKind::Filt => "filt".into(),
                KernelKind::Stdp => "resume".into(),
            },
            UpdateRule::FirstError { kernel, .. } => format!("first-error-{}", kernel.name()),
        }
    }

    fn validate(&self) -> Result<(), LearningError> {
        match self {
            UpdateRule::Dta(cfg) => DtaConfig {
                max_epochs: 1,
                ..cfg.clone()
            }
            .validate(),
            UpdateRule::WidrowHoff { eta, .. } | UpdateRule::FirstError { eta, .. } => {
                if *eta > 0.0 {
                    Ok(())
                } else {
                    Err(LearningError::InvalidConfig("learning rate must be positive".into()))
                }
            }
        }
    }

    /// One presentation against the timed target `y`.
    pub fn apply(
        &self,
        params: &NeuronParams,
        w: &WeightVector,
        x: &InputPattern,
        y: &SpikeTrain,
    ) -> Result<StepReport, LearningError> {
        match self {
            UpdateRule::Dta(cfg) => encoding_step(params, w, x, y, cfg),
            UpdateRule::WidrowHoff { kernel, eta } => {
                let new = baselines::wh_step(params, w, x, y, *kernel, *eta)?;
                Ok(StepReport::updated(new, false))
            }
            UpdateRule::FirstError { kernel, eta } => {
                let new = baselines::first_error_step(params, w, x, y, *kernel, *eta)?;
                let updated = new != *w;
                Ok(StepReport {
                    weights: new,
                    used_fallback: false,
                    updated,
                })
            }
        }
    }
}

/// Patterns with timed targets.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingProblem {
    pub patterns: Vec<InputPattern>,
    pub desired: Vec<SpikeTrain>,
}

impl EncodingProblem {
    pub fn new(patterns: Vec<InputPattern>, desired: Vec<SpikeTrain>) -> Result<Self, LearningError> {
        if patterns.len() != desired.len() {
            return Err(LearningError::Shape(format!(
                "{} patterns but {} targets",
                patterns.len(),
                desired.len()
            )));
        }
        for (x, y) in patterns.iter().zip(&desired) {
            if let Some(&t) = y.times().last() {
                if t > x.duration() {
                    return Err(NeuronError::SpikeOutsideWindow {
                        time: t,
                        duration: x.duration(),
                    }
                    .into());
                }
            }
        }
        Ok(Self { patterns, desired })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Patterns with spike-count targets.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingProblem {
    pub patterns: Vec<InputPattern>,
    pub labels: Vec<usize>,
}

impl DecodingProblem {
    pub fn new(patterns: Vec<InputPattern>, labels: Vec<usize>) -> Result<Self, LearningError> {
        if patterns.len() != labels.len() {
            return Err(LearningError::Shape(format!(
                "{} patterns but {} labels",
                patterns.len(),
                labels.len()
            )));
        }
        Ok(Self { patterns, labels })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainResult {
    pub converged: bool,
    pub epochs_used: usize,
    pub accuracy_per_epoch: Vec<f64>,
    pub final_weights: WeightVector,
    /// Stray output spikes left right after each update.
    pub violations_per_iteration: Vec<usize>,
    pub fallback_count: usize,
    /// Iterations dropped because no threshold gave the wanted count.
    pub skipped_count: usize,
}

impl TrainResult {
    pub fn final_accuracy(&self) -> f64 {
        self.accuracy_per_epoch.last().copied().unwrap_or(0.0)
    }
}

/// Outcome of one presentation, as seen by the epoch loop.
pub(crate) struct Presentation {
    weights: WeightVector,
    used_fallback: bool,
    skipped: bool,
    violations: Option<usize>,
}

/// Shared epoch loop: shuffled presentation order from `seed`, accuracy after
/// every epoch, stop at full accuracy.
pub(crate) fn run_epochs(
    n_patterns: usize,
    w0: &WeightVector,
    max_epochs: usize,
    seed: u64,
    mut present: impl FnMut(&WeightVector, usize) -> Result<Presentation, LearningError>,
    mut accuracy: impl FnMut(&WeightVector) -> Result<f64, LearningError>,
) -> Result<TrainResult, LearningError> {
    if max_epochs == 0 {
        return Err(LearningError::InvalidConfig("max_epochs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_patterns).collect();
    let mut w = w0.clone();
    let mut result = TrainResult {
        converged: false,
        epochs_used: 0,
        accuracy_per_epoch: Vec::new(),
        final_weights: w0.clone(),
        violations_per_iteration: Vec::new(),
        fallback_count: 0,
        skipped_count: 0,
    };
    for _ in 0..max_epochs {
        order.shuffle(&mut rng);
        for &p in &order {
            let step = present(&w, p)?;
            w = step.weights;
            result.fallback_count += usize::from(step.used_fallback);
            result.skipped_count += usize::from(step.skipped);
            if let Some(v) = step.violations {
                result.violations_per_iteration.push(v);
            }
        }
        result.epochs_used += 1;
        let acc = accuracy(&w)?;
        result.accuracy_per_epoch.push(acc);
        if acc >= 1.0 {
            result.converged = true;
            break;
        }
    }
    result.final_weights = w;
    Ok(result)
}
