//! Reference learning rules and the two-spike toy problem.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learning::{encoding_step, match_spikes, DtaConfig, LearningError, DEFAULT_MATCH_TOL};
use crate::neuron::{
    simulate, InputPattern, KernelKind, NeuronError, NeuronParams, SpikeTrain, WeightVector,
};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("toy problem needs t_in1 < t_out1 < t_in2 < t_out2")]
    BadOrdering,
    #[error("toy problem is degenerate: the first input does not reach the first output")]
    Degenerate,
    #[error(transparent)]
    Neuron(#[from] NeuronError),
    #[error(transparent)]
    Learning(#[from] LearningError),
}

/// `η·(Σ_a κ(t^d_a − t^i) − Σ_b κ(t^o_b − t^i))` per channel.
pub fn wh_delta(
    params: &NeuronParams,
    x: &InputPattern,
    desired: &SpikeTrain,
    actual: &SpikeTrain,
    kernel: KernelKind,
    eta: f64,
) -> Vec<f64> {
    let mut dw = vec![0.0; x.n_channels()];
    for (times, sign) in [(desired, 1.0), (actual, -1.0)] {
        for t in times.iter() {
            for (d, k) in dw.iter_mut().zip(kernel.channel_sums(params, x, t)) {
                *d += sign * eta * k;
            }
        }
    }
    dw
}

/// Widrow-Hoff style update shared by PSD (PSP window), FILT and ReSuMe
/// (STDP window). Every actual spike is depressed, matched or not.
pub fn wh_step(
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    y: &SpikeTrain,
    kernel: KernelKind,
    eta: f64,
) -> Result<WeightVector, NeuronError> {
    let o = simulate(params, w, x, None)?;
    w.added(&wh_delta(params, x, y, &o, kernel, eta))
}

/// Corrects only the earliest violation: a missed desired spike gets
/// potentiation, a stray actual spike gets depression. Ties favour the
/// missed desired spike.
pub fn first_error_step(
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    y: &SpikeTrain,
    kernel: KernelKind,
    eta: f64,
) -> Result<WeightVector, NeuronError> {
    let o = simulate(params, w, x, None)?;
    let m = match_spikes(&o, y, DEFAULT_MATCH_TOL);
    let missed = m.unmatched_desired.times().first().copied();
    let stray = m.unmatched_actual.times().first().copied();
    let (t, sign) = match (missed, stray) {
        (None, None) => return Ok(w.clone()),
        (Some(d), Some(o)) if o < d => (o, -1.0),
        (Some(d), _) => (d, 1.0),
        (None, Some(o)) => (o, -1.0),
    };
    let dw: Vec<f64> = kernel
        .channel_sums(params, x, t)
        .into_iter()
        .map(|k| sign * eta * k)
        .collect();
    w.added(&dw)
}

/// Two channels with one input spike each and two desired output spikes,
/// each following its own input.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyProblem {
    pub inputs: [f64; 2],
    pub outputs: [f64; 2],
    pub duration: f64,
    pub params: NeuronParams,
}

impl ToyProblem {
    pub fn new(
        inputs: [f64; 2],
        outputs: [f64; 2],
        duration: f64,
        params: NeuronParams,
    ) -> Result<Self, BaselineError> {
        let ordered = 0.0 <= inputs[0]
            && inputs[0] < outputs[0]
            && outputs[0] < inputs[1]
            && inputs[1] < outputs[1]
            && outputs[1] <= duration;
        if !ordered {
            return Err(BaselineError::BadOrdering);
        }
        Ok(Self {
            inputs,
            outputs,
            duration,
            params: params.with_n_channels(2),
        })
    }

    /// First input at `start`; each output follows its input by `delay`, and
    /// the outputs are `spacing` apart. The window ends `tail` ms after the
    /// second output.
    pub fn with_spacing(
        spacing: f64,
        delay: f64,
        params: NeuronParams,
    ) -> Result<Self, BaselineError> {
        let (start, tail) = (5.0, 50.0);
        let t1 = start + delay;
        let t2 = t1 + spacing;
        Self::new([start, t2 - delay], [t1, t2], t2 + tail, params)
    }

    pub fn spacing(&self) -> f64 {
        self.outputs[1] - self.outputs[0]
    }

    pub fn pattern(&self) -> InputPattern {
        let channels = self
            .inputs
            .iter()
            .map(|&t| SpikeTrain::new(vec![t]).expect("valid time"))
            .collect();
        InputPattern::new(channels, self.duration).expect("ordered toy times")
    }

    pub fn desired(&self) -> SpikeTrain {
        SpikeTrain::new(self.outputs.to_vec()).expect("ordered toy times")
    }
}

/// The unique weights placing threshold crossings at both desired times,
/// from the lower-triangular system
/// `w₁λ₁₁ = ϑ`, `w₁λ₂₁ + w₂λ₂₂ = ϑ + ϑγ(t₂ − t₁)`.
pub fn toy_optimal_weights(tp: &ToyProblem) -> Result<WeightVector, BaselineError> {
    let p = &tp.params;
    let [i1, i2] = tp.inputs;
    let [o1, o2] = tp.outputs;
    let l11 = p.psp(o1 - i1);
    let l22 = p.psp(o2 - i2);
    if l11 <= 0.0 || l22 <= 0.0 {
        return Err(BaselineError::Degenerate);
    }
    let theta = p.threshold();
    let w1 = theta / l11;
    let w2 = (theta + theta * p.reset(o2 - o1) - w1 * p.psp(o2 - i1)) / l22;
    Ok(WeightVector::new(vec![w1, w2])?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToyRule {
    Psd,
    FirstError,
    Dta,
}

impl ToyRule {
    pub fn name(self) -> &'static str {
        match self {
            ToyRule::Psd => "psd",
            ToyRule::FirstError => "first-error",
            ToyRule::Dta => "dta",
        }
    }
}

/// Learning rate of the reference rules.
pub const BASELINE_ETA: f64 = 0.01;

/// Per-epoch distances `|w_k − w_k*|` while training from zero weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTrace {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

impl InterferenceTrace {
    pub fn len(&self) -> usize {
        self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w1.is_empty()
    }

    /// Both weights within `tol` of the optimum at the last epoch.
    pub fn ends_within(&self, tol: f64) -> bool {
        matches!((self.w1.last(), self.w2.last()), (Some(a), Some(b)) if *a <= tol && *b <= tol)
    }
}

/// One update per epoch on the single toy pattern, starting from zero.
pub fn interference_trace(
    tp: &ToyProblem,
    rule: ToyRule,
    epochs: usize,
    cfg: &DtaConfig,
) -> Result<InterferenceTrace, BaselineError> {
    let optimum = toy_optimal_weights(tp)?;
    let (x, y, p) = (tp.pattern(), tp.desired(), &tp.params);
    let mut w = WeightVector::zeros(2);
    let mut trace = InterferenceTrace {
        w1: Vec::with_capacity(epochs),
        w2: Vec::with_capacity(epochs),
    };
    for _ in 0..epochs {
        w = match rule {
            ToyRule::Psd => wh_step(p, &w, &x, &y, KernelKind::Psp, BASELINE_ETA)?,
            ToyRule::FirstError => first_error_step(p, &w, &x, &y, KernelKind::Psp, BASELINE_ETA)?,
            ToyRule::Dta => encoding_step(p, &w, &x, &y, cfg)?.weights,
        };
        trace.w1.push((w[0] - optimum[0]).abs());
        trace.w2.push((w[1] - optimum[1]).abs());
    }
    Ok(trace)
}
