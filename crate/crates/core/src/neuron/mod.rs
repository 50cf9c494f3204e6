//! Spike response model neuron.
//!
//! Spike trains and input patterns, the neuron constants, the three kernels
//! (post-synaptic potential, reset, learning window), the reset-free membrane
//! potential with its moving threshold, and a grid-bracketed simulator that
//! refines every output spike on the analytic potential.

mod kernel;
mod sim;

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kernel::{dynamic_theta, dynamic_theta_left, membrane_v0, KernelKind};
pub use sim::{simulate, simulate_trace, Trace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeuronError {
    #[error("spike times must be finite, non-negative and strictly increasing (index {index})")]
    InvalidSpikeTrain { index: usize },
    #[error("spike at {time} ms lies outside the pattern window [0, {duration}]")]
    SpikeOutsideWindow { time: f64, duration: f64 },
    #[error("pattern duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("channel count mismatch: expected {expected}, got {actual}")]
    ChannelMismatch { expected: usize, actual: usize },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("invalid neuron parameters: {0}")]
    InvalidParams(String),
    #[error("membrane potential diverged at t = {time} ms")]
    SimulationDiverged { time: f64 },
}

/// Strictly increasing spike timestamps in milliseconds.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct SpikeTrain(Vec<f64>);

impl SpikeTrain {
    pub fn new(times: Vec<f64>) -> Result<Self, NeuronError> {
        for (index, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 || (index > 0 && t <= times[index - 1]) {
                return Err(NeuronError::InvalidSpikeTrain { index });
            }
        }
        Ok(Self(times))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Sorts the times and drops exact duplicates before validating.
    pub fn from_unsorted(mut times: Vec<f64>) -> Result<Self, NeuronError> {
        if let Some(index) = times.iter().position(|t| !t.is_finite()) {
            return Err(NeuronError::InvalidSpikeTrain { index });
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        Self::new(times)
    }

    pub(crate) fn from_sorted_unchecked(times: Vec<f64>) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl<'a> IntoIterator for &'a SpikeTrain {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// One spike train per input channel over a window of `duration` ms.
///
/// A time-sorted list of `(time, channel)` events is built once at
/// construction so simulation can sweep the pattern in a single pass.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPattern {
    channels: Vec<SpikeTrain>,
    duration: f64,
    events: Vec<(f64, usize)>,
}

impl InputPattern {
    pub fn new(channels: Vec<SpikeTrain>, duration: f64) -> Result<Self, NeuronError> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(NeuronError::InvalidDuration(duration));
        }
        let mut events = Vec::with_capacity(channels.iter().map(SpikeTrain::len).sum());
        for (c, train) in channels.iter().enumerate() {
            for t in train.iter() {
                if t > duration {
                    return Err(NeuronError::SpikeOutsideWindow { time: t, duration });
                }
                events.push((t, c));
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(Self {
            channels,
            duration,
            events,
        })
    }

    pub fn channels(&self) -> &[SpikeTrain] {
        &self.channels
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// All input spikes as `(time, channel)`, sorted by time.
    pub fn events(&self) -> &[(f64, usize)] {
        &self.events
    }

    pub fn spike_count(&self) -> usize {
        self.events.len()
    }
}

/// Constants of the neuron. `v_norm` is derived from the time constants and
/// kept in sync by the setters.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronParams {
    n_channels: usize,
    threshold: f64,
    tau_m: f64,
    tau_s: f64,
    v_norm: f64,
    dt: f64,
    fire_tol: f64,
    refine_tol: f64,
}

pub const DEFAULT_THRESHOLD: f64 = 1.0;
pub const DEFAULT_TAU_M: f64 = 20.0;
pub const DEFAULT_TAU_S: f64 = 5.0;
pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_REFINE_TOL: f64 = 1e-4;
/// Crossing tolerance relative to the threshold.
pub const FIRE_TOL_REL: f64 = 1e-9;

impl NeuronParams {
    /// Default constants: ϑ = 1, τ_m = 20 ms, τ_s = 5 ms, dt = 0.1 ms.
    pub fn new(n_channels: usize) -> Self {
        Self {
            n_channels,
            threshold: DEFAULT_THRESHOLD,
            tau_m: DEFAULT_TAU_M,
            tau_s: DEFAULT_TAU_S,
            v_norm: v_norm(DEFAULT_TAU_M, DEFAULT_TAU_S),
            dt: DEFAULT_DT,
            fire_tol: FIRE_TOL_REL * DEFAULT_THRESHOLD,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }

    /// Sets ϑ and resets the crossing tolerance to `1e-9·ϑ`.
    pub fn with_threshold(mut self, threshold: f64) -> Result<Self, NeuronError> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(NeuronError::InvalidParams(format!(
                "threshold must be positive, got {threshold}"
            )));
        }
        self.threshold = threshold;
        self.fire_tol = FIRE_TOL_REL * threshold;
        Ok(self)
    }

    pub fn with_time_constants(mut self, tau_m: f64, tau_s: f64) -> Result<Self, NeuronError> {
        if !(tau_s.is_finite() && tau_m.is_finite() && tau_s > 0.0 && tau_m > tau_s) {
            return Err(NeuronError::InvalidParams(format!(
                "need tau_m > tau_s > 0, got tau_m = {tau_m}, tau_s = {tau_s}"
            )));
        }
        self.tau_m = tau_m;
        self.tau_s = tau_s;
        self.v_norm = v_norm(tau_m, tau_s);
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self, NeuronError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(NeuronError::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn with_tolerances(mut self, fire_tol: f64, refine_tol: f64) -> Result<Self, NeuronError> {
        if !(fire_tol.is_finite() && fire_tol >= 0.0) {
            return Err(NeuronError::InvalidParams(format!(
                "fire_tol must be non-negative, got {fire_tol}"
            )));
        }
        if !(refine_tol.is_finite() && refine_tol > 0.0) {
            return Err(NeuronError::InvalidParams(format!(
                "refine_tol must be positive, got {refine_tol}"
            )));
        }
        self.fire_tol = fire_tol;
        self.refine_tol = refine_tol;
        Ok(self)
    }

    pub fn with_n_channels(mut self, n_channels: usize) -> Self {
        self.n_channels = n_channels;
        self
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
    pub fn tau_m(&self) -> f64 {
        self.tau_m
    }
    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }
    pub fn v_norm(&self) -> f64 {
        self.v_norm
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn fire_tol(&self) -> f64 {
        self.fire_tol
    }
    pub fn refine_tol(&self) -> f64 {
        self.refine_tol
    }

    /// Time of the PSP peak, `τ_mτ_s/(τ_m−τ_s)·ln(τ_m/τ_s)`.
    pub fn psp_peak_time(&self) -> f64 {
        self.tau_m * self.tau_s / (self.tau_m - self.tau_s) * (self.tau_m / self.tau_s).ln()
    }

    /// PSP correlation time `√(τ_mτ_s)`.
    pub fn correlation_time(&self) -> f64 {
        (self.tau_m * self.tau_s).sqrt()
    }

    /// Post-synaptic potential kernel λ(t), peak value 1.
    pub fn psp(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.v_norm * ((-t / self.tau_m).exp() - (-t / self.tau_s).exp())
    }

    /// Reset kernel γ(t).
    pub fn reset(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        (-t / self.tau_m).exp()
    }
}

fn v_norm(tau_m: f64, tau_s: f64) -> f64 {
    let xi = tau_m / tau_s;
    xi.powf(xi / (xi - 1.0)) / (xi - 1.0)
}

/// Synaptic efficacies, one per input channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, NeuronError> {
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(NeuronError::NonFiniteWeight { index });
        }
        Ok(Self(weights))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `self + delta`, rejecting non-finite results.
    pub fn added(&self, delta: &[f64]) -> Result<Self, NeuronError> {
        if delta.len() != self.0.len() {
            return Err(NeuronError::ChannelMismatch {
                expected: self.0.len(),
                actual: delta.len(),
            });
        }
        Self::new(self.0.iter().zip(delta).map(|(w, d)| w + d).collect())
    }
}

impl Deref for WeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        WeightVector::new(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_train_rejects_unordered_and_negative() {
        assert!(SpikeTrain::new(vec![1.0, 2.0, 3.0]).is_ok());
        assert_eq!(
            SpikeTrain::new(vec![1.0, 1.0]),
            Err(NeuronError::InvalidSpikeTrain { index: 1 })
        );
        assert!(SpikeTrain::new(vec![-0.5]).is_err());
        assert!(SpikeTrain::new(vec![f64::NAN]).is_err());
        let t = SpikeTrain::from_unsorted(vec![3.0, 1.0, 3.0]).unwrap();
        assert_eq!(t.times(), &[1.0, 3.0]);
    }

    #[test]
    fn pattern_checks_window_and_sorts_events() {
        let a = SpikeTrain::new(vec![1.0, 5.0]).unwrap();
        let b = SpikeTrain::new(vec![2.0]).unwrap();
        let x = InputPattern::new(vec![a.clone(), b], 10.0).unwrap();
        assert_eq!(x.events(), &[(1.0, 0), (2.0, 1), (5.0, 0)]);
        assert!(matches!(
            InputPattern::new(vec![a], 4.0),
            Err(NeuronError::SpikeOutsideWindow { .. })
        ));
        assert!(InputPattern::new(vec![], 0.0).is_err());
    }

    #[test]
    fn v_norm_matches_closed_form() {
        let p = NeuronParams::new(1);
        // ξ = 4: 4^(4/3) / 3
        assert!((p.v_norm() - 2.116_534_735_957_9).abs() < 1e-12);
        let q = p.with_time_constants(10.0, 2.5).unwrap();
        assert!((q.v_norm() - 2.116_534_735_957_9).abs() < 1e-12);
        let r = q.with_time_constants(30.0, 5.0).unwrap();
        assert!((r.psp(r.psp_peak_time()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        let p = NeuronParams::new(3);
        assert!(p.clone().with_time_constants(5.0, 5.0).is_err());
        assert!(p.clone().with_time_constants(5.0, 0.0).is_err());
        assert!(p.clone().with_threshold(0.0).is_err());
        assert!(p.clone().with_dt(-1.0).is_err());
        assert!(p.clone().with_tolerances(0.0, 0.0).is_err());
        let q = p.with_threshold(2.0).unwrap();
        assert!((q.fire_tol() - 2e-9).abs() < 1e-20);
    }

    #[test]
    fn weights_reject_non_finite() {
        assert!(WeightVector::new(vec![1.0, f64::INFINITY]).is_err());
        let w = WeightVector::zeros(2).added(&[0.5, -1.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.5, -1.0]);
        assert!(w.added(&[1.0]).is_err());
    }
}
