//! The experiment drivers. Each returns an [`Outcome`](crate::Outcome).

pub mod capacity;
pub mod interference;
pub mod iris;
pub mod vrd_refit;

pub use capacity::{run_fixed_load, run_sweep};
pub use interference::run_interference_map;
pub use iris::run_iris;
pub use vrd_refit::run_vrd_refit;

use crate::{BenchError, ExperimentConfig, ExperimentKind, Outcome};

/// Estimated longest input (ms) a neuron with `n` inputs can learn to map
/// onto random output trains of rate `nu_out`. Infinite when the rate is too
/// small for the estimate to be finite.
pub fn theoretical_capacity(n: usize, nu_out: f64, tau_m: f64, tau_s: f64) -> f64 {
    let tau = (tau_m * tau_s).sqrt();
    let a = nu_out * tau / (1.0 + nu_out * tau);
    let denom = -2.0 * a * a.ln();
    if !(denom > 1e-12) {
        return f64::INFINITY;
    }
    n as f64 * tau / denom
}

/// Runs whatever `cfg.kind` names.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, BenchError> {
    match cfg.kind {
        ExperimentKind::EncodeCapacityShort
        | ExperimentKind::EncodeCapacityLong
        | ExperimentKind::DecodeCapacity
        | ExperimentKind::CAlpha => run_sweep(cfg),
        ExperimentKind::InterferenceMap => run_interference_map(cfg),
        ExperimentKind::Iris => run_iris(cfg),
        ExperimentKind::VrdRefit => run_vrd_refit(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_estimate() {
        // independent evaluation: τ = 10, a = 0.05/1.05
        let a: f64 = 0.05 / 1.05;
        let expected = 500.0 * 10.0 / (-2.0 * a * a.ln());
        let got = theoretical_capacity(500, 0.005, 20.0, 5.0);
        assert!((got - expected).abs() < 1e-9);
        assert!((17100.0..=17400.0).contains(&got), "{got}");
        assert!((got - 17244.0).abs() < 1.0);
        let doubled = theoretical_capacity(1000, 0.005, 20.0, 5.0);
        assert!((doubled - 2.0 * got).abs() < 1e-9);
        assert_eq!(theoretical_capacity(500, 0.0, 20.0, 5.0), f64::INFINITY);
        assert_eq!(theoretical_capacity(500, 1e-300, 20.0, 5.0), f64::INFINITY);
    }
}
