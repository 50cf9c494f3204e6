//! Spike-train distances and task accuracies.

use serde::{Deserialize, Serialize};

use crate::neuron::SpikeTrain;

/// Van Rossum filter time constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VrdConfig {
    pub tau_q: f64,
}

impl Default for VrdConfig {
    fn default() -> Self {
        Self { tau_q: 100.0 }
    }
}

/// `Σ_{s∈a} Σ_{t∈b} (τ/2) e^{−|s−t|/τ}`
fn cross(a: &[f64], b: &[f64], tau: f64) -> f64 {
    a.iter()
        .flat_map(|s| b.iter().map(move |t| (-(s - t).abs() / tau).exp()))
        .sum::<f64>()
        * (tau / 2.0)
}

/// Van Rossum distance with causal exponential filter, in closed form.
///
/// `vrd² = (1/τ_q)·∫(f_a − f_b)² dt` with `f = Σ e^{−(t−t_k)/τ_q}Θ(t−t_k)`.
pub fn vrd(a: &SpikeTrain, b: &SpikeTrain, cfg: VrdConfig) -> f64 {
    let (a, b, tau) = (a.times(), b.times(), cfg.tau_q);
    let sq = (cross(a, a, tau) + cross(b, b, tau) - 2.0 * cross(a, b, tau)) / tau;
    sq.max(0.0).sqrt()
}

/// Convergence threshold `0.08·Δt + 0.0001·T`.
pub fn vrd_star(duration: f64, delta_t: f64) -> f64 {
    // Integer-scaled so that (1000, 1) gives exactly 0.18.
    (8.0 * delta_t + 0.01 * duration) / 100.0
}

/// Fraction of responses whose distance to the desired train is below
/// `vrd_star(T, 1)`. An empty set counts as fully accurate.
pub fn encoding_accuracy(
    responses: &[SpikeTrain],
    desired: &[SpikeTrain],
    durations: &[f64],
    cfg: VrdConfig,
) -> f64 {
    assert_eq!(responses.len(), desired.len());
    assert_eq!(responses.len(), durations.len());
    if responses.is_empty() {
        return 1.0;
    }
    let hits = responses
        .iter()
        .zip(desired)
        .zip(durations)
        .filter(|((o, y), &t)| vrd(o, y, cfg) < vrd_star(t, 1.0))
        .count();
    hits as f64 / responses.len() as f64
}

/// Fraction of exact spike-count matches.
pub fn decoding_accuracy(counts: &[usize], labels: &[usize]) -> f64 {
    assert_eq!(counts.len(), labels.len());
    if counts.is_empty() {
        return 1.0;
    }
    let hits = counts.iter().zip(labels).filter(|(c, l)| c == l).count();
    hits as f64 / counts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn train(t: &[f64]) -> SpikeTrain {
        SpikeTrain::new(t.to_vec()).unwrap()
    }

    /// Composite Simpson integration of the filtered difference, piecewise
    /// between spike times so the kernel discontinuities sit on knots.
    pub(crate) fn vrd_quadrature(a: &[f64], b: &[f64], tau: f64, step: f64) -> f64 {
        let f = |t: f64, s: &[f64]| -> f64 {
            s.iter().filter(|&&k| k <= t).map(|k| (-(t - k) / tau).exp()).sum()
        };
        let g = |t: f64| (f(t, a) - f(t, b)).powi(2);
        let mut knots: Vec<f64> = a.iter().chain(b).copied().collect();
        if knots.is_empty() {
            return 0.0;
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        knots.push(knots.last().unwrap() + 40.0 * tau);
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let n = (((hi - lo) / step).ceil() as usize).max(1) * 2;
            let h = (hi - lo) / n as f64;
            // nudge inside the segment so the right-continuous kernels see
            // the spike at `lo` but not the one at `hi`
            let eval = |k: usize| {
                let t = lo + k as f64 * h;
                let t = if k == 0 { t + 1e-12 * tau } else if k == n { t - 1e-12 * tau } else { t };
                g(t)
            };
            let mut s = eval(0) + eval(n);
            for k in 1..n {
                s += if k % 2 == 1 { 4.0 } else { 2.0 } * eval(k);
            }
            total += s * h / 3.0;
        }
        (total / tau).sqrt()
    }

    #[test]
    fn reference_values() {
        let cfg = VrdConfig::default();
        assert_eq!(vrd(&train(&[3.0, 7.0]), &train(&[3.0, 7.0]), cfg), 0.0);
        assert!((vrd(&train(&[0.0]), &SpikeTrain::empty(), cfg) - 0.5f64.sqrt()).abs() < 1e-15);
        let d = vrd(&train(&[0.0]), &train(&[100.0]), cfg);
        assert!((d - (1.0 - (-1f64).exp()).sqrt()).abs() < 1e-15);
        assert!((d - 0.795060).abs() < 1e-6);
        let q = vrd_quadrature(&[0.0], &[100.0], 100.0, 0.1);
        assert!((q - d).abs() / d < 1e-6);
    }

    #[test]
    fn vrd_star_values() {
        assert_eq!(vrd_star(1000.0, 1.0), 0.18);
        assert!((vrd_star(400.0, 1.0) - 0.12).abs() < 1e-15);
    }

    #[test]
    fn accuracies() {
        let cfg = VrdConfig::default();
        let y = vec![train(&[10.0, 20.0]), train(&[5.0])];
        assert_eq!(encoding_accuracy(&y, &y, &[100.0, 100.0], cfg), 1.0);
        assert_eq!(encoding_accuracy(&[], &[], &[], cfg), 1.0);
        let many = train(&(1..=20).map(|k| k as f64 * 10.0).collect::<Vec<_>>());
        assert_eq!(
            encoding_accuracy(&[SpikeTrain::empty()], &[many], &[200.0], cfg),
            0.0
        );
        assert_eq!(decoding_accuracy(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(decoding_accuracy(&[1, 2], &[0, 0]), 0.0);
        assert!((decoding_accuracy(&[2, 5, 5], &[2, 5, 4]) - 2.0 / 3.0).abs() < 1e-15);
    }

    fn arb_train() -> impl Strategy<Value = SpikeTrain> {
        prop::collection::vec(0.0f64..300.0, 0..6)
            .prop_map(|v| SpikeTrain::from_unsorted(v).unwrap())
    }

    proptest! {
        #[test]
        fn symmetric_and_nonnegative(a in arb_train(), b in arb_train()) {
            let cfg = VrdConfig::default();
            let d = vrd(&a, &b, cfg);
            prop_assert!(d >= 0.0);
            prop_assert!((d - vrd(&b, &a, cfg)).abs() <= 1e-9);
            prop_assert!(vrd(&a, &a, cfg) <= 1e-9);
        }

        #[test]
        fn distinct_trains_have_positive_distance(a in arb_train(), b in arb_train()) {
            prop_assume!(a != b);
            prop_assert!(vrd(&a, &b, VrdConfig::default()) > 1e-9);
        }

        #[test]
        fn shift_invariant(a in arb_train(), b in arb_train(), c in 0.0f64..500.0) {
            let cfg = VrdConfig::default();
            let shift = |s: &SpikeTrain| SpikeTrain::new(s.iter().map(|t| t + c).collect()).unwrap();
            let d = vrd(&a, &b, cfg);
            prop_assert!((vrd(&shift(&a), &shift(&b), cfg) - d).abs() <= 1e-9);
        }

        #[test]
        fn closed_form_matches_quadrature(a in arb_train(), b in arb_train()) {
            let d = vrd(&a, &b, VrdConfig::default());
            let q = vrd_quadrature(a.times(), b.times(), 100.0, 0.1);
            prop_assert!((d - q).abs() <= 1e-6 * d.max(1e-3), "closed {} quad {}", d, q);
        }
    }

    #[test]
    fn jitter_monotone() {
        let cfg = VrdConfig::default();
        let a = train(&[50.0]);
        let mut prev = 0.0;
        for k in 1..=300 {
            let d = vrd(&a, &train(&[50.0 + k as f64]), cfg);
            assert!(d > prev);
            prev = d;
        }
    }
}
