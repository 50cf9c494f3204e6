use serde::{Deserialize, Serialize};

use super::{InputPattern, NeuronParams, SpikeTrain};

/// Learning window κ(t) used to distribute a weight update over inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Causal exponential `e^{−t/τ_m}Θ(t)`.
    Stdp,
    /// The PSP kernel λ(t) itself.
    Psp,
    /// Filtered-error window; non-zero for t ≤ 0.
    Filt,
}

impl KernelKind {
    pub fn eval(self, params: &NeuronParams, t: f64) -> f64 {
        match self {
            KernelKind::Stdp => params.reset(t),
            KernelKind::Psp => params.psp(t),
            KernelKind::Filt => {
                let (cm, cs) = filt_weights(params);
                if t > 0.0 {
                    params.v_norm()
                        * (cm * (-t / params.tau_m()).exp() - cs * (-t / params.tau_s()).exp())
                } else {
                    params.v_norm() * (cm - cs) * (t / params.tau_m()).exp()
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Stdp => "stdp",
            KernelKind::Psp => "psp",
            KernelKind::Filt => "filt",
        }
    }

    /// `Σ_{t^i ∈ x_c} κ(t − t^i)` for every channel `c`.
    pub fn channel_sums(self, params: &NeuronParams, x: &InputPattern, t: f64) -> Vec<f64> {
        let mut sums = vec![0.0; x.n_channels()];
        for &(s, c) in x.events() {
            // Causal kernels vanish for inputs after t.
            if s > t && self != KernelKind::Filt {
                break;
            }
            sums[c] += self.eval(params, t - s);
        }
        sums
    }
}

/// `(C_m, C_s)` of the filtered window; they sum to one.
pub fn filt_weights(params: &NeuronParams) -> (f64, f64) {
    let total = params.tau_m() + params.tau_s();
    (params.tau_m() / total, params.tau_s() / total)
}

/// Reset-free potential `Σ_i w_i Σ λ(t − t^i)`, evaluated directly from the
/// analytic kernel.
pub fn membrane_v0(params: &NeuronParams, w: &[f64], x: &InputPattern, t: f64) -> f64 {
    let mut v = 0.0;
    for &(s, c) in x.events() {
        if s >= t {
            break;
        }
        v += w[c] * params.psp(t - s);
    }
    v
}

/// Moving threshold `ϑ(1 + Σ_{t^d ∈ y} γ(t − t^d))` with Θ(0) = 1, so a
/// desired spike at exactly `t` is counted.
pub fn dynamic_theta(params: &NeuronParams, y: &SpikeTrain, t: f64) -> f64 {
    let resets: f64 = y.iter().map(|d| params.reset(t - d)).sum();
    params.threshold() * (1.0 + resets)
}

/// Left limit of [`dynamic_theta`]: only desired spikes strictly before `t`
/// contribute. This is the level the reset-free potential must reach for the
/// neuron to fire at `t`.
pub fn dynamic_theta_left(params: &NeuronParams, y: &SpikeTrain, t: f64) -> f64 {
    let resets: f64 = y
        .iter()
        .take_while(|&d| d < t)
        .map(|d| params.reset(t - d))
        .sum();
    params.threshold() * (1.0 + resets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NeuronParams {
        NeuronParams::new(1)
    }

    #[test]
    fn psp_kernel_values() {
        let p = params();
        assert_eq!(p.psp(-5.0), 0.0);
        assert_eq!(p.psp(0.0), 0.0);
        // t* = τmτs/(τm−τs)·ln(τm/τs) = (100/15)·ln 4
        let t_star = 100.0 / 15.0 * 4f64.ln();
        assert!((t_star - 9.2420).abs() < 1e-4);
        assert!((p.psp_peak_time() - t_star).abs() < 1e-12);
        assert!((p.psp(t_star) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psp_peak_is_one_on_fine_grid() {
        let p = params();
        let n = 200_000;
        let horizon = 10.0 * p.tau_m();
        let (mut best_t, mut best) = (0.0, f64::MIN);
        for k in 0..=n {
            let t = horizon * k as f64 / n as f64;
            let v = p.psp(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // golden-section refinement around the grid maximum
        let (mut a, mut b) = (best_t - horizon / n as f64, best_t + horizon / n as f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if p.psp(c) > p.psp(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert!((p.psp(0.5 * (a + b)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reset_kernel_values() {
        let p = params();
        assert_eq!(p.reset(0.0), 1.0);
        assert_eq!(p.reset(-1.0), 0.0);
        assert!((p.reset(20.0) - 0.36788).abs() < 1e-5);
        assert!((p.reset(20.0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn learning_kernels() {
        let p = params();
        assert_eq!(KernelKind::Stdp.eval(&p, 0.0), 1.0);
        assert_eq!(KernelKind::Stdp.eval(&p, -0.1), 0.0);
        assert!((KernelKind::Psp.eval(&p, 9.2420) - 1.0).abs() < 1e-8);
        let at_zero = KernelKind::Filt.eval(&p, 0.0);
        assert!((at_zero - 2.116_534_735_957_9 * 0.6).abs() < 1e-12);
        assert!((at_zero - 1.26992).abs() < 1e-5);
        assert!(KernelKind::Filt.eval(&p, -1e4).abs() < 1e-100);
        let (cm, cs) = filt_weights(&p);
        assert!((cm + cs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn filt_is_continuous_at_zero() {
        let p = params();
        let left = KernelKind::Filt.eval(&p, -1e-15);
        let right = KernelKind::Filt.eval(&p, 1e-15);
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn dynamic_theta_values() {
        let p = params();
        let empty = SpikeTrain::empty();
        assert_eq!(dynamic_theta(&p, &empty, 3.0), 1.0);
        let y = SpikeTrain::new(vec![0.0]).unwrap();
        assert_eq!(dynamic_theta(&p, &y, 0.0), 2.0);
        assert_eq!(dynamic_theta_left(&p, &y, 0.0), 1.0);
        assert!((dynamic_theta(&p, &y, 20.0) - 1.36788).abs() < 1e-5);
        assert_eq!(dynamic_theta(&p, &y, 20.0), dynamic_theta_left(&p, &y, 20.0));
    }

    #[test]
    fn v0_single_spike_peak() {
        let p = params();
        let x = InputPattern::new(vec![SpikeTrain::new(vec![10.0]).unwrap()], 50.0).unwrap();
        let v = membrane_v0(&p, &[1.0], &x, 10.0 + p.psp_peak_time());
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(membrane_v0(&p, &[0.0], &x, 20.0), 0.0);
    }
}
