//! Grid-bracketed simulation of the reset neuron.
//!
//! The potential is a sum of exponentials, so it is carried as three decaying
//! traces (τ_m input, τ_s input, τ_m reset) and advanced from grid point to
//! grid point in O(grid + spikes). Each crossing found on the grid is refined
//! by bisection on the exact potential inside the bracketing interval.

use super::{InputPattern, NeuronError, NeuronParams, SpikeTrain};

/// Output of [`simulate_trace`]: spikes plus the post-reset potential on the
/// simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub spikes: SpikeTrain,
    pub grid: Vec<f64>,
    pub potential: Vec<f64>,
}

/// Output spike times of the neuron with threshold `threshold_override` (or
/// ϑ when `None`).
pub fn simulate(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    threshold_override: Option<f64>,
) -> Result<SpikeTrain, NeuronError> {
    run(params, w, x, threshold_override, None)
}

/// Like [`simulate`], additionally returning V(t) at every grid point.
pub fn simulate_trace(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    threshold_override: Option<f64>,
) -> Result<Trace, NeuronError> {
    let mut grid = Vec::new();
    let mut potential = Vec::new();
    let spikes = run(params, w, x, threshold_override, Some((&mut grid, &mut potential)))?;
    Ok(Trace {
        spikes,
        grid,
        potential,
    })
}

fn run(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    threshold_override: Option<f64>,
    mut record: Option<(&mut Vec<f64>, &mut Vec<f64>)>,
) -> Result<SpikeTrain, NeuronError> {
    if w.len() != params.n_channels() {
        return Err(NeuronError::ChannelMismatch {
            expected: params.n_channels(),
            actual: w.len(),
        });
    }
    if x.n_channels() != params.n_channels() {
        return Err(NeuronError::ChannelMismatch {
            expected: params.n_channels(),
            actual: x.n_channels(),
        });
    }
    let theta = threshold_override.unwrap_or(params.threshold());
    if !(theta.is_finite() && theta > 0.0) {
        return Err(NeuronError::InvalidParams(format!(
            "threshold must be positive, got {theta}"
        )));
    }

    let (tau_m, tau_s) = (params.tau_m(), params.tau_s());
    let v_norm = params.v_norm();
    let fire_level = theta - params.fire_tol();
    let duration = x.duration();
    let dt = params.dt();
    let n_steps = (duration / dt - 1e-9).ceil().max(0.0) as usize;
    let events = x.events();

    let mut next = 0usize;
    let mut t_prev = 0.0;
    let (mut slow, mut fast, mut reset) = (0.0, 0.0, 0.0);
    let mut v_prev = f64::NEG_INFINITY;
    let mut spikes = Vec::new();

    for k in 0..=n_steps {
        let t = if k == n_steps { duration } else { k as f64 * dt };
        let first_new = next;
        while next < events.len() && events[next].0 <= t {
            next += 1;
        }
        let arrivals = &events[first_new..next];

        let h = t - t_prev;
        let decay_m = (-h / tau_m).exp();
        let mut slow_t = slow * decay_m;
        let mut fast_t = fast * (-h / tau_s).exp();
        for &(s, c) in arrivals {
            slow_t += w[c] * (-(t - s) / tau_m).exp();
            fast_t += w[c] * (-(t - s) / tau_s).exp();
        }
        let mut reset_t = reset * decay_m;
        let mut v = v_norm * (slow_t - fast_t) - theta * reset_t;
        if !v.is_finite() {
            return Err(NeuronError::SimulationDiverged { time: t });
        }

        if v >= fire_level && v_prev < theta {
            let t_out = if k == 0 {
                0.0
            } else {
                let potential_at = |tau: f64| {
                    let back = tau - t_prev;
                    let dm = (-back / tau_m).exp();
                    let mut sl = slow * dm;
                    let mut fa = fast * (-back / tau_s).exp();
                    for &(s, c) in arrivals.iter().take_while(|e| e.0 <= tau) {
                        sl += w[c] * (-(tau - s) / tau_m).exp();
                        fa += w[c] * (-(tau - s) / tau_s).exp();
                    }
                    v_norm * (sl - fa) - theta * reset * dm
                };
                let (mut lo, mut hi) = (t_prev, t);
                while hi - lo > params.refine_tol() {
                    let mid = 0.5 * (lo + hi);
                    if potential_at(mid) >= fire_level {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            };
            let kick = (-(t - t_out) / tau_m).exp();
            reset_t += kick;
            v -= theta * kick;
            spikes.push(t_out);
        }

        if let Some((grid, potential)) = record.as_mut() {
            grid.push(t);
            potential.push(v);
        }
        slow = slow_t;
        fast = fast_t;
        reset = reset_t;
        t_prev = t;
        v_prev = v;
    }
    Ok(SpikeTrain::from_sorted_unchecked(spikes))
}
