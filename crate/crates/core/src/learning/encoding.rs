use crate::linsolve::{solve, LinearProgram, LpError};
use crate::metrics::{encoding_accuracy, vrd, vrd_star, VrdConfig};
use crate::neuron::{
    dynamic_theta_left, simulate, InputPattern, KernelKind, NeuronParams, SpikeTrain, WeightVector,
};

use super::{
    match_spikes, run_epochs, DtaConfig, EncodingProblem, LearningError, ObjectiveMode,
    Presentation, TrainResult, UpdateRule,
};

/// The assembled program plus what is needed to turn its solution into a
/// weight change.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingLp {
    pub lp: LinearProgram,
    /// Desired times followed by stray actual times; one variable and one
    /// row each.
    pub times: Vec<f64>,
    pub n_desired: usize,
    /// `kappa[v][i] = Σ κ(t_v − t^i)` over the spikes of channel `i`.
    pub kappa: Vec<Vec<f64>>,
}

impl EncodingLp {
    /// `Δw_i = Σ_v η_v·kappa[v][i]`.
    pub fn delta(&self, eta: &[f64]) -> Vec<f64> {
        let n = self.kappa.first().map_or(0, Vec::len);
        let mut dw = vec![0.0; n];
        for (e, row) in eta.iter().zip(&self.kappa) {
            for (d, k) in dw.iter_mut().zip(row) {
                *d += e * k;
            }
        }
        dw
    }

    /// `+η` at desired times, `−η` at stray ones.
    pub fn fallback_eta(&self, eta: f64) -> Vec<f64> {
        (0..self.times.len())
            .map(|v| if v < self.n_desired { eta } else { -eta })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the program whose solution places the threshold crossings.
///
/// Equality rows hold the reset-free potential at the threshold (counting the
/// resets of earlier desired spikes) at every desired time; inequality rows
/// keep it `margin` below at every stray actual spike.
pub fn build_encoding_lp(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    y: &SpikeTrain,
    unmatched: &SpikeTrain,
    cfg: &DtaConfig,
) -> EncodingLp {
    let times: Vec<f64> = y.iter().chain(unmatched.iter()).collect();
    let n_desired = y.len();
    let n_vars = times.len();
    let lambda: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| KernelKind::Psp.channel_sums(params, x, t))
        .collect();
    let kappa: Vec<Vec<f64>> = if cfg.kernel == KernelKind::Psp {
        lambda.clone()
    } else {
        times
            .iter()
            .map(|&t| cfg.kernel.channel_sums(params, x, t))
            .collect()
    };

    let mut lp = LinearProgram::new(n_vars);
    for v in 0..n_vars {
        if v < n_desired {
            lp.set_bounds(v, cfg.lb_d, cfg.ub_d);
        } else {
            lp.set_bounds(v, cfg.lb_o, cfg.ub_o);
        }
    }
    let margin = cfg.margin(params);
    for (c, &t) in times.iter().enumerate() {
        let coeffs: Vec<f64> = kappa.iter().map(|k| dot(k, &lambda[c])).collect();
        let rhs = dynamic_theta_left(params, y, t) - dot(w, &lambda[c]);
        if c < n_desired {
            lp.add_eq(coeffs, rhs);
        } else {
            lp.add_le(coeffs, rhs - margin);
        }
    }
    if cfg.objective == ObjectiveMode::MinAbsEta {
        // signs are fixed by the bounds, so |η| is linear
        lp.set_objective((0..n_vars).map(|v| if v < n_desired { 1.0 } else { -1.0 }).collect());
    }
    EncodingLp {
        lp,
        times,
        n_desired,
        kappa,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub weights: WeightVector,
    pub used_fallback: bool,
    /// False when the pattern was already learned and nothing changed.
    pub updated: bool,
}

impl StepReport {
    pub(crate) fn updated(weights: WeightVector, used_fallback: bool) -> Self {
        Self {
            weights,
            used_fallback,
            updated: true,
        }
    }
}

/// One constraint-satisfaction update towards the timed target `y`.
///
/// A pattern whose output already matches `y` spike for spike, with a
/// distance below the convergence threshold, is left alone.
pub fn encoding_step(
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    y: &SpikeTrain,
    cfg: &DtaConfig,
) -> Result<StepReport, LearningError> {
    let o = simulate(params, w, x, None)?;
    let m = match_spikes(&o, y, cfg.match_tol);
    if m.is_complete() && vrd(&o, y, VrdConfig::default()) < vrd_star(x.duration(), cfg.match_tol) {
        return Ok(StepReport {
            weights: w.clone(),
            used_fallback: false,
            updated: false,
        });
    }
    let enc = build_encoding_lp(params, w, x, y, &m.unmatched_actual, cfg);
    let (eta, used_fallback) = match solve(&enc.lp) {
        Ok(sol) if sol.is_feasible() => (sol.values, false),
        Ok(_) => (enc.fallback_eta(cfg.fallback_eta), true),
        Err(LpError::Numerical(msg)) => {
            log::warn!("solver breakdown, using fallback update: {msg}");
            (enc.fallback_eta(cfg.fallback_eta), true)
        }
        Err(e) => return Err(e.into()),
    };
    let weights = w.added(&enc.delta(&eta))?;
    Ok(StepReport::updated(weights, used_fallback))
}

/// Stray spikes left after an update, measured against `y`.
pub(crate) fn violations_after(
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    y: &SpikeTrain,
    tol: f64,
) -> Result<usize, LearningError> {
    let o = simulate(params, w, x, None)?;
    Ok(match_spikes(&o, y, tol).unmatched_actual.len())
}

pub(crate) fn encoding_accuracy_of(
    params: &NeuronParams,
    w: &WeightVector,
    problem: &EncodingProblem,
) -> Result<f64, LearningError> {
    let outputs = problem
        .patterns
        .iter()
        .map(|x| simulate(params, w, x, None))
        .collect::<Result<Vec<_>, _>>()?;
    let durations: Vec<f64> = problem.patterns.iter().map(InputPattern::duration).collect();
    Ok(encoding_accuracy(
        &outputs,
        &problem.desired,
        &durations,
        VrdConfig::default(),
    ))
}

/// Trains towards timed targets with the constraint-satisfaction update.
pub fn train_encoding(
    problem: &EncodingProblem,
    params: &NeuronParams,
    w0: &WeightVector,
    cfg: &DtaConfig,
    seed: u64,
) -> Result<TrainResult, LearningError> {
    cfg.validate()?;
    train_encoding_with(&UpdateRule::Dta(cfg.clone()), problem, params, w0, cfg.max_epochs, seed)
}

/// [`train_encoding`] with any update rule.
pub fn train_encoding_with(
    rule: &UpdateRule,
    problem: &EncodingProblem,
    params: &NeuronParams,
    w0: &WeightVector,
    max_epochs: usize,
    seed: u64,
) -> Result<TrainResult, LearningError> {
    rule.validate()?;
    let tol = rule.match_tol();
    run_epochs(
        problem.len(),
        w0,
        max_epochs,
        seed,
        |w, p| {
            let (x, y) = (&problem.patterns[p], &problem.desired[p]);
            let step = rule.apply(params, w, x, y)?;
            let violations = if step.updated {
                Some(violations_after(params, &step.weights, x, y, tol)?)
            } else {
                None
            };
            Ok(Presentation {
                weights: step.weights,
                used_fallback: step.used_fallback,
                skipped: false,
                violations,
            })
        },
        |w| encoding_accuracy_of(params, w, problem),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuron::membrane_v0;

    fn one_channel(spike: f64, duration: f64) -> InputPattern {
        InputPattern::new(vec![SpikeTrain::new(vec![spike]).unwrap()], duration).unwrap()
    }

    #[test]
    fn scalar_problem_by_hand() {
        let p = NeuronParams::new(1);
        let x = one_channel(5.0, 50.0);
        let y = SpikeTrain::new(vec![12.0]).unwrap();
        let cfg = DtaConfig::default();
        let enc = build_encoding_lp(&p, &[0.1], &x, &y, &SpikeTrain::empty(), &cfg);
        assert_eq!(enc.lp.n_vars, 1);
        assert_eq!(enc.lp.eq_rows.len(), 1);
        let l = p.psp(7.0);
        // η·λ² = ϑ − 0.1·λ
        let eta = (1.0 - 0.1 * l) / (l * l);
        let sol = solve(&enc.lp).unwrap();
        assert!((sol.values[0] - eta).abs() < 1e-9);
        let w = WeightVector::new(vec![0.1]).unwrap().added(&enc.delta(&sol.values)).unwrap();
        assert!((membrane_v0(&p, &w, &x, 12.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn shape_counts_both_kinds() {
        let p = NeuronParams::new(1);
        let x = one_channel(5.0, 50.0);
        let y = SpikeTrain::new(vec![12.0, 30.0]).unwrap();
        let stray = SpikeTrain::new(vec![20.0]).unwrap();
        let enc = build_encoding_lp(&p, &[0.0], &x, &y, &stray, &DtaConfig::default());
        assert_eq!(enc.lp.n_vars, 3);
        assert_eq!(enc.lp.n_rows(), 3);
        assert_eq!(enc.lp.le_rows.len(), 1);
        assert_eq!(enc.lp.lower[2], -1.0);
    }

    #[test]
    fn converged_pattern_is_fixed_point() {
        let p = NeuronParams::new(1);
        let x = one_channel(5.0, 50.0);
        let w = WeightVector::new(vec![1.5]).unwrap();
        let y = simulate(&p, &w, &x, None).unwrap();
        let step = encoding_step(&p, &w, &x, &y, &DtaConfig::default()).unwrap();
        assert!(!step.updated && !step.used_fallback);
        assert_eq!(step.weights, w);
    }

    #[test]
    fn infeasible_program_falls_back() {
        let p = NeuronParams::new(2);
        let x = InputPattern::new(
            vec![
                SpikeTrain::new(vec![5.0]).unwrap(),
                SpikeTrain::new(vec![8.0, 20.0]).unwrap(),
            ],
            100.0,
        )
        .unwrap();
        let y = SpikeTrain::new(vec![90.0]).unwrap();
        let cfg = DtaConfig {
            lb_d: 1e-6,
            ub_d: 1e-6,
            ..DtaConfig::default()
        };
        let w = WeightVector::zeros(2);
        let step = encoding_step(&p, &w, &x, &y, &cfg).unwrap();
        assert!(step.used_fallback);
        for (i, ch) in x.channels().iter().enumerate() {
            let expected: f64 = 1e-3 * ch.iter().map(|s| p.psp(90.0 - s)).sum::<f64>();
            assert!((step.weights[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pattern_training_converges() {
        let p = NeuronParams::new(3);
        let x = InputPattern::new(
            vec![
                SpikeTrain::new(vec![2.0, 40.0]).unwrap(),
                SpikeTrain::new(vec![15.0]).unwrap(),
                SpikeTrain::new(vec![28.0, 33.0]).unwrap(),
            ],
            60.0,
        )
        .unwrap();
        let y = SpikeTrain::new(vec![20.0, 45.0]).unwrap();
        let problem = EncodingProblem::new(vec![x], vec![y]).unwrap();
        let cfg = DtaConfig {
            max_epochs: 20,
            ..DtaConfig::default()
        };
        let w0 = WeightVector::new(vec![0.3, 0.3, 0.3]).unwrap();
        let r = train_encoding(&problem, &p, &w0, &cfg, 1).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.epochs_used <= 5);
        assert_eq!(r, train_encoding(&problem, &p, &w0, &cfg, 1).unwrap());
    }
}
