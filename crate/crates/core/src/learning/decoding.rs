use crate::metrics::decoding_accuracy;
use crate::neuron::{simulate, InputPattern, NeuronParams, SpikeTrain, WeightVector};

use super::encoding::violations_after;
use super::{
    run_epochs, DecodingProblem, DtaConfig, LearningError, Presentation, TrainResult, UpdateRule,
};

/// Bisection steps before giving up on the threshold search.
pub const MAX_BISECT: usize = 60;
/// Points of the linear threshold scan used when bisection fails.
pub const SCAN_POINTS: usize = 200;
/// The search covers thresholds in `(0, SEARCH_SPAN·ϑ)`.
const SEARCH_SPAN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MoreSpikes,
    FewerSpikes,
}

fn count(params: &NeuronParams, w: &[f64], x: &InputPattern, theta: f64) -> Result<usize, LearningError> {
    Ok(simulate(params, w, x, Some(theta))?.len())
}

/// Threshold at which the neuron fires exactly one spike more (or fewer)
/// than at ϑ, by bisection on `(0, 10ϑ)`.
pub fn find_theta_star(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    direction: Direction,
) -> Result<f64, LearningError> {
    let theta = params.threshold();
    let c = count(params, w, x, theta)?;
    let (target, mut lo, mut hi) = match direction {
        Direction::MoreSpikes => (c + 1, 0.0, theta),
        Direction::FewerSpikes => {
            if c == 0 {
                return Err(LearningError::ThetaSearchFailed {
                    lo: theta,
                    hi: SEARCH_SPAN * theta,
                    target: 0,
                });
            }
            (c - 1, theta, SEARCH_SPAN * theta)
        }
    };
    if direction == Direction::FewerSpikes && count(params, w, x, hi)? > target {
        return Err(LearningError::ThetaSearchFailed { lo, hi, target });
    }
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        let n = count(params, w, x, mid)?;
        if n == target {
            return Ok(mid);
        }
        if n > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if direction == Direction::FewerSpikes && count(params, w, x, hi)? == target {
        return Ok(hi);
    }
    Err(LearningError::ThetaSearchFailed { lo, hi, target })
}

/// Linear scan over `SCAN_POINTS` thresholds in `(0, 10ϑ)`; returns the one
/// closest to ϑ that yields `target` spikes.
pub fn theta_scan(
    params: &NeuronParams,
    w: &[f64],
    x: &InputPattern,
    target: usize,
) -> Result<Option<f64>, LearningError> {
    let theta = params.threshold();
    let span = SEARCH_SPAN * theta;
    let mut best: Option<f64> = None;
    for k in 1..=SCAN_POINTS {
        let th = span * k as f64 / (SCAN_POINTS + 1) as f64;
        if count(params, w, x, th)? == target
            && best.is_none_or(|b| (th - theta).abs() < (b - theta).abs())
        {
            best = Some(th);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub weights: WeightVector,
    pub used_fallback: bool,
    pub updated: bool,
    /// No threshold produced the neighbouring count; weights unchanged.
    pub search_failed: bool,
    /// The timed target used for the update.
    pub target: Option<SpikeTrain>,
}

/// One count-driven update with the constraint-satisfaction rule.
pub fn decoding_step(
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    label: usize,
    cfg: &DtaConfig,
) -> Result<DecodeReport, LearningError> {
    decoding_step_with(&UpdateRule::Dta(cfg.clone()), params, w, x, label)
}

/// Moves the spike count one step towards `label`: the spikes produced at
/// the shifted threshold become a timed target for `rule`.
pub fn decoding_step_with(
    rule: &UpdateRule,
    params: &NeuronParams,
    w: &WeightVector,
    x: &InputPattern,
    label: usize,
) -> Result<DecodeReport, LearningError> {
    let c = count(params, w, x, params.threshold())?;
    let unchanged = |search_failed| DecodeReport {
        weights: w.clone(),
        used_fallback: false,
        updated: false,
        search_failed,
        target: None,
    };
    if c == label {
        return Ok(unchanged(false));
    }
    let (direction, target) = if c < label {
        (Direction::MoreSpikes, c + 1)
    } else {
        (Direction::FewerSpikes, c - 1)
    };
    let theta_star = match find_theta_star(params, w, x, direction) {
        Ok(t) => Some(t),
        Err(LearningError::ThetaSearchFailed { .. }) => theta_scan(params, w, x, target)?,
        Err(e) => return Err(e),
    };
    let Some(theta_star) = theta_star else {
        log::debug!("no threshold gives {target} spikes (now {c}); iteration skipped");
        return Ok(unchanged(true));
    };
    let y = simulate(params, w, x, Some(theta_star))?;
    let step = rule.apply(params, w, x, &y)?;
    Ok(DecodeReport {
        weights: step.weights,
        used_fallback: step.used_fallback,
        updated: step.updated,
        search_failed: false,
        target: Some(y),
    })
}

pub(crate) fn decoding_accuracy_of(
    params: &NeuronParams,
    w: &WeightVector,
    problem: &DecodingProblem,
) -> Result<f64, LearningError> {
    let counts = problem
        .patterns
        .iter()
        .map(|x| count(params, w, x, params.threshold()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(decoding_accuracy(&counts, &problem.labels))
}

/// Trains towards spike counts with the constraint-satisfaction rule.
pub fn train_decoding(
    problem: &DecodingProblem,
    params: &NeuronParams,
    w0: &WeightVector,
    cfg: &DtaConfig,
    seed: u64,
) -> Result<TrainResult, LearningError> {
    cfg.validate()?;
    train_decoding_with(&UpdateRule::Dta(cfg.clone()), problem, params, w0, cfg.max_epochs, seed)
}

/// [`train_decoding`] with any update rule.
pub fn train_decoding_with(
    rule: &UpdateRule,
    problem: &DecodingProblem,
    params: &NeuronParams,
    w0: &WeightVector,
    max_epochs: usize,
    seed: u64,
) -> Result<TrainResult, LearningError> {
    rule.validate()?;
    run_epochs(
        problem.len(),
        w0,
        max_epochs,
        seed,
        |w, p| {
            let x = &problem.patterns[p];
            let r = decoding_step_with(rule, params, w, x, problem.labels[p])?;
            let violations = match (&r.target, r.updated) {
                (Some(y), true) => Some(violations_after(params, &r.weights, x, y, rule.match_tol())?),
                _ => None,
            };
            Ok(Presentation {
                weights: r.weights,
                used_fallback: r.used_fallback,
                skipped: r.search_failed,
                violations,
            })
        },
        |w| decoding_accuracy_of(params, w, problem),
    )
}
