//! Distance to the optimal weights on the two-spike toy problem, per rule
//! and output spacing.

use dta::baselines::{interference_trace, ToyProblem, ToyRule};
use dta::neuron::KernelKind;
use serde_json::json;

use crate::config::{ExperimentConfig, Method};
use crate::records::{CurvePoint, Outcome, TrialRecord};
use crate::BenchError;

/// Both weights within this distance of the optimum count as learned.
pub const TOY_TOL: f64 = 1e-3;

fn toy_rule(m: Method) -> Result<ToyRule, BenchError> {
    match m {
        Method::Dta(KernelKind::Psp) => Ok(ToyRule::Dta),
        Method::WidrowHoff(KernelKind::Psp) => Ok(ToyRule::Psd),
        Method::FirstError => Ok(ToyRule::FirstError),
        other => Err(BenchError::Config(format!("{other} has no toy-problem variant"))),
    }
}

/// First epoch (1-based) from which both distances stay within `tol`.
pub fn settled_at(w1: &[f64], w2: &[f64], tol: f64) -> Option<usize> {
    let last_bad = w1
        .iter()
        .zip(w2)
        .rposition(|(a, b)| *a > tol || *b > tol);
    match last_bad {
        None if w1.is_empty() => None,
        None => Some(1),
        Some(i) if i + 1 == w1.len() => None,
        Some(i) => Some(i + 2),
    }
}

pub fn run_interference_map(cfg: &ExperimentConfig) -> Result<Outcome, BenchError> {
    let params = cfg.params()?;
    let dta = cfg.dta_config();
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let rule = toy_rule(method)?;
        for spacing in cfg.loads() {
            let tp = ToyProblem::with_spacing(spacing as f64, cfg.delay, params.clone())?;
            let trace = interference_trace(&tp, rule, cfg.max_epochs, &dta)?;
            let settled = settled_at(&trace.w1, &trace.w2, TOY_TOL);
            out.records.push(TrialRecord {
                experiment: cfg.kind.id().into(),
                method: method.to_string(),
                trial: 0,
                seed: cfg.seed,
                load: spacing,
                converged: trace.ends_within(TOY_TOL),
                epochs_used: settled.unwrap_or(cfg.max_epochs),
                final_accuracy: f64::from(u8::from(trace.ends_within(TOY_TOL))),
                test_accuracy: None,
                fallback_count: 0,
                skipped_count: 0,
            });
            for (e, (a, b)) in trace.w1.iter().zip(&trace.w2).enumerate() {
                for (metric, value) in [("w1_distance", *a), ("w2_distance", *b)] {
                    out.curves.push(CurvePoint {
                        method: method.to_string(),
                        trial: 0,
                        load: spacing,
                        epoch: e + 1,
                        metric,
                        value,
                    });
                }
            }
            rows.push(json!({
                "method": method.to_string(),
                "spacing": spacing,
                "final_w1_distance": trace.w1.last(),
                "final_w2_distance": trace.w2.last(),
                "settled_epoch": settled,
            }));
        }
    }
    out.summary = json!({
        "experiment": cfg.kind.id(),
        "delay": cfg.delay,
        "epochs": cfg.max_epochs,
        "tolerance": TOY_TOL,
        "grid": rows,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settling_epoch() {
        assert_eq!(settled_at(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 0.1), Some(2));
        assert_eq!(settled_at(&[0.0, 0.0], &[0.0, 0.0], 0.1), Some(1));
        assert_eq!(settled_at(&[0.0, 1.0], &[0.0, 0.0], 0.1), None);
        assert_eq!(settled_at(&[], &[], 0.1), None);
        assert_eq!(settled_at(&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], 0.1), Some(3));
    }

    #[test]
    fn grid_dimensions() {
        use crate::ExperimentKind;
        let cfg = ExperimentConfig::from_value(
            ExperimentKind::InterferenceMap,
            serde_json::json!({"max_epochs": 7, "load_start": 20, "load_max": 40, "load_step": 10}),
        )
        .unwrap();
        let out = run_interference_map(&cfg).unwrap();
        assert_eq!(out.records.len(), 2 * 3);
        assert_eq!(out.curves.len(), 2 * 3 * 7 * 2);
    }
}
