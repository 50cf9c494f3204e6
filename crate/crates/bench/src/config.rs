//! Experiment configuration: a JSON object laid over a per-kind preset.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use dta::learning::{DtaConfig, UpdateRule};
use dta::neuron::{KernelKind, NeuronParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    EncodeCapacityShort,
    EncodeCapacityLong,
    DecodeCapacity,
    CAlpha,
    InterferenceMap,
    Iris,
    VrdRefit,
}

impl ExperimentKind {
    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::EncodeCapacityShort => "encode_capacity_short",
            ExperimentKind::EncodeCapacityLong => "encode_capacity_long",
            ExperimentKind::DecodeCapacity => "decode_capacity",
            ExperimentKind::CAlpha => "c_alpha",
            ExperimentKind::InterferenceMap => "interference_map",
            ExperimentKind::Iris => "iris",
            ExperimentKind::VrdRefit => "vrd_refit",
        }
    }
}

/// A learning rule as named on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Dta(KernelKind),
    WidrowHoff(KernelKind),
    FirstError,
}

impl Method {
    pub fn rule(self, dta: &DtaConfig, eta: f64) -> UpdateRule {
        match self {
            Method::Dta(kernel) => UpdateRule::Dta(DtaConfig {
                kernel,
                ..dta.clone()
            }),
            Method::WidrowHoff(kernel) => UpdateRule::WidrowHoff { kernel, eta },
            Method::FirstError => UpdateRule::FirstError {
                kernel: KernelKind::Psp,
                eta,
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dta(k) => write!(f, "dta-{}", k.name()),
            Method::WidrowHoff(KernelKind::Psp) => f.write_str("psd"),
            Method::WidrowHoff(KernelKind::Stdp) => f.write_str("resume"),
            Method::WidrowHoff(KernelKind::Filt) => f.write_str("filt"),
            Method::FirstError => f.write_str("first-error"),
        }
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "dta-psp" | "dta" => Method::Dta(KernelKind::Psp),
            "dta-stdp" => Method::Dta(KernelKind::Stdp),
            "dta-filt" => Method::Dta(KernelKind::Filt),
            "psd" => Method::WidrowHoff(KernelKind::Psp),
            "resume" => Method::WidrowHoff(KernelKind::Stdp),
            "filt" => Method::WidrowHoff(KernelKind::Filt),
            "first-error" => Method::FirstError,
            other => return Err(BenchError::Config(format!("unknown method {other:?}"))),
        })
    }
}

impl TryFrom<String> for Method {
    type Error = BenchError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> Self {
        m.to_string()
    }
}

/// Every knob of every experiment. Loads are integers whose meaning depends
/// on the kind: pattern count, pattern duration (ms), patterns per class,
/// class count, or output spacing δt (ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub trials: usize,
    pub max_epochs: usize,
    /// A load fails once this fraction of trials fails to converge.
    pub stop_fraction: f64,
    pub n_channels: usize,
    /// Pattern duration in ms.
    pub duration: f64,
    pub rate_in: f64,
    pub rate_out: f64,
    pub threshold: f64,
    pub tau_m: f64,
    pub tau_s: f64,
    pub init_mean: f64,
    pub init_sd: f64,
    pub methods: Vec<Method>,
    /// Learning rate of the Widrow-Hoff style baselines.
    pub eta: f64,
    pub dta: DtaConfig,
    pub load_start: u64,
    pub load_step: u64,
    pub load_max: u64,
    pub classes: usize,
    /// Input-to-output delay of the two-spike toy problem.
    pub delay: f64,
    pub target_spikes: usize,
    pub train_fraction: f64,
    pub fields_per_feature: usize,
    pub beta: f64,
    pub window: f64,
    pub iris_path: Option<String>,
    pub templates: usize,
    pub template_rate: f64,
    pub template_durations: [f64; 2],
    pub jitter: [f64; 2],
}

/// The defaults a config file is merged over.
pub fn preset(kind: ExperimentKind) -> Value {
    let mut base = json!({
        "kind": kind,
        "seed": 1,
        "trials": 10,
        "max_epochs": 500,
        "stop_fraction": 0.5,
        "n_channels": 500,
        "duration": 400.0,
        "rate_in": 0.005,
        "rate_out": 0.005,
        "threshold": 1.0,
        "tau_m": 20.0,
        "tau_s": 5.0,
        "init_mean": 0.01,
        "init_sd": 0.01,
        "methods": ["dta-psp"],
        "eta": 0.01,
        "dta": DtaConfig::default(),
        "load_start": 1,
        "load_step": 1,
        "load_max": 200,
        "classes": 5,
        "delay": 8.0,
        "target_spikes": 10,
        "train_fraction": 0.5,
        "fields_per_feature": 10,
        "beta": 1.5,
        "window": 10.0,
        "iris_path": null,
        "templates": 1900,
        "template_rate": 0.005,
        "template_durations": [100.0, 10000.0],
        "jitter": [1.0, 10.0],
    });
    let over = match kind {
        ExperimentKind::EncodeCapacityShort => json!({
            "n_channels": 100,
            "methods": ["dta-psp", "psd"],
        }),
        ExperimentKind::EncodeCapacityLong => json!({
            "n_channels": 100,
            "methods": ["dta-psp", "psd"],
            "load_start": 1000,
            "load_step": 100,
            "load_max": 20000,
        }),
        ExperimentKind::DecodeCapacity => json!({
            "duration": 50.0,
            "max_epochs": 100,
            "methods": ["dta-psp", "psd"],
        }),
        ExperimentKind::CAlpha => json!({
            "duration": 50.0,
            "max_epochs": 100,
        }),
        ExperimentKind::InterferenceMap => json!({
            "trials": 1,
            "max_epochs": 1000,
            "methods": ["psd", "dta-psp"],
            "load_start": 10,
            "load_step": 5,
            "load_max": 100,
        }),
        ExperimentKind::Iris => json!({
            "n_channels": 40,
            "max_epochs": 20,
            "duration": 10.0,
            "classes": 3,
        }),
        ExperimentKind::VrdRefit => json!({}),
    };
    merge(&mut base, over);
    base
}

/// Recursive object merge; anything else in `over` replaces `base`.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

impl ExperimentConfig {
    /// Preset for `kind` with `overrides` merged on top.
    pub fn from_value(kind: ExperimentKind, overrides: Value) -> Result<Self, BenchError> {
        if let Some(k) = overrides.get("kind") {
            let given: ExperimentKind = serde_json::from_value(k.clone())?;
            if given != kind {
                return Err(BenchError::Config(format!(
                    "config is for {}, not {}",
                    given.id(),
                    kind.id()
                )));
            }
        }
        let mut v = preset(kind);
        merge(&mut v, overrides);
        let cfg: Self = serde_json::from_value(v)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(kind: ExperimentKind) -> Self {
        Self::from_value(kind, json!({})).expect("presets are valid")
    }

    pub fn from_file(kind: ExperimentKind, path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_value(kind, serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.trials == 0 || self.max_epochs == 0 {
            return bad("trials and max_epochs must be at least 1".into());
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction <= 1.0) {
            return bad(format!("stop_fraction {} outside (0, 1]", self.stop_fraction));
        }
        if self.methods.is_empty() {
            return bad("no methods given".into());
        }
        if self.load_step == 0 || self.load_start > self.load_max {
            return bad("load schedule is empty".into());
        }
        if !(self.eta > 0.0) {
            return bad("eta must be positive".into());
        }
        if self.template_durations[0] > self.template_durations[1] || self.jitter[0] > self.jitter[1] {
            return bad("ranges must be ordered".into());
        }
        self.dta_config().validate()?;
        self.params()?;
        Ok(())
    }

    pub fn params(&self) -> Result<NeuronParams, BenchError> {
        Ok(NeuronParams::new(self.n_channels)
            .with_threshold(self.threshold)?
            .with_time_constants(self.tau_m, self.tau_s)?)
    }

    /// The DTA settings with this experiment's epoch cap.
    pub fn dta_config(&self) -> DtaConfig {
        DtaConfig {
            max_epochs: self.max_epochs,
            ..self.dta.clone()
        }
    }

    pub fn loads(&self) -> impl Iterator<Item = u64> + '_ {
        (self.load_start..=self.load_max).step_by(self.load_step as usize)
    }
}
