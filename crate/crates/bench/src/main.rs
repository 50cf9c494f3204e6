use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dta_bench::config::{ExperimentConfig, ExperimentKind};
use dta_bench::experiments;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dta", version, about = "Spiking-neuron learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encoding capacity: many short patterns, or one growing pattern with --long.
    EncodeCapacity {
        #[arg(long)]
        long: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Decoding capacity with five classes.
    DecodeCapacity(Common),
    /// Number of classes learnable with one pattern each.
    Calpha(Common),
    /// Distance to the optimal weights on the two-spike problem.
    Interference(Common),
    /// IRIS classification with a winner-take-all layer.
    Iris(Common),
    /// Refit the convergence threshold of the spike distance.
    VrdRefit(Common),
    /// Train every configured method once at a single load.
    Train {
        /// Experiment kind, e.g. decode_capacity.
        #[arg(long, default_value = "decode_capacity")]
        kind: String,
        /// Load to train at; defaults to the config's first load.
        #[arg(long)]
        load: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON file merged over the built-in preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl Common {
    fn config(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut over = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str::<Value>(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => json!({}),
        };
        if let Some(s) = self.seed {
            over["seed"] = json!(s);
        }
        if let Some(t) = self.trials {
            over["trials"] = json!(t);
        }
        Ok(ExperimentConfig::from_value(kind, over)?)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (kind, common, load) = match &cli.command {
        Command::EncodeCapacity { long, common } => {
            let kind = if *long {
                ExperimentKind::EncodeCapacityLong
            } else {
                ExperimentKind::EncodeCapacityShort
            };
            (kind, common, None)
        }
        Command::DecodeCapacity(c) => (ExperimentKind::DecodeCapacity, c, None),
        Command::Calpha(c) => (ExperimentKind::CAlpha, c, None),
        Command::Interference(c) => (ExperimentKind::InterferenceMap, c, None),
        Command::Iris(c) => (ExperimentKind::Iris, c, None),
        Command::VrdRefit(c) => (ExperimentKind::VrdRefit, c, None),
        Command::Train { kind, load, common } => {
            let kind: ExperimentKind = serde_json::from_value(json!(kind)).context("unknown kind")?;
            (kind, common, Some(*load))
        }
    };
    let cfg = common.config(kind)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.threads).build()?;
    let outcome = pool.install(|| match load {
        Some(load) => experiments::run_fixed_load(&cfg, load.unwrap_or(cfg.load_start)),
        None => experiments::run(&cfg),
    })?;
    outcome.write(&common.out)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    log::info!("results written to {}", common.out.display());
    Ok(())
}
