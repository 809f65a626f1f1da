//! `agan`: reproducible α-GAN verification, gradient sweeps and training runs.
//!
//! Every subcommand writes `manifest.json` into its output directory before
//! doing any work, then its CSV outputs. Exit codes: 0 success, 2 verification
//! failure, 3 training divergence, 4 I/O, format or argument error.

pub mod config;
pub mod error;
pub mod manifest;
pub mod run;
pub mod sweep;
pub mod verify;

use std::env;
use std::path::{Path, PathBuf};

use alphagan_core::grad::default_alpha_grid;
use alphagan_core::AlphaOrder;
use clap::{Parser, Subcommand};
use serde_json::json;

pub use config::TrainOverrides;
pub use error::{CliError, CliResult};
pub use manifest::{RunManifest, MANIFEST_FILE};

#[derive(Debug, Parser)]
#[command(name = "agan", version, about = "Rényi α-GAN laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the optimal discriminator and the saddle point on random finite instances.
    VerifySaddle {
        #[arg(long, default_value_t = 4)]
        alphabet: usize,
        #[arg(long, default_value = "0.1,0.5,1,2,5")]
        alphas: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Brute-force grid points per coordinate.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, value_enum, default_value = "random")]
        fixture: verify::Fixture,
        #[arg(long, default_value_t = 5000)]
        generator_steps: usize,
        #[arg(long, default_value_t = 0.05)]
        generator_step_size: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit discriminator and generator gradients across an α grid.
    SweepGradients {
        /// CSV of `pr,pg,d` rows; defaults to the four plotted scenarios.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        /// `start:step:count` or a comma-separated list.
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one α-GAN and write metrics, histograms and checkpoints.
    Train {
        #[arg(long)]
        alpha: Option<AlphaOrder>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        overrides: TrainOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train every (α, seed) pair and summarize Wasserstein-1 and win rates against α = 1.
    CompareAlphas {
        #[arg(long, default_value = "0.1,1")]
        alphas: String,
        /// Seeds or inclusive ranges, e.g. `0-9`.
        #[arg(long, default_value = "0-9")]
        seeds: String,
        #[arg(long, default_value_t = 4000)]
        epochs: usize,
        /// Epochs at which W1 is summarized; defaults to the final epoch.
        #[arg(long)]
        summary_epochs: Option<String>,
        #[command(flatten)]
        overrides: TrainOverrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifySaddle { .. } => "verify-saddle",
            Command::SweepGradients { .. } => "sweep-gradients",
            Command::Train { .. } => "train",
            Command::CompareAlphas { .. } => "compare-alphas",
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Command::VerifySaddle { out, .. }
            | Command::SweepGradients { out, .. }
            | Command::Train { out, .. }
            | Command::CompareAlphas { out, .. } => out.as_deref(),
        }
    }
}

/// `--out`, else `$AGAN_OUT/<subcommand>`, else `agan-out/<subcommand>`.
pub fn output_dir(cmd: &Command) -> PathBuf {
    if let Some(p) = cmd.out() {
        return p.to_path_buf();
    }
    let root = env::var_os("AGAN_OUT").map_or_else(|| PathBuf::from("agan-out"), PathBuf::from);
    root.join(cmd.name())
}

/// Resolved settings for one invocation, ready to execute.
enum Plan {
    Saddle(verify::SaddleSettings),
    Sweep {
        scenarios: Vec<alphagan_core::grad::Scenario>,
        alphas: Vec<f64>,
    },
    Train(alphagan_core::train::TrainConfig),
    Compare {
        configs: Vec<alphagan_core::train::TrainConfig>,
        summary_epochs: Vec<usize>,
    },
}

fn plan(cmd: &Command) -> CliResult<(Plan, serde_json::Value, Option<u64>)> {
    Ok(match cmd {
        Command::VerifySaddle {
            alphabet,
            alphas,
            trials,
            seed,
            grid,
            fixture,
            generator_steps,
            generator_step_size,
            ..
        } => {
            let s = verify::SaddleSettings {
                alphabet: *alphabet,
                alphas: config::parse_alpha_list(alphas)?,
                trials: *trials,
                seed: *seed,
                grid: *grid,
                fixture: *fixture,
                generator_steps: *generator_steps,
                generator_step_size: *generator_step_size,
            };
            let v = serde_json::to_value(&s)?;
            (Plan::Saddle(s), v, Some(*seed))
        }
        Command::SweepGradients {
            scenarios,
            alpha_grid,
            ..
        } => {
            let scenarios = sweep::load_scenarios(scenarios.as_deref())?;
            let alphas = match alpha_grid {
                Some(spec) => config::parse_alpha_grid(spec)?,
                None => default_alpha_grid(),
            };
            let v = json!({ "scenarios": scenarios, "alphas": alphas });
            (Plan::Sweep { scenarios, alphas }, v, None)
        }
        Command::Train {
            alpha,
            epochs,
            seed,
            overrides,
            ..
        } => {
            let cfg = overrides.resolve(*alpha, *epochs, *seed)?;
            let v = serde_json::to_value(&cfg)?;
            let seed = cfg.seed;
            (Plan::Train(cfg), v, Some(seed))
        }
        Command::CompareAlphas {
            alphas,
            seeds,
            epochs,
            summary_epochs,
            overrides,
            ..
        } => {
            let alphas = config::parse_alpha_list(alphas)?;
            let seeds = config::parse_seed_list(seeds)?;
            let mut configs = Vec::with_capacity(alphas.len() * seeds.len());
            for &a in &alphas {
                for &s in &seeds {
                    configs.push(overrides.resolve(Some(a), Some(*epochs), Some(s))?);
                }
            }
            let summary_epochs = match summary_epochs {
                Some(spec) => config::parse_seed_list(spec)?
                    .into_iter()
                    .map(|e| e as usize)
                    .collect(),
                None => vec![*epochs],
            };
            let v = json!({ "runs": configs, "summary_epochs": summary_epochs });
            (
                Plan::Compare {
                    configs,
                    summary_epochs,
                },
                v,
                None,
            )
        }
    })
}

/// Executes one parsed command. The manifest is written first, including when
/// the arguments fail to resolve.
pub fn run(cli: Cli) -> CliResult<()> {
    let out = output_dir(&cli.command);
    let mut manifest = RunManifest::new(cli.command.name(), &out, None);
    let planned = plan(&cli.command);
    match &planned {
        Ok((_, cfg, seed)) => {
            manifest.config = cfg.clone();
            manifest.seed = *seed;
        }
        Err(e) => manifest.error = Some(e.to_string()),
    }
    manifest.write()?;
    let (plan, _, _) = planned?;

    match plan {
        Plan::Saddle(s) => verify::verify_saddle(&s, &out).map(drop),
        Plan::Sweep { scenarios, alphas } => {
            sweep::sweep_gradients(&scenarios, &alphas, &out).map(drop)
        }
        Plan::Train(cfg) => {
            let r = run::train_to_dir(cfg, &out, true)?;
            match r.diverged {
                Some(msg) => Err(CliError::Divergence(msg)),
                None => Ok(()),
            }
        }
        Plan::Compare {
            configs,
            summary_epochs,
        } => {
            let c = run::compare(configs, &summary_epochs, &out)?;
            let diverged: Vec<&str> = c
                .runs
                .iter()
                .filter_map(|r| r.diverged.as_deref())
                .collect();
            if diverged.is_empty() {
                Ok(())
            } else {
                Err(CliError::Divergence(diverged.join("; ")))
            }
        }
    }
}
