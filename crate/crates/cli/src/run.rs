//! `train` and `compare-alphas`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use alphagan_core::nn::save_checkpoint;
use alphagan_core::report::{fmt_f64, histogram_csv, metrics_csv, write_text};
use alphagan_core::train::{MetricsRecord, TrainConfig, Trainer};
use alphagan_core::AganError;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const WINRATE_FILE: &str = "winrate.csv";

pub struct RunResult {
    pub config: TrainConfig,
    pub metrics: Vec<MetricsRecord>,
    /// Divergence diagnostic, if the run aborted.
    pub diverged: Option<String>,
}

/// Trains one config and writes its metrics, histograms and checkpoints under
/// `out`. A divergence still writes the metrics gathered so far.
pub fn train_to_dir(config: TrainConfig, out: &Path, checkpoints: bool) -> CliResult<RunResult> {
    let mut trainer = Trainer::new(config.clone())?;
    let outcome = trainer.run();
    write_text(&out.join(METRICS_FILE), &metrics_csv(trainer.metrics()))?;
    for h in trainer.histograms() {
        write_text(
            &out.join("histograms")
                .join(format!("epoch_{:08}.csv", h.epoch)),
            &histogram_csv(&h.bins),
        )?;
    }
    let diverged = match outcome {
        Ok(()) => None,
        Err(e @ AganError::Divergence { .. }) => Some(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    if checkpoints && diverged.is_none() {
        let (d_opt, g_opt) = trainer.optimizers();
        save_checkpoint(
            &out.join("discriminator.ckpt"),
            trainer.discriminator(),
            d_opt,
        )?;
        save_checkpoint(&out.join("generator.ckpt"), trainer.generator(), g_opt)?;
    }
    Ok(RunResult {
        config,
        metrics: trainer.metrics().to_vec(),
        diverged,
    })
}

pub fn run_dir_name(alpha: f64, seed: u64) -> String {
    format!("alpha_{alpha}_seed_{seed}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub alpha: f64,
    pub seed: u64,
    pub epoch: usize,
    pub wasserstein1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WinRate {
    pub alpha: f64,
    pub epoch: usize,
    pub wins: usize,
    pub trials: usize,
}

impl WinRate {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.wins as f64 / self.trials as f64
        }
    }
}

pub struct Comparison {
    pub runs: Vec<RunResult>,
    pub summary: Vec<SummaryRow>,
    pub win_rates: Vec<WinRate>,
}

/// W1 at `epoch`, or NaN if the run never recorded it (e.g. it diverged first).
fn w1_at(run: &RunResult, epoch: usize) -> f64 {
    run.metrics
        .iter()
        .find(|m| m.epoch == epoch)
        .map_or(f64::NAN, |m| m.wasserstein1)
}

/// Runs every config (in parallel, one per worker), then summarizes W1 at the
/// given epochs and each α's win rate against α = 1 on matching seeds.
pub fn compare(
    configs: Vec<TrainConfig>,
    summary_epochs: &[usize],
    out: &Path,
) -> CliResult<Comparison> {
    for c in &configs {
        for &e in summary_epochs {
            if e > c.epochs || (e % c.record_interval != 0 && e != c.epochs) {
                return Err(CliError::Usage(format!(
                    "summary epoch {e} is not recorded (epochs {}, record interval {})",
                    c.epochs, c.record_interval
                )));
            }
        }
    }
    let runs: Vec<RunResult> = configs
        .into_par_iter()
        .map(|c| {
            let dir: PathBuf = out.join(run_dir_name(c.alpha.value(), c.seed));
            train_to_dir(c, &dir, false)
        })
        .collect::<CliResult<_>>()?;

    let mut summary = Vec::new();
    for r in &runs {
        for &e in summary_epochs {
            summary.push(SummaryRow {
                alpha: r.config.alpha.value(),
                seed: r.config.seed,
                epoch: e,
                wasserstein1: w1_at(r, e),
            });
        }
    }
    let mut alphas: Vec<f64> = Vec::new();
    for r in &runs {
        if !alphas.contains(&r.config.alpha.value()) {
            alphas.push(r.config.alpha.value());
        }
    }
    let mut win_rates = Vec::new();
    for &a in alphas.iter().filter(|&&a| a != 1.0) {
        for &e in summary_epochs {
            let mut wr = WinRate {
                alpha: a,
                epoch: e,
                wins: 0,
                trials: 0,
            };
            for r in runs.iter().filter(|r| r.config.alpha.value() == a) {
                let baseline = runs
                    .iter()
                    .find(|b| b.config.alpha.value() == 1.0 && b.config.seed == r.config.seed);
                if let Some(b) = baseline {
                    let (x, y) = (w1_at(r, e), w1_at(b, e));
                    if x.is_finite() && y.is_finite() {
                        wr.trials += 1;
                        wr.wins += usize::from(x < y);
                    }
                }
            }
            win_rates.push(wr);
        }
    }

    let mut s = String::from("alpha,seed,epoch,wasserstein1\n");
    for r in &summary {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(r.alpha),
            r.seed,
            r.epoch,
            fmt_f64(r.wasserstein1)
        );
    }
    write_text(&out.join(SUMMARY_FILE), &s)?;
    let mut w = String::from("alpha,epoch,wins,trials,win_rate\n");
    for r in &win_rates {
        let _ = writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.alpha),
            r.epoch,
            r.wins,
            r.trials,
            fmt_f64(r.rate())
        );
    }
    write_text(&out.join(WINRATE_FILE), &w)?;

    Ok(Comparison {
        runs,
        summary,
        win_rates,
    })
}
