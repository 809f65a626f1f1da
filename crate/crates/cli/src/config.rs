//! Flat `key = value` config files and flag overrides for training runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use alphagan_core::nn::OptimizerKind;
use alphagan_core::train::{DataSource, TrainConfig};
use alphagan_core::AlphaOrder;
use clap::{Args, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataKind {
    Gaussian,
    Mnist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Sgd,
    Adam,
}

/// Training knobs shared by `train` and `compare-alphas`. Every key may also
/// appear in the config file (dashes or underscores); flags win.
#[derive(Clone, Debug, Default, Args)]
pub struct TrainOverrides {
    /// INI-style config file with one `key = value` per line.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long)]
    pub hidden_width: Option<usize>,
    #[arg(long)]
    pub d_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerArg>,
    #[arg(long)]
    pub adam_beta1: Option<f64>,
    #[arg(long)]
    pub adam_beta2: Option<f64>,
    /// Mean of the real Gaussian.
    #[arg(long, allow_hyphen_values = true)]
    pub mean: Option<f64>,
    /// Standard deviation of the real Gaussian.
    #[arg(long)]
    pub std: Option<f64>,
    /// IDX image file for `--data mnist`.
    #[arg(long)]
    pub mnist_path: Option<PathBuf>,
    #[arg(long)]
    pub max_images: Option<usize>,
    #[arg(long)]
    pub record_interval: Option<usize>,
    #[arg(long)]
    pub histogram_interval: Option<usize>,
    #[arg(long)]
    pub eval_samples: Option<usize>,
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

/// Parses `key = value` lines; `#`/`;` comments, blank lines and `[section]`
/// headers are ignored.
pub fn parse_ini(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty()
            || line.starts_with('#')
            || line.starts_with(';')
            || line.starts_with('[')
        {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", no + 1))
        })?;
        map.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("bad value for {key}: {v:?}")))
}

impl TrainOverrides {
    /// Config-file entries overlaid with the flags that were given.
    fn merged(&self, extra: &[(&str, Option<String>)]) -> CliResult<BTreeMap<String, String>> {
        let mut map = match &self.config {
            Some(path) => parse_ini(&fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        let flags: [(&str, Option<String>); 16] = [
            (
                "data",
                self.data.map(|d| {
                    if d == DataKind::Mnist {
                        "mnist"
                    } else {
                        "gaussian"
                    }
                    .into()
                }),
            ),
            ("batch_size", self.batch_size.map(|v| v.to_string())),
            ("learning_rate", self.learning_rate.map(|v| v.to_string())),
            ("latent_dim", self.latent_dim.map(|v| v.to_string())),
            ("hidden_width", self.hidden_width.map(|v| v.to_string())),
            ("d_steps", self.d_steps.map(|v| v.to_string())),
            (
                "optimizer",
                self.optimizer.map(|o| {
                    if o == OptimizerArg::Adam {
                        "adam"
                    } else {
                        "sgd"
                    }
                    .into()
                }),
            ),
            ("adam_beta1", self.adam_beta1.map(|v| v.to_string())),
            ("adam_beta2", self.adam_beta2.map(|v| v.to_string())),
            ("mean", self.mean.map(|v| v.to_string())),
            ("std", self.std.map(|v| v.to_string())),
            (
                "mnist_path",
                self.mnist_path.as_ref().map(|p| p.display().to_string()),
            ),
            ("max_images", self.max_images.map(|v| v.to_string())),
            (
                "record_interval",
                self.record_interval.map(|v| v.to_string()),
            ),
            (
                "histogram_interval",
                self.histogram_interval.map(|v| v.to_string()),
            ),
            ("eval_samples", self.eval_samples.map(|v| v.to_string())),
        ];
        for (k, v) in flags.into_iter().chain(extra.iter().cloned()) {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
        Ok(map)
    }

    /// Resolves a full config: data-source defaults, then file keys, then flags.
    pub fn resolve(
        &self,
        alpha: Option<AlphaOrder>,
        epochs: Option<usize>,
        seed: Option<u64>,
    ) -> CliResult<TrainConfig> {
        let map = self.merged(&[
            ("alpha", alpha.map(|a| a.to_string())),
            ("epochs", epochs.map(|e| e.to_string())),
            ("seed", seed.map(|s| s.to_string())),
        ])?;
        let get = |k: &str| map.get(k).map(String::as_str);
        let alpha: AlphaOrder = match get("alpha") {
            Some(v) => v.parse()?,
            None => AlphaOrder::new(1.0)?,
        };
        let seed = get("seed")
            .map(|v| parse_value("seed", v))
            .transpose()?
            .unwrap_or(0);
        let mut cfg = match get("data").unwrap_or("gaussian") {
            "gaussian" => TrainConfig::gaussian(alpha, seed),
            "mnist" => {
                let path = get("mnist_path")
                    .ok_or_else(|| CliError::Usage("mnist data needs mnist_path".into()))?;
                let max = get("max_images")
                    .map(|v| parse_value("max_images", v))
                    .transpose()?
                    .unwrap_or(512);
                TrainConfig::mnist(alpha, seed, PathBuf::from(path), max)
            }
            other => return Err(CliError::Usage(format!("unknown data source {other:?}"))),
        };
        for (k, v) in &map {
            match k.as_str() {
                "alpha" | "seed" | "data" | "mnist_path" | "max_images" => {}
                "epochs" => cfg.epochs = parse_value(k, v)?,
                "batch_size" => cfg.batch_size = parse_value(k, v)?,
                "learning_rate" => cfg.learning_rate = parse_value(k, v)?,
                "latent_dim" => cfg.latent_dim = parse_value(k, v)?,
                "hidden_width" => cfg.hidden_width = parse_value(k, v)?,
                "d_steps" | "d_steps_per_g_step" => cfg.d_steps_per_g_step = parse_value(k, v)?,
                "optimizer" => {
                    cfg.optimizer = match v.to_ascii_lowercase().as_str() {
                        "sgd" => OptimizerKind::Sgd,
                        "adam" => OptimizerKind::Adam,
                        _ => return Err(CliError::Usage(format!("unknown optimizer {v:?}"))),
                    }
                }
                "adam_beta1" => cfg.adam_beta1 = parse_value(k, v)?,
                "adam_beta2" => cfg.adam_beta2 = parse_value(k, v)?,
                "mean" | "std" => {
                    let DataSource::Gaussian1D { mean, std } = &mut cfg.data_source else {
                        return Err(CliError::Usage(format!(
                            "{k} only applies to gaussian data"
                        )));
                    };
                    *if k == "mean" { mean } else { std } = parse_value(k, v)?;
                }
                "record_interval" => cfg.record_interval = parse_value(k, v)?,
                "histogram_interval" => cfg.histogram_interval = parse_value(k, v)?,
                "eval_samples" => cfg.eval_samples = parse_value(k, v)?,
                _ => return Err(CliError::Usage(format!("unknown config key {k:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Comma-separated orders, e.g. `0.1,1,inf`.
pub fn parse_alpha_list(spec: &str) -> CliResult<Vec<AlphaOrder>> {
    let list: Vec<AlphaOrder> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse().map_err(CliError::from))
        .collect::<CliResult<_>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("empty order list".into()));
    }
    Ok(list)
}

/// Comma-separated seeds or inclusive ranges, e.g. `0-9` or `1,5,7-8`.
pub fn parse_seed_list(spec: &str) -> CliResult<Vec<u64>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    parse_value("seed", a.trim())?,
                    parse_value("seed", b.trim())?,
                );
                if a > b {
                    return Err(CliError::Usage(format!("empty seed range {part}")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_value("seed", part)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty seed list".into()));
    }
    Ok(out)
}

/// `start:step:count` or a comma-separated list of α values.
pub fn parse_alpha_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parse_value("grid start", parts[0].trim())?;
        let step: f64 = parse_value("grid step", parts[1].trim())?;
        let count: usize = parse_value("grid count", parts[2].trim())?;
        return Ok((0..count).map(|k| start + step * k as f64).collect());
    }
    if parts.len() != 1 {
        return Err(CliError::Usage(format!(
            "grid spec {spec:?} is neither start:step:count nor a list"
        )));
    }
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value("grid value", s.trim()))
        .collect()
}
