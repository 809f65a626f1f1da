//! Alternating α-GAN training: discriminator ascent then generator descent on
//! the minibatch value function, with periodic fit metrics.

mod loss;
mod metrics;
mod mnist;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{AganError, Result};
use crate::nn::{Activation, Matrix, MlpNetwork, Optimizer, OptimizerKind, SeededRng};
use crate::renyi::{AlphaOrder, DEFAULT_DELTA};

pub use loss::{empirical_value_loss, MinibatchLoss};
pub use metrics::{histogram, ks_statistic, wasserstein1_1d, HistogramBin, HISTOGRAM_BINS};
pub use mnist::{
    encode_idx_images, load_mnist_labels, load_mnist_subset, parse_idx_images, parse_idx_labels,
    IMAGE_MAGIC, LABEL_MAGIC,
};

const STREAM_INIT: u64 = 0;
const STREAM_TRAIN: u64 = 1;
const STREAM_EVAL: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    #[serde(rename = "gaussian")]
    Gaussian1D { mean: f64, std: f64 },
    #[serde(rename = "mnist")]
    MnistSubset { path: PathBuf, max_images: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub alpha: AlphaOrder,
    pub latent_dim: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub d_steps_per_g_step: usize,
    pub optimizer: OptimizerKind,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub data_source: DataSource,
    pub hidden_width: usize,
    pub record_interval: usize,
    pub histogram_interval: usize,
    pub eval_samples: usize,
}

impl TrainConfig {
    /// 1D Gaussian N(0, 1): latent 5, lr 2e-4, batch 128, SGD, hidden width 32, 10⁴ epochs.
    pub fn gaussian(alpha: AlphaOrder, seed: u64) -> Self {
        Self {
            alpha,
            latent_dim: 5,
            batch_size: 128,
            learning_rate: 2e-4,
            epochs: 10_000,
            seed,
            d_steps_per_g_step: 1,
            optimizer: OptimizerKind::Sgd,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            data_source: DataSource::Gaussian1D {
                mean: 0.0,
                std: 1.0,
            },
            hidden_width: 32,
            record_interval: 100,
            histogram_interval: 1000,
            eval_samples: 1024,
        }
    }

    /// MNIST subset: latent 100, batch 64, Adam(2e-4, 0.5, 0.999), hidden width 128.
    pub fn mnist(alpha: AlphaOrder, seed: u64, path: PathBuf, max_images: usize) -> Self {
        Self {
            latent_dim: 100,
            batch_size: 64,
            optimizer: OptimizerKind::Adam,
            data_source: DataSource::MnistSubset { path, max_images },
            hidden_width: 128,
            epochs: 5,
            record_interval: 1,
            histogram_interval: 1,
            eval_samples: 512,
            ..Self::gaussian(alpha, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(AganError::InvalidArgument(msg));
        if self.batch_size < 2 {
            return bad(format!("batch_size {} < 2", self.batch_size));
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1".into());
        }
        if self.latent_dim < 1 || self.hidden_width < 1 {
            return bad("latent_dim and hidden_width must be positive".into());
        }
        if self.d_steps_per_g_step < 1 || self.record_interval < 1 || self.histogram_interval < 1 {
            return bad("d_steps_per_g_step and intervals must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {}", self.learning_rate));
        }
        if self.eval_samples < 2 {
            return bad("eval_samples must be at least 2".into());
        }
        if let DataSource::Gaussian1D { mean, std } = self.data_source {
            if !(mean.is_finite() && std > 0.0 && std.is_finite()) {
                return bad(format!("Gaussian N({mean}, {std}²)"));
            }
        }
        Ok(())
    }

    fn make_optimizer(&self) -> Optimizer {
        match self.optimizer {
            OptimizerKind::Sgd => Optimizer::sgd(self.learning_rate),
            OptimizerKind::Adam => {
                Optimizer::adam(self.learning_rate, self.adam_beta1, self.adam_beta2)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub epoch: usize,
    pub d_loss: f64,
    pub g_loss: f64,
    pub wasserstein1: f64,
    pub ks_stat: f64,
    pub d_flatness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramSnapshot {
    pub epoch: usize,
    pub bins: Vec<HistogramBin>,
}

enum RealData {
    Gaussian {
        mean: f64,
        std: f64,
    },
    Images {
        images: Matrix,
        order: Vec<usize>,
        cursor: usize,
    },
}

impl RealData {
    fn width(&self) -> usize {
        match self {
            RealData::Gaussian { .. } => 1,
            RealData::Images { images, .. } => images.cols(),
        }
    }

    fn sample(&mut self, rng: &mut SeededRng, n: usize) -> Matrix {
        match self {
            RealData::Gaussian { mean, std } => {
                Matrix::column((0..n).map(|_| rng.normal(*mean, *std)).collect())
            }
            RealData::Images {
                images,
                order,
                cursor,
            } => {
                if *cursor + n > order.len() {
                    rng.shuffle(order);
                    *cursor = 0;
                }
                let idx = &order[*cursor..*cursor + n];
                *cursor += n;
                images.select_rows(idx)
            }
        }
    }
}

/// One-number summary per sample used by the 1D fit metrics: the value itself,
/// or the mean pixel intensity for images.
fn summarize(samples: &Matrix) -> Vec<f64> {
    (0..samples.rows())
        .map(|r| {
            let row = samples.row(r);
            row.iter().sum::<f64>() / row.len() as f64
        })
        .collect()
}

fn column_values(m: &Matrix) -> Vec<f64> {
    m.data().to_vec()
}

/// Stateful trainer; [`train`] drives it for a whole run.
pub struct Trainer {
    config: TrainConfig,
    generator: MlpNetwork,
    discriminator: MlpNetwork,
    g_opt: Optimizer,
    d_opt: Optimizer,
    data: RealData,
    rng: SeededRng,
    eval_real: Matrix,
    eval_noise: Matrix,
    iterations_per_epoch: usize,
    epoch: usize,
    last_losses: Option<(f64, f64)>,
    metrics: Vec<MetricsRecord>,
    histograms: Vec<HistogramSnapshot>,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let mut eval_rng = SeededRng::with_stream(config.seed, STREAM_EVAL);
        let (data, eval_real, iterations_per_epoch) = match &config.data_source {
            DataSource::Gaussian1D { mean, std } => {
                let eval = Matrix::column(
                    (0..config.eval_samples)
                        .map(|_| eval_rng.normal(*mean, *std))
                        .collect(),
                );
                (
                    RealData::Gaussian {
                        mean: *mean,
                        std: *std,
                    },
                    eval,
                    1,
                )
            }
            DataSource::MnistSubset { path, max_images } => {
                let images = load_mnist_subset(path, *max_images)?;
                if images.rows() < config.batch_size {
                    return Err(AganError::InvalidArgument(format!(
                        "{} images cannot fill a batch of {}",
                        images.rows(),
                        config.batch_size
                    )));
                }
                let n_eval = config.eval_samples.min(images.rows());
                let eval = images.slice_rows(0, n_eval);
                let per_epoch = images.rows() / config.batch_size;
                let order: Vec<usize> = (0..images.rows()).collect();
                let cursor = order.len();
                (
                    RealData::Images {
                        images,
                        order,
                        cursor,
                    },
                    eval,
                    per_epoch,
                )
            }
        };
        let eval_noise = eval_rng.normal_matrix(eval_real.rows(), config.latent_dim);

        let width = data.width();
        let h = config.hidden_width;
        let mut init = SeededRng::with_stream(config.seed, STREAM_INIT);
        let g_out = if width == 1 {
            Activation::Identity
        } else {
            Activation::Sigmoid
        };
        let generator = MlpNetwork::new(
            &[config.latent_dim, h, width],
            &[Activation::ReLU, g_out],
            &mut init,
        )?;
        let discriminator = MlpNetwork::new(
            &[width, h, 1],
            &[Activation::ReLU, Activation::Sigmoid],
            &mut init,
        )?;

        Ok(Self {
            g_opt: config.make_optimizer(),
            d_opt: config.make_optimizer(),
            rng: SeededRng::with_stream(config.seed, STREAM_TRAIN),
            config,
            generator,
            discriminator,
            data,
            eval_real,
            eval_noise,
            iterations_per_epoch,
            epoch: 0,
            last_losses: None,
            metrics: Vec::new(),
            histograms: Vec::new(),
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn generator(&self) -> &MlpNetwork {
        &self.generator
    }

    pub fn discriminator(&self) -> &MlpNetwork {
        &self.discriminator
    }

    pub fn generator_mut(&mut self) -> &mut MlpNetwork {
        &mut self.generator
    }

    pub fn discriminator_mut(&mut self) -> &mut MlpNetwork {
        &mut self.discriminator
    }

    pub fn optimizers(&self) -> (&Optimizer, &Optimizer) {
        (&self.d_opt, &self.g_opt)
    }

    pub fn metrics(&self) -> &[MetricsRecord] {
        &self.metrics
    }

    pub fn histograms(&self) -> &[HistogramSnapshot] {
        &self.histograms
    }

    pub fn eval_real(&self) -> &Matrix {
        &self.eval_real
    }

    fn diverged(&self, detail: impl Into<String>) -> AganError {
        AganError::Divergence {
            epoch: self.epoch + 1,
            alpha: self.config.alpha.value(),
            detail: detail.into(),
        }
    }

    fn loss_or_diverge(&self, d_out: &Matrix, b: usize) -> Result<MinibatchLoss> {
        let out = d_out.data();
        if out.iter().any(|x| !x.is_finite()) {
            return Err(self.diverged("discriminator produced non-finite outputs"));
        }
        match empirical_value_loss(self.config.alpha, &out[..b], &out[b..]) {
            Ok(l) if l.value.is_finite() => Ok(l),
            Ok(l) => Err(self.diverged(format!("minibatch value {}", l.value))),
            Err(AganError::NumericOverflow(m)) => Err(self.diverged(m)),
            Err(e) => Err(e),
        }
    }

    /// One discriminator phase (`d_steps_per_g_step` ascents) and one generator descent.
    /// Returns `(d_loss, g_loss)` with `d_loss = −V` and `g_loss = V`.
    fn iteration(&mut self) -> Result<(f64, f64)> {
        let b = self.config.batch_size;
        let mut real = Matrix::zeros(0, self.data.width());
        let mut d_loss = f64::NAN;
        for _ in 0..self.config.d_steps_per_g_step {
            real = self.data.sample(&mut self.rng, b);
            let z = self.rng.normal_matrix(b, self.config.latent_dim);
            let fake = self.generator.forward(&z)?;
            let d_out = self.discriminator.forward(&real.vstack(&fake)?)?;
            let loss = self.loss_or_diverge(&d_out, b)?;
            // Ascent on V: hand the optimizer −∂V/∂D.
            let upstream: Vec<f64> = loss
                .grad_real
                .iter()
                .chain(&loss.grad_fake)
                .map(|g| -g)
                .collect();
            self.discriminator.backward(&Matrix::column(upstream))?;
            self.d_opt.step(&mut self.discriminator)?;
            d_loss = -loss.value;
        }

        let z = self.rng.normal_matrix(b, self.config.latent_dim);
        let fake = self.generator.forward(&z)?;
        if fake.data().iter().any(|x| !x.is_finite()) {
            return Err(self.diverged("generator produced non-finite samples"));
        }
        let d_out = self.discriminator.forward(&real.vstack(&fake)?)?;
        let loss = self.loss_or_diverge(&d_out, b)?;
        let upstream: Vec<f64> = loss
            .grad_real
            .iter()
            .chain(&loss.grad_fake)
            .copied()
            .collect();
        let d_input = self.discriminator.backward(&Matrix::column(upstream))?;
        self.generator.backward(&d_input.slice_rows(b, 2 * b))?;
        self.g_opt.step(&mut self.generator)?;
        Ok((d_loss, loss.value))
    }

    /// Runs one epoch: a single iteration for Gaussian data, one pass over the
    /// image subset otherwise.
    pub fn train_epoch(&mut self) -> Result<()> {
        let mut last = (f64::NAN, f64::NAN);
        for _ in 0..self.iterations_per_epoch {
            last = self.iteration()?;
        }
        self.last_losses = Some(last);
        self.epoch += 1;
        Ok(())
    }

    /// Generated samples for the fixed evaluation noise.
    pub fn generate_eval(&mut self) -> Result<Matrix> {
        let noise = self.eval_noise.clone();
        self.generator.forward(&noise)
    }

    /// Measures the current state against the fixed evaluation set. Before any
    /// training the losses are those of the evaluation set itself.
    pub fn evaluate(&mut self) -> Result<MetricsRecord> {
        let generated = self.generate_eval()?;
        let real = self.eval_real.clone();
        let d_real = column_values(&self.discriminator.forward(&real)?);
        let (d_loss, g_loss) = match self.last_losses {
            Some(l) => l,
            None => {
                let d_fake = column_values(&self.discriminator.forward(&generated)?);
                let v = empirical_value_loss(self.config.alpha, &d_real, &d_fake)?.value;
                (-v, v)
            }
        };
        let (rs, gs) = (summarize(&real), summarize(&generated));
        let d_flatness = d_real
            .iter()
            .map(|d| (d.clamp(DEFAULT_DELTA, 1.0 - DEFAULT_DELTA) - 0.5).abs())
            .sum::<f64>()
            / d_real.len() as f64;
        Ok(MetricsRecord {
            epoch: self.epoch,
            d_loss,
            g_loss,
            wasserstein1: wasserstein1_1d(&rs, &gs)?,
            ks_stat: ks_statistic(&rs, &gs)?,
            d_flatness,
        })
    }

    pub fn histogram_snapshot(&mut self) -> Result<HistogramSnapshot> {
        let generated = summarize(&self.generate_eval()?);
        let real = summarize(&self.eval_real);
        Ok(HistogramSnapshot {
            epoch: self.epoch,
            bins: histogram(&real, &generated, HISTOGRAM_BINS)?,
        })
    }

    /// Trains to `config.epochs`, recording metrics every `record_interval`
    /// epochs and at the last epoch, histograms every `histogram_interval`.
    /// On error the records gathered so far stay available.
    pub fn run(&mut self) -> Result<()> {
        while self.epoch < self.config.epochs {
            self.train_epoch()?;
            let last = self.epoch == self.config.epochs;
            if self.epoch.is_multiple_of(self.config.record_interval) || last {
                let m = self.evaluate()?;
                self.metrics.push(m);
            }
            if self.epoch.is_multiple_of(self.config.histogram_interval) {
                let h = self.histogram_snapshot()?;
                self.histograms.push(h);
            }
        }
        Ok(())
    }
}

pub struct TrainOutcome {
    pub generator: MlpNetwork,
    pub discriminator: MlpNetwork,
    pub generator_optimizer: Optimizer,
    pub discriminator_optimizer: Optimizer,
    pub metrics: Vec<MetricsRecord>,
    pub histograms: Vec<HistogramSnapshot>,
}

pub fn train(config: TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(config)?;
    trainer.run()?;
    Ok(TrainOutcome {
        generator: trainer.generator,
        discriminator: trainer.discriminator,
        generator_optimizer: trainer.g_opt,
        discriminator_optimizer: trainer.d_opt,
        metrics: trainer.metrics,
        histograms: trainer.histograms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(alpha: f64, seed: u64, epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            record_interval: 10,
            ..TrainConfig::gaussian(AlphaOrder::new(alpha).unwrap(), seed)
        }
    }

    #[test]
    fn config_validation() {
        let mut c = quick(1.0, 1, 10);
        c.batch_size = 1;
        assert!(c.validate().is_err());
        let mut c = quick(1.0, 1, 10);
        c.epochs = 0;
        assert!(c.validate().is_err());
        assert!(quick(1.0, 1, 10).validate().is_ok());
    }

    #[test]
    fn record_cadence() {
        let out = train(quick(1.0, 3, 25)).unwrap();
        let epochs: Vec<_> = out.metrics.iter().map(|m| m.epoch).collect();
        assert_eq!(epochs, vec![10, 20, 25]);
        for m in &out.metrics {
            assert!(m.wasserstein1 >= 0.0 && (0.0..=1.0).contains(&m.ks_stat));
            assert!((0.0..=0.5 + DEFAULT_DELTA).contains(&m.d_flatness));
        }
    }

    #[test]
    fn snapshot_before_training_reflects_initial_networks() {
        let mut t = Trainer::new(quick(0.5, 9, 10)).unwrap();
        let m = t.evaluate().unwrap();
        assert_eq!(m.epoch, 0);
        let gen = summarize(&t.generate_eval().unwrap());
        let real = summarize(t.eval_real());
        assert_eq!(m.wasserstein1, wasserstein1_1d(&real, &gen).unwrap());
        let d: Vec<f64> = t
            .discriminator_mut()
            .forward(&Matrix::column(real.clone()))
            .unwrap()
            .into_vec();
        let flat = d.iter().map(|x| (x - 0.5).abs()).sum::<f64>() / d.len() as f64;
        assert!((m.d_flatness - flat).abs() < 1e-15);
    }

    #[test]
    fn identical_seeds_give_identical_records() {
        let a = train(quick(0.3, 17, 40)).unwrap();
        let b = train(quick(0.3, 17, 40)).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.generator.flat_parameters(), b.generator.flat_parameters());
        let c = train(quick(0.3, 18, 40)).unwrap();
        assert_ne!(a.metrics, c.metrics);
    }
}
