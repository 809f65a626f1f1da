//! Rényi-order value function and the information measures around it.
//!
//! The value function scores a soft decision `D(x)` against the true source
//! posterior of each sample:
//!
//! ```text
//! V_α(D) = α/(α-1) · log( (1/N) Σ_x [ w_r(x)·D(x)^p + w_g(x)·(1-D(x))^p ] ),  p = (α-1)/α
//! ```
//!
//! where `w_r`, `w_g` are the fractional chances that `x` came from the real
//! population or the generator. It is the log of a weighted power mean of the
//! discriminator's gains, so `V_α ≤ 0`, and it equals minus the Rényi
//! conditional cross entropy. Order 1 is binary cross entropy, order ∞ the log
//! of the expected 0-1 gain and order 0 the log of the worst-case gain.
//!
//! Every power is evaluated as `exp(p·log D)` and the sum is accumulated with
//! log-sum-exp, so small orders (large negative `p`) never overflow.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AganError, Result};

/// Half-width of the window around α = 1 inside which the Shannon limit is used.
pub const NEAR_ONE_WINDOW: f64 = 1e-6;

/// Orders at or above this are evaluated with the α = ∞ expressions.
pub const INFINITE_THRESHOLD: f64 = 1e8;

/// Default clamp bound keeping soft decisions away from {0, 1}.
pub const DEFAULT_DELTA: f64 = 1e-7;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Zero,
    NearOne,
    Finite,
    Infinite,
}

/// A validated Rényi order α ∈ [0, ∞].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlphaOrder {
    value: f64,
    regime: Regime,
}

impl AlphaOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(AganError::InvalidAlpha(value));
        }
        let regime = if value == 0.0 {
            Regime::Zero
        } else if value >= INFINITE_THRESHOLD {
            Regime::Infinite
        } else if (value - 1.0).abs() < NEAR_ONE_WINDOW {
            Regime::NearOne
        } else {
            Regime::Finite
        };
        Ok(Self { value, regime })
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            regime: Regime::Infinite,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The power-mean order `(α-1)/α`. Only meaningful in the `Finite` regime.
    pub fn exponent(&self) -> f64 {
        (self.value - 1.0) / self.value
    }
}

impl TryFrom<f64> for AlphaOrder {
    type Error = AganError;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AlphaOrder> for f64 {
    fn from(alpha: AlphaOrder) -> f64 {
        alpha.value
    }
}

impl FromStr for AlphaOrder {
    type Err = AganError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Self::infinite()),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| AganError::InvalidArgument(format!("not an order: {s:?}")))?;
                Self::new(v)
            }
        }
    }
}

impl fmt::Display for AlphaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// A probability vector over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(AganError::EmptyInput);
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(AganError::InvalidDistribution(format!(
                "entry {p} is not a probability"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(AganError::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(AganError::InvalidDistribution(
                "weights must be non-negative with positive total".into(),
            ));
        }
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        // Push the rounding residue onto the largest entry so the sum check holds.
        let residue = 1.0 - probs.iter().sum::<f64>();
        if let Some(max) = probs
            .iter_mut()
            .max_by(|a, b| a.partial_cmp(b).expect("finite"))
        {
            *max += residue;
        }
        Self::new(probs)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(AganError::EmptyInput);
        }
        Self::from_weights(&vec![1.0; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>())
    }
}

/// Per-sample discriminator outputs, clamped to `[δ, 1 − δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftDecision {
    values: Vec<f64>,
    delta: f64,
}

impl SoftDecision {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_delta(values, DEFAULT_DELTA)
    }

    pub fn with_delta(mut values: Vec<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.01) {
            return Err(AganError::InvalidArgument(format!(
                "clamp bound {delta} outside (0, 0.01)"
            )));
        }
        for v in values.iter_mut() {
            if v.is_nan() {
                return Err(AganError::NumericOverflow(
                    "discriminator output is NaN".into(),
                ));
            }
            *v = v.clamp(delta, 1.0 - delta);
        }
        Ok(Self { values, delta })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-sample probabilities under the real and generated distributions.
///
/// Only the fractional chances `pr/(pr+pg)` and `pg/(pr+pg)` enter the value
/// function, so weights may be given unnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedSampleWeights {
    pr: Vec<f64>,
    pg: Vec<f64>,
}

impl PairedSampleWeights {
    pub fn new(pr: Vec<f64>, pg: Vec<f64>) -> Result<Self> {
        check_len(pr.len(), pg.len())?;
        for (i, (r, g)) in pr.iter().zip(&pg).enumerate() {
            if !r.is_finite() || !g.is_finite() || *r < 0.0 || *g < 0.0 {
                return Err(AganError::InvalidInstance(format!(
                    "sample {i}: weights must be finite and non-negative"
                )));
            }
            if r + g <= 0.0 {
                return Err(AganError::InvalidInstance(format!(
                    "sample {i}: pr + pg must be positive"
                )));
            }
        }
        Ok(Self { pr, pg })
    }

    /// `n_real` samples known to be real followed by `n_fake` known to be generated.
    pub fn labelled(n_real: usize, n_fake: usize) -> Self {
        let mut pr = vec![1.0; n_real];
        pr.extend(std::iter::repeat_n(0.0, n_fake));
        let mut pg = vec![0.0; n_real];
        pg.extend(std::iter::repeat_n(1.0, n_fake));
        Self { pr, pg }
    }

    pub fn len(&self) -> usize {
        self.pr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pr.is_empty()
    }

    pub fn pr(&self) -> &[f64] {
        &self.pr
    }

    pub fn pg(&self) -> &[f64] {
        &self.pg
    }

    /// `(P(r|x), P(g|x))` for sample `i`.
    pub fn chances(&self, i: usize) -> (f64, f64) {
        let total = self.pr[i] + self.pg[i];
        (self.pr[i] / total, self.pg[i] / total)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(AganError::Dimension { expected, found });
    }
    Ok(())
}

fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(AganError::NumericOverflow(format!(
            "{what} evaluated to {value}"
        )))
    }
}

/// `log Σ exp(x_i)` over the finite-or-`-inf` terms; `-inf` for an empty sum.
pub(crate) fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn ln_weight(w: f64) -> f64 {
    if w > 0.0 {
        w.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `log S` where `S = (1/N) Σ_x [w_r D^p + w_g (1-D)^p]`, computed in log domain.
fn log_power_mean_sum(p: f64, w: &PairedSampleWeights, d: &SoftDecision) -> f64 {
    let n = w.len() as f64;
    let terms = (0..w.len()).flat_map(|i| {
        let (wr, wg) = w.chances(i);
        let di = d.values[i];
        [
            ln_weight(wr) + p * di.ln(),
            ln_weight(wg) + p * (1.0 - di).ln(),
        ]
    });
    log_sum_exp(terms) - n.ln()
}

fn check_pair(w: &PairedSampleWeights, d: &SoftDecision) -> Result<()> {
    check_len(w.len(), d.len())?;
    if w.is_empty() {
        return Err(AganError::EmptyInput);
    }
    Ok(())
}

/// The α-GAN value function `V_α(D, P_g)`.
pub fn value_function(alpha: AlphaOrder, w: &PairedSampleWeights, d: &SoftDecision) -> Result<f64> {
    check_pair(w, d)?;
    let n = w.len() as f64;
    let v = match alpha.regime() {
        Regime::Zero => d
            .values
            .iter()
            .map(|&di| di.min(1.0 - di))
            .fold(f64::INFINITY, f64::min)
            .ln(),
        Regime::NearOne => {
            (0..w.len())
                .map(|i| {
                    let (wr, wg) = w.chances(i);
                    let di = d.values[i];
                    xlogy(wr, di) + xlogy(wg, 1.0 - di)
                })
                .sum::<f64>()
                / n
        }
        Regime::Infinite => ((0..w.len())
            .map(|i| {
                let (wr, wg) = w.chances(i);
                wr * d.values[i] + wg * (1.0 - d.values[i])
            })
            .sum::<f64>()
            / n)
            .ln(),
        Regime::Finite => {
            let a = alpha.value();
            a / (a - 1.0) * log_power_mean_sum(alpha.exponent(), w, d)
        }
    };
    ensure_finite(v, "value function")
}

/// `V_α` together with its exact gradient with respect to every `D(x)`.
///
/// At order 0 the gradient is the subgradient of the active minimum term.
pub fn value_and_gradient(
    alpha: AlphaOrder,
    w: &PairedSampleWeights,
    d: &SoftDecision,
) -> Result<(f64, Vec<f64>)> {
    let value = value_function(alpha, w, d)?;
    let n = w.len() as f64;
    let mut grad = vec![0.0; w.len()];
    match alpha.regime() {
        Regime::Zero => {
            let (idx, _) = d
                .values
                .iter()
                .map(|&di| di.min(1.0 - di))
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, g)| if g < best.1 { (i, g) } else { best },
                );
            let di = d.values[idx];
            grad[idx] = if di < 0.5 {
                1.0 / di
            } else if di > 0.5 {
                -1.0 / (1.0 - di)
            } else {
                0.0
            };
        }
        Regime::NearOne => {
            for (i, g) in grad.iter_mut().enumerate() {
                let (wr, wg) = w.chances(i);
                let di = d.values[i];
                *g = (wr / di - wg / (1.0 - di)) / n;
            }
        }
        Regime::Infinite => {
            let s = value.exp();
            for (i, g) in grad.iter_mut().enumerate() {
                let (wr, wg) = w.chances(i);
                *g = (wr - wg) / (n * s);
            }
        }
        Regime::Finite => {
            // α/(α-1) · p = 1, so ∂V/∂D = (1/N)·(w_r D^(p-1) − w_g (1-D)^(p-1)) / S.
            let p = alpha.exponent();
            let log_s = log_power_mean_sum(p, w, d);
            for (i, g) in grad.iter_mut().enumerate() {
                let (wr, wg) = w.chances(i);
                let di = d.values[i];
                let real = if wr > 0.0 {
                    wr * ((p - 1.0) * di.ln() - log_s).exp()
                } else {
                    0.0
                };
                let fake = if wg > 0.0 {
                    wg * ((p - 1.0) * (1.0 - di).ln() - log_s).exp()
                } else {
                    0.0
                };
                *g = (real - fake) / n;
            }
        }
    }
    for g in &grad {
        ensure_finite(*g, "value-function gradient")?;
    }
    Ok((value, grad))
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Rényi conditional cross entropy `H_α(P_{Z|X}, P̂_{Z|X}) = −V_α`.
pub fn renyi_conditional_cross_entropy(
    alpha: AlphaOrder,
    w: &PairedSampleWeights,
    d: &SoftDecision,
) -> Result<f64> {
    value_function(alpha, w, d).map(|v| -v)
}

/// Arimoto conditional entropy of the sample-source posterior.
pub fn arimoto_conditional_entropy(alpha: AlphaOrder, w: &PairedSampleWeights) -> Result<f64> {
    if w.is_empty() {
        return Err(AganError::EmptyInput);
    }
    let n = w.len() as f64;
    let h = match alpha.regime() {
        Regime::Zero => {
            return Err(AganError::UnsupportedOrder {
                op: "arimoto_conditional_entropy",
                alpha: 0.0,
            })
        }
        Regime::NearOne => {
            -(0..w.len())
                .map(|i| {
                    let (wr, wg) = w.chances(i);
                    xlogy(wr, wr) + xlogy(wg, wg)
                })
                .sum::<f64>()
                / n
        }
        Regime::Infinite => -((0..w.len())
            .map(|i| {
                let (wr, wg) = w.chances(i);
                wr.max(wg)
            })
            .sum::<f64>()
            / n)
            .ln(),
        Regime::Finite => {
            let a = alpha.value();
            // log ‖(w_r, w_g)‖_α per sample, then log of their mean.
            let log_norms = (0..w.len()).map(|i| {
                let (wr, wg) = w.chances(i);
                log_sum_exp([a * ln_weight(wr), a * ln_weight(wg)]) / a
            });
            a / (1.0 - a) * (log_sum_exp(log_norms) - n.ln())
        }
    };
    ensure_finite(h, "Arimoto conditional entropy")
}

/// Power-mean classification loss
/// `L_α = ((1/N) Σ_{x,y} P(y|x) · P̂(y|x)^((α-1)/α))^(α/(1-α))`.
///
/// Predicted probabilities are floored at [`DEFAULT_DELTA`] before use.
pub fn alpha_classification_loss(
    alpha: AlphaOrder,
    cond: &[FiniteDistribution],
    pred: &[FiniteDistribution],
) -> Result<f64> {
    check_len(cond.len(), pred.len())?;
    if cond.is_empty() {
        return Err(AganError::EmptyInput);
    }
    for (c, p) in cond.iter().zip(pred) {
        check_len(c.len(), p.len())?;
    }
    let n = cond.len() as f64;
    let pairs = || {
        cond.iter()
            .zip(pred)
            .flat_map(|(c, p)| c.probs().iter().zip(p.probs()))
            .filter(|(py, _)| **py > 0.0)
            .map(|(py, qy)| (*py, qy.max(DEFAULT_DELTA)))
    };
    let loss = match alpha.regime() {
        Regime::Zero => {
            return Err(AganError::UnsupportedOrder {
                op: "alpha_classification_loss",
                alpha: 0.0,
            })
        }
        Regime::NearOne => (-pairs().map(|(py, qy)| py * qy.ln()).sum::<f64>() / n).exp(),
        Regime::Infinite => n / pairs().map(|(py, qy)| py * qy).sum::<f64>(),
        Regime::Finite => {
            let a = alpha.value();
            let p = alpha.exponent();
            let log_s = log_sum_exp(pairs().map(|(py, qy)| py.ln() + p * qy.ln())) - n.ln();
            (a / (1.0 - a) * log_s).exp()
        }
    };
    ensure_finite(loss, "α-loss")
}
