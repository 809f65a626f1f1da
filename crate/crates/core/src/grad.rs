//! Analytic gradients of the value function with respect to the soft decision
//! and the generator probability, with a finite-difference direction check and
//! α-sweep emission.
//!
//! Both gradients are the proportional forms: the positive factor coming from
//! the outer `log`/power-mean chain rule is dropped. They carry the correct
//! sign and direction, not the exact magnitude of `∂V/∂·`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AganError, Result};
use crate::renyi::{value_function, AlphaOrder, PairedSampleWeights, Regime, SoftDecision};

/// Norms below this are treated as a zero gradient by [`finite_difference_check`].
pub const ZERO_GRADIENT_NORM: f64 = 1e-8;

fn check_point(pr: f64, pg: f64, d: f64) -> Result<()> {
    if !(pr >= 0.0 && pg >= 0.0 && pr + pg > 0.0 && pr.is_finite() && pg.is_finite()) {
        return Err(AganError::InvalidArgument(format!(
            "need pr, pg ≥ 0 with pr + pg > 0, got ({pr}, {pg})"
        )));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(AganError::InvalidArgument(format!(
            "soft decision {d} outside (0, 1)"
        )));
    }
    Ok(())
}

/// `P(r|x)·D^(-1/α) − P(g|x)·(1−D)^(-1/α)`.
pub fn grad_wrt_discriminator(alpha: AlphaOrder, pr: f64, pg: f64, d: f64) -> Result<f64> {
    check_point(pr, pg, d)?;
    let wr = pr / (pr + pg);
    let wg = pg / (pr + pg);
    match alpha.regime() {
        Regime::Zero => Err(AganError::UnsupportedOrder {
            op: "grad_wrt_discriminator",
            alpha: 0.0,
        }),
        Regime::Infinite => Ok(wr - wg),
        Regime::NearOne | Regime::Finite => {
            let inv = 1.0 / alpha.value();
            Ok(wr * (-inv * d.ln()).exp() - wg * (-inv * (1.0 - d).ln()).exp())
        }
    }
}

/// `α/(α−1) · pr/(pr+pg)² · ((1−D)^p − D^p)` with `p = (α−1)/α`.
///
/// Inside the α = 1 window the limit `pr/(pr+pg)² · (log(1−D) − log D)` is used.
pub fn grad_wrt_generator(alpha: AlphaOrder, pr: f64, pg: f64, d: f64) -> Result<f64> {
    check_point(pr, pg, d)?;
    let scale = pr / ((pr + pg) * (pr + pg));
    let (ln_d, ln_1d) = (d.ln(), (1.0 - d).ln());
    match alpha.regime() {
        Regime::Zero => Err(AganError::UnsupportedOrder {
            op: "grad_wrt_generator",
            alpha: 0.0,
        }),
        Regime::Infinite => Ok(scale * (1.0 - 2.0 * d)),
        Regime::NearOne => Ok(scale * (ln_1d - ln_d)),
        Regime::Finite => {
            let a = alpha.value();
            let p = alpha.exponent();
            // (1−D)^p − D^p = D^p · expm1(p·(log(1−D) − log D)); stable for p near 0.
            let bracket = (p * ln_d).exp() * (p * (ln_1d - ln_d)).exp_m1();
            Ok(a / (a - 1.0) * scale * bracket)
        }
    }
}

/// Compares the analytic discriminator gradient against central differences
/// of the exact value function and returns `1 − cos θ` between the two vectors.
///
/// Two vectors below [`ZERO_GRADIENT_NORM`] compare equal (0); a zero vector
/// against a non-zero one scores 1.
pub fn finite_difference_check(
    alpha: AlphaOrder,
    w: &PairedSampleWeights,
    d: &SoftDecision,
    h: f64,
) -> Result<f64> {
    if !(1e-8..=1e-3).contains(&h) {
        return Err(AganError::InvalidArgument(format!(
            "step {h} outside [1e-8, 1e-3]"
        )));
    }
    if w.len() != d.len() {
        return Err(AganError::Dimension {
            expected: w.len(),
            found: d.len(),
        });
    }
    let delta = d.delta();
    let base = d.values().to_vec();
    let mut numeric = Vec::with_capacity(base.len());
    let mut analytic = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        if base[i] - h < delta || base[i] + h > 1.0 - delta {
            return Err(AganError::InvalidArgument(format!(
                "D[{i}] = {} too close to the clamp bound for step {h}",
                base[i]
            )));
        }
        let mut plus = base.clone();
        plus[i] += h;
        let mut minus = base.clone();
        minus[i] -= h;
        let vp = value_function(alpha, w, &SoftDecision::with_delta(plus, delta)?)?;
        let vm = value_function(alpha, w, &SoftDecision::with_delta(minus, delta)?)?;
        numeric.push((vp - vm) / (2.0 * h));
        analytic.push(grad_wrt_discriminator(
            alpha,
            w.pr()[i],
            w.pg()[i],
            base[i],
        )?);
    }
    Ok(one_minus_cosine(&analytic, &numeric))
}

pub(crate) fn one_minus_cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    match (na < ZERO_GRADIENT_NORM, nb < ZERO_GRADIENT_NORM) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            (1.0 - dot / (na * nb)).max(0.0)
        }
    }
}

/// One sample's `(P_r(x), P_g(x), D(x))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub pr: f64,
    pub pg: f64,
    pub d: f64,
}

impl Scenario {
    pub fn new(pr: f64, pg: f64, d: f64) -> Result<Self> {
        check_point(pr, pg, d)?;
        Ok(Self { pr, pg, d })
    }

    /// The four plotted legend combinations `P_g ∈ {0.2, 0.8} × D ∈ {0.4, 0.6}`.
    ///
    /// The plotted curves leave `P_r` implicit; `P_r = 0.3` reproduces their
    /// endpoints exactly (generator gradient 1 and 25/121 at α = 0.5).
    pub fn plotted() -> Vec<Self> {
        let mut out = Vec::with_capacity(4);
        for pg in [0.2, 0.8] {
            for d in [0.4, 0.6] {
                out.push(Self { pr: 0.3, pg, d });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientFamily {
    Discriminator,
    Generator,
}

impl fmt::Display for GradientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Discriminator => "discriminator",
            Self::Generator => "generator",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientSweepRow {
    pub family: GradientFamily,
    pub alpha: f64,
    pub scenario: Scenario,
    pub grad_value: f64,
}

/// `0.01 + k` for `k = 0..100`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..100).map(|k| 0.01 + k as f64).collect()
}

/// Both gradient families for every scenario over the α grid, discriminator
/// rows first, each family ordered by scenario then α.
pub fn sweep_alpha(scenarios: &[Scenario], alphas: &[f64]) -> Result<Vec<GradientSweepRow>> {
    let orders = alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a <= 100.0) {
                return Err(AganError::InvalidArgument(format!(
                    "sweep order {a} outside (0, 100]"
                )));
            }
            AlphaOrder::new(a)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(2 * scenarios.len() * orders.len());
    for family in [GradientFamily::Discriminator, GradientFamily::Generator] {
        for s in scenarios {
            for alpha in &orders {
                let grad_value = match family {
                    GradientFamily::Discriminator => {
                        grad_wrt_discriminator(*alpha, s.pr, s.pg, s.d)?
                    }
                    GradientFamily::Generator => grad_wrt_generator(*alpha, s.pr, s.pg, s.d)?,
                };
                rows.push(GradientSweepRow {
                    family,
                    alpha: alpha.value(),
                    scenario: *s,
                    grad_value,
                });
            }
        }
    }
    Ok(rows)
}
