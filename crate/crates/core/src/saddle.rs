//! The two stages of `min_{P_g} max_D V_α` on a finite alphabet.
//!
//! The inner maximum has the closed form `D*(x) = P_r^α / (P_r^α + P_g^α)`
//! and its value is minus the Arimoto conditional entropy of the source
//! posterior. The outer minimum sits at `P_g = P_r` with value `−log 2`.
//! Brute-force oracles for both stages live here too.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{AganError, Result};
use crate::grad::grad_wrt_generator;
use crate::renyi::{
    value_function, AlphaOrder, FiniteDistribution, PairedSampleWeights, Regime, SoftDecision,
    DEFAULT_DELTA,
};

/// Largest alphabet accepted by the brute-force search on grids finer than 100 points.
pub const BRUTE_FORCE_MAX_ALPHABET: usize = 8;

/// A real/generated distribution pair over a shared finite alphabet.
///
/// Symbols carrying no mass under either distribution are dropped; the value
/// function averages uniformly over the remaining symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGanInstance {
    pr: FiniteDistribution,
    pg: FiniteDistribution,
    support: Vec<usize>,
}

impl FiniteGanInstance {
    pub fn new(pr: FiniteDistribution, pg: FiniteDistribution) -> Result<Self> {
        if pr.len() != pg.len() {
            return Err(AganError::Dimension {
                expected: pr.len(),
                found: pg.len(),
            });
        }
        let support = (0..pr.len())
            .filter(|&i| pr.probs()[i] + pg.probs()[i] > 0.0)
            .collect();
        Ok(Self { pr, pg, support })
    }

    pub fn alphabet_size(&self) -> usize {
        self.pr.len()
    }

    pub fn pr(&self) -> &FiniteDistribution {
        &self.pr
    }

    pub fn pg(&self) -> &FiniteDistribution {
        &self.pg
    }

    /// Original symbol indices that survive the support filter.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Per-symbol weights over the support, in support order.
    pub fn weights(&self) -> PairedSampleWeights {
        let pr = self.support.iter().map(|&i| self.pr.probs()[i]).collect();
        let pg = self.support.iter().map(|&i| self.pg.probs()[i]).collect();
        PairedSampleWeights::new(pr, pg).expect("support symbols carry positive mass")
    }
}

fn dstar_symbol(alpha: AlphaOrder, pr: f64, pg: f64) -> Result<f64> {
    if pr + pg <= 0.0 {
        return Err(AganError::InvalidInstance(
            "symbol with P_r = P_g = 0".into(),
        ));
    }
    Ok(match alpha.regime() {
        Regime::Zero => 0.5,
        Regime::Infinite => match pr.partial_cmp(&pg).expect("finite") {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => 0.5,
        },
        _ if pr == 0.0 => 0.0,
        _ if pg == 0.0 => 1.0,
        // 1 / (1 + (P_g/P_r)^α)
        _ => 1.0 / (1.0 + (alpha.value() * (pg.ln() - pr.ln())).exp()),
    })
}

/// The optimal soft decision per support symbol (clamped like any [`SoftDecision`]).
pub fn closed_form_discriminator(
    alpha: AlphaOrder,
    inst: &FiniteGanInstance,
) -> Result<SoftDecision> {
    let values = inst
        .support
        .iter()
        .map(|&i| dstar_symbol(alpha, inst.pr.probs()[i], inst.pg.probs()[i]))
        .collect::<Result<Vec<_>>>()?;
    SoftDecision::new(values)
}

/// Grid search for `argmax_D V_α(D, P_g)`.
///
/// The objective is a monotone function of a sum of per-symbol terms, so the
/// search runs one coordinate at a time: each symbol's decision is the first
/// grid point maximizing the single-symbol value function. Grid points are
/// `δ + k·(1−2δ)/(grid−1)`. Returns the assembled decision and its value.
pub fn brute_force_max_discriminator(
    alpha: AlphaOrder,
    inst: &FiniteGanInstance,
    grid: usize,
) -> Result<(SoftDecision, f64)> {
    if grid < 2 {
        return Err(AganError::InvalidArgument(
            "grid needs at least 2 points".into(),
        ));
    }
    if grid > 100 && inst.alphabet_size() > BRUTE_FORCE_MAX_ALPHABET {
        return Err(AganError::InvalidArgument(format!(
            "alphabet {} too large for a {grid}-point search",
            inst.alphabet_size()
        )));
    }
    let delta = DEFAULT_DELTA;
    let spacing = (1.0 - 2.0 * delta) / (grid - 1) as f64;
    let points: Vec<f64> = (0..grid).map(|k| delta + k as f64 * spacing).collect();
    let weights = inst.weights();
    let mut best = Vec::with_capacity(weights.len());
    for i in 0..weights.len() {
        let w = PairedSampleWeights::new(vec![weights.pr()[i]], vec![weights.pg()[i]])?;
        let mut arg = points[0];
        let mut top = f64::NEG_INFINITY;
        for &p in &points {
            let v = value_function(alpha, &w, &SoftDecision::new(vec![p])?)?;
            if v > top {
                top = v;
                arg = p;
            }
        }
        best.push(arg);
    }
    let d = SoftDecision::new(best)?;
    let value = value_function(alpha, &weights, &d)?;
    Ok((d, value))
}

/// `max_D V_α(D, P_g)`, evaluated at the closed-form discriminator.
pub fn optimal_value(alpha: AlphaOrder, inst: &FiniteGanInstance) -> Result<f64> {
    if alpha.regime() == Regime::Zero {
        return Err(AganError::UnsupportedOrder {
            op: "optimal_value",
            alpha: 0.0,
        });
    }
    let d = closed_form_discriminator(alpha, inst)?;
    value_function(alpha, &inst.weights(), &d)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorFit {
    pub pg: FiniteDistribution,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn generator_objective(alpha: AlphaOrder, pr: &FiniteDistribution, pg: &[f64]) -> Result<f64> {
    let pg = FiniteDistribution::from_weights(pg)?;
    optimal_value(alpha, &FiniteGanInstance::new(pr.clone(), pg)?)
}

/// `∂/∂P_g max_D V_α` via the envelope theorem: the partial derivative at fixed
/// `D = D*`, i.e. the generator gradient scaled by `1/(N·S)`.
fn generator_gradient(
    alpha: AlphaOrder,
    pr: &FiniteDistribution,
    pg: &[f64],
    value: f64,
) -> Result<Vec<f64>> {
    let n = pr.len() as f64;
    // S is the power mean sum at the optimum: V = α/(α−1)·log S, or S = 1 at order 1.
    let s = match alpha.regime() {
        Regime::Finite => (value * (alpha.value() - 1.0) / alpha.value()).exp(),
        _ => 1.0,
    };
    pr.probs()
        .iter()
        .zip(pg)
        .map(|(&r, &g)| {
            let d = dstar_symbol(alpha, r, g)?.clamp(DEFAULT_DELTA, 1.0 - DEFAULT_DELTA);
            Ok(grad_wrt_generator(alpha, r, g, d)? / (n * s))
        })
        .collect()
}

/// Projected gradient descent of `max_D V_α` over `P_g` on the simplex.
///
/// Each iteration starts from `step_size` and halves it until the projected
/// step gives sufficient decrease, so the objective is non-increasing. Stops
/// early once an accepted step moves `P_g` by less than 1e-14 in L1. A run
/// that exhausts `steps` is returned with `converged = false`.
pub fn minimize_generator(
    alpha: AlphaOrder,
    pr: &FiniteDistribution,
    start: &FiniteDistribution,
    steps: usize,
    step_size: f64,
) -> Result<GeneratorFit> {
    if !matches!(alpha.regime(), Regime::Finite | Regime::NearOne) {
        return Err(AganError::UnsupportedOrder {
            op: "minimize_generator",
            alpha: alpha.value(),
        });
    }
    if pr.len() != start.len() {
        return Err(AganError::Dimension {
            expected: pr.len(),
            found: start.len(),
        });
    }
    if pr.probs().iter().any(|&p| p <= 0.0) {
        return Err(AganError::InvalidArgument(
            "target distribution must be strictly positive".into(),
        ));
    }
    if !(step_size > 0.0) {
        return Err(AganError::InvalidArgument(format!("step size {step_size}")));
    }

    let mut x = start.probs().to_vec();
    let mut fx = generator_objective(alpha, pr, &x)?;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < steps {
        iterations += 1;
        let g = generator_gradient(alpha, pr, &x, fx)?;
        let mut t = step_size;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let y = project_to_simplex(&trial);
            let fy = generator_objective(alpha, pr, &y)?;
            let lin: f64 = g
                .iter()
                .zip(y.iter().zip(&x))
                .map(|(gi, (yi, xi))| gi * (yi - xi))
                .sum();
            let sq: f64 = y.iter().zip(&x).map(|(yi, xi)| (yi - xi).powi(2)).sum();
            if fy <= fx + lin + sq / (2.0 * t) + 1e-15 {
                accepted = Some((y, fy));
                break;
            }
            t *= 0.5;
        }
        let Some((y, fy)) = accepted else {
            converged = true;
            break;
        };
        let moved: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        fx = fy;
        if moved < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("minimize_generator: no convergence after {steps} steps at α = {alpha}");
    }
    Ok(GeneratorFit {
        pg: FiniteDistribution::from_weights(&x)?,
        value: fx,
        iterations,
        converged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DStarRow {
    pub symbol: usize,
    pub alpha: f64,
    pub d_star: f64,
}

/// `D*` per support symbol for each α (ascending), symbol-major.
pub fn dstar_monotonicity_scan(
    inst: &FiniteGanInstance,
    alphas: &[AlphaOrder],
) -> Result<Vec<DStarRow>> {
    if alphas.windows(2).any(|w| w[0].value() > w[1].value()) {
        return Err(AganError::InvalidArgument(
            "orders must be sorted ascending".into(),
        ));
    }
    let mut rows = Vec::with_capacity(inst.support.len() * alphas.len());
    for &i in &inst.support {
        for &alpha in alphas {
            rows.push(DStarRow {
                symbol: i,
                alpha: alpha.value(),
                d_star: dstar_symbol(alpha, inst.pr.probs()[i], inst.pg.probs()[i])?,
            });
        }
    }
    Ok(rows)
}
