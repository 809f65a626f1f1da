//! Descent optimizers over an [`MlpNetwork`]'s stored gradients.
//!
//! Both minimize; callers ascending an objective pass its negated gradient.

use serde::{Deserialize, Serialize};

use super::network::MlpNetwork;
use crate::error::{AganError, Result};

/// `p ← p − lr·g`
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) {
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= lr * g;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    /// Advances the step counter; call once before the per-slot updates of a step.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    /// Bias-corrected update of one parameter slot.
    pub fn update_slot(&mut self, slot: usize, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(AganError::Dimension {
                expected: params.len(),
                found: grads.len(),
            });
        }
        while self.m.len() <= slot {
            self.m.push(Vec::new());
            self.v.push(Vec::new());
        }
        if self.m[slot].is_empty() {
            self.m[slot] = vec![0.0; params.len()];
            self.v[slot] = vec![0.0; params.len()];
        } else if self.m[slot].len() != params.len() {
            return Err(AganError::Dimension {
                expected: self.m[slot].len(),
                found: params.len(),
            });
        }
        let t = self.step.max(1) as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (m, v) = (&mut self.m[slot], &mut self.v[slot]);
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
            v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd { lr: f64 },
    Adam(AdamState),
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    pub fn adam(lr: f64, beta1: f64, beta2: f64) -> Self {
        Optimizer::Adam(AdamState::new(lr, beta1, beta2, 1e-8))
    }

    /// One descent step using the gradients stored by the last backward pass.
    pub fn step(&mut self, net: &mut MlpNetwork) -> Result<()> {
        match self {
            Optimizer::Sgd { lr } => {
                for (p, g) in net.slots_mut() {
                    sgd_step(p, g, *lr);
                }
            }
            Optimizer::Adam(state) => {
                state.begin_step();
                for (slot, (p, g)) in net.slots_mut().into_iter().enumerate() {
                    state.update_slot(slot, p, g)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = vec![0.3, -1.2];
        sgd_step(&mut p, &[0.0, 0.0], 0.1);
        assert_eq!(p, vec![0.3, -1.2]);
        let mut adam = AdamState::new(0.01, 0.9, 0.999, 1e-8);
        adam.begin_step();
        adam.update_slot(0, &mut p, &[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.3, -1.2]);
    }

    #[test]
    fn first_adam_step_matches_hand_formula() {
        let g = [0.5, -2.0, 1e-3];
        let mut p = vec![1.0, 1.0, 1.0];
        let mut adam = AdamState::new(0.0002, 0.5, 0.999, 1e-8);
        adam.begin_step();
        adam.update_slot(0, &mut p, &g).unwrap();
        // m̂ = g and v̂ = g² after bias correction, so Δ = −lr·g/(|g|+ε).
        for (pi, gi) in p.iter().zip(g) {
            assert_abs_diff_eq!(*pi, 1.0 - 0.0002 * gi / (gi.abs() + 1e-8), epsilon = 1e-15);
        }
    }

    #[test]
    fn two_sgd_steps_equal_one_summed_step() {
        let (g1, g2) = ([0.2, -0.4], [1.0, 0.5]);
        let mut a = vec![0.0, 0.0];
        sgd_step(&mut a, &g1, 0.1);
        sgd_step(&mut a, &g2, 0.1);
        let mut b = vec![0.0, 0.0];
        sgd_step(&mut b, &[g1[0] + g2[0], g1[1] + g2[1]], 0.1);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }
}
