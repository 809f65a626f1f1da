use crate::error::{AganError, Result};
use crate::renyi::{value_and_gradient, AlphaOrder, PairedSampleWeights, SoftDecision};

/// Minibatch value and its gradients with respect to each discriminator output.
#[derive(Clone, Debug, PartialEq)]
pub struct MinibatchLoss {
    pub value: f64,
    pub grad_real: Vec<f64>,
    pub grad_fake: Vec<f64>,
}

/// Minibatch estimate of `V_α`: real outputs enter the `'r'` branch with weight
/// one, generated outputs the `'g'` branch, all averaged with `1/(2B)`.
///
/// At α = 1 this is exactly the (negated) binary cross entropy of the batch.
pub fn empirical_value_loss(
    alpha: AlphaOrder,
    d_real: &[f64],
    d_fake: &[f64],
) -> Result<MinibatchLoss> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(AganError::EmptyInput);
    }
    let w = PairedSampleWeights::labelled(d_real.len(), d_fake.len());
    let mut values = d_real.to_vec();
    values.extend_from_slice(d_fake);
    let d = SoftDecision::new(values)?;
    let (value, mut grad) = value_and_gradient(alpha, &w, &d)?;
    let grad_fake = grad.split_off(d_real.len());
    Ok(MinibatchLoss {
        value,
        grad_real: grad,
        grad_fake,
    })
}
