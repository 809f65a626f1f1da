use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::rng::SeededRng;
use crate::error::{AganError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Sigmoid,
    Identity,
}

// Keeps saturated sigmoid outputs strictly inside (0, 1).
const SIGMOID_FLOOR: f64 = f64::MIN_POSITIVE;
const SIGMOID_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::ReLU => z.max(0.0),
            Activation::Sigmoid => (1.0 / (1.0 + (-z).exp())).clamp(SIGMOID_FLOOR, SIGMOID_CEIL),
            Activation::Identity => z,
        }
    }

    /// Derivative from the pre-activation `z` and the output `a`.
    /// ReLU takes subgradient 0 at `z = 0`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Debug)]
struct LayerCache {
    input: Matrix,
    pre: Matrix,
    output: Matrix,
}

/// Fully connected layer `a = act(x·Wᵀ + b)` with `W` stored out × in.
#[derive(Clone, Debug)]
pub struct DenseLayer {
    weights: Matrix,
    biases: Vec<f64>,
    activation: Activation,
    grad_weights: Matrix,
    grad_biases: Vec<f64>,
    cache: Option<LayerCache>,
}

impl DenseLayer {
    /// Uniform fan-based init in `±sqrt(6/(fan_in+fan_out))`, zero biases.
    pub fn new(inputs: usize, outputs: usize, activation: Activation, rng: &mut SeededRng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let data = (0..inputs * outputs)
            .map(|_| rng.uniform(-limit, limit))
            .collect();
        let weights = Matrix::from_vec(outputs, inputs, data).expect("shape");
        Self::from_parts(weights, vec![0.0; outputs], activation).expect("shape")
    }

    pub fn from_parts(weights: Matrix, biases: Vec<f64>, activation: Activation) -> Result<Self> {
        if biases.len() != weights.rows() {
            return Err(AganError::Dimension {
                expected: weights.rows(),
                found: biases.len(),
            });
        }
        let (out, inp) = weights.shape();
        Ok(Self {
            grad_weights: Matrix::zeros(out, inp),
            grad_biases: vec![0.0; out],
            weights,
            biases,
            activation,
            cache: None,
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn grad_weights(&self) -> &Matrix {
        &self.grad_weights
    }

    pub fn grad_biases(&self) -> &[f64] {
        &self.grad_biases
    }

    fn forward(&mut self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.inputs() {
            return Err(AganError::Dimension {
                expected: self.inputs(),
                found: x.cols(),
            });
        }
        let (n, out) = (x.rows(), self.outputs());
        let mut pre = Matrix::zeros(n, out);
        for r in 0..n {
            let xr = x.row(r);
            for o in 0..out {
                let dot: f64 = self.weights.row(o).iter().zip(xr).map(|(w, v)| w * v).sum();
                pre.set(r, o, dot + self.biases[o]);
            }
        }
        let act = self.activation;
        let output = pre.map(|z| act.apply(z));
        self.cache = Some(LayerCache {
            input: x.clone(),
            pre,
            output: output.clone(),
        });
        Ok(output)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix> {
        let cache = self
            .cache
            .as_ref()
            .ok_or_else(|| AganError::StaleCache("backward called before forward".into()))?;
        if upstream.shape() != cache.output.shape() {
            return Err(AganError::StaleCache(format!(
                "upstream gradient {:?} does not match cached output {:?}",
                upstream.shape(),
                cache.output.shape()
            )));
        }
        let (n, out, inp) = (upstream.rows(), self.outputs(), self.inputs());
        let act = self.activation;
        let mut dz = Matrix::zeros(n, out);
        for (k, g) in dz.data_mut().iter_mut().enumerate() {
            *g = upstream.data()[k] * act.derivative(cache.pre.data()[k], cache.output.data()[k]);
        }
        self.grad_weights = Matrix::zeros(out, inp);
        self.grad_biases = vec![0.0; out];
        let mut dx = Matrix::zeros(n, inp);
        for r in 0..n {
            let xr = cache.input.row(r);
            for o in 0..out {
                let g = dz.get(r, o);
                if g == 0.0 {
                    continue;
                }
                self.grad_biases[o] += g;
                let gw = &mut self.grad_weights.data_mut()[o * inp..(o + 1) * inp];
                for (acc, v) in gw.iter_mut().zip(xr) {
                    *acc += g * v;
                }
                let w = self.weights.row(o);
                let dxr = &mut dx.data_mut()[r * inp..(r + 1) * inp];
                for (acc, wv) in dxr.iter_mut().zip(w) {
                    *acc += g * wv;
                }
            }
        }
        Ok(dx)
    }
}

/// Parameter gradients of one layer, returned by [`MlpNetwork::backward`].
#[derive(Clone, Debug, PartialEq)]
pub struct LayerGradients {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct MlpNetwork {
    layers: Vec<DenseLayer>,
}

impl MlpNetwork {
    /// `sizes` lists input width then each layer's width; one activation per layer.
    pub fn new(sizes: &[usize], activations: &[Activation], rng: &mut SeededRng) -> Result<Self> {
        if sizes.len() < 2 || activations.len() != sizes.len() - 1 {
            return Err(AganError::InvalidArgument(format!(
                "{} sizes need {} activations, got {}",
                sizes.len(),
                sizes.len().saturating_sub(1),
                activations.len()
            )));
        }
        let layers = sizes
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| DenseLayer::new(w[0], w[1], act, rng))
            .collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(AganError::EmptyInput);
        }
        for w in layers.windows(2) {
            if w[0].outputs() != w[1].inputs() {
                return Err(AganError::Dimension {
                    expected: w[0].outputs(),
                    found: w[1].inputs(),
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().expect("non-empty").outputs()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.data().len() + l.biases.len())
            .sum()
    }

    pub fn forward(&mut self, batch: &Matrix) -> Result<Matrix> {
        let mut x = batch.clone();
        for layer in &mut self.layers {
            x = layer.forward(&x)?;
        }
        Ok(x)
    }

    /// Reverse pass for the most recent [`forward`](Self::forward). Stores the
    /// parameter gradients on each layer and returns the gradient with respect
    /// to the network input.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<Matrix> {
        let mut g = upstream.clone();
        for layer in self.layers.iter_mut().rev() {
            g = layer.backward(&g)?;
        }
        Ok(g)
    }

    pub fn gradients(&self) -> Vec<LayerGradients> {
        self.layers
            .iter()
            .map(|l| LayerGradients {
                weights: l.grad_weights.clone(),
                biases: l.grad_biases.clone(),
            })
            .collect()
    }

    /// `(parameters, gradients)` slot pairs in a fixed order: per layer, weights then biases.
    pub fn slots_mut(&mut self) -> Vec<(&mut [f64], &[f64])> {
        let mut out = Vec::with_capacity(2 * self.layers.len());
        for l in &mut self.layers {
            out.push((l.weights.data_mut(), l.grad_weights.data()));
            out.push((&mut l.biases[..], &l.grad_biases[..]));
        }
        out
    }

    /// All parameters flattened in slot order.
    pub fn flat_parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(l.weights.data());
            out.extend_from_slice(&l.biases);
        }
        out
    }

    /// All parameter gradients flattened in slot order.
    pub fn flat_gradients(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(l.grad_weights.data());
            out.extend_from_slice(&l.grad_biases);
        }
        out
    }

    pub fn set_flat_parameters(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(AganError::Dimension {
                expected: self.parameter_count(),
                found: params.len(),
            });
        }
        let mut off = 0;
        for l in &mut self.layers {
            let n = l.weights.data().len();
            l.weights.data_mut().copy_from_slice(&params[off..off + n]);
            off += n;
            let n = l.biases.len();
            l.biases.copy_from_slice(&params[off..off + n]);
            off += n;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_identity_net_outputs_zero() {
        let layers = vec![
            DenseLayer::from_parts(Matrix::zeros(3, 2), vec![0.0; 3], Activation::Identity)
                .unwrap(),
            DenseLayer::from_parts(Matrix::zeros(1, 3), vec![0.0], Activation::Identity).unwrap(),
        ];
        let mut net = MlpNetwork::from_layers(layers).unwrap();
        let x = Matrix::from_vec(2, 2, vec![1.0, -2.0, 3.5, 0.25]).unwrap();
        assert_eq!(net.forward(&x).unwrap(), Matrix::zeros(2, 1));
    }

    #[test]
    fn zero_sigmoid_unit_is_half() {
        let layer =
            DenseLayer::from_parts(Matrix::zeros(1, 1), vec![0.0], Activation::Sigmoid).unwrap();
        let mut net = MlpNetwork::from_layers(vec![layer]).unwrap();
        assert_eq!(
            net.forward(&Matrix::column(vec![3.0])).unwrap().data(),
            &[0.5]
        );
    }

    #[test]
    fn identity_layer_weight_grad_is_column_sums() {
        let w = Matrix::from_vec(2, 3, vec![0.1, 0.2, 0.3, -0.4, 0.5, 0.6]).unwrap();
        let layer = DenseLayer::from_parts(w, vec![0.0, 0.0], Activation::Identity).unwrap();
        let mut net = MlpNetwork::from_layers(vec![layer]).unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        net.forward(&x).unwrap();
        net.backward(&Matrix::from_vec(2, 2, vec![1.0; 4]).unwrap())
            .unwrap();
        let g = &net.gradients()[0];
        assert_eq!(g.weights.data(), &[5.0, 7.0, 9.0, 5.0, 7.0, 9.0]);
        assert_eq!(g.biases, vec![2.0, 2.0]);
    }

    #[test]
    fn relu_subgradient_at_zero_is_zero() {
        let w = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let layer = DenseLayer::from_parts(w, vec![0.0], Activation::ReLU).unwrap();
        let mut net = MlpNetwork::from_layers(vec![layer]).unwrap();
        net.forward(&Matrix::column(vec![0.0])).unwrap();
        let dx = net.backward(&Matrix::column(vec![1.0])).unwrap();
        assert_eq!(dx.data(), &[0.0]);
        assert_eq!(net.gradients()[0].weights.data(), &[0.0]);
    }

    #[test]
    fn backward_requires_matching_forward() {
        let mut rng = SeededRng::new(3);
        let mut net = MlpNetwork::new(
            &[2, 4, 1],
            &[Activation::ReLU, Activation::Sigmoid],
            &mut rng,
        )
        .unwrap();
        assert!(matches!(
            net.backward(&Matrix::zeros(5, 1)),
            Err(AganError::StaleCache(_))
        ));
        net.forward(&Matrix::zeros(4, 2)).unwrap();
        assert!(matches!(
            net.backward(&Matrix::zeros(5, 1)),
            Err(AganError::StaleCache(_))
        ));
        assert!(net.forward(&Matrix::zeros(4, 3)).is_err());
    }

    #[test]
    fn init_respects_fan_limit() {
        let mut rng = SeededRng::new(11);
        let layer = DenseLayer::new(10, 6, Activation::ReLU, &mut rng);
        let limit = (6.0f64 / 16.0).sqrt();
        assert!(layer.weights().data().iter().all(|w| w.abs() <= limit));
        assert!(layer.biases().iter().all(|&b| b == 0.0));
    }
}
