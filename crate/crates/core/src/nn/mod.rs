//! A small dense network with hand-written forward and backward passes.

mod checkpoint;
mod matrix;
mod network;
mod optim;
mod rng;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC,
};
pub use matrix::Matrix;
pub use network::{Activation, DenseLayer, LayerGradients, MlpNetwork};
pub use optim::{sgd_step, AdamState, Optimizer, OptimizerKind};
pub use rng::SeededRng;
