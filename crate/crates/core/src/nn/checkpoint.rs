//! Versioned parameter checkpoints: the magic line `AGANCKPT1` followed by a
//! JSON record of layer shapes, row-major weights and optimizer state.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::network::{Activation, DenseLayer, MlpNetwork};
use super::optim::Optimizer;
use crate::error::{AganError, Result};

pub const CHECKPOINT_MAGIC: &str = "AGANCKPT1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct LayerRecord {
    inputs: usize,
    outputs: usize,
    activation: Activation,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckpointRecord {
    layers: Vec<LayerRecord>,
    optimizer: Optimizer,
}

pub fn encode_checkpoint(net: &MlpNetwork, optimizer: &Optimizer) -> Result<String> {
    let record = CheckpointRecord {
        layers: net
            .layers()
            .iter()
            .map(|l| LayerRecord {
                inputs: l.inputs(),
                outputs: l.outputs(),
                activation: l.activation(),
                weights: l.weights().data().to_vec(),
                biases: l.biases().to_vec(),
            })
            .collect(),
        optimizer: optimizer.clone(),
    };
    Ok(format!(
        "{CHECKPOINT_MAGIC}\n{}\n",
        serde_json::to_string(&record)?
    ))
}

pub fn decode_checkpoint(text: &str) -> Result<(MlpNetwork, Optimizer)> {
    let (magic, body) = text
        .split_once('\n')
        .ok_or_else(|| AganError::Format("checkpoint missing header line".into()))?;
    if magic.trim_end() != CHECKPOINT_MAGIC {
        return Err(AganError::Format(format!("bad checkpoint magic {magic:?}")));
    }
    let record: CheckpointRecord = serde_json::from_str(body)?;
    let layers = record
        .layers
        .into_iter()
        .map(|l| {
            let w = Matrix::from_vec(l.outputs, l.inputs, l.weights)?;
            DenseLayer::from_parts(w, l.biases, l.activation)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((MlpNetwork::from_layers(layers)?, record.optimizer))
}

pub fn save_checkpoint(path: &Path, net: &MlpNetwork, optimizer: &Optimizer) -> Result<()> {
    fs::write(path, encode_checkpoint(net, optimizer)?)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(MlpNetwork, Optimizer)> {
    decode_checkpoint(&fs::read_to_string(path)?)
}
