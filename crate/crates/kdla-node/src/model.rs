//! Neural-ODE models and their JSON container (`node-model/1`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use kdla_num::{Activation, Mat, Mlp};

use crate::error::NodeError;

pub const NODE_FORMAT_VERSION: &str = "node-model/1";

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct NodeMetadata {
    pub epochs: usize,
    pub best_epoch: Option<usize>,
    pub loss_curve: Vec<f64>,
    pub seed: u64,
    pub lr_schedule: String,
    pub batch_size: Option<usize>,
}

/// MLP right-hand side plus integrator settings: `substeps` RK4 steps per
/// data interval `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeModel {
    pub net: Mlp,
    pub dt: f64,
    pub substeps: usize,
    pub metadata: NodeMetadata,
}

impl NodeModel {
    pub fn new(net: Mlp, dt: f64, substeps: usize, metadata: NodeMetadata) -> Result<Self, NodeError> {
        if net.input_dim() != net.output_dim() {
            return Err(NodeError::Config(format!(
                "vector field must map n -> n, got {} -> {}",
                net.input_dim(),
                net.output_dim()
            )));
        }
        if substeps == 0 {
            return Err(NodeError::Config("substeps must be >= 1".into()));
        }
        Ok(NodeModel {
            net,
            dt,
            substeps,
            metadata,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn save(&self, path: &Path) -> Result<(), NodeError> {
        let file = NodeFile {
            version: NODE_FORMAT_VERSION.to_string(),
            n: self.state_dim(),
            dt: self.dt,
            substeps: self.substeps,
            layer_sizes: self.net.layer_sizes().to_vec(),
            activations: self
                .net
                .activations()
                .iter()
                .map(|a| a.tag().to_string())
                .collect(),
            weights: self.net.weights().iter().map(|w| w.data().to_vec()).collect(),
            biases: self.net.biases().to_vec(),
            metadata: self.metadata.clone(),
        };
        let json = serde_json::to_string_pretty(&file).expect("model serializes");
        std::fs::write(path, json).map_err(|e| NodeError::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self, NodeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NodeError::io(path.display().to_string(), e))?;
        let file: NodeFile = serde_json::from_str(&text).map_err(|e| NodeError::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let bad = |msg: String| NodeError::Parse {
            path: path.display().to_string(),
            msg,
        };
        if file.version != NODE_FORMAT_VERSION {
            return Err(bad(format!(
                "unsupported model version '{}' (expected {NODE_FORMAT_VERSION})",
                file.version
            )));
        }
        let mut acts = Vec::with_capacity(file.activations.len());
        for tag in &file.activations {
            acts.push(
                Activation::from_tag(tag)
                    .ok_or_else(|| bad(format!("unknown activation tag '{tag}'")))?,
            );
        }
        let mut weights = Vec::with_capacity(file.weights.len());
        for (l, flat) in file.weights.iter().enumerate() {
            let (rows, cols) = (file.layer_sizes[l + 1], file.layer_sizes[l]);
            if flat.len() != rows * cols {
                return Err(bad(format!("layer {l} weight array length mismatch")));
            }
            weights.push(Mat::from_vec(rows, cols, flat.clone()));
        }
        let net = Mlp::from_parts(file.layer_sizes, weights, file.biases, acts)
            .map_err(|e| bad(e.to_string()))?;
        NodeModel::new(net, file.dt, file.substeps, file.metadata)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeFile {
    version: String,
    n: usize,
    dt: f64,
    substeps: usize,
    layer_sizes: Vec<usize>,
    activations: Vec<String>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    metadata: NodeMetadata,
}
