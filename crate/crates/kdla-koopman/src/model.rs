//! Trained Koopman models and their JSON container.

use std::path::Path;

use serde::{Deserialize, Serialize};

use kdla_num::{Activation, Mat};

use crate::dictionary::DictionaryNet;
use crate::error::KoopmanError;

pub const MODEL_FORMAT_VERSION: &str = "kdla-model/1";

/// Everything recorded about a training run.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct TrainMetadata {
    pub method: String,
    pub epochs: usize,
    pub best_epoch: Option<usize>,
    pub loss_curve: Vec<f64>,
    pub rcond: f64,
    pub tikhonov: Option<f64>,
    pub seed: u64,
    pub lr_schedule: String,
    pub batch_size: Option<usize>,
    /// Epoch at which the relative-improvement early stop fired, if it did.
    pub early_stopped_at: Option<usize>,
    /// True when K was refit on the full dataset after training ended.
    pub refit_k: bool,
}

/// A D x D Koopman matrix bound to the dictionary that defines its
/// observable space.
#[derive(Debug, Clone, PartialEq)]
pub struct KoopmanModel {
    pub k: Mat,
    pub dictionary: DictionaryNet,
    pub dt: f64,
    pub metadata: TrainMetadata,
}

impl KoopmanModel {
    pub fn new(
        k: Mat,
        dictionary: DictionaryNet,
        dt: f64,
        metadata: TrainMetadata,
    ) -> Result<Self, KoopmanError> {
        let d = dictionary.lifted_dim();
        if k.rows() != d || k.cols() != d {
            return Err(KoopmanError::Config(format!(
                "K is {}x{} but the dictionary lifts to dimension {d}",
                k.rows(),
                k.cols()
            )));
        }
        Ok(KoopmanModel {
            k,
            dictionary,
            dt,
            metadata,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.dictionary.state_dim()
    }

    pub fn lifted_dim(&self) -> usize {
        self.dictionary.lifted_dim()
    }

    pub fn save(&self, path: &Path) -> Result<(), KoopmanError> {
        let file = ModelFile::from_model(self);
        let json = serde_json::to_string_pretty(&file).expect("model serializes");
        std::fs::write(path, json).map_err(|e| KoopmanError::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self, KoopmanError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KoopmanError::io(path.display().to_string(), e))?;
        let file: ModelFile =
            serde_json::from_str(&text).map_err(|e| KoopmanError::Parse {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
        file.into_model(path)
    }
}

/// On-disk layout: flat f64 arrays, exact round trip via shortest-repr
/// JSON floats.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: String,
    n: usize,
    d: usize,
    include_constant: bool,
    dt: f64,
    layer_sizes: Vec<usize>,
    activations: Vec<String>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    k: Vec<f64>,
    metadata: TrainMetadata,
}

impl ModelFile {
    fn from_model(m: &KoopmanModel) -> Self {
        let net = m.dictionary.net();
        ModelFile {
            version: MODEL_FORMAT_VERSION.to_string(),
            n: m.dictionary.state_dim(),
            d: m.dictionary.trainable_dim(),
            include_constant: m.dictionary.include_constant(),
            dt: m.dt,
            layer_sizes: net.layer_sizes().to_vec(),
            activations: net.activations().iter().map(|a| a.tag().to_string()).collect(),
            weights: net.weights().iter().map(|w| w.data().to_vec()).collect(),
            biases: net.biases().to_vec(),
            k: m.k.data().to_vec(),
            metadata: m.metadata.clone(),
        }
    }

    fn into_model(self, path: &Path) -> Result<KoopmanModel, KoopmanError> {
        let bad = |msg: String| KoopmanError::Parse {
            path: path.display().to_string(),
            msg,
        };
        if self.version != MODEL_FORMAT_VERSION {
            return Err(bad(format!(
                "unsupported model version '{}' (expected {MODEL_FORMAT_VERSION})",
                self.version
            )));
        }
        let mut acts = Vec::with_capacity(self.activations.len());
        for tag in &self.activations {
            acts.push(
                Activation::from_tag(tag)
                    .ok_or_else(|| bad(format!("unknown activation tag '{tag}'")))?,
            );
        }
        if self.layer_sizes.len() < 2 {
            return Err(bad("layer_sizes needs at least input and output".into()));
        }
        let mut weights = Vec::with_capacity(self.weights.len());
        for (l, flat) in self.weights.iter().enumerate() {
            let (rows, cols) = (self.layer_sizes[l + 1], self.layer_sizes[l]);
            if flat.len() != rows * cols {
                return Err(bad(format!("layer {l} weight array length mismatch")));
            }
            weights.push(Mat::from_vec(rows, cols, flat.clone()));
        }
        let net = kdla_num::Mlp::from_parts(self.layer_sizes, weights, self.biases, acts)
            .map_err(|e| bad(e.to_string()))?;
        let dictionary = DictionaryNet::from_parts(self.n, self.include_constant, net)?;
        let dd = dictionary.lifted_dim();
        if self.k.len() != dd * dd {
            return Err(bad(format!(
                "K array has {} entries, expected {}",
                self.k.len(),
                dd * dd
            )));
        }
        KoopmanModel::new(Mat::from_vec(dd, dd, self.k), dictionary, self.dt, self.metadata)
    }
}
