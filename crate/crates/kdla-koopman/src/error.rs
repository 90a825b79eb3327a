use kdla_num::NumError;
use kdla_systems::SystemsError;
use thiserror::Error;

use crate::model::KoopmanModel;

#[derive(Debug, Error)]
pub enum KoopmanError {
    #[error("configuration error: {0}")]
    Config(String),

    /// Training loss became non-finite; the best model seen so far rides
    /// along so the caller can keep it.
    #[error("training diverged at epoch {epoch} (last good loss {last_loss})")]
    Diverged {
        epoch: usize,
        last_loss: f64,
        checkpoint: Box<KoopmanModel>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error(transparent)]
    Num(#[from] NumError),

    #[error(transparent)]
    Systems(#[from] SystemsError),
}

impl KoopmanError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        KoopmanError::Io {
            path: path.into(),
            source,
        }
    }
}
