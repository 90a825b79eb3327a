use kdla_num::NumError;
use kdla_systems::SystemsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NodeError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch} (last good loss {last_loss})")]
    Diverged { epoch: usize, last_loss: f64 },

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

impl NodeError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        NodeError::Io {
            path: path.into(),
            source,
        }
    }
}
