use kdla_num::NumError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystemsError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("trajectory diverged at step {step} (t = {t})")]
    Diverged { step: usize, t: f64 },

    #[error("parse error in {file} at line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Num(#[from] NumError),
}

impl SystemsError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        SystemsError::Io {
            path: path.into(),
            source,
        }
    }
}
