//! Koopman operator approximation with trainable dictionaries.
//!
//! The observable space is the raw state prepended to the outputs of an
//! MLP (plus an optional constant); the finite Koopman matrix K is the
//! least-squares map between lifted snapshot matrices. Two trainers are
//! provided: joint optimization of the dictionary by gradient descent
//! through the Moore-Penrose pseudoinverse, and the classical alternation
//! between a Tikhonov-regularized K fit and fixed-K network steps. Rollout
//! runs either entirely in the observable space or alternating between
//! state and observable space every m steps.

pub mod alternating;
pub mod dictionary;
pub mod edmd;
pub mod error;
pub mod evolve;
pub mod kdla;
pub mod model;
pub mod spectrum;

pub use alternating::{train_kdl_alternating, AlternatingConfig};
pub use dictionary::{DictionaryArch, DictionaryNet};
pub use edmd::{edmd_fit, ObservablePair};
pub use error::KoopmanError;
pub use evolve::{evolve_observable_only, evolve_state_observable};
pub use kdla::{
    kdla_loss_grad, kdla_residual_loss, kdla_two_set_loss_grad, train_kdla, EarlyStop, TrainConfig,
};
pub use model::{KoopmanModel, TrainMetadata, MODEL_FORMAT_VERSION};
pub use spectrum::{spectrum, spectrum_with_vectors, KoopmanSpectrum};
