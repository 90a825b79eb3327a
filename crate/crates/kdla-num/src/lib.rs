//! Dense-matrix numerics backing the Koopman dictionary-learning toolkit:
//! a row-major matrix type, an MLP with exact reverse-mode gradients, an
//! SVD-based Moore-Penrose pseudoinverse with its closed-form
//! vector-Jacobian product, a real Schur (QR) eigensolver, the Adam
//! optimizer, and a counter-based RNG for reproducible data generation.
//!
//! Everything is generic over the [`Real`] scalar trait; the rest of the
//! workspace uses the `f64` aliases exported at the crate root ([`Mat`],
//! [`Mlp`], ...). All operations are pure functions over value inputs and
//! safe to call concurrently on distinct data. Large matrix products split
//! work across rows, each row reduced sequentially in index order, so
//! results are bit-identical for any thread count.

pub mod adam;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod mlp;
pub mod pinv;
pub mod rng;
pub mod scalar;
pub mod svd;

pub use adam::{adam_step, AdamParams, AdamState};
pub use eig::{eigenvalues, eigenvalues_and_vectors};
pub use error::NumError;
pub use matrix::Matrix;
pub use mlp::{Activation, MlpCache, MlpGrads, MlpParams};
pub use pinv::{pinv, pinv_vjp, RCOND_DEFAULT};
pub use rng::{stream_seed, SplitMix64};
pub use scalar::Real;
pub use svd::{svd, Svd};

/// Working-precision matrix used throughout the workspace.
pub type Mat = Matrix<f64>;
/// Working-precision MLP parameters.
pub type Mlp = MlpParams<f64>;
/// Working-precision MLP gradients.
pub type Grads = MlpGrads<f64>;
/// Working-precision Adam state.
pub type Adam = AdamState<f64>;
/// Single-precision matrix, for experiments that trade accuracy for memory.
pub type Mat32 = Matrix<f32>;
