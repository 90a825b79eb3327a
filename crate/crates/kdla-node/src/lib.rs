//! State-space baseline: a neural vector field integrated by classical
//! RK4, trained on the one-step prediction error by differentiating
//! through the integrator stages (discretize-then-differentiate).

pub mod error;
pub mod model;
pub mod rollout;
pub mod train;

pub use error::NodeError;
pub use model::{NodeMetadata, NodeModel, NODE_FORMAT_VERSION};
pub use rollout::{node_evolve, NodeRollout};
pub use train::{node_loss_grad, node_predict, train_node, NodeArch, NodeTrainConfig};
