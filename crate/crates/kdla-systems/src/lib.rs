//! Ground-truth dynamics for the benchmark suite: right-hand sides and
//! integrators for the four ODE systems, the Stuart-Landau closed form,
//! Fourier-pseudospectral ETDRK4 steppers for Burgers and
//! Kuramoto-Sivashinsky, seeded initial-condition samplers, and
//! snapshot-dataset assembly with full provenance.

pub mod error;
pub mod etdrk4;
pub mod ic;
pub mod io;
pub mod recipe;
pub mod rhs;
pub mod rk4;
pub mod spec;
pub mod trajectory;

pub use error::SystemsError;
pub use etdrk4::{etdrk4_integrate, PseudoSpectral};
pub use ic::{burgers_ic, grid_points, kse_ic};
pub use recipe::{generate_dataset, generate_trajectories, sample_ic, DatasetRecipe};
pub use rhs::{rhs_eval, stuart_landau_exact};
pub use rk4::rk4_integrate;
pub use spec::SystemSpec;
pub use trajectory::{SnapshotDataset, Trajectory};
