//! Evaluation metrics: everything the benchmark pipelines report.

pub mod basin;
pub mod energy;
pub mod error;
pub mod report;
pub mod spectra;
pub mod tracking;

pub use basin::{basin_map, classify, ic_grid, BasinMap};
pub use energy::energy;
pub use error::MetricsError;
pub use report::{eigen_report, EigReport};
pub use spectra::{power_spectrum, power_spectrum_rows, SpectrumReport};
pub use tracking::{tracking_error, EnsembleReport};
