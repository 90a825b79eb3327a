//! Eigenvalue reports for trained Koopman models.

use num_complex::Complex64;

use kdla_koopman::{spectrum, KoopmanModel};

use crate::error::MetricsError;

#[derive(Debug, Clone)]
pub struct EigReport {
    pub eigenvalues: Vec<Complex64>,
    pub moduli: Vec<f64>,
    /// Count of eigenvalues with |λ| > 1 + tol.
    pub n_outside_unit_circle: usize,
    pub tol: f64,
}

impl EigReport {
    pub fn spectral_radius(&self) -> f64 {
        self.moduli.iter().cloned().fold(0.0, f64::max)
    }

    /// Distance of each eigenvalue from the unit circle.
    pub fn unit_circle_distances(&self) -> Vec<f64> {
        self.moduli.iter().map(|m| (m - 1.0).abs()).collect()
    }
}

pub fn eigen_report(model: &KoopmanModel, tol: f64) -> Result<EigReport, MetricsError> {
    let s = spectrum(model)?;
    let moduli: Vec<f64> = s.eigenvalues.iter().map(|z| z.norm()).collect();
    let n_outside = moduli.iter().filter(|&&m| m > 1.0 + tol).count();
    Ok(EigReport {
        eigenvalues: s.eigenvalues,
        moduli,
        n_outside_unit_circle: n_outside,
        tol,
    })
}
