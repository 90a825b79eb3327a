//! Normalized ensemble-averaged tracking error.

use kdla_systems::Trajectory;

use crate::error::MetricsError;

/// Per-time mean of `||x − x̃||₂` over an ensemble, divided by the
/// time-and-ensemble mean of `||x||₂` of the true trajectories.
#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub times: Vec<f64>,
    /// Normalized error at each time.
    pub mean_error: Vec<f64>,
    pub ensemble_size: usize,
    /// The normalization constant that divided the raw errors.
    pub normalization: f64,
}

impl EnsembleReport {
    /// Normalized error at the sample closest to time `t`.
    pub fn error_at(&self, t: f64) -> f64 {
        let mut best = 0usize;
        let mut gap = f64::INFINITY;
        for (i, &ti) in self.times.iter().enumerate() {
            if (ti - t).abs() < gap {
                gap = (ti - t).abs();
                best = i;
            }
        }
        self.mean_error[best]
    }
}

pub fn tracking_error(
    truth: &[Trajectory],
    pred: &[Trajectory],
) -> Result<EnsembleReport, MetricsError> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(MetricsError::Shape(format!(
            "ensembles have {} and {} members",
            truth.len(),
            pred.len()
        )));
    }
    let n = truth[0].dim();
    let len = truth[0].len();
    let dt = truth[0].dt;
    for (a, b) in truth.iter().zip(pred) {
        if a.dim() != n || b.dim() != n || a.len() != len || b.len() != len {
            return Err(MetricsError::Shape(
                "ensemble members disagree in dimension or length".into(),
            ));
        }
        if (a.dt - dt).abs() > 1e-12 * dt.abs().max(1.0) || (b.dt - dt).abs() > 1e-12 {
            return Err(MetricsError::Shape("mismatched sampling steps".into()));
        }
    }

    let mut raw = vec![0.0f64; len];
    let mut norm_acc = 0.0f64;
    for (a, b) in truth.iter().zip(pred) {
        for j in 0..len {
            let mut err2 = 0.0;
            let mut mag2 = 0.0;
            for r in 0..n {
                let d = a.states[(r, j)] - b.states[(r, j)];
                err2 += d * d;
                mag2 += a.states[(r, j)].powi(2);
            }
            raw[j] += err2.sqrt();
            norm_acc += mag2.sqrt();
        }
    }
    let members = truth.len() as f64;
    let normalization = norm_acc / (members * len as f64);
    let denom = if normalization > 0.0 { normalization } else { 1.0 };
    let mean_error = raw.iter().map(|e| e / members / denom).collect();
    Ok(EnsembleReport {
        times: (0..len).map(|j| truth[0].t0 + dt * j as f64).collect(),
        mean_error,
        ensemble_size: truth.len(),
        normalization,
    })
}
