//! One-sided DFT power spectra.
//!
//! Convention: the mean is removed, no windowing function is applied
//! (rectangular window), and the one-sided power is
//! `P_k = c_k |X_k|² / N` with `c_k = 2` for interior bins and `c_k = 1`
//! for k = 0 and the Nyquist bin, so that `Σ_k P_k = N · var(x)`
//! (Parseval). Vector signals average the per-component spectra.

use num_complex::Complex64;
use rustfft::FftPlanner;

use kdla_systems::Trajectory;

use crate::error::MetricsError;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Frequency of each bin in cycles per time unit (bin k at k/(N dt)).
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub source: String,
}

impl SpectrumReport {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    /// Index of the strongest nonzero-frequency bin.
    pub fn dominant_bin(&self) -> usize {
        let mut best = 1usize;
        for k in 1..self.power.len() {
            if self.power[k] > self.power[best] {
                best = k;
            }
        }
        best
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

fn spectrum_of_rows(rows: &[Vec<f64>], dt: f64, source: &str) -> Result<SpectrumReport, MetricsError> {
    let n = rows
        .first()
        .map(|r| r.len())
        .ok_or_else(|| MetricsError::Config("empty signal set".into()))?;
    if n < 4 {
        return Err(MetricsError::Config(format!(
            "spectrum needs at least 4 samples, got {n}"
        )));
    }
    let half = n / 2 + 1;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut power = vec![0.0f64; half];
    for row in rows {
        if row.len() != n {
            return Err(MetricsError::Shape("ragged signal components".into()));
        }
        let mean = row.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x - mean, 0.0)).collect();
        fft.process(&mut buf);
        for (k, p) in power.iter_mut().enumerate() {
            let c = if k == 0 || (n % 2 == 0 && k == n / 2) {
                1.0
            } else {
                2.0
            };
            *p += c * buf[k].norm_sqr() / n as f64;
        }
    }
    let comps = rows.len() as f64;
    for p in power.iter_mut() {
        *p /= comps;
    }
    Ok(SpectrumReport {
        frequencies: (0..half).map(|k| k as f64 / (n as f64 * dt)).collect(),
        power,
        source: source.to_string(),
    })
}

/// Spectrum of a scalar time series.
pub fn power_spectrum(signal: &[f64], dt: f64, source: &str) -> Result<SpectrumReport, MetricsError> {
    spectrum_of_rows(std::slice::from_ref(&signal.to_vec()), dt, source)
}

/// Component-averaged spectrum of a trajectory (each state row is one
/// scalar signal).
pub fn power_spectrum_rows(tr: &Trajectory, source: &str) -> Result<SpectrumReport, MetricsError> {
    let rows: Vec<Vec<f64>> = (0..tr.dim()).map(|r| tr.states.row(r).to_vec()).collect();
    spectrum_of_rows(&rows, tr.dt, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdla_num::SplitMix64;

    #[test]
    fn pure_sinusoid_hits_a_single_bin() {
        let n = 256;
        let k = 17;
        let signal: Vec<f64> = (0..n)
            .map(|j| (2.0 * std::f64::consts::PI * k as f64 * j as f64 / n as f64).sin())
            .collect();
        let s = power_spectrum(&signal, 0.1, "sine").unwrap();
        assert_eq!(s.len(), n / 2 + 1);
        assert_eq!(s.dominant_bin(), k);
        let peak = s.power[k];
        for (bin, &p) in s.power.iter().enumerate() {
            if bin != k {
                assert!(p < 1e-20 * peak.max(1.0), "leak at bin {bin}: {p}");
            }
        }
    }

    #[test]
    fn parseval_holds_exactly() {
        let mut rng = SplitMix64::new(11);
        for &n in &[64usize, 255, 500] {
            let signal: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let s = power_spectrum(&signal, 0.05, "noise").unwrap();
            let mean = signal.iter().sum::<f64>() / n as f64;
            let var = signal.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let total = s.total_power();
            assert!(
                (total - n as f64 * var).abs() < 1e-10 * (n as f64 * var).max(1.0),
                "n={n}: {total} vs {}",
                n as f64 * var
            );
        }
    }

    #[test]
    fn white_noise_is_flat_on_average() {
        // Average the spectrum over many seeded realizations; the
        // max-to-mean ratio over interior bins tightens toward 1.
        let n = 256;
        let mut acc = vec![0.0f64; n / 2 + 1];
        for seed in 0..40u64 {
            let mut rng = SplitMix64::new(100 + seed);
            let signal: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let s = power_spectrum(&signal, 1.0, "noise").unwrap();
            for (a, p) in acc.iter_mut().zip(&s.power) {
                *a += p;
            }
        }
        let interior = &acc[1..n / 2];
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        let max = interior.iter().cloned().fold(0.0, f64::max);
        let min = interior.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / mean < 2.0, "max/mean {}", max / mean);
        assert!(min / mean > 0.4, "min/mean {}", min / mean);
    }

    #[test]
    fn frequencies_scale_with_dt() {
        let signal: Vec<f64> = (0..100).map(|j| (j as f64).sin()).collect();
        let s = power_spectrum(&signal, 0.25, "x").unwrap();
        assert_eq!(s.frequencies[0], 0.0);
        assert!((s.frequencies[1] - 1.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn short_signals_rejected() {
        assert!(power_spectrum(&[1.0, 2.0, 3.0], 0.1, "x").is_err());
    }
}
