//! Initial-condition constructors and samplers.

use kdla_num::SplitMix64;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Uniform periodic grid of `n` points on `[lo, hi)`.
pub fn grid_points(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// Burgers initial profile
/// `u(x,0) = 3 A1 sech²(3 sin(π(x - 2 s1))) + 5 A2 sech²(3 sin(π(x - 2 s2)))`,
/// 2-periodic by construction; the four constants live in [0, 1].
pub fn burgers_ic(a1: f64, a2: f64, s1: f64, s2: f64, grid: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    grid.iter()
        .map(|&x| {
            3.0 * a1 * sech2(3.0 * (PI * (x - 2.0 * s1)).sin())
                + 5.0 * a2 * sech2(3.0 * (PI * (x - 2.0 * s2)).sin())
        })
        .collect()
}

/// Random real field from a finite Fourier series: modes 1 <= |m| <= 8 get
/// i.i.d. standard-normal real/imaginary coefficients (Hermitian symmetry,
/// zero mean), and the field is rescaled to RMS 0.5 so transients start at
/// a consistent amplitude. Higher modes carry exactly zero power.
pub fn kse_ic(n: usize, seed: u64) -> Vec<f64> {
    assert!(n.is_power_of_two() && n >= 32, "grid must be a power of two");
    let mut rng = SplitMix64::new(seed);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..=8usize {
        let c = Complex64::new(rng.normal(), rng.normal());
        spec[m] = c;
        spec[n - m] = c.conj();
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut spec);
    let mut u: Vec<f64> = spec.iter().map(|z| z.re / n as f64).collect();
    let rms = (u.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        let s = 0.5 / rms;
        for x in u.iter_mut() {
            *x *= s;
        }
    }
    u
}
