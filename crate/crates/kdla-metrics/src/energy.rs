//! The "energy" signal ||x(t)||² per stored sample.

use kdla_systems::Trajectory;

pub fn energy(tr: &Trajectory) -> Vec<f64> {
    (0..tr.len())
        .map(|j| (0..tr.dim()).map(|r| tr.states[(r, j)].powi(2)).sum())
        .collect()
}
