//! Basin-of-attraction maps for the bistable oscillator.

use rayon::prelude::*;

/// Outcome of rolling out a grid of initial conditions to the horizon:
/// the final first coordinate and its classification as the nearest of
/// {-1, 0, +1}. Divergent rollouts are flagged instead of classified.
#[derive(Debug, Clone)]
pub struct BasinMap {
    pub ics: Vec<[f64; 2]>,
    pub final_x1: Vec<f64>,
    pub labels: Vec<i8>,
    pub divergent: Vec<bool>,
}

impl BasinMap {
    /// Fraction of non-divergent points whose labels agree with `other`.
    pub fn agreement(&self, other: &BasinMap) -> f64 {
        assert_eq!(self.labels.len(), other.labels.len());
        let mut same = 0usize;
        let mut total = 0usize;
        for i in 0..self.labels.len() {
            if self.divergent[i] || other.divergent[i] {
                continue;
            }
            total += 1;
            if self.labels[i] == other.labels[i] {
                same += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            same as f64 / total as f64
        }
    }
}

pub fn classify(x1: f64) -> i8 {
    // Nearest of {-1, 0, +1}.
    if x1 < -0.5 {
        -1
    } else if x1 > 0.5 {
        1
    } else {
        0
    }
}

/// Evaluate the map over the given initial conditions. The rollout closure
/// returns the final x1 at the horizon, or None when the rollout diverged.
pub fn basin_map<F>(ics: &[[f64; 2]], rollout: F) -> BasinMap
where
    F: Fn(&[f64; 2]) -> Option<f64> + Sync,
{
    let finals: Vec<Option<f64>> = ics.par_iter().map(|ic| rollout(ic)).collect();
    let mut final_x1 = Vec::with_capacity(ics.len());
    let mut labels = Vec::with_capacity(ics.len());
    let mut divergent = Vec::with_capacity(ics.len());
    for f in finals {
        match f {
            Some(v) if v.is_finite() => {
                final_x1.push(v);
                labels.push(classify(v));
                divergent.push(false);
            }
            _ => {
                final_x1.push(f64::NAN);
                labels.push(0);
                divergent.push(true);
            }
        }
    }
    BasinMap {
        ics: ics.to_vec(),
        final_x1,
        labels,
        divergent,
    }
}

/// Uniform grid over [-2, 2]² (row-major, side x side points).
pub fn ic_grid(side: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let x1 = -2.0 + 4.0 * (i as f64 + 0.5) / side as f64;
            let x2 = -2.0 + 4.0 * (j as f64 + 0.5) / side as f64;
            out.push([x1, x2]);
        }
    }
    out
}
