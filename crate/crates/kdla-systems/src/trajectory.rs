//! Time-indexed state sequences and paired snapshot datasets.

use kdla_num::Mat;

use crate::error::SystemsError;
use crate::spec::SystemSpec;

/// A trajectory: states are columns of an n x (Nt+1) matrix sampled at a
/// uniform step `dt` starting at `t0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Mat,
    pub dt: f64,
    pub t0: f64,
    pub system: Option<SystemSpec>,
    pub seed: Option<u64>,
    pub label: String,
}

impl Trajectory {
    pub fn new(states: Mat, dt: f64, t0: f64) -> Self {
        Trajectory {
            states,
            dt,
            t0,
            system: None,
            seed: None,
            label: String::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.states.rows()
    }

    /// Number of stored samples (Nt + 1).
    pub fn len(&self) -> usize {
        self.states.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.states.cols() == 0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn state(&self, i: usize) -> Vec<f64> {
        self.states.col(i)
    }

    /// Trajectory restricted to samples `[i0, i1)`.
    pub fn window(&self, i0: usize, i1: usize) -> Trajectory {
        let cols: Vec<usize> = (i0..i1).collect();
        Trajectory {
            states: self.states.select_cols(&cols),
            dt: self.dt,
            t0: self.time(i0),
            system: self.system.clone(),
            seed: self.seed,
            label: self.label.clone(),
        }
    }
}

/// Dataset provenance carried into every sidecar file.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub system: SystemSpec,
    pub seed: u64,
    pub dt: f64,
    pub horizon: f64,
    pub n_trajectories: usize,
    pub transient: f64,
    pub pair_stride: usize,
    pub substeps: usize,
}

/// M paired snapshots (x(t), x(t+dt)) pooled from source trajectories.
#[derive(Debug, Clone)]
pub struct SnapshotDataset {
    pub x_t: Mat,
    pub x_tdt: Mat,
    pub dt: f64,
    pub provenance: Option<Provenance>,
}

impl SnapshotDataset {
    /// Pool consecutive-sample pairs from trajectories, keeping every
    /// `stride`-th pair of each trajectory. Rejects non-finite data.
    pub fn from_trajectories(
        trajectories: &[Trajectory],
        stride: usize,
    ) -> Result<Self, SystemsError> {
        if trajectories.is_empty() {
            return Err(SystemsError::Config(
                "dataset needs at least one trajectory".into(),
            ));
        }
        let stride = stride.max(1);
        let n = trajectories[0].dim();
        let dt = trajectories[0].dt;
        let mut m = 0;
        for tr in trajectories {
            if tr.dim() != n {
                return Err(SystemsError::Config(
                    "trajectories have mixed state dimensions".into(),
                ));
            }
            if (tr.dt - dt).abs() > 1e-12 * dt.abs().max(1.0) {
                return Err(SystemsError::Config(
                    "trajectories have mixed sampling steps".into(),
                ));
            }
            if !tr.states.is_finite() {
                return Err(SystemsError::Config(format!(
                    "trajectory '{}' contains non-finite states",
                    tr.label
                )));
            }
            m += (tr.len().saturating_sub(1) + stride - 1) / stride;
        }
        if m == 0 {
            return Err(SystemsError::Config("dataset has zero snapshot pairs".into()));
        }
        let mut x_t = Mat::zeros(n, m);
        let mut x_tdt = Mat::zeros(n, m);
        let mut col = 0;
        for tr in trajectories {
            let mut i = 0;
            while i + 1 < tr.len() {
                for r in 0..n {
                    x_t[(r, col)] = tr.states[(r, i)];
                    x_tdt[(r, col)] = tr.states[(r, i + 1)];
                }
                col += 1;
                i += stride;
            }
        }
        debug_assert_eq!(col, m);
        Ok(SnapshotDataset {
            x_t,
            x_tdt,
            dt,
            provenance: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.x_t.rows()
    }

    pub fn len(&self) -> usize {
        self.x_t.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sub-dataset with the given pair columns.
    pub fn select(&self, idx: &[usize]) -> SnapshotDataset {
        SnapshotDataset {
            x_t: self.x_t.select_cols(idx),
            x_tdt: self.x_tdt.select_cols(idx),
            dt: self.dt,
            provenance: self.provenance.clone(),
        }
    }
}
