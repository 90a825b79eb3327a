//! Dataset recipes for the benchmark systems.
//!
//! Each recipe captures the published data-generation protocol for one
//! system: sampling step, horizon, number of initial conditions, transient
//! cut, and the internal integration refinement. `pair_stride` thins the
//! pooled snapshot pairs for reduced-budget runs while keeping every kept
//! column a consecutive-sample pair.

use rayon::prelude::*;

use kdla_num::{stream_seed, SplitMix64};

use crate::error::SystemsError;
use crate::etdrk4::{etdrk4_integrate, PseudoSpectral};
use crate::ic::{burgers_ic, grid_points, kse_ic};
use crate::rk4::rk4_integrate;
use crate::spec::SystemSpec;
use crate::trajectory::{Provenance, SnapshotDataset, Trajectory};

#[derive(Debug, Clone)]
pub struct DatasetRecipe {
    pub system: SystemSpec,
    pub seed: u64,
    /// Sampling interval of stored snapshots.
    pub dt: f64,
    /// Time horizon per trajectory (after t = 0, before transient cut).
    pub horizon: f64,
    pub n_trajectories: usize,
    /// Leading time span discarded from every trajectory.
    pub transient: f64,
    /// Internal integrator steps per sampling interval.
    pub substeps: usize,
    /// Keep every k-th snapshot pair (1 keeps all).
    pub pair_stride: usize,
    /// PDE truth runs on a grid this many times finer than the stored one.
    pub fine_grid_factor: usize,
}

impl DatasetRecipe {
    /// Published protocol for a named case. Case names follow the CLI:
    /// duffing, rossler, cylinder, burgers, kse-tw, kse-beating,
    /// kse-chaos, stuart-landau.
    pub fn paper_default(case: &str) -> Result<DatasetRecipe, SystemsError> {
        let r = match case {
            "duffing" => DatasetRecipe {
                system: SystemSpec::duffing(),
                seed: 1,
                dt: 0.1,
                horizon: 10.0,
                n_trajectories: 100,
                transient: 0.0,
                substeps: 10,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "rossler" => DatasetRecipe {
                system: SystemSpec::rossler(),
                seed: 1,
                dt: 0.1,
                horizon: 1000.0,
                n_trajectories: 1,
                transient: 100.0,
                substeps: 10,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "cylinder" => DatasetRecipe {
                system: SystemSpec::cylinder_rom(),
                seed: 1,
                dt: 0.25,
                horizon: 50.0,
                n_trajectories: 100,
                transient: 0.0,
                substeps: 10,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "burgers" => DatasetRecipe {
                system: SystemSpec::burgers(),
                seed: 1,
                dt: 0.1,
                horizon: 20.0,
                n_trajectories: 20,
                transient: 0.0,
                substeps: 50,
                pair_stride: 1,
                fine_grid_factor: 4,
            },
            "kse-tw" => DatasetRecipe {
                system: SystemSpec::kse(12.0),
                seed: 1,
                dt: 0.25,
                horizon: 10_000.0,
                n_trajectories: 1,
                transient: 200.0,
                substeps: 2,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "kse-beating" => DatasetRecipe {
                system: SystemSpec::kse(29.30),
                seed: 1,
                dt: 0.05,
                horizon: 2000.0,
                n_trajectories: 1,
                transient: 200.0,
                substeps: 1,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "kse-chaos" => DatasetRecipe {
                system: SystemSpec::kse(22.0),
                seed: 1,
                dt: 0.05,
                horizon: 1000.0,
                n_trajectories: 1,
                transient: 200.0,
                substeps: 1,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            "stuart-landau" => DatasetRecipe {
                system: SystemSpec::StuartLandau,
                seed: 1,
                dt: 0.04,
                horizon: 20.0,
                n_trajectories: 1,
                transient: 0.0,
                substeps: 5,
                pair_stride: 1,
                fine_grid_factor: 1,
            },
            other => {
                return Err(SystemsError::Config(format!(
                    "unknown system case '{other}' (expected one of: duffing, rossler, \
                     cylinder, burgers, kse-tw, kse-beating, kse-chaos, stuart-landau)"
                )))
            }
        };
        Ok(r)
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            system: self.system.clone(),
            seed: self.seed,
            dt: self.dt,
            horizon: self.horizon,
            n_trajectories: self.n_trajectories,
            transient: self.transient,
            pair_stride: self.pair_stride,
            substeps: self.substeps,
        }
    }

    fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Sample an initial condition for trajectory `idx` of the recipe.
pub fn sample_ic(system: &SystemSpec, seed: u64, idx: usize) -> Vec<f64> {
    let mut rng = SplitMix64::new(stream_seed(seed, idx as u64));
    match system {
        SystemSpec::Duffing { .. } => {
            vec![rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0)]
        }
        SystemSpec::Rossler { .. } => vec![
            rng.uniform_in(-5.0, 5.0),
            rng.uniform_in(-5.0, 5.0),
            rng.uniform_in(0.0, 2.0),
        ],
        SystemSpec::CylinderRom { .. } => vec![
            rng.uniform_in(-1.1, 1.1),
            rng.uniform_in(-1.1, 1.1),
            rng.uniform_in(0.0, 2.42),
        ],
        SystemSpec::StuartLandau => {
            // The published trajectory starts at R0 = 1e-3; extra
            // trajectories draw from the basin.
            if idx == 0 {
                vec![1e-3]
            } else {
                vec![rng.uniform_in(1e-3, 2.0)]
            }
        }
        SystemSpec::Burgers { .. } | SystemSpec::Kse { .. } => {
            unreachable!("PDE initial conditions are built on the integration grid")
        }
    }
}

/// Integrate all trajectories of a recipe (before transient cut).
pub fn generate_trajectories(recipe: &DatasetRecipe) -> Result<Vec<Trajectory>, SystemsError> {
    recipe.system.validate()?;
    if recipe.n_trajectories == 0 {
        return Err(SystemsError::Config("recipe has zero trajectories".into()));
    }
    let nt = recipe.steps();
    let run_one = |idx: usize| -> Result<Trajectory, SystemsError> {
        let mut tr = match &recipe.system {
            SystemSpec::Burgers { nu, grid_points: n } => {
                let fine = n * recipe.fine_grid_factor.max(1);
                let grid = grid_points(fine, -1.0, 1.0);
                let mut rng = SplitMix64::new(stream_seed(recipe.seed, idx as u64));
                let (a1, a2, s1, s2) = (
                    rng.uniform(),
                    rng.uniform(),
                    rng.uniform(),
                    rng.uniform(),
                );
                let u0 = burgers_ic(a1, a2, s1, s2, &grid);
                let ps = PseudoSpectral::burgers(fine, *nu);
                let fine_tr = etdrk4_integrate(&ps, &u0, recipe.dt, nt, recipe.substeps)?;
                subsample_rows(fine_tr, recipe.fine_grid_factor.max(1))
            }
            SystemSpec::Kse { l, grid_points: n } => {
                let fine = n * recipe.fine_grid_factor.max(1);
                let u0 = kse_ic(fine, stream_seed(recipe.seed, idx as u64));
                let ps = PseudoSpectral::kse(fine, *l);
                let fine_tr = etdrk4_integrate(&ps, &u0, recipe.dt, nt, recipe.substeps)?;
                subsample_rows(fine_tr, recipe.fine_grid_factor.max(1))
            }
            ode => {
                let x0 = sample_ic(ode, recipe.seed, idx);
                rk4_integrate(ode, &x0, recipe.dt, nt, recipe.substeps)?
            }
        };
        tr.system = Some(recipe.system.clone());
        tr.seed = Some(stream_seed(recipe.seed, idx as u64));
        tr.label = format!("traj-{idx:04}");
        Ok(tr)
    };
    // Trajectories are independent; results are merged by index.
    (0..recipe.n_trajectories)
        .into_par_iter()
        .map(run_one)
        .collect()
}

fn subsample_rows(tr: Trajectory, factor: usize) -> Trajectory {
    if factor <= 1 {
        return tr;
    }
    let n = tr.states.rows() / factor;
    let mut states = kdla_num::Mat::zeros(n, tr.states.cols());
    for i in 0..n {
        for j in 0..tr.states.cols() {
            states[(i, j)] = tr.states[(i * factor, j)];
        }
    }
    Trajectory {
        states,
        ..tr
    }
}

/// Full recipe execution: integrate, cut transients, pool snapshot pairs.
pub fn generate_dataset(recipe: &DatasetRecipe) -> Result<SnapshotDataset, SystemsError> {
    let trajectories = generate_trajectories(recipe)?;
    let cut = (recipe.transient / recipe.dt).round() as usize;
    let windows: Vec<Trajectory> = trajectories
        .iter()
        .map(|tr| {
            if cut + 1 >= tr.len() {
                Err(SystemsError::Config(format!(
                    "transient cut {} leaves no data (trajectory has {} samples)",
                    recipe.transient,
                    tr.len()
                )))
            } else {
                Ok(tr.window(cut, tr.len()))
            }
        })
        .collect::<Result<_, _>>()?;
    let mut ds = SnapshotDataset::from_trajectories(&windows, recipe.pair_stride)?;
    ds.provenance = Some(recipe.provenance());
    Ok(ds)
}
