//! Benchmark system definitions with their literature parameter values.

use serde::{Deserialize, Serialize};

use crate::error::SystemsError;

/// A benchmark dynamical system together with its parameters.
///
/// The PDE variants carry the grid size used for the *stored* state; truth
/// integration may run at a finer internal resolution (see
/// [`crate::recipe::DatasetRecipe`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SystemSpec {
    /// Unforced Duffing oscillator: two stable spirals at x1 = ±1, saddle
    /// at the origin.
    Duffing { lambda: f64, beta: f64, alpha: f64 },
    /// Rössler system in the sparse-chaotic-attractor regime.
    Rossler { a: f64, b: f64, c: f64 },
    /// Three-mode model of the cylinder-wake transient: unstable origin,
    /// globally attracting limit cycle on the paraboloid x3 = x1² + x2².
    CylinderRom { mu: f64, omega: f64, a: f64, lambda: f64 },
    /// Rescaled Stuart-Landau amplitude equation dR/dT = R - R³.
    StuartLandau,
    /// Viscous Burgers equation on x in [-1, 1), 2-periodic.
    Burgers { nu: f64, grid_points: usize },
    /// Kuramoto-Sivashinsky on x in [-L/2, L/2), L-periodic.
    Kse { l: f64, grid_points: usize },
}

impl SystemSpec {
    pub fn duffing() -> Self {
        SystemSpec::Duffing {
            lambda: 0.5,
            beta: -1.0,
            alpha: 1.0,
        }
    }

    pub fn rossler() -> Self {
        SystemSpec::Rossler {
            a: 0.1,
            b: 0.1,
            c: 9.0,
        }
    }

    pub fn cylinder_rom() -> Self {
        SystemSpec::CylinderRom {
            mu: 0.1,
            omega: 1.0,
            a: -0.1,
            lambda: 10.0,
        }
    }

    pub fn burgers() -> Self {
        SystemSpec::Burgers {
            nu: 0.01,
            grid_points: 64,
        }
    }

    pub fn kse(l: f64) -> Self {
        SystemSpec::Kse { l, grid_points: 64 }
    }

    /// State dimension n.
    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::Duffing { .. } => 2,
            SystemSpec::Rossler { .. } | SystemSpec::CylinderRom { .. } => 3,
            SystemSpec::StuartLandau => 1,
            SystemSpec::Burgers { grid_points, .. } | SystemSpec::Kse { grid_points, .. } => {
                *grid_points
            }
        }
    }

    pub fn is_pde(&self) -> bool {
        matches!(self, SystemSpec::Burgers { .. } | SystemSpec::Kse { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::Duffing { .. } => "duffing",
            SystemSpec::Rossler { .. } => "rossler",
            SystemSpec::CylinderRom { .. } => "cylinder",
            SystemSpec::StuartLandau => "stuart-landau",
            SystemSpec::Burgers { .. } => "burgers",
            SystemSpec::Kse { .. } => "kse",
        }
    }

    pub fn validate(&self) -> Result<(), SystemsError> {
        match self {
            SystemSpec::Burgers { nu, grid_points } => {
                if *nu <= 0.0 {
                    return Err(SystemsError::Config("burgers: nu must be > 0".into()));
                }
                check_power_of_two(*grid_points)
            }
            SystemSpec::Kse { l, grid_points } => {
                if *l <= 0.0 {
                    return Err(SystemsError::Config("kse: L must be > 0".into()));
                }
                check_power_of_two(*grid_points)
            }
            _ => Ok(()),
        }
    }
}

fn check_power_of_two(n: usize) -> Result<(), SystemsError> {
    if n == 0 || !n.is_power_of_two() {
        Err(SystemsError::Config(format!(
            "grid_points must be a power of two, got {n}"
        )))
    } else {
        Ok(())
    }
}
