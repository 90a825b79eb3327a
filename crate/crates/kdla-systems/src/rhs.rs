//! Right-hand sides of the ODE benchmark systems and the Stuart-Landau
//! closed-form solution.

use crate::error::SystemsError;
use crate::spec::SystemSpec;

/// Evaluate dx/dt for the ODE systems. Panics if called on a PDE spec or
/// with the wrong state length.
pub fn rhs_eval(spec: &SystemSpec, x: &[f64], dxdt: &mut [f64]) {
    assert_eq!(x.len(), spec.dim(), "state length mismatch for {}", spec.name());
    assert_eq!(dxdt.len(), x.len());
    match *spec {
        SystemSpec::Duffing {
            lambda,
            beta,
            alpha,
        } => {
            dxdt[0] = x[1];
            dxdt[1] = -lambda * x[1] - x[0] * (beta + alpha * x[0] * x[0]);
        }
        SystemSpec::Rossler { a, b, c } => {
            dxdt[0] = -x[1] - x[2];
            dxdt[1] = x[0] + a * x[1];
            dxdt[2] = b + x[2] * (x[0] - c);
        }
        SystemSpec::CylinderRom {
            mu,
            omega,
            a,
            lambda,
        } => {
            dxdt[0] = mu * x[0] - omega * x[1] + a * x[0] * x[2];
            dxdt[1] = omega * x[0] + mu * x[1] + a * x[1] * x[2];
            dxdt[2] = -lambda * (x[2] - x[0] * x[0] - x[1] * x[1]);
        }
        SystemSpec::StuartLandau => {
            dxdt[0] = x[0] - x[0] * x[0] * x[0];
        }
        SystemSpec::Burgers { .. } | SystemSpec::Kse { .. } => {
            panic!("rhs_eval called on PDE spec {}", spec.name());
        }
    }
}

/// Closed-form Stuart-Landau solution R(T; R0) = 1 / sqrt(1 + b e^{-2T})
/// with b = (1 - R0²)/R0², so R(0; R0) = R0.
pub fn stuart_landau_exact(r0: f64, t: f64) -> Result<f64, SystemsError> {
    if r0 <= 0.0 {
        return Err(SystemsError::Config(format!(
            "stuart_landau_exact requires R0 > 0, got {r0}"
        )));
    }
    let b = (1.0 - r0 * r0) / (r0 * r0);
    Ok(1.0 / (1.0 + b * (-2.0 * t).exp()).sqrt())
}
