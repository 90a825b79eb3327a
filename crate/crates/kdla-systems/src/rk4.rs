//! Classical fixed-step RK4 for the ODE systems.

use kdla_num::Mat;

use crate::error::SystemsError;
use crate::rhs::rhs_eval;
use crate::spec::SystemSpec;
use crate::trajectory::Trajectory;

/// One RK4 step of size `h` for `spec`, writing the result into `x`.
/// `k1..k4, tmp` are scratch buffers of the state length.
#[allow(clippy::too_many_arguments)]
fn rk4_step(
    spec: &SystemSpec,
    x: &mut [f64],
    h: f64,
    k1: &mut [f64],
    k2: &mut [f64],
    k3: &mut [f64],
    k4: &mut [f64],
    tmp: &mut [f64],
) {
    let n = x.len();
    rhs_eval(spec, x, k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    rhs_eval(spec, tmp, k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    rhs_eval(spec, tmp, k3);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    rhs_eval(spec, tmp, k4);
    for i in 0..n {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Integrate from `x0`, storing a sample every `dt` for `nt` steps
/// (`nt + 1` stored states). Each sampling interval is subdivided into
/// `substeps` internal RK4 steps. Blow-up aborts with the failing step.
pub fn rk4_integrate(
    spec: &SystemSpec,
    x0: &[f64],
    dt: f64,
    nt: usize,
    substeps: usize,
) -> Result<Trajectory, SystemsError> {
    if spec.is_pde() {
        return Err(SystemsError::Config(format!(
            "{} is a PDE; use etdrk4_integrate",
            spec.name()
        )));
    }
    if x0.len() != spec.dim() {
        return Err(SystemsError::Config(format!(
            "initial condition has length {}, {} needs {}",
            x0.len(),
            spec.name(),
            spec.dim()
        )));
    }
    if dt <= 0.0 || substeps == 0 {
        return Err(SystemsError::Config("dt and substeps must be positive".into()));
    }
    let n = x0.len();
    let h = dt / substeps as f64;
    let mut x = x0.to_vec();
    let mut states = Mat::zeros(n, nt + 1);
    states.set_col(0, &x);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    for step in 1..=nt {
        for _ in 0..substeps {
            rk4_step(spec, &mut x, h, &mut k1, &mut k2, &mut k3, &mut k4, &mut tmp);
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SystemsError::Diverged {
                step,
                t: dt * step as f64,
            });
        }
        states.set_col(step, &x);
    }
    let mut tr = Trajectory::new(states, dt, 0.0);
    tr.system = Some(spec.clone());
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::stuart_landau_exact;

    #[test]
    fn stuart_landau_equilibrium_is_preserved() {
        let tr = rk4_integrate(&SystemSpec::StuartLandau, &[1.0], 0.04, 500, 1).unwrap();
        for i in 0..=500 {
            assert!((tr.states[(0, i)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stuart_landau_matches_closed_form() {
        let r0 = 1e-3;
        let tr = rk4_integrate(&SystemSpec::StuartLandau, &[r0], 0.04, 500, 4).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..=500 {
            let exact = stuart_landau_exact(r0, tr.time(i)).unwrap();
            max_err = max_err.max((tr.states[(0, i)] - exact).abs());
        }
        assert!(max_err < 1e-6, "max error {max_err}");
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Halving the step should shrink the endpoint error ~16x.
        let r0 = 0.2;
        let exact = stuart_landau_exact(r0, 2.0).unwrap();
        let err_at = |substeps: usize| {
            let tr = rk4_integrate(&SystemSpec::StuartLandau, &[r0], 2.0, 1, substeps).unwrap();
            (tr.states[(0, 1)] - exact).abs()
        };
        let e1 = err_at(4);
        let e2 = err_at(8);
        let ratio = e1 / e2;
        assert!(
            (10.0..26.0).contains(&ratio),
            "convergence ratio {ratio} (e1={e1}, e2={e2})"
        );
    }

    #[test]
    fn duffing_settles_to_a_spiral() {
        // From (2, 0) the trajectory approaches one of (±1, 0); the coarse
        // run must agree with a 10x finer reference run (Richardson
        // self-consistency) and resolve the basin by t = 10.
        let spec = SystemSpec::duffing();
        let coarse = rk4_integrate(&spec, &[2.0, 0.0], 0.1, 100, 10).unwrap();
        let fine = rk4_integrate(&spec, &[2.0, 0.0], 0.1, 100, 100).unwrap();
        let xc = coarse.states[(0, 100)];
        let xf = fine.states[(0, 100)];
        assert!((xc - xf).abs() < 1e-3, "Richardson check {xc} vs {xf}");
        assert!((xc.abs() - 1.0).abs() < 0.3, "basin resolved at t=10, got {xc}");
        // Fully settled on the longer horizon.
        let long = rk4_integrate(&spec, &[2.0, 0.0], 0.1, 300, 10).unwrap();
        let xl = long.states[(0, 300)];
        assert!((xl.abs() - 1.0).abs() < 1e-3, "settled by t=30, got {xl}");
    }

    #[test]
    fn pde_spec_rejected() {
        assert!(rk4_integrate(&SystemSpec::burgers(), &[0.0; 64], 0.1, 1, 1).is_err());
    }
}
