//! Time evolution of trained models.
//!
//! Observable-only: lift once, iterate Ψ ← K Ψ, project every iterate back
//! to the state block — evolution is linear after the initial lift.
//! State-observable: re-lift the projected state every m steps, which
//! injects the nonlinearity of the lift/readback pair into the rollout.
//! With m >= Nt the two coincide (single lift), and they always agree on
//! the first emitted step.

use kdla_num::Mat;
use kdla_systems::Trajectory;

use crate::error::KoopmanError;
use crate::model::KoopmanModel;

fn check_x0(model: &KoopmanModel, x0: &[f64]) -> Result<(), KoopmanError> {
    if x0.len() != model.state_dim() {
        return Err(KoopmanError::Config(format!(
            "initial state has length {}, model expects {}",
            x0.len(),
            model.state_dim()
        )));
    }
    Ok(())
}

/// Pure Koopman rollout: all Nt steps in the observable space.
pub fn evolve_observable_only(
    model: &KoopmanModel,
    x0: &[f64],
    nt: usize,
) -> Result<Trajectory, KoopmanError> {
    check_x0(model, x0)?;
    let n = model.state_dim();
    let mut states = Mat::zeros(n, nt + 1);
    let mut psi = model.dictionary.lift(&Mat::col_vector(x0))?;
    for r in 0..n {
        states[(r, 0)] = psi[(r, 0)];
    }
    for step in 1..=nt {
        psi = model.k.mul(&psi);
        for r in 0..n {
            states[(r, step)] = psi[(r, 0)];
        }
    }
    let mut tr = Trajectory::new(states, model.dt, 0.0);
    tr.label = "koopman-oo".into();
    Ok(tr)
}

/// Alternating rollout: spend m steps in the observable space, project to
/// the state, re-lift, repeat until Nt steps are emitted. m = 1 re-lifts
/// every step.
pub fn evolve_state_observable(
    model: &KoopmanModel,
    x0: &[f64],
    nt: usize,
    m: usize,
) -> Result<Trajectory, KoopmanError> {
    check_x0(model, x0)?;
    if m == 0 {
        return Err(KoopmanError::Config("m must be >= 1".into()));
    }
    let n = model.state_dim();
    let mut states = Mat::zeros(n, nt + 1);
    let mut x = x0.to_vec();
    states.set_col(0, &x);
    let mut emitted = 0usize;
    while emitted < nt {
        let mut psi = model.dictionary.lift(&Mat::col_vector(&x))?;
        let mut inner = 0usize;
        while inner < m && emitted < nt {
            psi = model.k.mul(&psi);
            emitted += 1;
            inner += 1;
            for r in 0..n {
                states[(r, emitted)] = psi[(r, 0)];
            }
        }
        for (r, xi) in x.iter_mut().enumerate() {
            *xi = psi[(r, 0)];
        }
    }
    let mut tr = Trajectory::new(states, model.dt, 0.0);
    tr.label = format!("koopman-so(m={m})");
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{DictionaryArch, DictionaryNet};
    use crate::model::{KoopmanModel, TrainMetadata};
    use kdla_num::Activation;

    fn model_with_k(k: Mat, n: usize, d: usize, seed: u64) -> KoopmanModel {
        let arch = DictionaryArch {
            hidden: if d == 0 { vec![] } else { vec![6] },
            trainable_dim: d,
            activations: vec![Activation::Elu; if d == 0 { 1 } else { 2 }],
            include_constant: false,
        };
        let dict = DictionaryNet::new(n, &arch, seed).unwrap();
        KoopmanModel::new(k, dict, 0.1, TrainMetadata::default()).unwrap()
    }

    #[test]
    fn identity_k_freezes_the_state() {
        let model = model_with_k(Mat::identity(5), 2, 3, 1);
        let tr = evolve_observable_only(&model, &[0.4, -0.7], 10).unwrap();
        for j in 0..=10 {
            assert_eq!(tr.states[(0, j)], 0.4);
            assert_eq!(tr.states[(1, j)], -0.7);
        }
        let tr_so = evolve_state_observable(&model, &[0.4, -0.7], 10, 3).unwrap();
        for j in 0..=10 {
            assert!((tr_so.states[(0, j)] - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_geometric_decay() {
        let mut k = Mat::zeros(1, 1);
        k[(0, 0)] = 0.5;
        let model = model_with_k(k, 1, 0, 1);
        let tr = evolve_observable_only(&model, &[1.0], 3).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125];
        for (j, e) in expect.iter().enumerate() {
            assert_eq!(tr.states[(0, j)], *e);
        }
    }

    #[test]
    fn contractive_k_decays_monotonically() {
        let mut k = Mat::identity(4);
        k.scale_mut(0.8);
        let model = model_with_k(k, 2, 2, 2);
        let tr = evolve_observable_only(&model, &[1.0, -1.0], 20).unwrap();
        let norm = |j: usize| (tr.states[(0, j)].powi(2) + tr.states[(1, j)].powi(2)).sqrt();
        for j in 1..=20 {
            assert!(norm(j) < norm(j - 1) + 1e-15);
        }
    }

    #[test]
    fn m_at_least_nt_reproduces_observable_only_exactly() {
        let mut r = kdla_num::SplitMix64::new(7);
        let k = Mat::from_fn(5, 5, |_, _| r.uniform_in(-0.4, 0.4));
        let model = model_with_k(k, 2, 3, 3);
        let oo = evolve_observable_only(&model, &[0.3, 0.9], 12).unwrap();
        for m in [12usize, 13, 100] {
            let so = evolve_state_observable(&model, &[0.3, 0.9], 12, m).unwrap();
            assert_eq!(so.states, oo.states, "m = {m}");
        }
    }

    #[test]
    fn first_step_agrees_exactly_for_m_one() {
        let mut r = kdla_num::SplitMix64::new(8);
        let k = Mat::from_fn(6, 6, |_, _| r.uniform_in(-0.4, 0.4));
        let model = model_with_k(k, 3, 3, 4);
        let oo = evolve_observable_only(&model, &[0.1, 0.2, 0.3], 5).unwrap();
        let so = evolve_state_observable(&model, &[0.1, 0.2, 0.3], 5, 1).unwrap();
        for r_ in 0..3 {
            assert_eq!(so.states[(r_, 1)], oo.states[(r_, 1)]);
        }
    }

    #[test]
    fn empty_dictionary_makes_m_irrelevant() {
        // With Ψ = x the lift/readback pair is the identity, so every m
        // gives the same matrix power sequence.
        let mut r = kdla_num::SplitMix64::new(9);
        let k = Mat::from_fn(3, 3, |_, _| r.uniform_in(-0.5, 0.5));
        let model = model_with_k(k, 3, 0, 5);
        let a = evolve_state_observable(&model, &[1.0, 0.5, -0.5], 9, 1).unwrap();
        let b = evolve_state_observable(&model, &[1.0, 0.5, -0.5], 9, 9).unwrap();
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn shape_and_m_validation() {
        let model = model_with_k(Mat::identity(5), 2, 3, 6);
        assert!(evolve_observable_only(&model, &[1.0], 3).is_err());
        assert!(evolve_state_observable(&model, &[1.0, 2.0], 3, 0).is_err());
    }
}
