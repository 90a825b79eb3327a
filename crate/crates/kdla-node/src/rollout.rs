//! Iterated one-step prediction.

use kdla_num::Mat;
use kdla_systems::Trajectory;

use crate::error::NodeError;
use crate::model::NodeModel;
use crate::train::node_predict;

/// A rollout that may have been cut short by a numerical blow-up; the
/// trajectory holds everything up to the last finite state.
#[derive(Debug, Clone)]
pub struct NodeRollout {
    pub trajectory: Trajectory,
    pub truncated_at: Option<usize>,
}

/// Roll the model forward `nt` steps from `x0`.
pub fn node_evolve(model: &NodeModel, x0: &[f64], nt: usize) -> Result<NodeRollout, NodeError> {
    if x0.len() != model.state_dim() {
        return Err(NodeError::Config(format!(
            "initial state has length {}, model expects {}",
            x0.len(),
            model.state_dim()
        )));
    }
    let n = x0.len();
    let mut states = Mat::zeros(n, nt + 1);
    states.set_col(0, x0);
    let mut x = Mat::col_vector(x0);
    let mut truncated_at = None;
    let mut valid = 0usize;
    for step in 1..=nt {
        match node_predict(model, &x) {
            Ok(next) => {
                x = next;
                for r in 0..n {
                    states[(r, step)] = x[(r, 0)];
                }
                valid = step;
            }
            Err(_) => {
                truncated_at = Some(step);
                break;
            }
        }
    }
    let keep: Vec<usize> = (0..=valid).collect();
    let mut tr = Trajectory::new(states.select_cols(&keep), model.dt, 0.0);
    tr.label = match truncated_at {
        Some(s) => format!("node rollout (truncated at step {s})"),
        None => "node rollout".into(),
    };
    Ok(NodeRollout {
        trajectory: tr,
        truncated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeMetadata;
    use kdla_num::Activation;

    fn model_from_net(net: kdla_num::Mlp, dt: f64) -> NodeModel {
        NodeModel::new(net, dt, 1, NodeMetadata::default()).unwrap()
    }

    #[test]
    fn zero_field_gives_constant_trajectory() {
        let net = kdla_num::Mlp::from_parts(
            vec![2, 2],
            vec![Mat::zeros(2, 2)],
            vec![vec![0.0; 2]],
            vec![Activation::Linear],
        )
        .unwrap();
        let roll = node_evolve(&model_from_net(net, 0.1), &[1.0, -1.0], 8).unwrap();
        assert!(roll.truncated_at.is_none());
        assert_eq!(roll.trajectory.len(), 9);
        for j in 0..9 {
            assert_eq!(roll.trajectory.states[(0, j)], 1.0);
            assert_eq!(roll.trajectory.states[(1, j)], -1.0);
        }
    }

    #[test]
    fn linear_decay_is_geometric_per_step() {
        let mut w = Mat::identity(1);
        w.scale_mut(-1.0);
        let net = kdla_num::Mlp::from_parts(
            vec![1, 1],
            vec![w],
            vec![vec![0.0]],
            vec![Activation::Linear],
        )
        .unwrap();
        let dt = 0.2;
        let roll = node_evolve(&model_from_net(net, dt), &[1.0], 5).unwrap();
        let factor = 1.0 - dt + dt * dt / 2.0 - dt.powi(3) / 6.0 + dt.powi(4) / 24.0;
        for j in 0..=5 {
            let expect = factor.powi(j as i32);
            assert!((roll.trajectory.states[(0, j)] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_steps_returns_only_the_initial_state() {
        let net = kdla_num::Mlp::new_seeded(&[2, 4, 2], &[Activation::Tanh, Activation::Linear], 1);
        let roll = node_evolve(&model_from_net(net, 0.1), &[0.5, 0.5], 0).unwrap();
        assert_eq!(roll.trajectory.len(), 1);
    }

    #[test]
    fn blow_up_truncates_with_diagnostic() {
        // An expanding linear field overflows after enough doublings.
        let mut w = Mat::identity(1);
        w.scale_mut(700.0);
        let net = kdla_num::Mlp::from_parts(
            vec![1, 1],
            vec![w],
            vec![vec![0.0]],
            vec![Activation::Linear],
        )
        .unwrap();
        let roll = node_evolve(&model_from_net(net, 1.0), &[1.0], 50).unwrap();
        assert!(roll.truncated_at.is_some());
        assert!(roll.trajectory.len() < 51);
        assert!(roll.trajectory.states.is_finite());
    }
}
