//! Adam optimizer over MLP parameters.

use crate::error::NumError;
use crate::matrix::Matrix;
use crate::mlp::{MlpGrads, MlpParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct AdamParams<T> {
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Real> Default for AdamParams<T> {
    fn default() -> Self {
        AdamParams {
            beta1: T::from_f64(0.9),
            beta2: T::from_f64(0.999),
            eps: T::from_f64(1e-8),
        }
    }
}

/// First/second-moment accumulators mirroring the parameter shapes.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    m_weights: Vec<Matrix<T>>,
    v_weights: Vec<Matrix<T>>,
    m_biases: Vec<Vec<T>>,
    v_biases: Vec<Vec<T>>,
    step: u64,
    pub hyper: AdamParams<T>,
}

impl<T: Real> AdamState<T> {
    pub fn new(params: &MlpParams<T>) -> Self {
        let zeros_w = || {
            params
                .weights()
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect::<Vec<_>>()
        };
        let zeros_b = || {
            params
                .biases()
                .iter()
                .map(|b| vec![T::zero(); b.len()])
                .collect::<Vec<_>>()
        };
        AdamState {
            m_weights: zeros_w(),
            v_weights: zeros_w(),
            m_biases: zeros_b(),
            v_biases: zeros_b(),
            step: 0,
            hyper: AdamParams::default(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

#[inline]
fn update_slice<T: Real>(
    p: &mut [T],
    g: &[T],
    m: &mut [T],
    v: &mut [T],
    lr: T,
    h: AdamParams<T>,
    bc1: T,
    bc2: T,
) {
    for i in 0..p.len() {
        let gi = g[i];
        m[i] = h.beta1 * m[i] + (T::one() - h.beta1) * gi;
        v[i] = h.beta2 * v[i] + (T::one() - h.beta2) * gi * gi;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        p[i] = p[i] - lr * m_hat / (v_hat.sqrt() + h.eps);
    }
}

/// One Adam update with bias correction. Rejects non-finite gradients so a
/// diverged epoch aborts instead of poisoning the parameters.
pub fn adam_step<T: Real>(
    params: &mut MlpParams<T>,
    grads: &MlpGrads<T>,
    state: &mut AdamState<T>,
    lr: T,
) -> Result<(), NumError> {
    if lr <= T::zero() {
        return Err(NumError::dim("adam_step", "learning rate must be positive"));
    }
    if grads.d_weights.len() != params.num_layers() || grads.d_biases.len() != params.num_layers()
    {
        return Err(NumError::dim("adam_step", "gradient layer count mismatch"));
    }
    if !grads.is_finite() {
        return Err(NumError::non_finite(
            "adam_step",
            format!("NaN/Inf gradient at step {}", state.step + 1),
        ));
    }
    state.step += 1;
    let h = state.hyper;
    let t = state.step as i32;
    let bc1 = T::one() - h.beta1.powi(t);
    let bc2 = T::one() - h.beta2.powi(t);
    for l in 0..params.num_layers() {
        update_slice(
            params.weights_mut()[l].data_mut(),
            grads.d_weights[l].data(),
            state.m_weights[l].data_mut(),
            state.v_weights[l].data_mut(),
            lr,
            h,
            bc1,
            bc2,
        );
        update_slice(
            &mut params.biases_mut()[l],
            &grads.d_biases[l],
            &mut state.m_biases[l],
            &mut state.v_biases[l],
            lr,
            h,
            bc1,
            bc2,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::Activation;

    fn scalar_net(w: f64) -> MlpParams<f64> {
        MlpParams::from_parts(
            vec![1, 1],
            vec![Matrix::from_rows(&[vec![w]])],
            vec![vec![0.0]],
            vec![Activation::Linear],
        )
        .unwrap()
    }

    #[test]
    fn zero_grads_leave_params_unchanged() {
        let mut net = MlpParams::new_seeded(&[2, 3, 1], &[Activation::Elu, Activation::Linear], 5);
        let before = net.clone();
        let grads = MlpGrads::zeros_like(&net);
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &grads, &mut state, 0.1).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn first_step_is_bias_corrected_unit_update() {
        // w = 1, g = 1, lr = 0.1: after one step w ~= 0.9 (up to eps).
        let mut net = scalar_net(1.0);
        let mut grads = MlpGrads::zeros_like(&net);
        grads.d_weights[0][(0, 0)] = 1.0;
        let mut state = AdamState::new(&net);
        adam_step(&mut net, &grads, &mut state, 0.1).unwrap();
        let w = net.weights()[0][(0, 0)];
        assert!((w - 0.9).abs() < 1e-7, "w after first step: {w}");
    }

    #[test]
    fn deterministic_across_runs() {
        let run = || {
            let mut net =
                MlpParams::new_seeded(&[2, 4, 2], &[Activation::Tanh, Activation::Linear], 9);
            let mut state = AdamState::new(&net);
            let x = Matrix::from_rows(&[vec![0.5, -0.5], vec![1.0, 0.25]]);
            let u = Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, 2.0]]);
            for _ in 0..25 {
                let (_, cache) = net.forward(&x).unwrap();
                let (grads, _) = net.backward(&cache, &u).unwrap();
                adam_step(&mut net, &grads, &mut state, 1e-3).unwrap();
            }
            net
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
    }

    #[test]
    fn nan_grads_rejected() {
        let mut net = scalar_net(1.0);
        let mut grads = MlpGrads::zeros_like(&net);
        grads.d_weights[0][(0, 0)] = f64::NAN;
        let mut state = AdamState::new(&net);
        let err = adam_step(&mut net, &grads, &mut state, 0.1);
        assert!(matches!(err, Err(NumError::NonFinite { .. })));
        assert_eq!(state.step_count(), 0);
    }
}
