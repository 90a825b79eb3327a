//! One-step prediction through RK4 and its exact reverse pass.
//!
//! A forward substep evaluates the vector field four times:
//!
//! ```text
//! k1 = f(y)            a = y + h/2 k1
//! k2 = f(a)            b = y + h/2 k2
//! k3 = f(b)            c = y + h k3
//! k4 = f(c)            y' = y + h/6 (k1 + 2 k2 + 2 k3 + k4)
//! ```
//!
//! The reverse pass walks the stages backwards, accumulating parameter
//! gradients from each of the four MLP evaluations. Differentiating the
//! discrete scheme (rather than solving a continuous adjoint) makes the
//! gradient of the discrete loss exact to machine precision, which the
//! finite-difference suites verify.

use kdla_num::{adam_step, AdamState, Grads, Mat, MlpCache, SplitMix64};
use kdla_systems::SnapshotDataset;

use crate::error::NodeError;
use crate::model::{NodeMetadata, NodeModel};

#[derive(Debug, Clone)]
pub struct NodeArch {
    pub hidden: Vec<usize>,
    pub activations: Vec<kdla_num::Activation>,
}

impl NodeArch {
    /// Two hidden layers of 200 sigmoid units, linear output.
    pub fn paper_default() -> Self {
        NodeArch {
            hidden: vec![200, 200],
            activations: vec![
                kdla_num::Activation::Sigmoid,
                kdla_num::Activation::Sigmoid,
                kdla_num::Activation::Linear,
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodeTrainConfig {
    pub epochs: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    pub seed: u64,
    pub substeps: usize,
    pub batch_size: Option<usize>,
}

impl Default for NodeTrainConfig {
    fn default() -> Self {
        NodeTrainConfig {
            epochs: 500,
            lr_initial: 1e-3,
            lr_final: 1e-4,
            seed: 0,
            substeps: 1,
            batch_size: None,
        }
    }
}

/// Stage records of one RK4 substep over a column batch.
struct StageTape {
    cache_y: MlpCache<f64>,
    cache_a: MlpCache<f64>,
    cache_b: MlpCache<f64>,
    cache_c: MlpCache<f64>,
}

fn rk4_forward(
    net: &kdla_num::Mlp,
    x: &Mat,
    h: f64,
    substeps: usize,
    tape: Option<&mut Vec<StageTape>>,
) -> Result<Mat, NodeError> {
    let mut y = x.clone();
    let mut tapes = tape;
    for _ in 0..substeps {
        let (k1, cache_y) = net.forward(&y)?;
        let mut a = y.clone();
        a.axpy(h / 2.0, &k1);
        let (k2, cache_a) = net.forward(&a)?;
        let mut b = y.clone();
        b.axpy(h / 2.0, &k2);
        let (k3, cache_b) = net.forward(&b)?;
        let mut c = y.clone();
        c.axpy(h, &k3);
        let (k4, cache_c) = net.forward(&c)?;
        let mut next = y.clone();
        next.axpy(h / 6.0, &k1);
        next.axpy(h / 3.0, &k2);
        next.axpy(h / 3.0, &k3);
        next.axpy(h / 6.0, &k4);
        if let Some(t) = tapes.as_deref_mut() {
            t.push(StageTape {
                cache_y,
                cache_a,
                cache_b,
                cache_c,
            });
        }
        y = next;
    }
    Ok(y)
}

/// One-step prediction x(t) -> x(t + dt) for a column batch.
pub fn node_predict(model: &NodeModel, x: &Mat) -> Result<Mat, NodeError> {
    if x.rows() != model.state_dim() {
        return Err(NodeError::Config(format!(
            "state rows {}, model expects {}",
            x.rows(),
            model.state_dim()
        )));
    }
    let h = model.dt / model.substeps as f64;
    let y = rk4_forward(&model.net, x, h, model.substeps, None)?;
    if !y.is_finite() {
        return Err(NodeError::Config(
            "prediction produced non-finite values".into(),
        ));
    }
    Ok(y)
}

/// Mean-squared one-step loss `L = (1/(nN)) Σ ||x(t+δt) − x̃(t+δt)||²` and
/// its exact gradient through all RK4 stages.
pub fn node_loss_grad(
    net: &kdla_num::Mlp,
    x_t: &Mat,
    x_tdt: &Mat,
    dt: f64,
    substeps: usize,
) -> Result<(f64, Grads), NodeError> {
    let (n, m) = (x_t.rows(), x_t.cols());
    let h = dt / substeps as f64;
    let mut tape = Vec::with_capacity(substeps);
    let pred = rk4_forward(net, x_t, h, substeps, Some(&mut tape))?;
    let r = pred.sub(x_tdt);
    let scale = 1.0 / (n * m) as f64;
    let loss = r.fro_norm().powi(2) * scale;

    let mut grads = Grads::zeros_like(net);
    let mut y_bar = r.scale(2.0 * scale);
    for stage in tape.iter().rev() {
        // Upstream on the substep output is y_bar; distribute to stages.
        let g = y_bar.clone();
        let k4_bar = g.scale(h / 6.0);
        let (gc, c_bar) = net.backward(&stage.cache_c, &k4_bar)?;
        grads.add_assign(&gc);
        y_bar.add_assign(&c_bar);

        let mut k3_bar = g.scale(h / 3.0);
        k3_bar.axpy(h, &c_bar);
        let (gb, b_bar) = net.backward(&stage.cache_b, &k3_bar)?;
        grads.add_assign(&gb);
        y_bar.add_assign(&b_bar);

        let mut k2_bar = g.scale(h / 3.0);
        k2_bar.axpy(h / 2.0, &b_bar);
        let (ga, a_bar) = net.backward(&stage.cache_a, &k2_bar)?;
        grads.add_assign(&ga);
        y_bar.add_assign(&a_bar);

        let mut k1_bar = g.scale(h / 6.0);
        k1_bar.axpy(h / 2.0, &a_bar);
        let (gy, x_bar) = net.backward(&stage.cache_y, &k1_bar)?;
        grads.add_assign(&gy);
        y_bar.add_assign(&x_bar);
    }
    Ok((loss, grads))
}

/// Train the vector field on snapshot pairs; returns the parameters of the
/// epoch with minimum recorded loss.
pub fn train_node(
    dataset: &SnapshotDataset,
    arch: &NodeArch,
    config: &NodeTrainConfig,
) -> Result<NodeModel, NodeError> {
    if config.epochs == 0 {
        return Err(NodeError::Config("epochs must be >= 1".into()));
    }
    if arch.activations.len() != arch.hidden.len() + 1 {
        return Err(NodeError::Config(format!(
            "architecture needs {} activation tags, got {}",
            arch.hidden.len() + 1,
            arch.activations.len()
        )));
    }
    let n = dataset.dim();
    let mut sizes = vec![n];
    sizes.extend_from_slice(&arch.hidden);
    sizes.push(n);
    let mut net = kdla_num::Mlp::new_seeded(&sizes, &arch.activations, config.seed);
    let mut adam = AdamState::new(&net);
    let m = dataset.len();
    let batch = config.batch_size.filter(|&b| b > 0 && b < m);
    let mut loss_curve = Vec::with_capacity(config.epochs);
    let mut best = (f64::INFINITY, net.clone(), 0usize);

    for epoch in 0..config.epochs {
        let lr = if epoch < config.epochs / 2 {
            config.lr_initial
        } else {
            config.lr_final
        };
        let loss = match batch {
            None => {
                let (loss, grads) =
                    node_loss_grad(&net, &dataset.x_t, &dataset.x_tdt, dataset.dt, config.substeps)?;
                if !loss.is_finite() {
                    return Err(NodeError::Diverged {
                        epoch,
                        last_loss: loss_curve.last().copied().unwrap_or(f64::NAN),
                    });
                }
                if loss < best.0 {
                    best = (loss, net.clone(), epoch);
                }
                adam_step(&mut net, &grads, &mut adam, lr)?;
                loss
            }
            Some(b) => {
                let order = shuffled(m, kdla_num::stream_seed(config.seed, epoch as u64));
                let snapshot = net.clone();
                let mut sum = 0.0;
                let mut count = 0;
                for chunk in order.chunks(b) {
                    let x_t = dataset.x_t.select_cols(chunk);
                    let x_tdt = dataset.x_tdt.select_cols(chunk);
                    let (loss, grads) =
                        node_loss_grad(&net, &x_t, &x_tdt, dataset.dt, config.substeps)?;
                    if !loss.is_finite() {
                        return Err(NodeError::Diverged {
                            epoch,
                            last_loss: loss_curve.last().copied().unwrap_or(f64::NAN),
                        });
                    }
                    adam_step(&mut net, &grads, &mut adam, lr)?;
                    sum += loss;
                    count += 1;
                }
                let mean = sum / count as f64;
                if mean < best.0 {
                    best = (mean, snapshot, epoch);
                }
                mean
            }
        };
        loss_curve.push(loss);
    }

    let (_, best_net, best_epoch) = best;
    NodeModel::new(
        best_net,
        dataset.dt,
        config.substeps,
        NodeMetadata {
            epochs: loss_curve.len(),
            best_epoch: Some(best_epoch),
            loss_curve,
            seed: config.seed,
            lr_schedule: format!("{:e}->{:e}@half", config.lr_initial, config.lr_final),
            batch_size: batch,
        },
    )
}

fn shuffled(m: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..m).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}
