//! Joint dictionary/Koopman optimization through the pseudoinverse.
//!
//! The full-batch objective is the Frobenius norm of the one-step
//! prediction residual after projecting onto the row space of ψ(t),
//!
//! ```text
//! L(θ) = || ψ(t+δt) (I − ψ(t)⁺ ψ(t)) ||_F ,
//! ```
//!
//! which equals `||ψ(t+δt) − K ψ(t)||_F` with `K = ψ(t+δt) ψ(t)⁺` already
//! at its optimum for the current dictionary. The gradient with respect to
//! the network weights flows through both lifted matrices and through the
//! pseudoinverse via its closed-form VJP, so no alternation between a K
//! step and a network step is needed.
//!
//! The projector form requires strictly more snapshots than observables;
//! with M <= D the projector is the identity and the loss is the constant
//! zero, so that configuration is rejected. The two-set form (separate
//! observables for building K and for the evolution residual) lifts that
//! restriction on the evolution batch and backs the mini-batch mode.

use kdla_num::{
    adam_step, pinv, pinv_vjp, AdamState, Grads, Mat, MlpCache, SplitMix64, RCOND_DEFAULT,
};
use kdla_systems::SnapshotDataset;

use crate::dictionary::{DictionaryArch, DictionaryNet};
use crate::edmd::{edmd_fit, ObservablePair};
use crate::error::KoopmanError;
use crate::model::{KoopmanModel, TrainMetadata};

/// Stop when the loss improved by less than `rel_improvement` (relative)
/// over the last `window` epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub window: usize,
    pub rel_improvement: f64,
}

impl Default for EarlyStop {
    fn default() -> Self {
        EarlyStop {
            window: 50,
            rel_improvement: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Learning rate for the first half of the epoch budget.
    pub lr_initial: f64,
    /// Learning rate after the halfway drop.
    pub lr_final: f64,
    pub seed: u64,
    pub rcond: f64,
    /// None trains full-batch (the default); Some(b) uses the two-set
    /// objective with K built from the full dataset and evolution batches
    /// of size b.
    pub batch_size: Option<usize>,
    pub early_stop: Option<EarlyStop>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 1000,
            lr_initial: 1e-3,
            lr_final: 1e-4,
            seed: 0,
            rcond: RCOND_DEFAULT,
            batch_size: None,
            early_stop: None,
        }
    }
}

impl TrainConfig {
    fn lr_at(&self, epoch: usize) -> f64 {
        if epoch < self.epochs / 2 {
            self.lr_initial
        } else {
            self.lr_final
        }
    }

    pub fn schedule_tag(&self) -> String {
        format!("{:e}->{:e}@half", self.lr_initial, self.lr_final)
    }
}

/// Loss value alone, from already-lifted snapshots.
pub fn kdla_residual_loss(pair: &ObservablePair, rcond: f64) -> Result<f64, KoopmanError> {
    let (d, m) = (pair.lifted_dim(), pair.len());
    if m <= d {
        return Err(KoopmanError::Config(format!(
            "projector loss needs more snapshots than observables (M = {m}, D = {d}); \
             with M <= D the projector is the identity and the loss is identically zero"
        )));
    }
    let p = pinv(&pair.psi_t, rcond)?;
    let k = pair.psi_tdt.mul(&p);
    let r = pair.psi_tdt.sub(&k.mul(&pair.psi_t));
    Ok(r.fro_norm())
}

fn backprop_lift(
    dict: &DictionaryNet,
    cache: &MlpCache<f64>,
    upstream_psi: &Mat,
    acc: &mut Grads,
) -> Result<(), KoopmanError> {
    let rows = dict.trainable_rows();
    if rows.is_empty() {
        return Ok(());
    }
    let up = upstream_psi.row_block(rows.start, rows.end);
    let (grads, _) = dict.net().backward(cache, &up)?;
    acc.add_assign(&grads);
    Ok(())
}

/// Full-batch loss and gradient with respect to the dictionary weights.
pub fn kdla_loss_grad(
    dict: &DictionaryNet,
    x_t: &Mat,
    x_tdt: &Mat,
    rcond: f64,
) -> Result<(f64, Grads), KoopmanError> {
    let (psi_t, cache_t) = dict.lift_with_cache(x_t)?;
    let (psi_tdt, cache_tdt) = dict.lift_with_cache(x_tdt)?;
    let (d, m) = (psi_t.rows(), psi_t.cols());
    if m <= d {
        return Err(KoopmanError::Config(format!(
            "projector loss needs M > D (M = {m}, D = {d})"
        )));
    }
    let p = pinv(&psi_t, rcond)?;
    let k = psi_tdt.mul(&p);
    let r = psi_tdt.sub(&k.mul(&psi_t));
    let loss = r.fro_norm();
    let mut grads = Grads::zeros_like(dict.net());
    if loss == 0.0 || !loss.is_finite() {
        return Ok((loss, grads));
    }
    let s = r.scale(1.0 / loss);

    // d/dψ(t+δt): S (I − ψ⁺ψ) = S − (S P) ψ(t).
    let sp = s.mul(&p);
    let g_tdt = s.sub(&sp.mul(&psi_t));

    // d/dψ(t): −Kᵀ S plus the pseudoinverse VJP with upstream
    // W = −ψ(t+δt)ᵀ S ψ(t)ᵀ.
    let b = s.mul_transpose_b(&psi_t);
    let mut w = psi_tdt.tr_mul(&b);
    w.scale_mut(-1.0);
    let mut g_t = k.tr_mul(&s);
    g_t.scale_mut(-1.0);
    g_t.add_assign(&pinv_vjp(&psi_t, &p, &w)?);

    backprop_lift(dict, &cache_t, &g_t, &mut grads)?;
    backprop_lift(dict, &cache_tdt, &g_tdt, &mut grads)?;
    Ok((loss, grads))
}

/// Two-set loss and gradient: K is built from the `k`-set, the residual is
/// evaluated on the `e`-set (both lifted with the same dictionary).
pub fn kdla_two_set_loss_grad(
    dict: &DictionaryNet,
    xk_t: &Mat,
    xk_tdt: &Mat,
    xe_t: &Mat,
    xe_tdt: &Mat,
    rcond: f64,
) -> Result<(f64, Grads), KoopmanError> {
    let (psi_k_t, cache_k_t) = dict.lift_with_cache(xk_t)?;
    let (psi_k_tdt, cache_k_tdt) = dict.lift_with_cache(xk_tdt)?;
    let (psi_e_t, cache_e_t) = dict.lift_with_cache(xe_t)?;
    let (psi_e_tdt, cache_e_tdt) = dict.lift_with_cache(xe_tdt)?;
    let (d, mk) = (psi_k_t.rows(), psi_k_t.cols());
    if mk <= d {
        return Err(KoopmanError::Config(format!(
            "the K-set needs more snapshots than observables (M = {mk}, D = {d})"
        )));
    }
    let p = pinv(&psi_k_t, rcond)?;
    let k = psi_k_tdt.mul(&p);
    let r = psi_e_tdt.sub(&k.mul(&psi_e_t));
    let loss = r.fro_norm();
    let mut grads = Grads::zeros_like(dict.net());
    if loss == 0.0 || !loss.is_finite() {
        return Ok((loss, grads));
    }
    let s = r.scale(1.0 / loss);

    let g_e_tdt = s.clone();
    let mut g_e_t = k.tr_mul(&s);
    g_e_t.scale_mut(-1.0);

    let mut dk = s.mul_transpose_b(&psi_e_t);
    dk.scale_mut(-1.0);
    let g_k_tdt = dk.mul_transpose_b(&p);
    let w = psi_k_tdt.tr_mul(&dk);
    let g_k_t = pinv_vjp(&psi_k_t, &p, &w)?;

    backprop_lift(dict, &cache_k_t, &g_k_t, &mut grads)?;
    backprop_lift(dict, &cache_k_tdt, &g_k_tdt, &mut grads)?;
    backprop_lift(dict, &cache_e_t, &g_e_t, &mut grads)?;
    backprop_lift(dict, &cache_e_tdt, &g_e_tdt, &mut grads)?;
    Ok((loss, grads))
}

fn shuffled_indices(m: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..m).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}

/// Train a dictionary by gradient descent through the pseudoinverse.
///
/// Returns the dictionary of the epoch with the lowest recorded loss, with
/// K refit once on the full dataset (K is a deterministic function of the
/// dictionary, so nothing is learned by storing the in-flight K).
pub fn train_kdla(
    dataset: &SnapshotDataset,
    arch: &DictionaryArch,
    config: &TrainConfig,
) -> Result<KoopmanModel, KoopmanError> {
    if config.epochs == 0 {
        return Err(KoopmanError::Config("epochs must be >= 1".into()));
    }
    let dict0 = DictionaryNet::new(dataset.dim(), arch, config.seed)?;
    let d = dict0.lifted_dim();
    let m = dataset.len();
    if m <= d {
        return Err(KoopmanError::Config(format!(
            "dataset has M = {m} pairs but the dictionary lifts to D = {d}; \
             the projector objective needs M > D — add data or shrink the dictionary"
        )));
    }
    let mut dict = dict0;
    let mut adam = AdamState::new(dict.net());
    let mut loss_curve: Vec<f64> = Vec::with_capacity(config.epochs);
    let mut best_loss = f64::INFINITY;
    let mut best_dict = dict.clone();
    let mut best_epoch = 0usize;
    let mut early_stopped_at = None;

    let batch = config.batch_size.filter(|&b| b > 0 && b < m);

    // Maps the non-finite failures a blown-up run produces (NaN loss, NaN
    // gradients, Inf activations feeding the SVD) onto the divergence error.
    fn is_blow_up(e: &KoopmanError) -> bool {
        matches!(e, KoopmanError::Num(kdla_num::NumError::NonFinite { .. }))
    }

    for epoch in 0..config.epochs {
        let lr = config.lr_at(epoch);
        let loss = match batch {
            None => {
                // Loss and gradient belong to the pre-update parameters;
                // the checkpoint must snapshot those.
                let (loss, grads) =
                    match kdla_loss_grad(&dict, &dataset.x_t, &dataset.x_tdt, config.rcond) {
                        Ok(v) => v,
                        Err(e) if is_blow_up(&e) => {
                            return Err(diverged(epoch, &loss_curve, best_dict, dataset, config))
                        }
                        Err(e) => return Err(e),
                    };
                if !loss.is_finite() {
                    return Err(diverged(epoch, &loss_curve, best_dict, dataset, config));
                }
                if loss < best_loss {
                    best_loss = loss;
                    best_dict = dict.clone();
                    best_epoch = epoch;
                }
                if let Err(e) = adam_step(dict.net_mut(), &grads, &mut adam, lr) {
                    return Err(match e {
                        kdla_num::NumError::NonFinite { .. } => {
                            diverged(epoch, &loss_curve, best_dict, dataset, config)
                        }
                        other => other.into(),
                    });
                }
                loss
            }
            Some(b) => {
                let order = shuffled_indices(m, kdla_num::stream_seed(config.seed, epoch as u64));
                let epoch_start = dict.clone();
                let mut sum = 0.0;
                let mut count = 0usize;
                for chunk in order.chunks(b) {
                    let xe_t = dataset.x_t.select_cols(chunk);
                    let xe_tdt = dataset.x_tdt.select_cols(chunk);
                    let (loss, grads) = match kdla_two_set_loss_grad(
                        &dict,
                        &dataset.x_t,
                        &dataset.x_tdt,
                        &xe_t,
                        &xe_tdt,
                        config.rcond,
                    ) {
                        Ok(v) => v,
                        Err(e) if is_blow_up(&e) => {
                            return Err(diverged(epoch, &loss_curve, best_dict, dataset, config))
                        }
                        Err(e) => return Err(e),
                    };
                    if !loss.is_finite() {
                        return Err(diverged(epoch, &loss_curve, best_dict, dataset, config));
                    }
                    if let Err(e) = adam_step(dict.net_mut(), &grads, &mut adam, lr) {
                        return Err(match e {
                            kdla_num::NumError::NonFinite { .. } => {
                                diverged(epoch, &loss_curve, best_dict, dataset, config)
                            }
                            other => other.into(),
                        });
                    }
                    sum += loss;
                    count += 1;
                }
                let mean = sum / count as f64;
                if mean < best_loss {
                    best_loss = mean;
                    best_dict = epoch_start;
                    best_epoch = epoch;
                }
                mean
            }
        };
        loss_curve.push(loss);
        if let Some(es) = config.early_stop {
            if epoch + 1 >= es.window {
                let past = loss_curve[epoch + 1 - es.window];
                if past - loss <= es.rel_improvement * past.abs().max(1e-300) {
                    early_stopped_at = Some(epoch);
                    break;
                }
            }
        }
    }

    let psi_t = best_dict.lift(&dataset.x_t)?;
    let psi_tdt = best_dict.lift(&dataset.x_tdt)?;
    let pair = ObservablePair::new(psi_t, psi_tdt, dataset.dt)?;
    let k = edmd_fit(&pair, 0.0, config.rcond)?;
    let metadata = TrainMetadata {
        method: "kdla".into(),
        epochs: loss_curve.len(),
        best_epoch: Some(best_epoch),
        loss_curve,
        rcond: config.rcond,
        tikhonov: None,
        seed: config.seed,
        lr_schedule: config.schedule_tag(),
        batch_size: batch,
        early_stopped_at,
        refit_k: true,
    };
    KoopmanModel::new(k, best_dict, dataset.dt, metadata)
}

fn diverged(
    epoch: usize,
    loss_curve: &[f64],
    best_dict: DictionaryNet,
    dataset: &SnapshotDataset,
    config: &TrainConfig,
) -> KoopmanError {
    let last_loss = loss_curve.last().copied().unwrap_or(f64::NAN);
    let checkpoint = (|| -> Result<KoopmanModel, KoopmanError> {
        let psi_t = best_dict.lift(&dataset.x_t)?;
        let psi_tdt = best_dict.lift(&dataset.x_tdt)?;
        let pair = ObservablePair::new(psi_t, psi_tdt, dataset.dt)?;
        let k = edmd_fit(&pair, 0.0, config.rcond)?;
        KoopmanModel::new(
            k,
            best_dict.clone(),
            dataset.dt,
            TrainMetadata {
                method: "kdla(diverged-checkpoint)".into(),
                epochs: epoch,
                loss_curve: loss_curve.to_vec(),
                rcond: config.rcond,
                seed: config.seed,
                lr_schedule: config.schedule_tag(),
                refit_k: true,
                ..Default::default()
            },
        )
    })();
    match checkpoint {
        Ok(model) => KoopmanError::Diverged {
            epoch,
            last_loss,
            checkpoint: Box::new(model),
        },
        Err(e) => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdla_num::{svd, Activation};
    use kdla_systems::{SnapshotDataset, Trajectory};

    fn random(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut r = SplitMix64::new(seed);
        Mat::from_fn(rows, cols, |_, _| r.uniform_in(-1.0, 1.0))
    }

    fn pair_of(psi_t: Mat, psi_tdt: Mat) -> ObservablePair {
        ObservablePair::new(psi_t, psi_tdt, 0.1).unwrap()
    }

    #[test]
    fn rank_one_projector_hand_value() {
        // ψt = [1 1 1], ψ(t+δt) = [1 2 3]: residual (I - ψ⁺ψ) leaves
        // [-1, 0, 1], so the loss is sqrt(2).
        let pair = pair_of(
            Mat::from_rows(&[vec![1.0, 1.0, 1.0]]),
            Mat::from_rows(&[vec![1.0, 2.0, 3.0]]),
        );
        let loss = kdla_residual_loss(&pair, RCOND_DEFAULT).unwrap();
        assert!((loss - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn exactly_linear_observables_have_zero_loss() {
        let d = 4;
        let lam = random(d, d, 1);
        let psi_t = random(d, 25, 2);
        let psi_tdt = lam.mul(&psi_t);
        let loss = kdla_residual_loss(&pair_of(psi_t, psi_tdt), RCOND_DEFAULT).unwrap();
        assert!(loss < 1e-12, "loss {loss}");
    }

    #[test]
    fn degenerate_snapshot_count_rejected() {
        // M <= D would make the loss identically zero; that trap is an error.
        let pair = pair_of(random(5, 5, 3), random(5, 5, 4));
        assert!(kdla_residual_loss(&pair, RCOND_DEFAULT).is_err());
        let pair = pair_of(random(5, 4, 3), random(5, 4, 4));
        assert!(kdla_residual_loss(&pair, RCOND_DEFAULT).is_err());
    }

    #[test]
    fn invariant_under_shared_orthogonal_snapshot_mixing() {
        // Right-multiplying both lifted matrices by one orthogonal M x M
        // matrix (snapshot reordering as a special case) leaves the loss
        // unchanged.
        let m = 12;
        let psi_t = random(3, m, 5);
        let psi_tdt = random(3, m, 6);
        let base = kdla_residual_loss(&pair_of(psi_t.clone(), psi_tdt.clone()), 0.0).unwrap();
        let q_full = svd(&random(m, m, 7)).unwrap().u; // orthogonal m x m
        let rot_t = psi_t.mul(&q_full);
        let rot_tdt = psi_tdt.mul(&q_full);
        let rotated = kdla_residual_loss(&pair_of(rot_t, rot_tdt), 0.0).unwrap();
        assert!(
            (base - rotated).abs() < 1e-10 * base.max(1.0),
            "{base} vs {rotated}"
        );
        // Permutation special case.
        let perm: Vec<usize> = (0..m).rev().collect();
        let permuted = kdla_residual_loss(
            &pair_of(psi_t.select_cols(&perm), psi_tdt.select_cols(&perm)),
            0.0,
        )
        .unwrap();
        assert!((base - permuted).abs() < 1e-12 * base.max(1.0));
    }

    fn small_dict(seed: u64) -> DictionaryNet {
        // D = 2 + 6 = 8.
        let arch = DictionaryArch {
            hidden: vec![10],
            trainable_dim: 6,
            activations: vec![Activation::Elu, Activation::Elu],
            include_constant: false,
        };
        DictionaryNet::new(2, &arch, seed).unwrap()
    }

    /// || g_fd - g || / || g_fd || over all parameters, h = 1e-5.
    fn grad_vs_fd(
        dict: &mut DictionaryNet,
        loss_of: &dyn Fn(&DictionaryNet) -> f64,
        analytic: &Grads,
    ) -> f64 {
        let h = 1e-5;
        let mut num = 0.0;
        let mut den = 0.0;
        for l in 0..dict.net().num_layers() {
            for idx in 0..dict.net().weights()[l].data().len() {
                let orig = dict.net().weights()[l].data()[idx];
                dict.net_mut().weights_mut()[l].data_mut()[idx] = orig + h;
                let fp = loss_of(dict);
                dict.net_mut().weights_mut()[l].data_mut()[idx] = orig - h;
                let fm = loss_of(dict);
                dict.net_mut().weights_mut()[l].data_mut()[idx] = orig;
                let g_fd = (fp - fm) / (2.0 * h);
                let g = analytic.d_weights[l].data()[idx];
                num += (g_fd - g).powi(2);
                den += g_fd.powi(2);
            }
            for idx in 0..dict.net().biases()[l].len() {
                let orig = dict.net().biases()[l][idx];
                dict.net_mut().biases_mut()[l][idx] = orig + h;
                let fp = loss_of(dict);
                dict.net_mut().biases_mut()[l][idx] = orig - h;
                let fm = loss_of(dict);
                dict.net_mut().biases_mut()[l][idx] = orig;
                let g_fd = (fp - fm) / (2.0 * h);
                let g = analytic.d_biases[l][idx];
                num += (g_fd - g).powi(2);
                den += g_fd.powi(2);
            }
        }
        (num / den).sqrt()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // D = 8, M = 40, full parameter sweep.
        let mut dict = small_dict(11);
        let x_t = random(2, 40, 12);
        let x_tdt = random(2, 40, 13);
        let (_, grads) = kdla_loss_grad(&dict, &x_t, &x_tdt, RCOND_DEFAULT).unwrap();
        let loss_of = |d: &DictionaryNet| {
            let psi_t = d.lift(&x_t).unwrap();
            let psi_tdt = d.lift(&x_tdt).unwrap();
            kdla_residual_loss(&pair_of(psi_t, psi_tdt), RCOND_DEFAULT).unwrap()
        };
        let rel = grad_vs_fd(&mut dict, &loss_of, &grads);
        assert!(rel < 1e-4, "relative gradient error {rel}");
    }

    #[test]
    fn two_set_gradient_matches_finite_differences() {
        let mut dict = small_dict(21);
        let xk_t = random(2, 40, 22);
        let xk_tdt = random(2, 40, 23);
        let xe_t = random(2, 7, 24);
        let xe_tdt = random(2, 7, 25);
        let (_, grads) =
            kdla_two_set_loss_grad(&dict, &xk_t, &xk_tdt, &xe_t, &xe_tdt, RCOND_DEFAULT).unwrap();
        let loss_of = |d: &DictionaryNet| {
            let pkt = d.lift(&xk_t).unwrap();
            let pktdt = d.lift(&xk_tdt).unwrap();
            let pet = d.lift(&xe_t).unwrap();
            let petdt = d.lift(&xe_tdt).unwrap();
            let p = pinv(&pkt, RCOND_DEFAULT).unwrap();
            let k = pktdt.mul(&p);
            petdt.sub(&k.mul(&pet)).fro_norm()
        };
        let rel = grad_vs_fd(&mut dict, &loss_of, &grads);
        assert!(rel < 1e-4, "relative gradient error {rel}");
    }

    #[test]
    fn two_set_on_shared_data_matches_full_batch() {
        let dict = small_dict(31);
        let x_t = random(2, 30, 32);
        let x_tdt = random(2, 30, 33);
        let (l1, g1) = kdla_loss_grad(&dict, &x_t, &x_tdt, RCOND_DEFAULT).unwrap();
        let (l2, g2) =
            kdla_two_set_loss_grad(&dict, &x_t, &x_tdt, &x_t, &x_tdt, RCOND_DEFAULT).unwrap();
        assert!((l1 - l2).abs() < 1e-12 * l1.max(1.0));
        for l in 0..g1.d_weights.len() {
            let diff = g1.d_weights[l].sub(&g2.d_weights[l]).fro_norm();
            let scale = g1.d_weights[l].fro_norm().max(1e-12);
            assert!(diff / scale < 1e-9, "layer {l} grads differ by {diff}");
        }
    }

    fn linear_scalar_dataset(factor: f64, m: usize) -> SnapshotDataset {
        let states = Mat::from_fn(1, m + 1, |_, j| 2.0 * factor.powi(j as i32));
        SnapshotDataset::from_trajectories(&[Trajectory::new(states, 0.1, 0.0)], 1).unwrap()
    }

    #[test]
    fn linear_system_with_empty_dictionary_trains_in_one_epoch() {
        let ds = linear_scalar_dataset(0.9, 30);
        let arch = DictionaryArch {
            hidden: vec![],
            trainable_dim: 0,
            activations: vec![Activation::Linear],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 1,
            ..Default::default()
        };
        let model = train_kdla(&ds, &arch, &config).unwrap();
        assert!(model.metadata.loss_curve[0] < 1e-12);
        assert!((model.k[(0, 0)] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn same_seed_gives_identical_loss_curves() {
        let ds = {
            let mut r = SplitMix64::new(41);
            let states = Mat::from_fn(2, 61, |_, _| r.uniform_in(-1.0, 1.0));
            SnapshotDataset::from_trajectories(&[Trajectory::new(states, 0.1, 0.0)], 1).unwrap()
        };
        let arch = DictionaryArch {
            hidden: vec![8],
            trainable_dim: 4,
            activations: vec![Activation::Elu, Activation::Elu],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 20,
            ..Default::default()
        };
        let a = train_kdla(&ds, &arch, &config).unwrap();
        let b = train_kdla(&ds, &arch, &config).unwrap();
        assert_eq!(a.metadata.loss_curve, b.metadata.loss_curve);
        assert_eq!(a.k, b.k);
        let c = train_kdla(
            &ds,
            &arch,
            &TrainConfig {
                seed: 1,
                ..config
            },
        )
        .unwrap();
        assert_ne!(a.metadata.loss_curve, c.metadata.loss_curve);
    }

    #[test]
    fn insufficient_pairs_rejected_with_clear_message() {
        let ds = linear_scalar_dataset(0.9, 5);
        let arch = DictionaryArch {
            hidden: vec![4],
            trainable_dim: 8,
            activations: vec![Activation::Elu, Activation::Elu],
            include_constant: false,
        };
        let err = train_kdla(&ds, &arch, &TrainConfig::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("M = 5") && msg.contains("D = 9"), "{msg}");
    }

    #[test]
    fn divergence_reports_last_good_checkpoint() {
        let mut r = SplitMix64::new(51);
        let states = Mat::from_fn(2, 41, |_, _| r.uniform_in(-1.0, 1.0));
        let ds =
            SnapshotDataset::from_trajectories(&[Trajectory::new(states, 0.1, 0.0)], 1).unwrap();
        let arch = DictionaryArch {
            hidden: vec![6],
            trainable_dim: 3,
            activations: vec![Activation::Elu, Activation::Elu],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 10,
            lr_initial: 1e300,
            lr_final: 1e300,
            ..Default::default()
        };
        match train_kdla(&ds, &arch, &config) {
            Err(KoopmanError::Diverged {
                epoch, checkpoint, ..
            }) => {
                assert!(epoch >= 1, "first epoch should be finite");
                assert!(checkpoint.k.is_finite());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn early_stop_fires_on_flat_loss() {
        let ds = linear_scalar_dataset(0.9, 30);
        let arch = DictionaryArch {
            hidden: vec![],
            trainable_dim: 0,
            activations: vec![Activation::Linear],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 500,
            early_stop: Some(EarlyStop::default()),
            ..Default::default()
        };
        let model = train_kdla(&ds, &arch, &config).unwrap();
        assert!(model.metadata.early_stopped_at.is_some());
        assert!(model.metadata.epochs < 500);
    }

    #[test]
    fn minibatch_mode_trains() {
        let mut r = SplitMix64::new(61);
        let states = Mat::from_fn(2, 81, |_, _| r.uniform_in(-1.0, 1.0));
        let ds =
            SnapshotDataset::from_trajectories(&[Trajectory::new(states, 0.1, 0.0)], 1).unwrap();
        let arch = DictionaryArch {
            hidden: vec![8],
            trainable_dim: 4,
            activations: vec![Activation::Tanh, Activation::Tanh],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 15,
            batch_size: Some(16),
            ..Default::default()
        };
        let model = train_kdla(&ds, &arch, &config).unwrap();
        assert_eq!(model.metadata.batch_size, Some(16));
        assert_eq!(model.metadata.loss_curve.len(), 15);
        assert!(model.k.is_finite());
    }
}
