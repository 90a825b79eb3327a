//! The alternating dictionary-learning baseline.
//!
//! Each cycle (i) refits K on the full lifted dataset with a Tikhonov
//! regularizer and (ii) runs fixed-K gradient passes over mini-batches of
//! the residual `||ψ(t+δt) − K ψ(t)||_F`. The two steps share nothing but
//! the dictionary, which is what makes the scheme prone to the suboptimal
//! plateaus the joint trainer avoids.

use kdla_num::{adam_step, AdamState, Grads, SplitMix64};
use kdla_systems::SnapshotDataset;

use crate::dictionary::{DictionaryArch, DictionaryNet};
use crate::edmd::{edmd_fit, ObservablePair};
use crate::error::KoopmanError;
use crate::kdla::TrainConfig;
use crate::model::{KoopmanModel, TrainMetadata};

#[derive(Debug, Clone)]
pub struct AlternatingConfig {
    /// Ridge weight added to the (1/M)-scaled Gram matrix.
    pub tikhonov: f64,
    /// Full passes over the data per K refit.
    pub nn_passes_per_cycle: usize,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        AlternatingConfig {
            tikhonov: 0.1,
            nn_passes_per_cycle: 1,
        }
    }
}

/// Alternate K fits and fixed-K network steps for `config.epochs` cycles.
/// Returns the final dictionary with K refit on the full dataset.
pub fn train_kdl_alternating(
    dataset: &SnapshotDataset,
    arch: &DictionaryArch,
    config: &TrainConfig,
    alt: &AlternatingConfig,
) -> Result<KoopmanModel, KoopmanError> {
    if config.epochs == 0 {
        return Err(KoopmanError::Config("epochs must be >= 1".into()));
    }
    let mut dict = DictionaryNet::new(dataset.dim(), arch, config.seed)?;
    let m = dataset.len();
    let batch = config.batch_size.unwrap_or(m).clamp(1, m);
    let mut adam = AdamState::new(dict.net());
    let mut loss_curve = Vec::with_capacity(config.epochs);

    let fit_k = |dict: &DictionaryNet| -> Result<(kdla_num::Mat, f64), KoopmanError> {
        let psi_t = dict.lift(&dataset.x_t)?;
        let psi_tdt = dict.lift(&dataset.x_tdt)?;
        let pair = ObservablePair::new(psi_t, psi_tdt, dataset.dt)?;
        let k = edmd_fit(&pair, alt.tikhonov, config.rcond)?;
        let residual = pair.psi_tdt.sub(&k.mul(&pair.psi_t)).fro_norm();
        Ok((k, residual))
    };

    for cycle in 0..config.epochs {
        let (k, residual) = fit_k(&dict)?;
        if !residual.is_finite() {
            return Err(KoopmanError::Config(format!(
                "alternating training produced a non-finite residual at cycle {cycle}"
            )));
        }
        loss_curve.push(residual);
        let lr = if cycle < config.epochs / 2 {
            config.lr_initial
        } else {
            config.lr_final
        };
        for pass in 0..alt.nn_passes_per_cycle {
            let order = shuffled(
                m,
                kdla_num::stream_seed(config.seed, (cycle * 131 + pass) as u64 + 1),
            );
            for chunk in order.chunks(batch) {
                let x_t = dataset.x_t.select_cols(chunk);
                let x_tdt = dataset.x_tdt.select_cols(chunk);
                let (psi_t, cache_t) = dict.lift_with_cache(&x_t)?;
                let (psi_tdt, cache_tdt) = dict.lift_with_cache(&x_tdt)?;
                let r = psi_tdt.sub(&k.mul(&psi_t));
                let norm = r.fro_norm();
                if norm == 0.0 {
                    continue;
                }
                let s = r.scale(1.0 / norm);
                let mut grads = Grads::zeros_like(dict.net());
                let rows = dict.trainable_rows();
                if rows.is_empty() {
                    continue;
                }
                // d/dψ(t+δt) = S, d/dψ(t) = -Kᵀ S.
                let up_tdt = s.row_block(rows.start, rows.end);
                let (g1, _) = dict.net().backward(&cache_tdt, &up_tdt)?;
                grads.add_assign(&g1);
                let mut g_t = k.tr_mul(&s);
                g_t.scale_mut(-1.0);
                let up_t = g_t.row_block(rows.start, rows.end);
                let (g2, _) = dict.net().backward(&cache_t, &up_t)?;
                grads.add_assign(&g2);
                adam_step(dict.net_mut(), &grads, &mut adam, lr)?;
            }
        }
    }

    let (k, final_residual) = fit_k(&dict)?;
    loss_curve.push(final_residual);
    let metadata = TrainMetadata {
        method: "kdl-alternating".into(),
        epochs: config.epochs,
        best_epoch: None,
        loss_curve,
        rcond: config.rcond,
        tikhonov: Some(alt.tikhonov),
        seed: config.seed,
        lr_schedule: config.schedule_tag(),
        batch_size: Some(batch),
        early_stopped_at: None,
        refit_k: true,
    };
    KoopmanModel::new(k, dict, dataset.dt, metadata)
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

#[cfg(test)]
mod tests {
    use super::*;
    use kdla_num::{Activation, Mat};
    use kdla_systems::Trajectory;

    fn dataset(seed: u64, n: usize, m: usize) -> SnapshotDataset {
        let mut r = SplitMix64::new(seed);
        let states = Mat::from_fn(n, m + 1, |_, _| r.uniform_in(-1.0, 1.0));
        SnapshotDataset::from_trajectories(&[Trajectory::new(states, 0.1, 0.0)], 1).unwrap()
    }

    #[test]
    fn empty_dictionary_collapses_to_edmd() {
        let ds = dataset(1, 2, 50);
        let arch = DictionaryArch {
            hidden: vec![],
            trainable_dim: 0,
            activations: vec![Activation::Linear],
            include_constant: false,
        };
        let config = TrainConfig {
            epochs: 3,
            ..Default::default()
        };
        let alt = AlternatingConfig::default();
        let model = train_kdl_alternating(&ds, &arch, &config, &alt).unwrap();
        let pair = ObservablePair::new(ds.x_t.clone(), ds.x_tdt.clone(), ds.dt).unwrap();
        let k_direct = edmd_fit(&pair, alt.tikhonov, config.rcond).unwrap();
        assert!(model.k.sub(&k_direct).fro_norm() < 1e-13);
    }

    #[test]
    fn zero_nn_passes_leaves_dictionary_at_init() {
        let ds = dataset(2, 2, 60);
        let arch = DictionaryArch {
            hidden: vec![6],
            trainable_dim: 3,
            activations: vec![Activation::Tanh, Activation::Tanh],
            include_constant: true,
        };
        let config = TrainConfig {
            epochs: 4,
            ..Default::default()
        };
        let alt = AlternatingConfig {
            tikhonov: 0.1,
            nn_passes_per_cycle: 0,
        };
        let model = train_kdl_alternating(&ds, &arch, &config, &alt).unwrap();
        let init = DictionaryNet::new(2, &arch, config.seed).unwrap();
        assert_eq!(model.dictionary, init);
        // And K equals the init-dictionary EDMD fit.
        let psi_t = init.lift(&ds.x_t).unwrap();
        let psi_tdt = init.lift(&ds.x_tdt).unwrap();
        let pair = ObservablePair::new(psi_t, psi_tdt, ds.dt).unwrap();
        let k0 = edmd_fit(&pair, alt.tikhonov, config.rcond).unwrap();
        assert!(model.k.sub(&k0).fro_norm() == 0.0);
    }

    #[test]
    fn training_reduces_the_residual() {
        let ds = dataset(3, 2, 120);
        let arch = DictionaryArch {
            hidden: vec![16, 16],
            trainable_dim: 6,
            activations: vec![Activation::Tanh; 3],
            include_constant: true,
        };
        let config = TrainConfig {
            epochs: 40,
            lr_initial: 1e-2,
            lr_final: 1e-3,
            batch_size: Some(40),
            ..Default::default()
        };
        let model =
            train_kdl_alternating(&ds, &arch, &config, &AlternatingConfig::default()).unwrap();
        let first = model.metadata.loss_curve[0];
        let last = *model.metadata.loss_curve.last().unwrap();
        assert!(last < first, "residual did not drop: {first} -> {last}");
        assert_eq!(model.metadata.tikhonov, Some(0.1));
    }

    #[test]
    fn deterministic_given_seed() {
        let ds = dataset(4, 2, 60);
        let arch = DictionaryArch {
            hidden: vec![8],
            trainable_dim: 4,
            activations: vec![Activation::Tanh; 2],
            include_constant: true,
        };
        let config = TrainConfig {
            epochs: 6,
            batch_size: Some(20),
            ..Default::default()
        };
        let a = train_kdl_alternating(&ds, &arch, &config, &AlternatingConfig::default()).unwrap();
        let b = train_kdl_alternating(&ds, &arch, &config, &AlternatingConfig::default()).unwrap();
        assert_eq!(a.metadata.loss_curve, b.metadata.loss_curve);
        assert_eq!(a.k, b.k);
    }
}
