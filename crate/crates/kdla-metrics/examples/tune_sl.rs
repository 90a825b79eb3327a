use kdla_koopman::{evolve_observable_only, train_kdla, DictionaryArch, EarlyStop, TrainConfig};
use kdla_num::Activation;
use kdla_systems::{generate_dataset, stuart_landau_exact, DatasetRecipe};
use std::time::Instant;

fn main() {
    let recipe = DatasetRecipe::paper_default("stuart-landau").unwrap();
    let ds = generate_dataset(&recipe).unwrap();
    let arch = DictionaryArch {
        hidden: vec![50, 50, 50], trainable_dim: 25,
        activations: vec![Activation::Elu, Activation::Elu, Activation::Elu, Activation::Linear],
        include_constant: false,
    };
    for seed in [8u64, 14, 24, 33, 34, 31] {
        let t0 = Instant::now();
        let config = TrainConfig {
            epochs: 400, seed, rcond: 1e-8,
            early_stop: Some(EarlyStop::default()),  // window 50, rel 1e-6
            ..Default::default()
        };
        let model = train_kdla(&ds, &arch, &config).unwrap();
        let tr = evolve_observable_only(&model, &[1e-3], 500).unwrap();
        let mut err: f64 = 0.0;
        for j in 0..=500 {
            let exact = stuart_landau_exact(1e-3, 0.04 * j as f64).unwrap();
            err = err.max((tr.states[(0, j)] - exact).abs());
        }
        println!("seed {seed} (window 50): err {err:.3e} stopped@{:?} best@{:?} ({:.1}s)",
            model.metadata.early_stopped_at, model.metadata.best_epoch, t0.elapsed().as_secs_f64());
    }
}
