use kdla_koopman::{evolve_observable_only, evolve_state_observable, train_kdl_alternating, AlternatingConfig, DictionaryArch, TrainConfig};
use kdla_metrics::{basin_map, ic_grid, tracking_error};
use kdla_num::Activation;
use kdla_systems::{generate_dataset, rk4_integrate, DatasetRecipe, SystemSpec};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cycles: usize = args[1].parse().unwrap();
    let batch: usize = args[2].parse().unwrap();
    let lr: f64 = args[3].parse().unwrap();
    let seed: u64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(11);
    let mut recipe = DatasetRecipe::paper_default("duffing").unwrap();
    recipe.pair_stride = 5;
    let ds = generate_dataset(&recipe).unwrap();
    let alt_arch = DictionaryArch {
        hidden: vec![100, 100, 100], trainable_dim: 22,
        activations: vec![Activation::Tanh; 4],
        include_constant: true,
    };
    let cfg = TrainConfig { epochs: cycles, seed, rcond: 1e-8, lr_initial: lr, lr_final: lr, batch_size: Some(batch), ..Default::default() };
    let t0 = Instant::now();
    let kdl = train_kdl_alternating(&ds, &alt_arch, &cfg, &AlternatingConfig::default()).unwrap();
    let lc = &kdl.metadata.loss_curve;
    let train_s = t0.elapsed().as_secs_f64();
    let spec = SystemSpec::duffing();
    let grid = ic_grid(20);
    let truth_map = basin_map(&grid, |ic| {
        rk4_integrate(&spec, ic, 0.1, 100, 10).ok().map(|tr| tr.states[(0, 100)])
    });
    let model_map = basin_map(&grid, |ic| {
        evolve_state_observable(&kdl, ic, 100, 1).ok().and_then(|tr| {
            let v = tr.states[(0, 100)];
            v.is_finite().then_some(v)
        })
    });
    // random ICs too
    let mut rng = kdla_num::SplitMix64::new(4242);
    let rics: Vec<[f64;2]> = (0..400).map(|_| [rng.uniform_in(-2.0,2.0), rng.uniform_in(-2.0,2.0)]).collect();
    let truth_r = basin_map(&rics, |ic| {
        rk4_integrate(&spec, ic, 0.1, 100, 10).ok().map(|tr| tr.states[(0, 100)])
    });
    let model_r = basin_map(&rics, |ic| {
        evolve_state_observable(&kdl, ic, 100, 1).ok().and_then(|tr| {
            let v = tr.states[(0, 100)];
            v.is_finite().then_some(v)
        })
    });
    let mut rng2 = kdla_num::SplitMix64::new(999);
    let mut truth = Vec::new();
    let mut pred = Vec::new();
    for _ in 0..100 {
        let ic = [rng2.uniform_in(-2.0, 2.0), rng2.uniform_in(-2.0, 2.0)];
        truth.push(rk4_integrate(&spec, &ic, 0.1, 50, 10).unwrap());
        pred.push(evolve_observable_only(&kdl, &ic, 50).unwrap());
    }
    let rep = tracking_error(&truth, &pred).unwrap();
    println!("cyc {cycles} b{batch} lr{lr:.0e} s{seed}: res {:.3}->{:.3} grid {:.3} rand {:.3} oo@2 {:.3e} ({:.0}s)",
        lc[0], lc.last().unwrap(), truth_map.agreement(&model_map), truth_r.agreement(&model_r), rep.error_at(2.0), train_s);
}
