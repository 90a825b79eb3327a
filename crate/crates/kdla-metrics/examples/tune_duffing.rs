use kdla_koopman::{evolve_observable_only, evolve_state_observable, train_kdl_alternating, train_kdla, AlternatingConfig, DictionaryArch, TrainConfig};
use kdla_metrics::{basin_map, eigen_report, ic_grid, tracking_error};
use kdla_num::Activation;
use kdla_systems::{generate_dataset, rk4_integrate, DatasetRecipe, SystemSpec, Trajectory};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    // desk dataset: paper recipe thinned to M=2000
    let mut recipe = DatasetRecipe::paper_default("duffing").unwrap();
    recipe.pair_stride = 5; // 10000 -> 2000 pairs
    let ds = generate_dataset(&recipe).unwrap();
    println!("dataset M={} ({:.1}s)", ds.len(), t0.elapsed().as_secs_f64());

    // KDLA per Table 1
    let kdla_arch = DictionaryArch {
        hidden: vec![100, 100, 100], trainable_dim: 100,
        activations: vec![Activation::Elu; 4],
        include_constant: false,
    };
    let epochs: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(150);
    let config = TrainConfig { epochs, seed: 11, rcond: 1e-8, ..Default::default() };
    let t1 = Instant::now();
    let kdla = train_kdla(&ds, &kdla_arch, &config).unwrap();
    let lc = &kdla.metadata.loss_curve;
    println!("kdla: loss {:.3e}->{:.3e} best@{} ({:.0}s)", lc[0], lc[kdla.metadata.best_epoch.unwrap()], kdla.metadata.best_epoch.unwrap(), t1.elapsed().as_secs_f64());

    // Alternating baseline per paper config (tanh, 22 trainable + const + state = 25)
    let alt_arch = DictionaryArch {
        hidden: vec![100, 100, 100], trainable_dim: 22,
        activations: vec![Activation::Tanh; 4],
        include_constant: true,
    };
    let alt_cfg = TrainConfig { epochs, seed: 11, rcond: 1e-8, lr_initial: 1e-4, lr_final: 1e-4, batch_size: Some(1000), ..Default::default() };
    let t2 = Instant::now();
    let kdl = train_kdl_alternating(&ds, &alt_arch, &alt_cfg, &AlternatingConfig::default()).unwrap();
    let lc2 = &kdl.metadata.loss_curve;
    println!("kdl-alt: residual {:.3e}->{:.3e} ({:.0}s)", lc2[0], lc2.last().unwrap(), t2.elapsed().as_secs_f64());

    // eigen
    println!("rho kdla {:.4} kdl {:.4}", eigen_report(&kdla, 1e-9).unwrap().spectral_radius(), eigen_report(&kdl, 1e-9).unwrap().spectral_radius());

    // test ensemble for tracking error at t=2 (oo mode, both models)
    let spec = SystemSpec::duffing();
    let mut rng = kdla_num::SplitMix64::new(999);
    let n_test = 200;
    let nt = 50; // t=5
    let mut truth = Vec::new();
    let mut pred_kdla = Vec::new();
    let mut pred_kdl = Vec::new();
    for _ in 0..n_test {
        let ic = [rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0)];
        truth.push(rk4_integrate(&spec, &ic, 0.1, nt, 10).unwrap());
        pred_kdla.push(evolve_observable_only(&kdla, &ic, nt).unwrap());
        pred_kdl.push(evolve_observable_only(&kdl, &ic, nt).unwrap());
    }
    let finite = |trs: &Vec<Trajectory>| trs.iter().filter(|t| t.states.is_finite()).count();
    println!("finite rollouts: kdla {} kdl {}", finite(&pred_kdla), finite(&pred_kdl));
    let rep_kdla = tracking_error(&truth, &pred_kdla).unwrap();
    let rep_kdl = tracking_error(&truth, &pred_kdl).unwrap();
    println!("tracking @t=2: kdla_oo {:.4e}  kdl_oo {:.4e}   (criterion: kdla <= kdl)", rep_kdla.error_at(2.0), rep_kdl.error_at(2.0));

    // m-sweep on kdla so-mode: error at t=5 for m in {1,5,15}
    for m in [1usize, 5, 15] {
        let preds: Vec<Trajectory> = truth.iter().map(|tr| {
            let ic = [tr.states[(0,0)], tr.states[(1,0)]];
            evolve_state_observable(&kdla, &ic, nt, m).unwrap()
        }).collect();
        let rep = tracking_error(&truth, &preds).unwrap();
        println!("m={m}: err@t=5 {:.4e}", rep.error_at(5.0));
    }

    // basin map via kdl-so(m=1) on 400 ICs (20x20 grid), horizon t=10
    let grid = ic_grid(20);
    let truth_map = basin_map(&grid, |ic| {
        rk4_integrate(&spec, ic, 0.1, 100, 10).ok().map(|tr| tr.states[(0, 100)])
    });
    let t3 = Instant::now();
    for (name, model) in [("kdla", &kdla), ("kdl", &kdl)] {
        let model_map = basin_map(&grid, |ic| {
            evolve_state_observable(model, ic, 100, 1).ok().and_then(|tr| {
                let v = tr.states[(0, 100)];
                v.is_finite().then_some(v)
            })
        });
        println!("basin agreement {name}_so(m=1): {:.3} ({:.0}s)", truth_map.agreement(&model_map), t3.elapsed().as_secs_f64());
    }
    println!("total {:.0}s", t0.elapsed().as_secs_f64());
}
