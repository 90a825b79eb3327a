use kdla_koopman::{evolve_observable_only, train_kdla, DictionaryArch, EarlyStop, TrainConfig};
use kdla_metrics::{eigen_report, energy, power_spectrum};
use kdla_num::Activation;
use kdla_systems::{etdrk4_integrate, kse_ic, DatasetRecipe, PseudoSpectral, SnapshotDataset};
use std::time::Instant;

fn beating_periods() {
    let ps = PseudoSpectral::kse(64, 29.30);
    let tr = etdrk4_integrate(&ps, &kse_ic(64, 5), 0.05, 24000, 1).unwrap();
    let keep = tr.window(4000, 24001);
    let e = energy(&keep);
    let es = power_spectrum(&e, 0.05, "energy").unwrap();
    let beat_t = 1.0 / es.frequencies[es.dominant_bin()];
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(64);
    let mut phase_prev = 0.0f64;
    let mut total_drift = 0.0f64;
    let mut first = true;
    for j in (0..keep.len()).step_by(20) {
        let mut buf: Vec<rustfft::num_complex::Complex64> = (0..64)
            .map(|i| rustfft::num_complex::Complex64::new(keep.states[(i, j)], 0.0))
            .collect();
        fft.process(&mut buf);
        let ph = buf[1].arg();
        if !first {
            let mut d = ph - phase_prev;
            while d > std::f64::consts::PI { d -= 2.0 * std::f64::consts::PI; }
            while d < -std::f64::consts::PI { d += 2.0 * std::f64::consts::PI; }
            total_drift += d;
        }
        first = false;
        phase_prev = ph;
    }
    let span = (keep.len() - 1) as f64 * 0.05;
    let omega = total_drift.abs() / span;
    let travel_t = 2.0 * std::f64::consts::PI / omega;
    println!("L=29.3: beat period {beat_t:.2}, travel period {travel_t:.0}, ratio {:.0}", travel_t / beat_t);
}

fn kse12_kdla(epochs: usize, horizon: f64, stride: usize, seed: u64) {
    let t0 = Instant::now();
    let mut recipe = DatasetRecipe::paper_default("kse-tw").unwrap();
    recipe.horizon = horizon;
    let trs = kdla_systems::generate_trajectories(&recipe).unwrap();
    let cut = (recipe.transient / recipe.dt).round() as usize;
    let windows: Vec<_> = trs.iter().map(|t| t.window(cut, t.len())).collect();
    let ds = SnapshotDataset::from_trajectories(&windows, stride).unwrap();
    println!("kse12 dataset M={} ({:.0}s)", ds.len(), t0.elapsed().as_secs_f64());
    let arch = DictionaryArch {
        hidden: vec![100, 100, 100],
        trainable_dim: 100,
        activations: vec![Activation::Elu; 4],
        include_constant: false,
    };
    let config = TrainConfig { epochs, seed, rcond: 1e-8, early_stop: Some(EarlyStop::default()), ..Default::default() };
    let t1 = Instant::now();
    let model = train_kdla(&ds, &arch, &config).unwrap();
    let lc = &model.metadata.loss_curve;
    println!("  trained: loss {:.3e}->{:.3e} best@{:?} stopped@{:?} ({:.0}s)", lc[0], lc[model.metadata.best_epoch.unwrap()], model.metadata.best_epoch, model.metadata.early_stopped_at, t1.elapsed().as_secs_f64());
    println!("  rho {:.6}", eigen_report(&model, 1e-9).unwrap().spectral_radius());
    // rollout 250 time units from a post-transient state
    let x0 = windows[0].state(0);
    let nt = (250.0 / recipe.dt).round() as usize;
    let roll = evolve_observable_only(&model, &x0, nt).unwrap();
    let e = energy(&roll);
    let e0 = e[0];
    let efin = e[nt];
    let emin = e.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("  rollout energy: start {e0:.2} end {efin:.2} min {emin:.2} decay {:.2}%", 100.0 * (e0 - efin) / e0);
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_default();
    match mode.as_str() {
        "beat" => beating_periods(),
        "kse12" => {
            let epochs = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(300);
            let horizon = std::env::args().nth(3).map(|s| s.parse().unwrap()).unwrap_or(600.0);
            let stride = std::env::args().nth(4).map(|s| s.parse().unwrap()).unwrap_or(1);
            let seed = std::env::args().nth(5).map(|s| s.parse().unwrap()).unwrap_or(3);
            kse12_kdla(epochs, horizon, stride, seed);
        }
        _ => println!("mode: beat | kse12"),
    }
}
