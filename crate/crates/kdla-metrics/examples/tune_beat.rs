use kdla_metrics::{energy, power_spectrum};
use kdla_systems::{etdrk4_integrate, kse_ic, PseudoSpectral};

fn main() {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(5);
    let ps = PseudoSpectral::kse(64, 29.30);
    let tr = etdrk4_integrate(&ps, &kse_ic(64, seed), 0.05, 28000, 1).unwrap();
    let keep = tr.window(8000, 28001); // drop 400 units
    let e = energy(&keep);
    let es = power_spectrum(&e, 0.05, "energy").unwrap();
    let beat_t = 1.0 / es.frequencies[es.dominant_bin()];
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(64);
    let phase_at = |j: usize| -> f64 {
        let mut buf: Vec<rustfft::num_complex::Complex64> = (0..64)
            .map(|i| rustfft::num_complex::Complex64::new(keep.states[(i, j)], 0.0))
            .collect();
        fft.process(&mut buf);
        buf[1].arg()
    };
    // unwrapped drift per 100-unit window
    let mut drifts = Vec::new();
    let win = 2000usize; // 100 units
    for w in 0..(keep.len() - 1) / win {
        let mut total = 0.0;
        let mut prev = phase_at(w * win);
        for j in (w * win + 10..(w + 1) * win).step_by(10) {
            let ph = phase_at(j);
            let mut d = ph - prev;
            while d > std::f64::consts::PI { d -= 2.0 * std::f64::consts::PI; }
            while d < -std::f64::consts::PI { d += 2.0 * std::f64::consts::PI; }
            total += d;
            prev = ph;
        }
        drifts.push(total);
    }
    let dr_str: Vec<String> = drifts.iter().map(|d| format!("{d:.2}")).collect();
    println!("seed {seed}: beat {beat_t:.2}; phase drift per 100u: [{}]", dr_str.join(", "));
    let total: f64 = drifts.iter().sum();
    let travel = 2.0 * std::f64::consts::PI * (drifts.len() as f64 * 100.0) / total.abs();
    println!("  -> travel period {travel:.0}, ratio {:.0}", travel / beat_t);
    // amplitude structure
    let amp = |j: usize, m: usize| -> f64 {
        let mut buf: Vec<rustfft::num_complex::Complex64> = (0..64)
            .map(|i| rustfft::num_complex::Complex64::new(keep.states[(i, j)], 0.0))
            .collect();
        fft.process(&mut buf);
        buf[m].norm()
    };
    println!("  |u1| samples: {:.1} {:.1} {:.1} {:.1}", amp(0,1), amp(5000,1), amp(10000,1), amp(15000,1));
    println!("  |u2| samples: {:.1} {:.1} {:.1} {:.1}", amp(0,2), amp(5000,2), amp(10000,2), amp(15000,2));
}
