use num_complex::Complex64;
use schottky_lab::schottky::three_funnel;
use schottky_lab::zeta::{delta_estimate, Representation, ZetaEvaluator};
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let s = Arc::new(three_funnel(2.0, 2.0, 2.0).unwrap());
    for depth in [10usize, 12, 13] {
        let t0 = Instant::now();
        let ev = ZetaEvaluator::new(&s, Representation::Trivial, depth).unwrap();
        let build = t0.elapsed();
        let t1 = Instant::now();
        let d = delta_estimate(&ev, 1e-10).unwrap();
        let evals = ev.eval_count();
        let t_delta = t1.elapsed();
        println!(
            "depth {depth}: build {build:?}, delta = {d:.12} ({evals} evals, {t_delta:?})"
        );
        // convergence probes
        for (re, im) in [(0.0, 10.0), (-0.5, 25.0), (-1.0, 40.0), (-1.5, 40.0), (-2.0, 25.0), (0.3, 60.0)] {
            let t2 = Instant::now();
            let v = ev.eval_with(Complex64::new(re, im), 1e-15);
            let dt = t2.elapsed();
            println!(
                "  Z({re}, {im}): |Z| = {:.3e}, est = {:.1e}, noise = {:.1e}, n = {}, {dt:?}",
                v.value.norm(),
                v.err_estimate,
                v.noise_floor,
                v.n_used
            );
        }
    }
}
