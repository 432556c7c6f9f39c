//! Selberg zeta functions, twisted variants, and their numerical evaluation.
//!
//! Two routes are implemented. The Euler product converges for Re(s) above
//! the critical exponent and carries a rigorous geometric tail bound driven
//! by the word-count/contraction certificate. The cycle route evaluates the
//! dynamical determinant det(1 - L_s) through its determinant coefficients
//! a_n, generated from the periodic-orbit sums
//!     t_m(s) = sum_{|w| = m} rot(w) tr rho(gamma_w) e^(-s l_w) / (1 - e^(-l_w))
//! by n a_n = -sum_{m <= n} t_m a_(n-m). The coefficient series converges
//! super-exponentially for every s, which is what makes resonances (zeros in
//! the continued region) computable.

pub mod cache;
pub mod zeros;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schottky::SchottkySurface;
use cache::OrbitCache;

/// Unitary representation data attached to a zeta function.
#[derive(Debug, Clone)]
pub enum Representation {
    Trivial,
    /// Regular representation of SL(2, Z/nZ) pulled back along reduction;
    /// realizes the zeta function of the congruence cover X(n).
    RegularMod { modulus: u64, group_order: u64 },
    /// Explicit unitary matrices per generator (inverse letters act by the
    /// conjugate transpose). Row-major dim x dim.
    Custom {
        dim: usize,
        generator_matrices: Vec<Vec<Complex64>>,
    },
}

impl Representation {
    pub fn dim(&self) -> u64 {
        match self {
            Representation::Trivial => 1,
            Representation::RegularMod { group_order, .. } => *group_order,
            Representation::Custom { dim, .. } => *dim as u64,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Representation::RegularMod { modulus, .. } => Some(*modulus),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Representation::Trivial => "trivial".into(),
            Representation::RegularMod { modulus, .. } => format!("regular-mod-{modulus}"),
            Representation::Custom { dim, .. } => format!("custom-dim-{dim}"),
        }
    }

    /// Unitarity residual of the generator matrices (0 for built-in reps).
    pub fn unitarity_residual(&self) -> f64 {
        match self {
            Representation::Custom {
                dim,
                generator_matrices,
            } => {
                let d = *dim;
                let mut worst: f64 = 0.0;
                for m in generator_matrices {
                    for i in 0..d {
                        for j in 0..d {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for k in 0..d {
                                acc += m[i * d + k] * m[j * d + k].conj();
                            }
                            let target = if i == j { 1.0 } else { 0.0 };
                            worst = worst.max((acc - target).norm());
                        }
                    }
                }
                worst
            }
            _ => 0.0,
        }
    }
}

fn mat_mul(d: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

fn mat_trace(d: usize, a: &[Complex64]) -> Complex64 {
    (0..d).map(|i| a[i * d + i]).sum()
}

fn conj_transpose(d: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

/// One cached orbit term: coeff * e^(-s ell) summed into t_m.
#[derive(Debug, Clone, Copy)]
struct Term {
    ell: f64,
    coeff: Complex64,
}

/// Result of a cycle-mode evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZetaValue {
    #[serde(skip)]
    pub value: Complex64,
    /// empirical error: last determinant-coefficient decrement plus the
    /// floating-point noise floor of the recursion
    pub err_estimate: f64,
    pub n_used: usize,
    pub noise_floor: f64,
}

/// Zeta evaluator over one surface, representation and truncation depth.
pub struct ZetaEvaluator {
    pub surface: Arc<SchottkySurface>,
    pub representation: Representation,
    pub cache: Arc<OrbitCache>,
    pub depth: usize,
    /// terms grouped by word length
    terms: Vec<Vec<Term>>,
    pub evals: AtomicU64,
}

impl ZetaEvaluator {
    pub fn new(
        surface: &Arc<SchottkySurface>,
        representation: Representation,
        depth: usize,
    ) -> Result<Self> {
        let cache = Arc::new(OrbitCache::build(
            surface,
            depth,
            representation.modulus(),
        )?);
        Self::with_cache(surface, representation, cache)
    }

    pub fn with_cache(
        surface: &Arc<SchottkySurface>,
        representation: Representation,
        cache: Arc<OrbitCache>,
    ) -> Result<Self> {
        if representation.modulus() != cache.modulus {
            return Err(Error::Parameter(
                "orbit cache modulus does not match the representation".into(),
            ));
        }
        if let Representation::Custom {
            dim,
            generator_matrices,
        } = &representation
        {
            if *dim == 0 || *dim > 16 {
                return Err(Error::Parameter("custom representation dim must be 1..=16".into()));
            }
            if generator_matrices.len() != surface.rank {
                return Err(Error::Parameter(
                    "custom representation needs one matrix per generator".into(),
                ));
            }
            let resid = representation.unitarity_residual();
            if resid > 1e-10 {
                return Err(Error::Parameter(format!(
                    "custom representation is not unitary (residual {resid:.2e})"
                )));
            }
        }
        let depth = cache.depth;
        // custom-representation traces per primitive class and power
        let custom_traces: Option<Vec<Vec<Complex64>>> = match &representation {
            Representation::Custom {
                dim,
                generator_matrices,
            } => {
                let d = *dim;
                let letter_mats: Vec<Vec<Complex64>> = (0..2 * surface.rank)
                    .map(|x| {
                        let g = &generator_matrices[x / 2];
                        if x % 2 == 0 {
                            g.clone()
                        } else {
                            conj_transpose(d, g)
                        }
                    })
                    .collect();
                let mut all = Vec::with_capacity(cache.primitives.len());
                for (word, _, _) in &cache.primitives {
                    let mut m: Vec<Complex64> = (0..d * d)
                        .map(|i| {
                            if i % (d + 1) == 0 {
                                Complex64::new(1.0, 0.0)
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect();
                    for &x in &word.0 {
                        m = mat_mul(d, &m, &letter_mats[x as usize]);
                    }
                    let max_pow = depth / word.0.len().max(1);
                    let mut traces = Vec::with_capacity(max_pow);
                    let mut p = m.clone();
                    for _ in 0..max_pow {
                        traces.push(mat_trace(d, &p));
                        p = mat_mul(d, &p, &m);
                    }
                    all.push(traces);
                }
                Some(all)
            }
            _ => None,
        };
        // map primitive identity (prim_len, index within its length bucket)
        // back to the order the cache lists primitives in
        let mut prim_seen: std::collections::HashMap<(u32, usize), usize> =
            std::collections::HashMap::new();
        let mut prim_counter_by_len: Vec<usize> = vec![0; depth + 1];
        let mut prim_index_order: Vec<(u32, usize)> = Vec::new();
        for (word, _, _) in &cache.primitives {
            let l = word.0.len();
            let idx = prim_counter_by_len[l];
            prim_counter_by_len[l] += 1;
            prim_seen.insert((l as u32, idx), prim_index_order.len());
            prim_index_order.push((l as u32, idx));
        }

        let mut terms: Vec<Vec<Term>> = vec![Vec::new(); depth];
        for m in 1..=depth {
            // records of this total length, in cache order: powers of
            // primitives of each divisor length
            let mut per_len_counter: Vec<usize> = vec![0; depth + 1];
            for rec in cache.records_of_len(m) {
                let d = rec.prim_len as usize;
                let idx = per_len_counter[d];
                per_len_counter[d] += 1;
                let rot = rec.prim_len as f64;
                let tr: Complex64 = match &representation {
                    Representation::Trivial => Complex64::new(1.0, 0.0),
                    Representation::RegularMod { group_order, .. } => {
                        if rec.image_is_identity() {
                            Complex64::new(*group_order as f64, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    }
                    Representation::Custom { .. } => {
                        let prim_global = prim_seen[&(rec.prim_len, idx)];
                        custom_traces.as_ref().unwrap()[prim_global][rec.power as usize - 1]
                    }
                };
                if tr.norm_sqr() == 0.0 {
                    continue;
                }
                let inv_gap = 1.0 / (1.0 - (-rec.ell).exp());
                let coeff = tr * rot * inv_gap;
                terms[m - 1].push(Term {
                    ell: rec.ell,
                    coeff,
                });
            }
        }
        Ok(ZetaEvaluator {
            surface: Arc::clone(surface),
            representation,
            cache,
            depth,
            terms,
            evals: AtomicU64::new(0),
        })
    }

    /// t_m and the sum of its term magnitudes (the cancellation scale).
    fn t_m(&self, m: usize, s: Complex64) -> (Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs = 0.0f64;
        for t in &self.terms[m - 1] {
            let e = t.coeff * (-s * t.ell).exp();
            acc += e;
            abs += e.re.abs() + e.im.abs();
        }
        (acc, abs)
    }

    fn t_m_with_deriv(&self, m: usize, s: Complex64) -> (Complex64, Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut dacc = Complex64::new(0.0, 0.0);
        let mut abs = 0.0f64;
        for t in &self.terms[m - 1] {
            let e = t.coeff * (-s * t.ell).exp();
            acc += e;
            dacc -= t.ell * e;
            abs += e.re.abs() + e.im.abs();
        }
        (acc, dacc, abs)
    }

    /// Cycle-mode value of det(1 - L_s) with an empirical error estimate.
    pub fn eval(&self, s: Complex64) -> ZetaValue {
        self.eval_with(s, 1e-14)
    }

    pub fn eval_with(&self, s: Complex64, rel_tol: f64) -> ZetaValue {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let n_max = self.depth;
        let mut t = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut t_abs = vec![0.0f64; n_max + 1];
        let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        a[0] = Complex64::new(1.0, 0.0);
        let mut partial = a[0];
        let mut max_mag: f64 = 1.0;
        let mut n_used = n_max;
        let mut last_decr = f64::INFINITY;
        let mut prev_decr = f64::INFINITY;
        for n in 1..=n_max {
            let (tv, ta) = self.t_m(n, s);
            t[n] = tv;
            t_abs[n] = ta;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut acc_abs = 0.0f64;
            for m in 1..=n {
                let term = t[m] * a[n - m];
                acc_abs += t_abs[m] * a[n - m].norm();
                acc += term;
            }
            max_mag = max_mag.max(acc_abs / n as f64);
            a[n] = -acc / n as f64;
            partial += a[n];
            prev_decr = last_decr;
            last_decr = a[n].norm();
            let floor = f64::EPSILON * max_mag;
            if n >= 4
                && last_decr <= (rel_tol * partial.norm().max(1e-300)).max(floor)
                && prev_decr <= (10.0 * rel_tol * partial.norm().max(1e-300)).max(floor)
            {
                n_used = n;
                break;
            }
        }
        let noise_floor = f64::EPSILON * max_mag * (n_used as f64).sqrt();
        ZetaValue {
            value: partial,
            err_estimate: last_decr.min(prev_decr.max(last_decr)) + noise_floor,
            n_used,
            noise_floor,
        }
    }

    /// Value and an error check against a requested tolerance.
    pub fn eval_checked(&self, s: Complex64, tol: f64) -> Result<ZetaValue> {
        let v = self.eval_with(s, 1e-15);
        if v.err_estimate > tol {
            return Err(Error::PrecisionNotReached {
                requested: tol,
                achieved: v.err_estimate,
            });
        }
        Ok(v)
    }

    /// (Z, Z') by differentiating the coefficient recursion.
    pub fn eval_with_derivative(&self, s: Complex64) -> (ZetaValue, Complex64) {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let n_max = self.depth;
        let mut t = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut t_abs = vec![0.0f64; n_max + 1];
        let mut dt = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut da = vec![Complex64::new(0.0, 0.0); n_max + 1];
        a[0] = Complex64::new(1.0, 0.0);
        let mut partial = a[0];
        let mut dpartial = Complex64::new(0.0, 0.0);
        let mut max_mag: f64 = 1.0;
        let mut n_used = n_max;
        let mut last_decr = f64::INFINITY;
        for n in 1..=n_max {
            let (tv, dtv, ta) = self.t_m_with_deriv(n, s);
            t[n] = tv;
            t_abs[n] = ta;
            dt[n] = dtv;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut acc_abs = 0.0f64;
            let mut dacc = Complex64::new(0.0, 0.0);
            for m in 1..=n {
                let term = t[m] * a[n - m];
                acc_abs += t_abs[m] * a[n - m].norm();
                acc += term;
                dacc += dt[m] * a[n - m] + t[m] * da[n - m];
            }
            max_mag = max_mag.max(acc_abs / n as f64);
            a[n] = -acc / n as f64;
            da[n] = -dacc / n as f64;
            partial += a[n];
            dpartial += da[n];
            last_decr = a[n].norm();
            let floor = f64::EPSILON * max_mag;
            if n >= 4 && last_decr <= (1e-15 * partial.norm().max(1e-300)).max(floor) {
                n_used = n;
                break;
            }
        }
        let noise_floor = f64::EPSILON * max_mag * (n_used as f64).sqrt();
        (
            ZetaValue {
                value: partial,
                err_estimate: last_decr + noise_floor,
                n_used,
                noise_floor,
            },
            dpartial,
        )
    }

    /// Decrement profile |a_n| at s, for convergence diagnostics.
    pub fn decrements(&self, s: Complex64) -> Vec<f64> {
        let n_max = self.depth;
        let mut t = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        a[0] = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            t[n] = self.t_m(n, s).0;
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 1..=n {
                acc += t[m] * a[n - m];
            }
            a[n] = -acc / n as f64;
            out.push(a[n].norm());
        }
        out
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Effective Euler-characteristic magnitude of the twisted zeta: the
    /// topological zero at -k has multiplicity (2k + 1) dim(rho) |chi|.
    pub fn topological_multiplicity(&self, k: u32) -> u64 {
        (2 * k as u64 + 1) * self.representation.dim() * self.surface.euler_char().unsigned_abs()
    }
}

/// Euler factor depth default.
pub const EULER_K_DEPTH: usize = 32;
/// Margin above the critical exponent demanded by the Euler route.
pub const EULER_MARGIN: f64 = 0.2;

/// Euler-product evaluation with a rigorous tail bound. Requires Re(s) above
/// both delta + margin and the abscissa certified by the contraction rate.
pub fn zeta_euler(ev: &ZetaEvaluator, s: Complex64) -> Result<(Complex64, f64)> {
    let sigma = s.re;
    let delta = ev
        .surface
        .delta()
        .ok_or_else(|| Error::Parameter("estimate delta before using the Euler product".into()))?;
    if sigma <= delta + EULER_MARGIN {
        return Err(Error::Domain(format!(
            "Euler product needs Re(s) > delta + {EULER_MARGIN}; use cycle mode at Re(s) = {sigma}"
        )));
    }
    let cert = ev.surface.contraction_certificate()?;
    let rank = ev.surface.rank as f64;
    let q = (2.0 * rank - 1.0) * (-sigma * cert.rate).exp();
    if q >= 1.0 {
        return Err(Error::Domain(format!(
            "certified word-count tail diverges at Re(s) = {sigma} (q = {q:.3}); use cycle mode"
        )));
    }
    let dim = ev.representation.dim() as f64;
    let mut log_z = Complex64::new(0.0, 0.0);
    let mut k_tail = 0.0f64;
    for (_, ell, image_order) in &ev.cache.primitives {
        let ell = *ell;
        match &ev.representation {
            Representation::Trivial => {
                for k in 0..EULER_K_DEPTH {
                    let x = (-(s + k as f64) * ell).exp();
                    log_z += (Complex64::new(1.0, 0.0) - x).ln();
                }
            }
            Representation::RegularMod { group_order, .. } => {
                let o = *image_order as f64;
                for k in 0..EULER_K_DEPTH {
                    let x = (-(s + k as f64) * ell * o).exp();
                    log_z += (*group_order as f64 / o) * (Complex64::new(1.0, 0.0) - x).ln();
                }
            }
            Representation::Custom { .. } => {
                return Err(Error::Domain(
                    "Euler route implemented for trivial and regular twists".into(),
                ));
            }
        }
        // k-truncation remainder for this class
        let xk = (-(sigma + EULER_K_DEPTH as f64) * ell).exp();
        k_tail += dim * xk / (1.0 - xk) / (1.0 - (-(sigma + EULER_K_DEPTH as f64)).exp());
    }
    // classes beyond the enumerated depth
    let n = ev.depth as f64;
    let lam1 = (n + 1.0) * cert.rate;
    let c0 = 1.0 / ((1.0 - (-lam1).exp()) * (1.0 - (-sigma * lam1).exp()));
    let m_tail = dim * c0 * (2.0 * rank / (2.0 * rank - 1.0)) * q.powf(n + 1.0) / (1.0 - q);
    let log_tail_bound = k_tail + m_tail;
    let value = log_z.exp();
    let bound = value.norm() * (log_tail_bound.exp_m1()).abs();
    Ok((value, bound))
}

/// Largest real zero of the (trivial-twist) zeta function: the critical
/// exponent delta. Bisection downward from s = 1.
pub fn delta_estimate(ev: &ZetaEvaluator, tol: f64) -> Result<f64> {
    if !matches!(ev.representation, Representation::Trivial) {
        return Err(Error::Parameter(
            "delta estimation runs on the trivial representation".into(),
        ));
    }
    let f = |x: f64| ev.eval(Complex64::new(x, 0.0)).value.re;
    let mut hi = 1.0f64;
    let mut v_hi = f(hi);
    if v_hi <= 0.0 {
        // leading zero can exceed 1 only for non-discrete input; scan up a bit
        return Err(Error::Estimation(format!(
            "zeta(1) = {v_hi} <= 0; surface data outside the expected regime"
        )));
    }
    let step = 0.02;
    let mut lo = hi - step;
    let mut found = None;
    while lo > 5e-3 {
        let v_lo = f(lo);
        if v_lo == 0.0 {
            found = Some((lo, lo));
            break;
        }
        if v_lo < 0.0 {
            found = Some((lo, hi));
            break;
        }
        hi = lo;
        v_hi = v_lo;
        lo -= step;
    }
    let _ = v_hi;
    let (mut lo, mut hi) = found.ok_or_else(|| {
        Error::Estimation("no sign change in (0, 1); truncation too shallow".into())
    })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    ev.surface.set_delta(delta);
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{integer_demo_surface, three_funnel};

    fn demo_ev(depth: usize) -> ZetaEvaluator {
        let s = Arc::new(integer_demo_surface());
        ZetaEvaluator::new(&s, Representation::Trivial, depth).unwrap()
    }

    #[test]
    fn euler_tends_to_one_at_large_real_s() {
        let ev = demo_ev(8);
        delta_estimate(&ev, 1e-10).unwrap();
        let mut prev_gap = f64::INFINITY;
        for s in [4.0, 6.0, 8.0, 10.0] {
            let (v, _) = zeta_euler(&ev, Complex64::new(s, 0.0)).unwrap();
            assert!(v.im.abs() < 1e-14);
            assert!(v.re > 0.0 && v.re <= 1.0);
            let gap = 1.0 - v.re;
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
    }

    #[test]
    fn cycle_matches_euler_in_overlap() {
        let ev = demo_ev(10);
        let delta = delta_estimate(&ev, 1e-10).unwrap();
        // deterministic sample with Re(s) >= delta + 0.5
        for i in 0..20 {
            let s = Complex64::new(
                delta + 0.5 + 0.1 * (i % 7) as f64 + 0.35,
                -3.0 + 0.31 * i as f64,
            );
            let (euler, euler_bound) = zeta_euler(&ev, s).unwrap();
            let cyc = ev.eval(s);
            let gap = (euler - cyc.value).norm();
            assert!(
                gap <= euler_bound + cyc.err_estimate + 1e-12,
                "s = {s}: gap {gap:.3e}, bounds {euler_bound:.3e} + {:.3e}",
                cyc.err_estimate
            );
        }
    }

    #[test]
    fn cycle_agrees_at_delta_plus_one() {
        let ev = demo_ev(12);
        let delta = delta_estimate(&ev, 1e-10).unwrap();
        let s = Complex64::new(delta + 1.0, 0.0);
        let (euler, euler_bound) = zeta_euler(&ev, s).unwrap();
        let cyc = ev.eval(s);
        assert!(
            (euler - cyc.value).norm() <= (euler_bound + cyc.err_estimate).max(1e-10),
            "{euler} vs {}",
            cyc.value
        );
    }

    #[test]
    fn delta_is_a_zero_and_stable_across_depths() {
        let s = Arc::new(integer_demo_surface());
        let ev1 = ZetaEvaluator::new(&s, Representation::Trivial, 9).unwrap();
        let ev2 = ZetaEvaluator::new(&s, Representation::Trivial, 11).unwrap();
        let d1 = delta_estimate(&ev1, 1e-9).unwrap();
        let d2 = delta_estimate(&ev2, 1e-9).unwrap();
        assert!((d1 - d2).abs() < 1e-8, "{d1} vs {d2}");
        assert!(d1 > 0.0 && d1 < 1.0);
        let z = ev2.eval(Complex64::new(d2, 0.0));
        assert!(z.value.norm() <= 100.0 * (z.err_estimate + 1e-9));
    }

    #[test]
    fn delta_increases_for_thicker_surface() {
        let thin = Arc::new(three_funnel(3.0, 3.0, 3.0).unwrap());
        let thick = Arc::new(three_funnel(2.0, 2.0, 2.0).unwrap());
        let ev_thin = ZetaEvaluator::new(&thin, Representation::Trivial, 9).unwrap();
        let ev_thick = ZetaEvaluator::new(&thick, Representation::Trivial, 9).unwrap();
        let d_thin = delta_estimate(&ev_thin, 1e-8).unwrap();
        let d_thick = delta_estimate(&ev_thick, 1e-8).unwrap();
        assert!(
            d_thick > d_thin,
            "delta(2,2,2) = {d_thick} should exceed delta(3,3,3) = {d_thin}"
        );
    }

    #[test]
    fn conjugation_symmetry_for_real_twists() {
        let ev = demo_ev(9);
        for s in [
            Complex64::new(0.3, 2.0),
            Complex64::new(-0.4, 5.0),
            Complex64::new(0.8, 11.0),
        ] {
            let a = ev.eval(s.conj()).value;
            let b = ev.eval(s).value.conj();
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn decrements_shrink_superexponentially_in_converged_regime() {
        let ev = demo_ev(11);
        let decr = ev.decrements(Complex64::new(0.6, 3.0));
        // ratios of consecutive decrements fall once convergence sets in
        let tail: Vec<f64> = decr.iter().rev().take(4).cloned().collect();
        assert!(tail[0] < tail[1] && tail[1] < tail[2], "{decr:?}");
        let v1 = ev.eval_with(Complex64::new(0.6, 3.0), 1e-15);
        assert!(v1.err_estimate < 1e-8, "estimate {}", v1.err_estimate);
    }

    #[test]
    fn error_estimate_monotone_in_depth() {
        let s = Arc::new(integer_demo_surface());
        let pt = Complex64::new(0.45, 2.2);
        let mut prev = f64::INFINITY;
        for depth in [6usize, 8, 10] {
            let ev = ZetaEvaluator::new(&s, Representation::Trivial, depth).unwrap();
            let mut v = ev.eval_with(pt, 0.0);
            // force full depth by requesting rel_tol 0
            v.err_estimate = v.err_estimate.max(v.noise_floor);
            assert!(v.err_estimate <= prev * 1.5, "depth {depth}: {v:?}");
            prev = v.err_estimate;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let ev = demo_ev(10);
        let s = Complex64::new(0.4, 1.3);
        let (_, dz) = ev.eval_with_derivative(s);
        let h = 1e-6;
        let fd = (ev.eval(s + h).value - ev.eval(s - h).value) / (2.0 * h);
        assert!((dz - fd).norm() < 1e-6 * dz.norm().max(1.0), "{dz} vs {fd}");
    }

    #[test]
    fn regular_mod2_factor_counts() {
        let s = Arc::new(integer_demo_surface());
        let ev = ZetaEvaluator::new(
            &s,
            Representation::RegularMod {
                modulus: 2,
                group_order: 6,
            },
            8,
        )
        .unwrap();
        assert_eq!(ev.representation.dim(), 6);
        // twisted zeta is real on the real axis and positive far right
        let v = ev.eval(Complex64::new(6.0, 0.0));
        assert!(v.value.im.abs() < 1e-12);
        assert!(v.value.re > 0.0 && v.value.re <= 1.0);
    }

    #[test]
    fn cover_euler_matches_lifted_spectrum_route() {
        // det over the regular twist equals the Euler product assembled from
        // lifted primitive classes: (1 - x^o)^(|G|/o) per base class
        let s = Arc::new(integer_demo_surface());
        let ctx = crate::congruence::closure(&s, 2).unwrap();
        let ev = ZetaEvaluator::new(
            &s,
            Representation::RegularMod {
                modulus: 2,
                group_order: ctx.group_order,
            },
            9,
        )
        .unwrap();
        let ev_triv = ZetaEvaluator::new(&s, Representation::Trivial, 9).unwrap();
        delta_estimate(&ev_triv, 1e-9).unwrap();
        let spt = Complex64::new(1.6, 0.7);
        let (twisted, bound) = zeta_euler(&ev, spt).unwrap();
        // independent assembly from the cover length spectrum
        let cover = crate::congruence::cover_length_spectrum(&s, &ctx, 14.0).unwrap();
        let mut log_z = Complex64::new(0.0, 0.0);
        for e in &cover.entries {
            for k in 0..EULER_K_DEPTH {
                let x = (-(spt + k as f64) * e.length).exp();
                log_z += e.multiplicity as f64 * (Complex64::new(1.0, 0.0) - x).ln();
            }
        }
        let direct = log_z.exp();
        // the lifted route misses cover classes beyond its cutoff; compare loosely
        assert!(
            (twisted - direct).norm() < 2e-2 * direct.norm() + bound,
            "{twisted} vs {direct}"
        );
    }

    #[test]
    fn custom_representation_unitarity_enforced() {
        let s = Arc::new(integer_demo_surface());
        let bad = Representation::Custom {
            dim: 2,
            generator_matrices: vec![
                vec![
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.4, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ];
                2
            ],
        };
        assert!(ZetaEvaluator::new(&s, bad, 4).is_err());
    }

    #[test]
    fn custom_sign_character_matches_parity_rule() {
        // 1-dim representation: gamma -> -1 when pi_2(gamma) is an odd
        // permutation of the three nonzero vectors of F_2^2; both routes of
        // the twisted orbit sums must agree
        let surf = Arc::new(integer_demo_surface());
        let sign_of = |m: &crate::congruence::ModMatrix| -> f64 {
            // permutation of nonzero vectors (1,0), (0,1), (1,1)
            let vecs = [(1u64, 0u64), (0, 1), (1, 1)];
            let img = |v: (u64, u64)| ((m.a * v.0 + m.b * v.1) % 2, (m.c * v.0 + m.d * v.1) % 2);
            let mut perm = [0usize; 3];
            for (i, v) in vecs.iter().enumerate() {
                let w = img(*v);
                perm[i] = vecs.iter().position(|u| *u == w).unwrap();
            }
            // parity by counting inversions
            let mut inv = 0;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            if inv % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let g1 = sign_of(&crate::congruence::reduce_int(
            surf.generator_int(0).unwrap(),
            2,
        ));
        let g2 = sign_of(&crate::congruence::reduce_int(
            surf.generator_int(1).unwrap(),
            2,
        ));
        let rep = Representation::Custom {
            dim: 1,
            generator_matrices: vec![
                vec![Complex64::new(g1, 0.0)],
                vec![Complex64::new(g2, 0.0)],
            ],
        };
        let ev = ZetaEvaluator::new(&surf, rep, 6).unwrap();
        let v = ev.eval(Complex64::new(2.0, 0.0));
        assert!(v.value.im.abs() < 1e-12);
        assert!(v.err_estimate < 1e-9);
    }
}
