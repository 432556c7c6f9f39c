//! Adaptive Gauss-Kronrod quadrature.

use num_complex::Complex64;

/// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
/// Abscissae are symmetric; only the non-negative half is stored.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        let x = h * XGK[i];
        let (fp, fm) = if i == 7 {
            let v = f(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(c + x), f(c - x))
        };
        let s = if i == 7 { fp } else { fp + fm };
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).norm();
    (value, err)
}

/// Adaptive bisection on top of GK15. Returns (value, error estimate).
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> (Complex64, f64) {
    struct Seg {
        a: f64,
        b: f64,
        val: Complex64,
        err: f64,
    }
    let (val, err) = gk15(&f, a, b);
    let mut segs = vec![Seg { a, b, val, err }];
    let max_segs = 4096;
    loop {
        let total: Complex64 = segs.iter().map(|s| s.val).sum();
        let total_err: f64 = segs.iter().map(|s| s.err).sum();
        let goal = abs_tol.max(rel_tol * total.norm());
        if total_err <= goal || segs.len() >= max_segs {
            return (total, total_err);
        }
        // split the worst segment
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .unwrap();
        let Seg { a, b, .. } = segs.swap_remove(idx);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        segs.push(Seg {
            a,
            b: m,
            val: v1,
            err: e1,
        });
        segs.push(Seg {
            a: m,
            b,
            val: v2,
            err: e2,
        });
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    let (v, e) = integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, rel_tol, abs_tol);
    (v.re, e)
}

/// Integral over [a, inf) of a decaying integrand, mapped to (0, 1] via t = a / u.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    assert!(a > 0.0);
    integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let t = a / u;
            f(t) * a / (u * u)
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}
