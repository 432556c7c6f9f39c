//! Exact piecewise-polynomial convolutions of box functions and their
//! Fourier integrals. Independent oracle for the partial-product
//! coefficients: the n-fold convolution of unit-mass boxes of half-widths
//! mu_1..mu_n has Fourier transform prod_j sinc(mu_j k).

use num_complex::Complex64;

/// Polynomial in x with global coefficients, valid on one interval.
#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    /// coeffs[m] multiplies x^m
    coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for &c in self.coeffs.iter().rev() {
            v = v * x + c;
        }
        v
    }
}

/// A compactly supported piecewise polynomial; zero outside its pieces.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|&c| c * s).collect()
}

/// Composition p(x + t) expanded in powers of x.
fn poly_shift(a: &[f64], t: f64) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    // binomial expansion of each monomial
    let mut binom = vec![vec![0.0f64; n]; n];
    for m in 0..n {
        binom[m][0] = 1.0;
        for i in 1..=m {
            binom[m][i] = binom[m][i - 1] * ((m - i + 1) as f64) / (i as f64);
        }
    }
    for (m, &c) in a.iter().enumerate() {
        let mut tp = 1.0;
        for i in 0..=m {
            // coefficient of x^(m-i): C(m, i) t^i
            out[m - i] += c * binom[m][i] * tp;
            tp *= t;
        }
    }
    out
}

impl PiecewisePoly {
    /// Unit-mass box of half-width mu.
    pub fn unit_box(mu: f64) -> Self {
        PiecewisePoly {
            pieces: vec![Piece {
                lo: -mu,
                hi: mu,
                coeffs: vec![1.0 / (2.0 * mu)],
            }],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.pieces.first().map_or(0.0, |p| p.lo),
            self.pieces.last().map_or(0.0, |p| p.hi),
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if x >= p.lo && x <= p.hi {
                return p.eval(x);
            }
        }
        0.0
    }

    /// Antiderivative with F(support start) = 0, as a piecewise polynomial
    /// over the same breakpoints (plus constant continuation after the end).
    fn antiderivative(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut acc = 0.0f64;
        for p in &self.pieces {
            let mut coeffs = vec![0.0; p.coeffs.len() + 1];
            for (m, &c) in p.coeffs.iter().enumerate() {
                coeffs[m + 1] = c / (m as f64 + 1.0);
            }
            // fix the constant so F is continuous with accumulated mass
            let mut f = Piece {
                lo: p.lo,
                hi: p.hi,
                coeffs,
            };
            let at_lo = f.eval(p.lo);
            f.coeffs[0] = acc - at_lo;
            acc = f.eval(p.hi);
            out.push(f);
        }
        out
    }

    fn antideriv_eval(anti: &[Piece], total: f64, x: f64) -> f64 {
        if anti.is_empty() {
            return 0.0;
        }
        if x <= anti[0].lo {
            return 0.0;
        }
        if x >= anti[anti.len() - 1].hi {
            return total;
        }
        for p in anti {
            if x >= p.lo && x <= p.hi {
                return p.eval(x);
            }
        }
        unreachable!()
    }

    /// Convolution with the unit-mass box of half-width mu:
    /// (f * h)(x) = (F(x + mu) - F(x - mu)) / (2 mu).
    pub fn convolve_box(&self, mu: f64) -> Self {
        let anti = self.antiderivative();
        let total = anti.last().map_or(0.0, |p| p.eval(p.hi));
        let (lo, hi) = self.support();
        // new breakpoints: old ones shifted by +-mu
        let mut breaks: Vec<f64> = Vec::new();
        for p in &self.pieces {
            breaks.push(p.lo - mu);
            breaks.push(p.lo + mu);
            breaks.push(p.hi - mu);
            breaks.push(p.hi + mu);
        }
        breaks.push(lo - mu);
        breaks.push(hi + mu);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut pieces = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-15 {
                continue;
            }
            // on (a, b), both x + mu and x - mu stay within fixed pieces of F
            let mid = 0.5 * (a + b);
            let plus = Self::piece_coeffs_at(&anti, total, mid + mu, mu);
            let minus = Self::piece_coeffs_at(&anti, total, mid - mu, -mu);
            // (F(x + mu) - F(x - mu)) / (2 mu), with F-as-polynomial shifted
            let diff = poly_add(&plus, &poly_scale(&minus, -1.0));
            let coeffs = poly_scale(&diff, 1.0 / (2.0 * mu));
            pieces.push(Piece {
                lo: a,
                hi: b,
                coeffs,
            });
        }
        // drop identically-zero outer pieces
        let pieces = pieces
            .into_iter()
            .filter(|p| {
                let m = 0.5 * (p.lo + p.hi);
                p.coeffs.iter().any(|&c| c != 0.0) || p.eval(m) != 0.0
            })
            .collect();
        PiecewisePoly { pieces }
    }

    /// Coefficients (in x) of F(x + shift) on the piece containing probe.
    fn piece_coeffs_at(anti: &[Piece], total: f64, probe: f64, shift: f64) -> Vec<f64> {
        if anti.is_empty() || probe <= anti[0].lo {
            return vec![0.0];
        }
        if probe >= anti[anti.len() - 1].hi {
            return vec![total];
        }
        for p in anti {
            if probe >= p.lo && probe <= p.hi {
                return poly_shift(&p.coeffs, shift);
            }
        }
        vec![Self::antideriv_eval(anti, total, probe)]
    }

    /// Exact integral of f(x) e^(-ikx) over the support via integration by
    /// parts on each polynomial piece.
    pub fn fourier(&self, k: f64) -> Complex64 {
        if k == 0.0 {
            let anti = self.antiderivative();
            return Complex64::new(anti.last().map_or(0.0, |p| p.eval(p.hi)), 0.0);
        }
        let ik = Complex64::new(0.0, -k);
        let mut total = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            // integral of x^m e^(ik x) recursively: I_m = [x^m e/(ik)] - m/ik I_{m-1}
            let e_lo = (ik * p.lo).exp();
            let e_hi = (ik * p.hi).exp();
            let deg = p.coeffs.len();
            let mut int_xm = vec![Complex64::new(0.0, 0.0); deg];
            for m in 0..deg {
                let boundary = (p.hi.powi(m as i32) * e_hi - p.lo.powi(m as i32) * e_lo) / ik;
                int_xm[m] = if m == 0 {
                    boundary
                } else {
                    boundary - (m as f64) / ik * int_xm[m - 1]
                };
            }
            for (m, &c) in p.coeffs.iter().enumerate() {
                total += c * int_xm[m];
            }
        }
        total
    }
}
