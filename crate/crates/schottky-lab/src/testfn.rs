//! Sinc-product test functions: smooth, positive, supported in [-1, 1], with
//! Fourier transforms decaying like exp(-c |x| / (log |x|)^beta).
//!
//! The profile is the infinite convolution of normalized box functions of
//! half-widths mu_1, mu_2, ... summing to 1, scaled to total mass 2 pi. Its
//! Fourier transform is exactly 2 pi prod_j sinc(mu_j z), which is how all
//! transforms are evaluated: the product form has no cancellation, so the
//! transform magnitude is computable far below the quadrature noise floor.
//! Truncation of the product is absorbed analytically through tail power
//! sums of the mu-sequence.

pub mod boxconv;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;

/// Taylor coefficients of -log(sin u / u) = sum a_m u^(2m),
/// a_m = zeta(2m) / (m pi^(2m)).
const LOG_SINC_COEFF: [f64; 10] = [
    1.0 / 6.0,
    1.0 / 180.0,
    1.0 / 2835.0,
    1.0 / 37800.0,
    1.0 / 467775.0,
    691.0 / 3831077250.0,
    2.0 / 127702575.0,
    3617.0 / 2605132530000.0,
    43867.0 / 350813659321125.0,
    174611.0 / 15313294652906250.0,
];
const N_TAIL: usize = 10;

/// Direct-product depth; factors beyond it go through the tail power sums.
const DIRECT_TERMS: usize = 1024;
/// Depth of the direct partial sums feeding the analytic tails.
const TAIL_SUM_DEPTH: usize = 1_000_000;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

/// The profile psi: coefficient table, normalization and tail data.
#[derive(Debug)]
pub struct SincProductProfile {
    pub kappa: f64,
    pub beta: f64,
    /// normalization constant making the mu-sequence sum to 1
    pub c_norm: f64,
    pub k_cutoff: usize,
    /// phi(k) for k = 0..=k_cutoff
    pub coefficients: Vec<f64>,
    /// bound on 2 sum_{k > k_cutoff} |phi(k)|
    pub coeff_tail_bound: f64,
    /// T_{2m} = sum_{j > DIRECT_TERMS} mu_j^(2m), m = 1..=N_TAIL
    tail_power_sums: [f64; N_TAIL],
    decay: OnceLock<DecayFit>,
}

impl Clone for SincProductProfile {
    fn clone(&self) -> Self {
        let p = SincProductProfile {
            kappa: self.kappa,
            beta: self.beta,
            c_norm: self.c_norm,
            k_cutoff: self.k_cutoff,
            coefficients: self.coefficients.clone(),
            coeff_tail_bound: self.coeff_tail_bound,
            tail_power_sums: self.tail_power_sums,
            decay: OnceLock::new(),
        };
        if let Some(d) = self.decay.get() {
            let _ = p.decay.set(*d);
        }
        p
    }
}

fn mu_tilde(j: usize, kappa: f64) -> f64 {
    if j == 1 {
        1.0
    } else {
        let lj = (j as f64).ln();
        1.0 / (j as f64 * lj.powf(1.0 + kappa))
    }
}

/// Normalization: c = 1 / sum_j mu_tilde(j), tail handled with the exact
/// integral of 1 / (t (log t)^(1+kappa)) plus a midpoint correction.
fn normalization(kappa: f64, depth: usize) -> f64 {
    let mut s = 0.0f64;
    for j in 1..=depth {
        s += mu_tilde(j, kappa);
    }
    let a = depth as f64 + 0.5;
    let la = a.ln();
    // integral_{a}^{inf} dt / (t (ln t)^(1+kappa)) = (ln a)^(-kappa) / kappa
    let tail_int = la.powf(-kappa) / kappa;
    // f'(a) / 24 midpoint correction
    let f = 1.0 / (a * la.powf(1.0 + kappa));
    let fp = -f / a * (1.0 + (1.0 + kappa) / la);
    1.0 / (s + tail_int + fp / 24.0)
}

fn tail_power_sums(kappa: f64, c: f64) -> [f64; N_TAIL] {
    let mut direct = [0.0f64; N_TAIL];
    for j in (DIRECT_TERMS + 1)..=TAIL_SUM_DEPTH {
        let mu = c * mu_tilde(j, kappa);
        let mu2 = mu * mu;
        let mut p = mu2;
        for m in 0..N_TAIL {
            direct[m] += p;
            p *= mu2;
        }
    }
    // analytic remainder beyond TAIL_SUM_DEPTH
    let a = TAIL_SUM_DEPTH as f64 + 0.5;
    let mut out = [0.0f64; N_TAIL];
    for m in 0..N_TAIL {
        let e = 2.0 * (m + 1) as f64;
        let (rem, _) = quad::integrate_tail(
            |t| (c / (t * t.ln().powf(1.0 + kappa))).powf(e),
            a,
            1e-13,
            1e-30,
        );
        out[m] = direct[m] + rem;
    }
    out
}

/// sinc with the removable singularity filled in.
fn sinc(w: Complex64) -> Complex64 {
    if w.norm_sqr() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        w.sin() / w
    }
}

fn sinc_real(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

/// Build the profile for a given kappa and coefficient cutoff.
pub fn build_profile(kappa: f64, k_cutoff: usize) -> Result<SincProductProfile> {
    if !(kappa > 0.0) {
        return Err(Error::Parameter("kappa must be positive".into()));
    }
    if kappa < 0.05 {
        return Err(Error::PrecisionNotReached {
            requested: 1e-12,
            achieved: (TAIL_SUM_DEPTH as f64).ln().powf(-kappa) / kappa,
        });
    }
    if k_cutoff < 64 {
        return Err(Error::Parameter("coefficient cutoff must be >= 64".into()));
    }
    let c = normalization(kappa, TAIL_SUM_DEPTH);
    let tails = tail_power_sums(kappa, c);
    let mut profile = SincProductProfile {
        kappa,
        beta: 1.0 + 2.0 * kappa,
        c_norm: c,
        k_cutoff,
        coefficients: Vec::new(),
        coeff_tail_bound: 0.0,
        tail_power_sums: tails,
        decay: OnceLock::new(),
    };
    let mut coeffs = Vec::with_capacity(k_cutoff + 1);
    for k in 0..=k_cutoff {
        coeffs.push(profile.phi_real(k as f64)?);
    }
    profile.coefficients = coeffs;
    profile.coeff_tail_bound = profile.series_tail_bound(k_cutoff);
    Ok(profile)
}

impl SincProductProfile {
    pub fn mu(&self, j: usize) -> f64 {
        self.c_norm * mu_tilde(j, self.kappa)
    }

    /// log of prod_{j > J} sinc(mu_j w) via the tail power sums, valid when
    /// |mu_{J+1} w| <= 1/2. J is DIRECT_TERMS plus `extra` direct factors.
    fn tail_log(&self, w2: Complex64, extra_from: usize) -> Complex64 {
        let mut t = self.tail_power_sums;
        if extra_from > DIRECT_TERMS {
            for j in (DIRECT_TERMS + 1)..=extra_from {
                let mu2 = self.mu(j) * self.mu(j);
                let mut p = mu2;
                for m in 0..N_TAIL {
                    t[m] -= p;
                    p *= mu2;
                }
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut w2m = w2;
        for m in 0..N_TAIL {
            acc -= LOG_SINC_COEFF[m] * t[m] * w2m;
            w2m *= w2;
        }
        acc
    }

    /// Number of direct factors needed so that |mu_{J+1} z| <= 1/2.
    fn direct_depth(&self, zn: f64) -> Result<usize> {
        if self.mu(DIRECT_TERMS + 1) * zn <= 0.5 {
            return Ok(DIRECT_TERMS);
        }
        let mut j = DIRECT_TERMS;
        while self.mu(j + 1) * zn > 0.5 {
            j *= 2;
            if j > TAIL_SUM_DEPTH {
                return Err(Error::PrecisionNotReached {
                    requested: 0.5,
                    achieved: self.mu(j + 1) * zn,
                });
            }
        }
        Ok(j)
    }

    fn phi_real(&self, k: f64) -> Result<f64> {
        let depth = self.direct_depth(k.abs())?;
        let mut prod = 1.0f64;
        for j in 1..=depth {
            prod *= sinc_real(self.mu(j) * k);
        }
        let tail = self.tail_log(Complex64::new(k * k, 0.0), depth);
        Ok(prod * tail.re.exp())
    }

    /// Fourier coefficient phi(k) = prod_j sinc(mu_j k); even in k.
    pub fn phi(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        if k <= self.k_cutoff {
            self.coefficients[k]
        } else {
            self.phi_real(k as f64).unwrap_or(0.0)
        }
    }

    /// Bound on 2 sum_{k > kc} |phi(k)| from |sinc(u)| <= 1/u over the first
    /// q factors, minimized over q.
    fn series_tail_bound(&self, kc: usize) -> f64 {
        let mut best = f64::INFINITY;
        let mut inv_prod = 1.0f64;
        for q in 1..=14usize {
            inv_prod /= self.mu(q);
            if q < 3 {
                continue;
            }
            // 2 sum_{k > kc} P_q / k^q <= 2 P_q / ((q - 1) kc^(q-1))
            let bound = 2.0 * inv_prod / ((q as f64 - 1.0) * (kc as f64).powi(q as i32 - 1));
            if bound < best {
                best = bound;
            }
        }
        best
    }

    /// psi(x) through the truncated cosine series, clipped to stay
    /// non-negative once the value is within the certified series tail of 0.
    pub fn psi_eval(&self, x: f64) -> Result<f64> {
        if x.abs() > PI + 1e-12 {
            return Err(Error::Domain(
                "psi is a Fourier series on [-pi, pi]".into(),
            ));
        }
        let v = self.psi_series(x);
        if v < 0.0 && v >= -self.coeff_tail_bound {
            return Ok(0.0);
        }
        Ok(v)
    }

    /// Raw truncated series without clipping.
    pub fn psi_series(&self, x: f64) -> f64 {
        let mut v = self.coefficients[0];
        for k in 1..=self.k_cutoff {
            v += 2.0 * self.coefficients[k] * (k as f64 * x).cos();
        }
        v
    }

    /// Fourier transform: psi_hat(z) = 2 pi prod_j sinc(mu_j z), entire in z.
    pub fn psi_hat(&self, z: Complex64) -> Result<Complex64> {
        let depth = self.direct_depth(z.norm())?;
        let mut prod = Complex64::new(2.0 * PI, 0.0);
        for j in 1..=depth {
            prod *= sinc(self.mu(j) * z);
        }
        Ok(prod * self.tail_log(z * z, depth).exp())
    }

    /// (log |psi_hat(z)|, arg) accumulated factor-wise; usable when the value
    /// itself would under- or overflow.
    pub fn psi_hat_log(&self, z: Complex64) -> Result<(f64, f64)> {
        let depth = self.direct_depth(z.norm())?;
        let mut log_abs = (2.0 * PI).ln();
        let mut arg = 0.0f64;
        for j in 1..=depth {
            let f = sinc(self.mu(j) * z);
            log_abs += f.norm().ln();
            arg += f.arg();
        }
        let tail = self.tail_log(z * z, depth);
        Ok((log_abs + tail.re, arg + tail.im))
    }

    /// Quadrature route for psi_hat, the independent cross-check of the
    /// product formula. Only meaningful while cancellation stays above the
    /// f64 noise floor.
    pub fn psi_hat_quadrature(&self, z: Complex64, rel_tol: f64) -> (Complex64, f64) {
        quad::integrate_complex(
            |x| {
                let p = self.psi_series(x);
                (Complex64::new(0.0, -1.0) * z * x).exp() * p
            },
            -1.0,
            1.0,
            rel_tol,
            1e-14,
        )
    }

    /// D(x) = -log |psi_hat(x)| (log x)^beta / x over the grid; the verdict
    /// passes when inf D > 0, certifying the almost-exponential decay.
    pub fn decay_check(&self, x_grid: &[f64]) -> Result<DecayFit> {
        if x_grid.is_empty() {
            return Err(Error::Parameter("empty decay grid".into()));
        }
        for &x in x_grid {
            if !(10.0 <= x && x <= 1.0e5) {
                return Err(Error::Parameter(format!(
                    "decay grid point {x} outside [10, 1e5]"
                )));
            }
        }
        let mut c2 = f64::INFINITY;
        let mut logs = Vec::with_capacity(x_grid.len());
        for &x in x_grid {
            let (la, _) = self.psi_hat_log(Complex64::new(x, 0.0))?;
            logs.push((x, la));
            let d = -la * x.ln().powf(self.beta) / x;
            if d < c2 {
                c2 = d;
            }
        }
        let mut log_c1 = f64::NEG_INFINITY;
        for &(x, la) in &logs {
            let v = la + c2 * x / x.ln().powf(self.beta);
            if v > log_c1 {
                log_c1 = v;
            }
        }
        let fit = DecayFit {
            c1: log_c1.exp(),
            c2,
            pass: c2 > 0.0 && c2.is_finite(),
        };
        let _ = self.decay.set(fit);
        if !fit.pass {
            return Err(Error::DecayViolation(format!(
                "inf D(x) = {c2} is not positive"
            )));
        }
        Ok(fit)
    }

    pub fn decay_fit(&self) -> Option<DecayFit> {
        self.decay.get().copied()
    }

    /// Bit-reproducible JSON: coefficients as decimal strings.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "kappa": format!("{:.17e}", self.kappa),
            "c_norm": format!("{:.17e}", self.c_norm),
            "k_cutoff": self.k_cutoff,
            "coefficients": self.coefficients.iter().map(|c| format!("{c:.17e}")).collect::<Vec<_>>(),
            "coeff_tail_bound": format!("{:.17e}", self.coeff_tail_bound),
            "tail_power_sums": self.tail_power_sums.iter().map(|c| format!("{c:.17e}")).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let get = |k: &str| -> Result<&serde_json::Value> {
            v.get(k)
                .ok_or_else(|| Error::Other(format!("profile json missing {k}")))
        };
        let parse_f = |x: &serde_json::Value| -> Result<f64> {
            x.as_str()
                .ok_or_else(|| Error::Other("expected decimal string".into()))?
                .parse::<f64>()
                .map_err(|e| Error::Other(format!("bad decimal: {e}")))
        };
        let kappa = parse_f(get("kappa")?)?;
        let c_norm = parse_f(get("c_norm")?)?;
        let k_cutoff = get("k_cutoff")?
            .as_u64()
            .ok_or_else(|| Error::Other("bad k_cutoff".into()))? as usize;
        let coefficients = get("coefficients")?
            .as_array()
            .ok_or_else(|| Error::Other("bad coefficients".into()))?
            .iter()
            .map(|x| parse_f(x))
            .collect::<Result<Vec<_>>>()?;
        let tails_v = get("tail_power_sums")?
            .as_array()
            .ok_or_else(|| Error::Other("bad tail_power_sums".into()))?
            .iter()
            .map(|x| parse_f(x))
            .collect::<Result<Vec<_>>>()?;
        let mut tail_power_sums = [0.0; N_TAIL];
        for (i, t) in tails_v.iter().enumerate().take(N_TAIL) {
            tail_power_sums[i] = *t;
        }
        let coeff_tail_bound = parse_f(get("coeff_tail_bound")?)?;
        Ok(SincProductProfile {
            kappa,
            beta: 1.0 + 2.0 * kappa,
            c_norm,
            k_cutoff,
            coefficients,
            coeff_tail_bound,
            tail_power_sums,
            decay: OnceLock::new(),
        })
    }
}

/// A scaled test function phi_{L,eta}(x) = psi((x - L) / (eta L)), supported
/// on [(1 - eta) L, (1 + eta) L].
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub profile: SincProductProfile,
    pub scale: f64,
    pub width: f64,
}

/// Transform value, or its (log-magnitude, phase) when out of f64 range.
#[derive(Debug, Clone, Copy)]
pub enum ScaledHat {
    Value(Complex64),
    Log { log_abs: f64, arg: f64 },
}

impl ScaledHat {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            ScaledHat::Value(v) => Some(*v),
            ScaledHat::Log { .. } => None,
        }
    }
}

impl TestFunction {
    pub fn new(profile: SincProductProfile, scale: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width < 1.0) {
            return Err(Error::Parameter("width eta must lie in (0, 1)".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::Parameter("scale L must be positive".into()));
        }
        Ok(TestFunction {
            profile,
            scale,
            width,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        ((1.0 - self.width) * self.scale, (1.0 + self.width) * self.scale)
    }

    /// phi_{L,eta}(x); zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.scale) / (self.width * self.scale);
        if u.abs() > 1.0 {
            return 0.0;
        }
        self.profile.psi_eval(u).unwrap_or(0.0)
    }

    /// Transform at is: eta L e^(sL) psi_hat(i eta L s), equivalently the
    /// two-sided Laplace integral of phi_{L,eta} at s.
    pub fn hat_at_is(&self, s: Complex64) -> Result<ScaledHat> {
        let el = self.width * self.scale;
        let z = Complex64::new(0.0, 1.0) * el * s;
        // overflow guard on the e^(sL) prefactor combined with psi_hat growth
        if s.re.abs() * self.scale * (1.0 + self.width) > 700.0 {
            let (la, arg) = self.profile.psi_hat_log(z)?;
            let full = la + s.re * self.scale + el.ln();
            return Ok(ScaledHat::Log {
                log_abs: full,
                arg: arg + s.im * self.scale,
            });
        }
        let hat = self.profile.psi_hat(z)?;
        Ok(ScaledHat::Value(el * (s * self.scale).exp() * hat))
    }

    /// Convenience for callers in the ordinary range.
    pub fn hat_value(&self, s: Complex64) -> Result<Complex64> {
        match self.hat_at_is(s)? {
            ScaledHat::Value(v) => Ok(v),
            ScaledHat::Log { log_abs, .. } => Err(Error::Domain(format!(
                "transform out of f64 range (log magnitude {log_abs:.1})"
            ))),
        }
    }

    /// Direct quadrature of the Laplace integral, for cross-checks.
    pub fn hat_quadrature(&self, s: Complex64, rel_tol: f64) -> (Complex64, f64) {
        let (lo, hi) = self.support();
        quad::integrate_complex(|x| (s * x).exp() * self.eval(x), lo, hi, rel_tol, 1e-14)
    }

    /// Total mass: eta L psi_hat(0) = 2 pi eta L.
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.width * self.scale
    }
}
