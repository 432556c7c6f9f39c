//! Schottky surface data: generators, ping-pong disks, validation, and the
//! word-length-to-geodesic-length certificate used by spectrum enumeration.

pub mod spectrum;
pub mod words;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::{IntMatrix, RealMatrix};
use words::{letter_inverse, Letter};

/// Closed disk orthogonal to the boundary line, stored by Euclidean center
/// (on the real axis) and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    /// Euclidean gap between two closed disks (negative if they overlap).
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).abs() - self.radius - other.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - Complex64::new(self.center, 0.0)).norm() <= self.radius
    }
}

/// Isometric circle of g, |cz + d| = 1. Requires c != 0.
pub fn isometric_circle(g: &RealMatrix) -> Result<Disk> {
    if g.c == 0.0 {
        return Err(Error::Construction(
            "isometric circle undefined for c = 0".into(),
        ));
    }
    Ok(Disk {
        center: -g.d / g.c,
        radius: 1.0 / g.c.abs(),
    })
}

/// Image of a disk under a Mobius map whose pole lies outside the disk.
pub fn disk_image(g: &RealMatrix, d: &Disk) -> Result<Disk> {
    if g.c == 0.0 {
        // affine map z -> (a z + b) / d
        return Ok(Disk {
            center: (g.a * d.center + g.b) / g.d,
            radius: d.radius * (g.a / g.d).abs(),
        });
    }
    let p = -g.d / g.c;
    let u = d.center - p;
    let denom = u * u - d.radius * d.radius;
    if denom <= 0.0 {
        return Err(Error::Domain("pole inside disk for disk_image".into()));
    }
    // g(z) = a/c - (1/c^2) / (z - p)
    let m = u / denom;
    let r = d.radius / denom;
    Ok(Disk {
        center: g.a / g.c - m / (g.c * g.c),
        radius: r / (g.c * g.c),
    })
}

/// Certificate that every cyclically reduced word of length m has
/// displacement length >= m * rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionCertificate {
    pub rate: f64,
    /// lookahead block size that produced the rate
    pub block: usize,
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// minimal Euclidean gap between closed disks
    pub min_disk_gap: f64,
    /// worst boundary-mapping residual over all letters
    pub max_pingpong_residual: f64,
    pub generators_hyperbolic: bool,
    pub failures: Vec<String>,
    pub certificate: Option<ContractionCertificate>,
}

/// A Schottky surface: rank, generators (real and optionally exact integer),
/// and one ping-pong disk per letter (letter x maps the exterior of
/// `disks[x]` onto the interior of `disks[x ^ 1]`).
#[derive(Debug)]
pub struct SchottkySurface {
    pub name: String,
    pub rank: usize,
    gens_real: Vec<RealMatrix>,
    gens_int: Option<Vec<IntMatrix>>,
    pub disks: Vec<Disk>,
    delta: OnceLock<f64>,
    ell0: OnceLock<f64>,
}

impl Clone for SchottkySurface {
    fn clone(&self) -> Self {
        let s = SchottkySurface {
            name: self.name.clone(),
            rank: self.rank,
            gens_real: self.gens_real.clone(),
            gens_int: self.gens_int.clone(),
            disks: self.disks.clone(),
            delta: OnceLock::new(),
            ell0: OnceLock::new(),
        };
        if let Some(d) = self.delta.get() {
            let _ = s.delta.set(*d);
        }
        if let Some(l) = self.ell0.get() {
            let _ = s.ell0.set(*l);
        }
        s
    }
}

impl SchottkySurface {
    pub fn from_parts(
        name: impl Into<String>,
        gens_real: Vec<RealMatrix>,
        gens_int: Option<Vec<IntMatrix>>,
        disks: Vec<Disk>,
    ) -> Result<Self> {
        let rank = gens_real.len();
        if rank < 2 {
            return Err(Error::Construction(
                "a non-elementary Schottky group needs rank >= 2".into(),
            ));
        }
        if disks.len() != 2 * rank {
            return Err(Error::Construction(format!(
                "expected {} disks, got {}",
                2 * rank,
                disks.len()
            )));
        }
        if let Some(ints) = &gens_int {
            if ints.len() != rank {
                return Err(Error::Construction("integer generator count mismatch".into()));
            }
            for (i, m) in ints.iter().enumerate() {
                let r = m.to_real();
                let g = gens_real[i];
                if (r.a - g.a).abs() + (r.b - g.b).abs() + (r.c - g.c).abs() + (r.d - g.d).abs()
                    > 1e-9
                {
                    return Err(Error::Construction(format!(
                        "integer and real generator {i} disagree"
                    )));
                }
            }
        }
        Ok(SchottkySurface {
            name: name.into(),
            rank,
            gens_real,
            gens_int,
            disks,
            delta: OnceLock::new(),
            ell0: OnceLock::new(),
        })
    }

    /// Generators with disks taken to be their isometric circles.
    pub fn from_generators(
        name: impl Into<String>,
        gens_real: Vec<RealMatrix>,
        gens_int: Option<Vec<IntMatrix>>,
    ) -> Result<Self> {
        let mut disks = Vec::with_capacity(2 * gens_real.len());
        for g in &gens_real {
            disks.push(isometric_circle(g)?);
            disks.push(isometric_circle(&g.inverse())?);
        }
        Self::from_parts(name, gens_real, gens_int, disks)
    }

    pub fn euler_char(&self) -> i64 {
        1 - self.rank as i64
    }

    pub fn vol0(&self) -> f64 {
        -2.0 * PI * self.euler_char() as f64
    }

    pub fn has_integer_generators(&self) -> bool {
        self.gens_int.is_some()
    }

    pub fn generator(&self, i: usize) -> RealMatrix {
        self.gens_real[i]
    }

    pub fn generator_int(&self, i: usize) -> Option<&IntMatrix> {
        self.gens_int.as_ref().map(|v| &v[i])
    }

    pub fn letter_matrix(&self, x: Letter) -> RealMatrix {
        let g = self.gens_real[(x / 2) as usize];
        if x % 2 == 0 {
            g
        } else {
            g.inverse()
        }
    }

    pub fn letter_matrix_int(&self, x: Letter) -> Option<IntMatrix> {
        self.gens_int.as_ref().map(|v| {
            let g = &v[(x / 2) as usize];
            if x % 2 == 0 {
                g.clone()
            } else {
                g.inverse()
            }
        })
    }

    pub fn word_matrix(&self, letters: &[Letter]) -> RealMatrix {
        let mut m = RealMatrix::identity();
        for &x in letters {
            m = m.mul(&self.letter_matrix(x));
        }
        m
    }

    pub fn word_matrix_int(&self, letters: &[Letter]) -> Option<IntMatrix> {
        let gens = self.gens_int.as_ref()?;
        let mut m = IntMatrix::identity();
        for &x in letters {
            let g = &gens[(x / 2) as usize];
            let g = if x % 2 == 0 { g.clone() } else { g.inverse() };
            m = m.mul(&g);
        }
        Some(m)
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta.get().copied()
    }

    pub fn set_delta(&self, d: f64) {
        let _ = self.delta.set(d);
    }

    pub fn ell0(&self) -> Option<f64> {
        self.ell0.get().copied()
    }

    pub fn set_ell0(&self, l: f64) {
        let _ = self.ell0.set(l);
    }

    /// Per-letter displacement rate bound from disk geometry. Larger block
    /// sizes look further ahead along the word and certify a sharper rate.
    pub fn contraction_certificate(&self) -> Result<ContractionCertificate> {
        let mut best = ContractionCertificate {
            rate: f64::NEG_INFINITY,
            block: 0,
        };
        for block in 1..=3usize {
            match self.certificate_for_block(block) {
                Ok(rate) => {
                    if rate > best.rate {
                        best = ContractionCertificate { rate, block };
                    }
                }
                Err(_) => continue,
            }
        }
        if best.rate <= 0.0 {
            return Err(Error::Validation(format!(
                "contraction certificate failed: best rate {} not positive",
                best.rate
            )));
        }
        Ok(best)
    }

    fn certificate_for_block(&self, block: usize) -> Result<f64> {
        let nl = 2 * self.rank as usize;
        // nodes: admissible blocks (reduced letter tuples) of length `block`
        let mut nodes: Vec<Vec<Letter>> = Vec::new();
        let mut stack = Vec::new();
        fn gen_blocks(
            stack: &mut Vec<Letter>,
            nl: usize,
            len: usize,
            out: &mut Vec<Vec<Letter>>,
        ) {
            if stack.len() == len {
                out.push(stack.clone());
                return;
            }
            for x in 0..nl as Letter {
                if let Some(&p) = stack.last() {
                    if x == letter_inverse(p) {
                        continue;
                    }
                }
                stack.push(x);
                gen_blocks(stack, nl, len, out);
                stack.pop();
            }
        }
        gen_blocks(&mut stack, nl, block, &mut nodes);
        let idx_of = |b: &[Letter]| nodes.iter().position(|n| n == b).unwrap();

        // edge u -> v when v is u shifted by one letter; weight bounds the
        // derivative of u's first letter on the image chain of v's last target
        let n = nodes.len();
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (ui, u) in nodes.iter().enumerate() {
            for t in 0..nl as Letter {
                if t == letter_inverse(u[block - 1]) {
                    continue;
                }
                let mut v = u[1..].to_vec();
                v.push(t);
                let vi = idx_of(&v);
                // maximize |mat(u[0])'| over mat(u[1]) ... mat(u[block-1]) (T(t))
                let mut d = self.disks[(letter_inverse(t)) as usize];
                for j in (1..block).rev() {
                    d = disk_image(&self.letter_matrix(u[j]), &d)?;
                }
                let g = self.letter_matrix(u[0]);
                if g.c == 0.0 {
                    return Err(Error::Domain("certificate requires c != 0".into()));
                }
                let pole = -g.d / g.c;
                let dist = (d.center - pole).abs() - d.radius;
                if dist <= 0.0 {
                    return Err(Error::Domain(
                        "pole inside target disk; certificate unavailable".into(),
                    ));
                }
                let kappa = 1.0 / (g.c * g.c * dist * dist);
                edges.push((ui, vi, -kappa.ln()));
            }
        }
        Ok(min_mean_cycle(n, &edges))
    }
}

/// Karp's minimum mean cycle. Every node is a potential start.
fn min_mean_cycle(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let inf = f64::INFINITY;
    // d[k][v] = min weight over walks with exactly k edges
    let mut d = vec![vec![inf; n]; n + 1];
    for v in 0..n {
        d[0][v] = 0.0;
    }
    for k in 1..=n {
        for &(u, v, w) in edges {
            if d[k - 1][u] + w < d[k][v] {
                d[k][v] = d[k - 1][u] + w;
            }
        }
    }
    let mut best = inf;
    for v in 0..n {
        if !d[n][v].is_finite() {
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            if d[k][v].is_finite() {
                let mean = (d[n][v] - d[k][v]) / (n - k) as f64;
                if mean > worst {
                    worst = mean;
                }
            }
        }
        if worst < best {
            best = worst;
        }
    }
    best
}

/// Number of boundary sample points used by the ping-pong check.
const PINGPONG_SAMPLES: usize = 64;
const PINGPONG_TOL: f64 = 1e-9;

/// Disk disjointness plus per-letter boundary mapping checks. A pass
/// certifies the group is free, discrete and convex cocompact.
pub fn validate(surface: &SchottkySurface) -> ValidationReport {
    let mut failures = Vec::new();
    let disks = &surface.disks;
    let mut min_gap = f64::INFINITY;
    for i in 0..disks.len() {
        if !(disks[i].radius > 0.0) {
            failures.push(format!("disk {i} has non-positive radius"));
        }
        for j in (i + 1)..disks.len() {
            let gap = disks[i].gap(&disks[j]);
            if gap < min_gap {
                min_gap = gap;
            }
            if gap <= 0.0 {
                failures.push(format!(
                    "disks {i} and {j} are not disjoint (gap {gap:.3e})"
                ));
            }
        }
    }

    let mut generators_hyperbolic = true;
    for i in 0..surface.rank {
        let g = surface.generator(i);
        if g.trace().abs() <= 2.0 {
            generators_hyperbolic = false;
            failures.push(format!(
                "generator {i} is not hyperbolic (|tr| = {})",
                g.trace().abs()
            ));
        }
    }

    let mut max_residual: f64 = 0.0;
    let nl = 2 * surface.rank;
    for x in 0..nl as Letter {
        let g = surface.letter_matrix(x);
        let src = disks[x as usize];
        let tgt = disks[letter_inverse(x) as usize];
        let mut worst: f64 = 0.0;
        for k in 0..PINGPONG_SAMPLES {
            let th = 2.0 * PI * (k as f64 + 0.5) / PINGPONG_SAMPLES as f64;
            let z = Complex64::new(src.center + src.radius * th.cos(), src.radius * th.sin());
            let w = g.apply(z);
            let res = ((w - Complex64::new(tgt.center, 0.0)).norm() - tgt.radius).abs();
            if res > worst {
                worst = res;
            }
        }
        // an exterior point must land inside the target disk
        let far = Complex64::new(src.center + 1e3 * (1.0 + src.radius), 0.0);
        let image_far = g.apply(far);
        if !tgt.contains(image_far) {
            failures.push(format!(
                "letter {} maps an exterior point outside its target disk",
                words::letter_name(x)
            ));
        }
        if worst > PINGPONG_TOL {
            failures.push(format!(
                "letter {} boundary residual {worst:.3e} exceeds {PINGPONG_TOL:.0e}",
                words::letter_name(x)
            ));
        }
        max_residual = max_residual.max(worst);
    }

    let certificate = if failures.is_empty() {
        surface.contraction_certificate().ok()
    } else {
        None
    };
    if failures.is_empty() && certificate.is_none() {
        failures.push("contraction certificate unavailable".into());
    }

    ValidationReport {
        pass: failures.is_empty(),
        min_disk_gap: min_gap,
        max_pingpong_residual: max_residual,
        generators_hyperbolic,
        failures,
        certificate,
    }
}

/// Rank-2 surface whose three funnel geodesics have lengths l1, l2, l3.
///
/// g1 has axis (-1, 1), g2 axis (-a, a) with a > 1 solved from the trace of
/// g1 g2^-1, so that |tr g1| = 2 cosh(l1/2), |tr g2| = 2 cosh(l2/2) and
/// |tr(g1 g2^-1)| = 2 cosh(l3/2). Disks are isometric circles.
pub fn three_funnel(l1: f64, l2: f64, l3: f64) -> Result<SchottkySurface> {
    if !(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) {
        return Err(Error::Construction("funnel lengths must be positive".into()));
    }
    let (c1, s1) = ((l1 / 2.0).cosh(), (l1 / 2.0).sinh());
    let (c2, s2) = ((l2 / 2.0).cosh(), (l2 / 2.0).sinh());
    let c3 = (l3 / 2.0).cosh();
    let w = (c1 * c2 + c3) / (s1 * s2);
    let a = w + (w * w - 1.0).sqrt();
    let g1 = RealMatrix::new(c1, s1, s1, c1)?;
    let g2 = RealMatrix::new(c2, a * s2, s2 / a, c2)?;
    let surface = SchottkySurface::from_generators(
        format!("three_funnel({l1},{l2},{l3})"),
        vec![g1, g2],
        None,
    )?;
    let report = validate(&surface);
    if !report.pass {
        return Err(Error::Construction(format!(
            "three_funnel({l1},{l2},{l3}): ping-pong disks cannot be placed: {}",
            report.failures.join("; ")
        )));
    }
    Ok(surface)
}

/// Bundled integer Schottky surface inside SL(2, Z).
///
/// The generators [[2,1],[3,2]] and [[13,-23],[4,-7]] have disjoint isometric
/// circles [-1,-1/3], [1/3,1], [3/2,2], [3,7/2] and reduce to a generating
/// pair of SL(2, Z/2Z).
pub fn integer_demo_surface() -> SchottkySurface {
    let g1i = IntMatrix::new(2, 1, 3, 2).unwrap();
    let g2i = IntMatrix::new(13, -23, 4, -7).unwrap();
    let g1 = g1i.to_real();
    let g2 = g2i.to_real();
    let surface = SchottkySurface::from_generators(
        "integer_demo",
        vec![g1, g2],
        Some(vec![g1i, g2i]),
    )
    .expect("bundled surface construction");
    let report = validate(&surface);
    assert!(report.pass, "bundled surface failed validation: {:?}", report.failures);
    surface
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::length_from_trace;

    #[test]
    fn three_funnel_traces() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let expect = 2.0 * 1.0f64.cosh(); // 3.0861612696304874
        assert!((s.generator(0).trace().abs() - expect).abs() < 1e-12);
        assert!((s.generator(1).trace().abs() - expect).abs() < 1e-12);
        assert!((expect - 3.0861612696304874).abs() < 1e-14);
        // third boundary class g1 g2^-1
        let m = s.generator(0).mul(&s.generator(1).inverse());
        assert!((m.trace().abs() - expect).abs() < 1e-9);
        assert!((length_from_trace(m.trace().abs()) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn three_funnel_asymmetric_lengths() {
        let s = three_funnel(1.5, 2.0, 2.5).unwrap();
        let l = |m: RealMatrix| length_from_trace(m.trace().abs());
        assert!((l(s.generator(0)) - 1.5).abs() < 1e-9);
        assert!((l(s.generator(1)) - 2.0).abs() < 1e-9);
        assert!((l(s.generator(0).mul(&s.generator(1).inverse())) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn three_funnel_euler_characteristics() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        assert_eq!(s.euler_char(), -1);
        assert!((s.vol0() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn three_funnel_validates() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let r = validate(&s);
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.max_pingpong_residual < 1e-9);
        assert!(r.min_disk_gap > 0.0);
        let cert = r.certificate.unwrap();
        assert!(cert.rate > 0.2, "rate {}", cert.rate);
    }

    #[test]
    fn touching_disks_fail() {
        // hand-built surface with two disks at distance zero
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let mut disks = s.disks.clone();
        let shift = disks[0].gap(&disks[2]);
        // disk 2 sits left of disk 0; move it right to close the gap exactly
        disks[2].center += shift;
        let bad = SchottkySurface::from_parts(
            "touching",
            (0..2).map(|i| s.generator(i)).collect(),
            None,
            disks,
        )
        .unwrap();
        let r = validate(&bad);
        assert!(!r.pass);
        assert!(r.failures.iter().any(|f| f.contains("not disjoint")));
    }

    #[test]
    fn identity_generator_fails() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let bad = SchottkySurface::from_parts(
            "identity_gen",
            vec![RealMatrix::identity(), s.generator(1)],
            None,
            s.disks.clone(),
        )
        .unwrap();
        let r = validate(&bad);
        assert!(!r.pass);
        assert!(!r.generators_hyperbolic);
    }

    #[test]
    fn bundled_integer_surface_validates() {
        let s = integer_demo_surface();
        let r = validate(&s);
        assert!(r.pass, "{:?}", r.failures);
        // certificate for this strongly contracting pair is comfortably large
        assert!(r.certificate.unwrap().rate > 1.0);
    }

    #[test]
    fn words_evaluate_hyperbolic_exhaustively() {
        // ping-pong implies every nonempty reduced word is hyperbolic
        for surface in [three_funnel(2.0, 2.0, 2.0).unwrap(), integer_demo_surface()] {
            for w in words::ReducedWords::new(2, 8) {
                let m = surface.word_matrix(&w.0);
                assert!(
                    m.trace().abs() > 2.0,
                    "word {} has |tr| = {}",
                    w.name(),
                    m.trace().abs()
                );
            }
        }
    }

    #[test]
    fn word_matrix_is_homomorphism() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        // deterministic sample of reduced pairs whose concatenation stays reduced
        let ws: Vec<_> = words::ReducedWords::new(2, 4).collect();
        let mut checked = 0;
        for (i, w1) in ws.iter().enumerate().step_by(7) {
            for w2 in ws.iter().skip(i % 3).step_by(11) {
                let mut cat = w1.0.clone();
                cat.extend_from_slice(&w2.0);
                if !words::is_reduced(&cat) {
                    continue;
                }
                let lhs = s.word_matrix(&cat);
                let rhs = s.word_matrix(&w1.0).mul(&s.word_matrix(&w2.0));
                let diff = (lhs.a - rhs.a).abs()
                    + (lhs.b - rhs.b).abs()
                    + (lhs.c - rhs.c).abs()
                    + (lhs.d - rhs.d).abs();
                assert!(diff < 1e-9 * (1.0 + rhs.a.abs() + rhs.b.abs()));
                checked += 1;
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn certificate_bounds_actual_lengths() {
        for surface in [three_funnel(2.0, 2.0, 2.0).unwrap(), integer_demo_surface()] {
            let cert = surface.contraction_certificate().unwrap();
            for len in 1..=6usize {
                words::for_each_cyclic_class(2, len, |c| {
                    let m = surface.word_matrix(&c.rep);
                    let l = length_from_trace(m.trace().abs());
                    assert!(
                        l >= cert.rate * len as f64 - 1e-9,
                        "{}: l = {l}, bound {}",
                        words::Word(c.rep.clone()).name(),
                        cert.rate * len as f64
                    );
                });
            }
        }
    }

    #[test]
    fn disk_image_maps_boundary_to_boundary() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let g = s.letter_matrix(0);
        let d = s.disks[2];
        let img = disk_image(&g, &d).unwrap();
        for k in 0..16 {
            let th = 2.0 * PI * k as f64 / 16.0;
            let z = Complex64::new(d.center + d.radius * th.cos(), d.radius * th.sin());
            let w = g.apply(z);
            let res = ((w - Complex64::new(img.center, 0.0)).norm() - img.radius).abs();
            assert!(res < 1e-10, "residual {res}");
        }
    }
}
