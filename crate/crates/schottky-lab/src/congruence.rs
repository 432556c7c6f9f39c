//! Reduction mod n, the finite groups SL(2, Z/nZ), congruence-subgroup
//! membership, cover invariants and cover length spectra.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::{length_from_trace, IntMatrix, Matrix2};
use crate::schottky::spectrum::{self, LengthSpectrum, SpectrumEntry};
use crate::schottky::SchottkySurface;

/// Entry-wise residues mod n with det = 1 (mod n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModMatrix {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

fn residue(x: &BigInt, n: u64) -> u64 {
    let m: BigInt = n.into();
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u64().unwrap()
}

impl ModMatrix {
    pub fn identity(n: u64) -> Self {
        ModMatrix {
            n,
            a: 1 % n,
            b: 0,
            c: 0,
            d: 1 % n,
        }
    }

    pub fn mul(&self, o: &ModMatrix) -> ModMatrix {
        debug_assert_eq!(self.n, o.n);
        let n = self.n as u128;
        let m = |x: u64, y: u64| (x as u128 * y as u128) % n;
        ModMatrix {
            n: self.n,
            a: ((m(self.a, o.a) + m(self.b, o.c)) % n) as u64,
            b: ((m(self.a, o.b) + m(self.b, o.d)) % n) as u64,
            c: ((m(self.c, o.a) + m(self.d, o.c)) % n) as u64,
            d: ((m(self.c, o.b) + m(self.d, o.d)) % n) as u64,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == ModMatrix::identity(self.n)
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u128;
        let ad = (self.a as u128 * self.d as u128) % n;
        let bc = (self.b as u128 * self.c as u128) % n;
        ((ad + n - bc) % n) as u64
    }

    /// Order in SL(2, Z/nZ).
    pub fn order(&self) -> u64 {
        let mut p = *self;
        let mut k = 1u64;
        while !p.is_identity() {
            p = p.mul(self);
            k += 1;
            debug_assert!(k <= 3 * self.n * self.n * self.n);
        }
        k
    }

    fn pack(&self) -> u64 {
        ((self.a * self.n + self.b) * self.n + self.c) * self.n + self.d
    }
}

/// Entry-wise reduction of an exact integer matrix.
pub fn reduce_mod(g: &Matrix2, n: u64) -> Result<ModMatrix> {
    if n < 2 {
        return Err(Error::Parameter("modulus must be >= 2".into()));
    }
    match g {
        Matrix2::Int(m) => Ok(reduce_int(m, n)),
        Matrix2::Real(_) => Err(Error::VariantMismatch(
            "congruence reduction requires exact integer entries",
        )),
    }
}

pub fn reduce_int(m: &IntMatrix, n: u64) -> ModMatrix {
    ModMatrix {
        n,
        a: residue(&m.a, n),
        b: residue(&m.b, n),
        c: residue(&m.c, n),
        d: residue(&m.d, n),
    }
}

/// #SL(2, Z/nZ) = n^3 prod_{p | n} (1 - p^-2). Returns 1 for n = 1.
pub fn group_order(n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let mut order = n * n * n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            order = order / (p * p) * (p * p - 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        order = order / (m * m) * (m * m - 1);
    }
    order
}

/// Exhaustive count of 2x2 matrices mod n with det = 1. Oracle for
/// `group_order`; cost n^4.
pub fn group_order_enumerated(n: u64) -> u64 {
    let mut count = 0u64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a as u128 * d as u128 + (n as u128 * n as u128)
                        - b as u128 * c as u128)
                        % n as u128
                        == 1 % n as u128
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Memory ceiling for the closure BFS, in group elements.
pub const CLOSURE_BUDGET: usize = 3_000_000;

/// Congruence data for one modulus over an integer Schottky surface.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceContext {
    pub n: u64,
    pub group_order: u64,
    pub closure_size: u64,
    pub surjective: bool,
    /// index of the principal congruence subgroup, equals the closure size
    pub index: u64,
    pub cover_vol0: f64,
    pub cover_euler_char: i64,
    pub ell0_lower_bound: f64,
    #[serde(skip)]
    pub generator_images: Vec<ModMatrix>,
}

/// BFS closure of the generator images under multiplication.
pub fn closure(surface: &SchottkySurface, n: u64) -> Result<CongruenceContext> {
    if !surface.has_integer_generators() {
        return Err(Error::VariantMismatch(
            "congruence context requires exact integer generators",
        ));
    }
    if n < 2 {
        return Err(Error::Parameter("modulus must be >= 2".into()));
    }
    let order = group_order(n);
    if order as usize > CLOSURE_BUDGET {
        return Err(Error::Resource(format!(
            "group order {order} exceeds closure budget {CLOSURE_BUDGET}"
        )));
    }
    let mut gens: Vec<ModMatrix> = Vec::new();
    for i in 0..surface.rank {
        let g = surface.generator_int(i).unwrap();
        gens.push(reduce_int(g, n));
        gens.push(reduce_int(&g.inverse(), n));
    }
    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    let id = ModMatrix::identity(n);
    seen.insert(id.pack());
    queue.push_back(id);
    let mut elements = 1u64;
    while let Some(m) = queue.pop_front() {
        for g in &gens {
            let next = m.mul(g);
            if seen.insert(next.pack()) {
                elements += 1;
                if elements as usize > CLOSURE_BUDGET {
                    return Err(Error::Resource("closure exceeded memory budget".into()));
                }
                queue.push_back(next);
            }
        }
    }
    debug_assert_eq!(order % elements, 0, "Lagrange violated");
    let surjective = elements == order;
    let index = elements;
    let cover_euler_char = index as i64 * surface.euler_char();
    Ok(CongruenceContext {
        n,
        group_order: order,
        closure_size: elements,
        surjective,
        index,
        cover_vol0: index as f64 * surface.vol0(),
        cover_euler_char,
        ell0_lower_bound: ell0_lower_bound(n),
        generator_images: gens.iter().step_by(2).cloned().collect(),
    })
}

/// Exact finite-n displacement bound for the cover: elements of the principal
/// congruence subgroup have |tr| >= n^2 - 2, and integer hyperbolic elements
/// always have |tr| >= 3.
pub fn ell0_lower_bound(n: u64) -> f64 {
    let tr = ((n * n) as f64 - 2.0).max(3.0);
    length_from_trace(tr)
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceCongruenceReport {
    pub n: u64,
    pub max_word_len: usize,
    pub words_checked: u64,
    /// words that reduced to the identity mod n
    pub kernel_words: u64,
    pub min_kernel_trace_abs: Option<String>,
    pub violations: u64,
}

/// Every word with reduce_mod(gamma, n) = I and gamma != I must satisfy
/// tr(gamma) = 2 (mod n^2). A violation is an arithmetic bug, so it is a
/// hard error.
pub fn trace_congruence_check(
    surface: &SchottkySurface,
    n: u64,
    max_word_len: usize,
) -> Result<TraceCongruenceReport> {
    if !surface.has_integer_generators() {
        return Err(Error::VariantMismatch(
            "trace congruence requires exact integer generators",
        ));
    }
    let n2: BigInt = (n * n).into();
    let two = BigInt::from(2u8);
    let mut words_checked = 0u64;
    let mut kernel_words = 0u64;
    let mut violations = 0u64;
    let mut min_tr: Option<BigInt> = None;

    // per-letter exact matrices
    let nl = 2 * surface.rank;
    let letters: Vec<IntMatrix> = (0..nl)
        .map(|x| surface.letter_matrix_int(x as u8).unwrap())
        .collect();
    let letters_mod: Vec<ModMatrix> = letters.iter().map(|m| reduce_int(m, n)).collect();

    // DFS with incremental exact and mod-n products
    struct Frame {
        exact: IntMatrix,
        modn: ModMatrix,
    }
    let mut stack: Vec<(u8, Frame)> = Vec::new();
    let mut path: Vec<u8> = Vec::new();
    let root = Frame {
        exact: IntMatrix::identity(),
        modn: ModMatrix::identity(n),
    };
    // iterative DFS over reduced words
    fn push_children(
        path: &[u8],
        nl: usize,
        stack: &mut Vec<(u8, Frame)>,
        top: &Frame,
        letters: &[IntMatrix],
        letters_mod: &[ModMatrix],
    ) {
        for x in (0..nl as u8).rev() {
            if let Some(&p) = path.last() {
                if x == crate::schottky::words::letter_inverse(p) {
                    continue;
                }
            }
            stack.push((
                x,
                Frame {
                    exact: top.exact.mul(&letters[x as usize]),
                    modn: top.modn.mul(&letters_mod[x as usize]),
                },
            ));
        }
    }
    // seed: depth-1 words
    push_children(&path, nl, &mut stack, &root, &letters, &letters_mod);
    let mut depth_of_stack: Vec<usize> = vec![1; stack.len()];
    while let Some((x, frame)) = stack.pop() {
        let depth = depth_of_stack.pop().unwrap();
        path.truncate(depth - 1);
        path.push(x);
        words_checked += 1;
        if frame.modn.is_identity() {
            kernel_words += 1;
            let tr = frame.exact.trace();
            let resid = ((&tr - &two) % &n2 + &n2) % &n2;
            if !resid.is_zero() {
                violations += 1;
            }
            let abs = tr.abs();
            if min_tr.as_ref().map_or(true, |m| abs < *m) {
                min_tr = Some(abs);
            }
        }
        if depth < max_word_len {
            let before = stack.len();
            push_children(&path, nl, &mut stack, &frame, &letters, &letters_mod);
            for _ in before..stack.len() {
                depth_of_stack.push(depth + 1);
            }
        }
    }

    let report = TraceCongruenceReport {
        n,
        max_word_len,
        words_checked,
        kernel_words,
        min_kernel_trace_abs: min_tr.map(|t| t.to_string()),
        violations,
    };
    if violations > 0 {
        return Err(Error::CongruenceViolation {
            modulus: n,
            violations: violations as usize,
        });
    }
    Ok(report)
}

/// Primitive length spectrum of the cover X(n), assembled from base classes:
/// a base class [gamma] with image order d contributes |G| / d primitive
/// cover classes of length d * l(gamma).
pub fn cover_length_spectrum(
    surface: &SchottkySurface,
    ctx: &CongruenceContext,
    cutoff: f64,
) -> Result<LengthSpectrum> {
    if !ctx.surjective {
        return Err(Error::Parameter(format!(
            "cover spectrum requires a surjective context, got closure {} of {}",
            ctx.closure_size, ctx.group_order
        )));
    }
    // base classes of length <= cutoff suffice since image order >= 1
    let base = spectrum::length_spectrum(surface, cutoff)?;
    let cert = base.certificate.clone();
    let mut found: Vec<(f64, String)> = Vec::new();
    for len in 1..=cert.word_depth {
        crate::schottky::words::for_each_cyclic_class(surface.rank, len, |c| {
            if !c.is_primitive() {
                return;
            }
            let m = surface.word_matrix_int(&c.rep).unwrap();
            let l = length_from_trace(m.to_real().trace().abs());
            if l > cutoff {
                return;
            }
            let d = reduce_int(&m, ctx.n).order();
            let lift_len = d as f64 * l;
            if lift_len <= cutoff + spectrum::LENGTH_RESOLUTION {
                let copies = (ctx.group_order / d) as usize;
                let name = crate::schottky::words::Word::new(c.rep.clone()).name();
                for _ in 0..copies {
                    found.push((lift_len, name.clone()));
                }
            }
        });
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (l, w) in found {
        match entries.last_mut() {
            Some(e) if (l - e.length).abs() <= spectrum::LENGTH_RESOLUTION => {
                e.multiplicity += 1
            }
            _ => entries.push(SpectrumEntry {
                length: l,
                multiplicity: 1,
                representative: w,
            }),
        }
    }
    let measured_ell0 = entries.first().map(|e| e.length);
    if let Some(l0) = measured_ell0 {
        if l0 < ctx.ell0_lower_bound - 1e-9 {
            return Err(Error::Other(format!(
                "cover ell0 {l0} below the congruence bound {}",
                ctx.ell0_lower_bound
            )));
        }
    }
    Ok(LengthSpectrum {
        entries,
        cutoff,
        certificate: cert,
    })
}

/// JSON-ready summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceReport {
    pub n: u64,
    pub group_order: u64,
    pub surjective: bool,
    pub words_checked: u64,
    pub violations: u64,
    pub ell0_bound: f64,
    pub measured_ell0: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::IntMatrix;
    use crate::schottky::integer_demo_surface;

    fn int2(a: i64, b: i64, c: i64, d: i64) -> Matrix2 {
        Matrix2::Int(IntMatrix::new(a, b, c, d).unwrap())
    }

    #[test]
    fn reduce_examples() {
        let m = reduce_mod(&int2(5, 2, 2, 1), 2).unwrap();
        assert!(m.is_identity());
        let id = reduce_mod(&Matrix2::identity_int(), 7).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn reduce_rejects_real() {
        let g = Matrix2::identity_real();
        assert!(matches!(
            reduce_mod(&g, 3),
            Err(Error::VariantMismatch(_))
        ));
    }

    #[test]
    fn reduce_is_ring_homomorphism() {
        let g = int2(2, 1, 3, 2);
        let h = int2(13, -23, 4, -7);
        for n in [2u64, 3, 5, 8] {
            let gh = crate::mobius::compose(&g, &h).unwrap();
            let lhs = reduce_mod(&gh, n).unwrap();
            let rhs = reduce_mod(&g, n).unwrap().mul(&reduce_mod(&h, n).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn group_order_small_values() {
        assert_eq!(group_order(2), 6);
        assert_eq!(group_order(3), 24);
        assert_eq!(group_order(4), 48);
        assert_eq!(group_order(5), 120);
        assert_eq!(group_order(6), 144);
        assert_eq!(group_order(1), 1);
    }

    #[test]
    fn group_order_matches_enumeration_to_12() {
        for n in 2..=12u64 {
            assert_eq!(group_order(n), group_order_enumerated(n), "n = {n}");
        }
    }

    #[test]
    fn group_order_multiplicative_on_coprime() {
        let pairs = [(2u64, 3u64), (3, 4), (4, 5), (5, 6), (3, 8), (5, 9)];
        for (m, n) in pairs {
            assert_eq!(group_order(m * n), group_order(m) * group_order(n));
        }
    }

    #[test]
    fn closure_surjective_for_demo_surface() {
        let s = integer_demo_surface();
        for n in [2u64, 3] {
            let ctx = closure(&s, n).unwrap();
            assert!(ctx.surjective, "n = {n}: {} of {}", ctx.closure_size, ctx.group_order);
            assert_eq!(ctx.index, group_order(n));
            assert!((ctx.cover_vol0 - ctx.index as f64 * s.vol0()).abs() < 1e-9);
        }
    }

    #[test]
    fn closure_size_divides_group_order() {
        let s = integer_demo_surface();
        for n in 2..=8u64 {
            let ctx = closure(&s, n).unwrap();
            assert_eq!(ctx.group_order % ctx.closure_size, 0, "n = {n}");
        }
    }

    #[test]
    fn ell0_bound_values() {
        assert!((ell0_lower_bound(3) - 2.0 * 3.5f64.acosh()).abs() < 1e-14);
        assert!((ell0_lower_bound(5) - 2.0 * 11.5f64.acosh()).abs() < 1e-14);
        // n = 2: n^2 - 2 = 2 is not a hyperbolic trace; the integer floor 3 binds
        assert!((ell0_lower_bound(2) - 2.0 * 1.5f64.acosh()).abs() < 1e-14);
        // spot values via the log form
        assert!((ell0_lower_bound(5) - 2.0 * (11.5 + 131.25f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn trace_congruence_demo_surface() {
        let s = integer_demo_surface();
        for n in [2u64, 3] {
            let rep = trace_congruence_check(&s, n, 8).unwrap();
            assert_eq!(rep.violations, 0);
            assert_eq!(rep.words_checked, 4 * (3u64.pow(8) - 1) / 2 * 2 / 2 + 0);
        }
    }

    #[test]
    fn kernel_words_exist_at_moderate_depth() {
        let s = integer_demo_surface();
        let rep = trace_congruence_check(&s, 2, 6).unwrap();
        assert!(rep.kernel_words > 0);
        // every kernel trace is >= n^2 - 2 in absolute value (here >= 3 floor)
        let min_tr: f64 = rep.min_kernel_trace_abs.unwrap().parse().unwrap();
        assert!(min_tr >= 2.0);
    }

    #[test]
    fn cover_spectrum_demo_n2() {
        let s = integer_demo_surface();
        let ctx = closure(&s, 2).unwrap();
        let cutoff = 12.0;
        let cover = cover_length_spectrum(&s, &ctx, cutoff).unwrap();
        assert!(!cover.entries.is_empty());
        let l0 = cover.entries[0].length;
        assert!(l0 >= ctx.ell0_lower_bound - 1e-9);
        // image of g1 mod 2 is the swap, order 2: lifts of length 2 l(g1), 3 copies
        let lg1 = 2.0 * 2.0f64.acosh();
        let hit = cover
            .entries
            .iter()
            .find(|e| (e.length - 2.0 * lg1).abs() < 1e-9)
            .expect("lift of g1 present");
        assert!(hit.multiplicity >= 3);
    }

    #[test]
    fn lift_cycle_lengths_partition_fiber() {
        let s = integer_demo_surface();
        let ctx = closure(&s, 2).unwrap();
        for i in 0..s.rank {
            let d = reduce_int(s.generator_int(i).unwrap(), 2).order();
            let copies = ctx.group_order / d;
            assert_eq!(copies * d, ctx.group_order);
        }
    }
}
