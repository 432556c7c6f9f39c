//! Primitive conjugacy classes and complete length spectra below a cutoff.
//!
//! Conjugacy classes are oriented: a class and its inverse are counted
//! separately whenever they are not conjugate, matching the index set of the
//! zeta Euler product and of the trace-formula geodesic sum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::length_from_trace;
use crate::schottky::words::{for_each_cyclic_class, CyclicClass, Word};
use crate::schottky::SchottkySurface;

/// Lengths closer than this collapse into one multiplicity bucket.
pub const LENGTH_RESOLUTION: f64 = 1e-9;

/// A primitive conjugacy class with its canonical representative.
#[derive(Debug, Clone, Serialize)]
pub struct ConjClass {
    pub representative: Word,
    pub primitive: bool,
    pub length: f64,
    pub trace: f64,
}

/// One canonical representative per primitive cyclic class with word length
/// up to `max_word_len`, ordered by (word length, representative).
pub fn primitive_classes(surface: &SchottkySurface, max_word_len: usize) -> Vec<ConjClass> {
    let mut out = Vec::new();
    for len in 1..=max_word_len {
        for_each_cyclic_class(surface.rank, len, |c: &CyclicClass| {
            if !c.is_primitive() {
                return;
            }
            let m = surface.word_matrix(&c.rep);
            let tr = m.trace();
            out.push(ConjClass {
                representative: Word::new(c.rep.clone()),
                primitive: true,
                length: length_from_trace(tr.abs()),
                trace: tr,
            });
        });
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub length: f64,
    pub multiplicity: usize,
    /// canonical word of one class attaining this length
    pub representative: String,
}

/// Certificate that the enumeration depth covers every class below the cutoff.
#[derive(Debug, Clone, Serialize)]
pub struct CompletenessCertificate {
    pub cutoff: f64,
    pub word_depth: usize,
    /// certified lower bound for length per word letter
    pub rate: f64,
    pub certificate_block: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub cutoff: f64,
    pub certificate: CompletenessCertificate,
}

impl LengthSpectrum {
    pub fn min_length(&self) -> Option<f64> {
        self.entries.first().map(|e| e.length)
    }

    pub fn total_classes(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// (length, multiplicity) pairs.
    pub fn pairs(&self) -> Vec<(f64, usize)> {
        self.entries.iter().map(|e| (e.length, e.multiplicity)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("length,multiplicity,representative_word\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{:.12e},{},{}\n",
                e.length, e.multiplicity, e.representative
            ));
        }
        s
    }
}

/// Group sorted (length, word) pairs into multiplicity buckets.
fn bucket(mut found: Vec<(f64, String)>, cutoff: f64, cert: CompletenessCertificate) -> LengthSpectrum {
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (l, w) in found {
        match entries.last_mut() {
            Some(e) if (l - e.length).abs() <= LENGTH_RESOLUTION => e.multiplicity += 1,
            _ => entries.push(SpectrumEntry {
                length: l,
                multiplicity: 1,
                representative: w,
            }),
        }
    }
    LengthSpectrum {
        entries,
        cutoff,
        certificate: cert,
    }
}

/// Word-depth ceiling; enumeration cost grows like (2r - 1)^depth.
pub const MAX_SPECTRUM_DEPTH: usize = 22;

/// Complete multiset of primitive lengths <= cutoff. Also stores the minimum
/// back into the surface as ell0 when the spectrum is nonempty.
pub fn length_spectrum(surface: &SchottkySurface, cutoff: f64) -> Result<LengthSpectrum> {
    if !(cutoff > 0.0) {
        return Err(Error::Parameter("spectrum cutoff must be positive".into()));
    }
    let cert = surface.contraction_certificate()?;
    let depth_f = cutoff / cert.rate;
    let depth = depth_f.ceil() as usize;
    if depth > MAX_SPECTRUM_DEPTH {
        return Err(Error::IncompleteSpectrum {
            achieved_cutoff: cert.rate * MAX_SPECTRUM_DEPTH as f64,
            requested: cutoff,
        });
    }
    let mut found: Vec<(f64, String)> = Vec::new();
    for len in 1..=depth {
        for_each_cyclic_class(surface.rank, len, |c| {
            if !c.is_primitive() {
                return;
            }
            let m = surface.word_matrix(&c.rep);
            let l = length_from_trace(m.trace().abs());
            if l <= cutoff + LENGTH_RESOLUTION {
                found.push((l, Word::new(c.rep.clone()).name()));
            }
        });
    }
    let spectrum = bucket(
        found,
        cutoff,
        CompletenessCertificate {
            cutoff,
            word_depth: depth,
            rate: cert.rate,
            certificate_block: cert.block,
        },
    );
    if let Some(l0) = spectrum.min_length() {
        surface.set_ell0(l0);
    }
    Ok(spectrum)
}

/// Smallest primitive length of the surface, enumerated to the certified depth
/// needed to see at least one class.
pub fn compute_ell0(surface: &SchottkySurface) -> Result<f64> {
    if let Some(l) = surface.ell0() {
        return Ok(l);
    }
    // any single generator gives an upper bound; certify below it
    let upper = (0..surface.rank)
        .map(|i| length_from_trace(surface.generator(i).trace().abs()))
        .fold(f64::INFINITY, f64::min);
    let spectrum = length_spectrum(surface, upper * (1.0 + 1e-12))?;
    spectrum
        .min_length()
        .ok_or_else(|| Error::Other("empty spectrum below a generator length".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{integer_demo_surface, three_funnel, validate};

    #[test]
    fn primitive_classes_depth_two() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let classes = primitive_classes(&s, 2);
        let len2: Vec<_> = classes.iter().filter(|c| c.representative.len() == 2).collect();
        assert_eq!(len2.len(), 4);
        let len1: Vec<_> = classes.iter().filter(|c| c.representative.len() == 1).collect();
        assert_eq!(len1.len(), 4); // a, A, b, B
    }

    #[test]
    fn squares_are_not_primitive() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        for c in primitive_classes(&s, 4) {
            let letters = &c.representative.0;
            assert_ne!(
                crate::schottky::words::primitive_period(letters),
                0,
                "sanity"
            );
            assert_eq!(
                crate::schottky::words::primitive_period(letters),
                letters.len(),
                "non-primitive representative {} leaked through",
                c.representative.name()
            );
        }
    }

    #[test]
    fn rotation_invariance_of_length() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        for c in primitive_classes(&s, 5) {
            let w = &c.representative.0;
            for r in 1..w.len() {
                let rotated: Vec<_> = (0..w.len()).map(|i| w[(i + r) % w.len()]).collect();
                let m = s.word_matrix(&rotated);
                let l = length_from_trace(m.trace().abs());
                assert!((l - c.length).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn three_funnel_222_shortest_shell() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let spec = length_spectrum(&s, 2.1).unwrap();
        // oriented classes: a, A, b, B, aB, bA all have length 2
        assert_eq!(spec.entries.len(), 1);
        assert!((spec.entries[0].length - 2.0).abs() < 1e-9);
        assert_eq!(spec.entries[0].multiplicity, 6);
        assert!((s.ell0().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn cutoff_below_ell0_gives_empty() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let spec = length_spectrum(&s, 1.0).unwrap();
        assert!(spec.entries.is_empty());
    }

    #[test]
    fn monotone_in_cutoff() {
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let small = length_spectrum(&s, 2.5).unwrap();
        let large = length_spectrum(&s, 5.0).unwrap();
        for e in &small.entries {
            let found = large
                .entries
                .iter()
                .any(|f| (f.length - e.length).abs() < 1e-9 && f.multiplicity >= e.multiplicity);
            assert!(found, "entry at {} lost when cutoff grew", e.length);
        }
    }

    #[test]
    fn completeness_cross_check() {
        // enumerate two levels past the certified depth: nothing new below cutoff
        let s = three_funnel(2.0, 2.0, 2.0).unwrap();
        let cutoff = 3.0;
        let spec = length_spectrum(&s, cutoff).unwrap();
        let deeper = spec.certificate.word_depth + 2;
        let mut count = 0usize;
        for len in 1..=deeper {
            for_each_cyclic_class(2, len, |c| {
                if !c.is_primitive() {
                    return;
                }
                let m = s.word_matrix(&c.rep);
                if length_from_trace(m.trace().abs()) <= cutoff {
                    count += 1;
                }
            });
        }
        assert_eq!(count, spec.total_classes());
    }

    #[test]
    fn swap_symmetry_of_spectrum() {
        let s12 = three_funnel(1.4, 2.2, 1.9).unwrap();
        let s21 = three_funnel(2.2, 1.4, 1.9).unwrap();
        let a = length_spectrum(&s12, 4.0).unwrap();
        let b = length_spectrum(&s21, 4.0).unwrap();
        assert_eq!(a.entries.len(), b.entries.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.length - y.length).abs() < 1e-8);
            assert_eq!(x.multiplicity, y.multiplicity);
        }
    }

    #[test]
    fn integer_surface_spectrum() {
        let s = integer_demo_surface();
        assert!(validate(&s).pass);
        let spec = length_spectrum(&s, 4.0).unwrap();
        // g1, G1 at 2 arccosh(2); g2, G2 at 2 arccosh(3)
        assert_eq!(spec.pairs().len(), 2);
        assert!((spec.entries[0].length - 2.0 * 2.0f64.acosh()).abs() < 1e-9);
        assert_eq!(spec.entries[0].multiplicity, 2);
        assert!((spec.entries[1].length - 2.0 * 3.0f64.acosh()).abs() < 1e-9);
        assert_eq!(spec.entries[1].multiplicity, 2);
    }
}
