//! Periodic-orbit cache: every cyclic class of cyclically reduced words up
//! to a word-length ceiling, with displacement lengths and optional mod-n
//! image data. Powers of shorter primitive classes are synthesized from the
//! primitive records through the trace recurrence, so only primitive classes
//! are enumerated.

use crate::congruence::{reduce_int, ModMatrix};
use crate::error::Result;
use crate::mobius::length_from_trace;
use crate::schottky::words::{for_each_cyclic_class, Word};
use crate::schottky::SchottkySurface;

/// One cyclic class gamma = u^power with |u| = prim_len letters.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    /// total word length m = prim_len * power
    pub word_len: u32,
    pub prim_len: u32,
    pub power: u32,
    /// displacement length of gamma
    pub ell: f64,
    /// order of pi_n(u) when a modulus is attached
    pub prim_image_order: u32,
}

impl OrbitRecord {
    /// pi_n(gamma) = I iff ord(pi_n(u)) divides the power.
    pub fn image_is_identity(&self) -> bool {
        self.prim_image_order != 0 && self.power % self.prim_image_order == 0
    }

    /// Order of pi_n(gamma).
    pub fn image_order(&self) -> u32 {
        if self.prim_image_order == 0 {
            0
        } else {
            self.prim_image_order / gcd(self.prim_image_order, self.power)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All cyclic classes to a depth, with ranges by word length.
#[derive(Debug)]
pub struct OrbitCache {
    pub depth: usize,
    pub modulus: Option<u64>,
    pub records: Vec<OrbitRecord>,
    /// records[ranges[m-1].0 .. ranges[m-1].1] have word_len == m
    pub ranges: Vec<(usize, usize)>,
    /// primitive classes only: (word, ell, image order); feeds Euler products
    pub primitives: Vec<(Word, f64, u32)>,
}

impl OrbitCache {
    pub fn build(surface: &SchottkySurface, depth: usize, modulus: Option<u64>) -> Result<Self> {
        // primitive data per length
        struct Prim {
            ell: f64,
            trace_abs: f64,
            image_order: u32,
            word: Word,
        }
        let mut prim_by_len: Vec<Vec<Prim>> = (0..=depth).map(|_| Vec::new()).collect();
        for len in 1..=depth {
            let mut prims = Vec::new();
            for_each_cyclic_class(surface.rank, len, |c| {
                if !c.is_primitive() {
                    return;
                }
                let tr = surface.word_matrix(&c.rep).trace().abs();
                let image_order = match modulus {
                    Some(n) => {
                        let mi = surface
                            .word_matrix_int(&c.rep)
                            .expect("modulus requires integer generators");
                        reduce_int(&mi, n).order() as u32
                    }
                    None => 0,
                };
                prims.push(Prim {
                    ell: length_from_trace(tr),
                    trace_abs: tr,
                    image_order,
                    word: Word::new(c.rep.clone()),
                });
            });
            prim_by_len[len] = prims;
        }

        let mut records = Vec::new();
        let mut ranges = Vec::with_capacity(depth);
        for m in 1..=depth {
            let start = records.len();
            for d in 1..=m {
                if m % d != 0 {
                    continue;
                }
                let power = (m / d) as u32;
                for p in &prim_by_len[d] {
                    // ell(u^k) = k ell(u); trace recurrence is not needed since
                    // the length is what enters the orbit sums
                    let _ = p.trace_abs;
                    records.push(OrbitRecord {
                        word_len: m as u32,
                        prim_len: d as u32,
                        power,
                        ell: power as f64 * p.ell,
                        prim_image_order: p.image_order,
                    });
                }
            }
            ranges.push((start, records.len()));
        }
        let primitives = prim_by_len
            .into_iter()
            .flatten()
            .map(|p| (p.word, p.ell, p.image_order))
            .collect();
        Ok(OrbitCache {
            depth,
            modulus,
            records,
            ranges,
            primitives,
        })
    }

    pub fn records_of_len(&self, m: usize) -> &[OrbitRecord] {
        let (a, b) = self.ranges[m - 1];
        &self.records[a..b]
    }

    /// Image of a primitive word under reduction, for diagnostics.
    pub fn image_of(&self, surface: &SchottkySurface, word: &Word) -> Option<ModMatrix> {
        let n = self.modulus?;
        surface.word_matrix_int(&word.0).map(|m| reduce_int(&m, n))
    }
}
