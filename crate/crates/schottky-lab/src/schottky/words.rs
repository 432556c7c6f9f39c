//! Reduced words, cyclic conjugacy classes and their enumeration.
//!
//! Letters are encoded as 0..2r with the order g1, g1^-1, g2, g2^-1, ...;
//! `x ^ 1` is the inverse of letter `x`. Canonical class representatives are
//! the lexicographically minimal rotation in this letter order.

use serde::Serialize;

/// Signed generator index, packed. generator `i` (0-based) is `2i`, its
/// inverse `2i + 1`.
pub type Letter = u8;

#[inline]
pub fn letter_inverse(x: Letter) -> Letter {
    x ^ 1
}

pub fn letter_name(x: Letter) -> String {
    let gen_idx = (x / 2) as usize;
    let ch = (b'a' + gen_idx as u8) as char;
    if x % 2 == 0 {
        ch.to_string()
    } else {
        ch.to_uppercase().to_string()
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        debug_assert!(is_reduced(&letters));
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self) -> String {
        self.0.iter().map(|&x| letter_name(x)).collect()
    }
}

pub fn is_reduced(letters: &[Letter]) -> bool {
    letters
        .windows(2)
        .all(|w| w[1] != letter_inverse(w[0]))
}

pub fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    if letters.len() < 2 {
        return true;
    }
    is_reduced(letters) && letters[0] != letter_inverse(*letters.last().unwrap())
}

/// Iterator over all freely reduced words of length 1..=max_len, in
/// (length, lexicographic) order. Count is sum over k of 2r (2r-1)^(k-1).
pub struct ReducedWords {
    alphabet: u8,
    max_len: usize,
    // current word; empty means start
    cur: Vec<Letter>,
    done: bool,
}

impl ReducedWords {
    pub fn new(rank: usize, max_len: usize) -> Self {
        assert!(rank >= 1 && max_len >= 1);
        ReducedWords {
            alphabet: (2 * rank) as u8,
            max_len,
            cur: Vec::new(),
            done: false,
        }
    }

    fn first_allowed(&self, prev: Option<Letter>, from: Letter) -> Option<Letter> {
        let mut x = from;
        while x < self.alphabet {
            if prev.map_or(true, |p| x != letter_inverse(p)) {
                return Some(x);
            }
            x += 1;
        }
        None
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        // depth-first: extend if possible, else increment the last letter
        if self.cur.len() < self.max_len {
            let prev = self.cur.last().copied();
            if let Some(x) = self.first_allowed(prev, 0) {
                self.cur.push(x);
                return Some(Word::new(self.cur.clone()));
            }
        }
        loop {
            let Some(last) = self.cur.pop() else {
                self.done = true;
                return None;
            };
            let prev = self.cur.last().copied();
            if let Some(x) = self.first_allowed(prev, last + 1) {
                self.cur.push(x);
                return Some(Word::new(self.cur.clone()));
            }
        }
    }
}

/// Lexicographically minimal rotation; input must be cyclically reduced.
pub fn min_rotation(letters: &[Letter]) -> Vec<Letter> {
    let n = letters.len();
    if n <= 1 {
        return letters.to_vec();
    }
    let mut best = 0usize;
    for cand in 1..n {
        for k in 0..n {
            let a = letters[(cand + k) % n];
            let b = letters[(best + k) % n];
            if a < b {
                best = cand;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    (0..n).map(|k| letters[(best + k) % n]).collect()
}

/// Smallest period d with w = u^(n/d); d = n means primitive.
pub fn primitive_period(letters: &[Letter]) -> usize {
    let n = letters.len();
    'outer: for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        for i in d..n {
            if letters[i] != letters[i - d] {
                continue 'outer;
            }
        }
        return d;
    }
    n
}

/// Canonical cyclic class of a given cyclically reduced string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicClass {
    /// lexicographically minimal rotation
    pub rep: Vec<Letter>,
    /// word length of the primitive root
    pub prim_len: usize,
    /// power: rep = root^power
    pub power: usize,
}

impl CyclicClass {
    pub fn from_string(letters: &[Letter]) -> Self {
        let rep = min_rotation(letters);
        let d = primitive_period(&rep);
        CyclicClass {
            prim_len: d,
            power: rep.len() / d,
            rep,
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.power == 1
    }

    /// Number of distinct strings in the rotation orbit.
    pub fn rotations(&self) -> usize {
        self.prim_len
    }
}

/// Visit every cyclic class of cyclically reduced words of exactly length
/// `len`, once each (via the canonical representative).
pub fn for_each_cyclic_class<F: FnMut(&CyclicClass)>(rank: usize, len: usize, mut f: F) {
    let alphabet = (2 * rank) as u8;
    let mut stack: Vec<Letter> = Vec::with_capacity(len);
    // DFS over cyclically reduced strings, keeping only canonical rotations
    fn rec<F: FnMut(&CyclicClass)>(
        stack: &mut Vec<Letter>,
        len: usize,
        alphabet: u8,
        f: &mut F,
    ) {
        if stack.len() == len {
            if len >= 2 && stack[0] == letter_inverse(*stack.last().unwrap()) {
                return;
            }
            // canonical check: keep iff this string equals its min rotation
            let rot = min_rotation(stack);
            if rot == *stack {
                f(&CyclicClass::from_string(stack));
            }
            return;
        }
        for x in 0..alphabet {
            if let Some(&p) = stack.last() {
                if x == letter_inverse(p) {
                    continue;
                }
            }
            // prefix pruning: canonical strings start with their smallest letter
            if let Some(&first) = stack.first() {
                if x < first {
                    continue;
                }
            }
            stack.push(x);
            rec(stack, len, alphabet, f);
            stack.pop();
        }
    }
    rec(&mut stack, len, alphabet, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_word_counts() {
        let count = |r: usize, n: usize| ReducedWords::new(r, n).count();
        assert_eq!(count(2, 1), 4);
        assert_eq!(count(2, 2), 16);
        assert_eq!(count(3, 2), 36);
        assert_eq!(count(2, 5), 4 + 12 + 36 + 108 + 324);
    }

    #[test]
    fn words_are_reduced_and_unique() {
        let all: Vec<Word> = ReducedWords::new(2, 4).collect();
        for w in &all {
            assert!(is_reduced(&w.0));
        }
        let mut set = std::collections::HashSet::new();
        for w in &all {
            assert!(set.insert(w.clone()), "duplicate {w:?}");
        }
    }

    #[test]
    fn min_rotation_basic() {
        // letters: a=0 A=1 b=2 B=3; "ba" -> "ab"
        assert_eq!(min_rotation(&[2, 0]), vec![0, 2]);
        assert_eq!(min_rotation(&[0, 2]), vec![0, 2]);
        assert_eq!(min_rotation(&[2, 1, 0]), vec![0, 2, 1]);
    }

    #[test]
    fn primitive_period_detects_powers() {
        assert_eq!(primitive_period(&[0, 2, 0, 2]), 2);
        assert_eq!(primitive_period(&[0, 0, 0]), 1);
        assert_eq!(primitive_period(&[0, 2, 3]), 3);
    }

    #[test]
    fn cyclic_classes_of_length_two() {
        let mut prim = Vec::new();
        let mut all = Vec::new();
        for_each_cyclic_class(2, 2, |c| {
            all.push(c.clone());
            if c.is_primitive() {
                prim.push(c.rep.clone());
            }
        });
        // 12 cyclically reduced strings of length 2; 8 classes, 4 primitive
        assert_eq!(all.len(), 8);
        assert_eq!(prim.len(), 4);
        // ab = ba as classes: representative is "ab" (= [0, 2])
        assert!(prim.contains(&vec![0, 2]));
        assert!(prim.contains(&vec![0, 3]));
        assert!(prim.contains(&vec![1, 2]));
        assert!(prim.contains(&vec![1, 3]));
    }

    #[test]
    fn rotation_orbit_size() {
        let c = CyclicClass::from_string(&[0, 2, 0, 2]);
        assert_eq!(c.prim_len, 2);
        assert_eq!(c.power, 2);
        assert_eq!(c.rotations(), 2);
        assert!(!c.is_primitive());
    }

    #[test]
    fn class_counts_match_direct_string_count() {
        // sum over classes of rotations() = number of cyclically reduced strings
        for len in 1..=7usize {
            let mut by_classes = 0usize;
            for_each_cyclic_class(2, len, |c| by_classes += c.rotations());
            let direct = ReducedWords::new(2, len)
                .filter(|w| w.len() == len && is_cyclically_reduced(&w.0))
                .count();
            assert_eq!(by_classes, direct, "len {len}");
        }
    }
}
