//! Generation of every reduced-dynamics word up to a length bound, and the
//! residue class modulo `2^|w|` that each word owns.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dynamics::{reduced_dynamics, DynamicsError};
use crate::word::{Pow3Bits, Transform, Word};

/// The integers congruent to `residue` modulo `2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    residue: BigUint,
    exponent: usize,
}

impl ResidueClass {
    /// Panics unless `residue < 2^exponent`.
    pub fn new(residue: BigUint, exponent: usize) -> Self {
        assert!(residue.bits() <= exponent as u64, "residue exceeds modulus");
        ResidueClass { residue, exponent }
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::one() << self.exponent
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        (x & (self.modulus() - 1u32)) == self.residue
    }

    /// Smallest member that is at least 2.
    pub fn representative(&self) -> BigUint {
        if self.residue >= BigUint::from(2u32) {
            self.residue.clone()
        } else {
            &self.residue + self.modulus()
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_2^{}", self.residue, self.exponent)
    }
}

/// The residue class whose members follow the parities of `w` for all
/// `|w|` steps. `w` need not be a reduced-dynamics word.
///
/// Built one bit at a time: with `r` fixed modulo `2^j`, the `j`-step values
/// of `r` and `r + 2^j` differ by `3^CntI(prefix_j)`, which is odd, so exactly
/// one of the two lifts has the parity symbol `j` demands.
pub fn residue_of_word(w: &Word) -> ResidueClass {
    let mut residue = BigUint::zero();
    let mut value = BigUint::zero();
    let mut pow3 = BigUint::one();
    for (j, &t) in w.transforms().iter().enumerate() {
        if value.is_odd() != t.requires_odd() {
            residue.set_bit(j as u64, true);
            value += &pow3;
        }
        match t {
            Transform::I => {
                value = (value * 3u32 + 1u32) >> 1u32;
                pow3 *= 3u32;
            }
            Transform::O => value >>= 1u32,
        }
    }
    ResidueClass::new(residue, w.len())
}

/// Reduced-dynamics words of length at most `max_len`, shortest first and
/// lexicographic (`I < O`) within a length.
///
/// Depth-first search over prefixes `p` with `3^CntI(p) > 2^|p|`, deepened one
/// length at a time so output order is stable.
pub fn enumerate_words(max_len: usize) -> WordEnumerator {
    WordEnumerator {
        max_len,
        target: 1,
        path: Word::empty(),
        frames: Vec::new(),
        pow3: Pow3Bits::new(),
    }
}

#[derive(Debug, Clone)]
pub struct WordEnumerator {
    max_len: usize,
    target: usize,
    path: Word,
    // Next child to try at each depth: 0 = I, 1 = O, 2 = done.
    frames: Vec<u8>,
    pow3: Pow3Bits,
}

impl WordEnumerator {
    fn pop_frame(&mut self) {
        self.frames.pop();
        if self.frames.is_empty() {
            self.target += 1;
        } else {
            self.path.pop();
        }
    }
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if self.target > self.max_len {
                return None;
            }
            if self.frames.is_empty() {
                self.frames.push(0);
            }
            let depth = self.path.len();
            let c = self.path.cnt_i();
            if depth + 1 == self.target {
                // Only O can close a word; I keeps 3^c above 2^target.
                let closes = self.pow3.below(c, self.target);
                let word = closes.then(|| {
                    let mut w = self.path.clone();
                    w.push(Transform::O);
                    w
                });
                self.pop_frame();
                if word.is_some() {
                    return word;
                }
                continue;
            }
            let frame = self.frames.last_mut().expect("frame");
            match *frame {
                0 => {
                    *frame = 1;
                    self.path.push(Transform::I);
                    self.frames.push(0);
                }
                1 => {
                    *frame = 2;
                    if self.pow3.exceeds(c, depth + 1) {
                        self.path.push(Transform::O);
                        self.frames.push(0);
                    }
                }
                _ => self.pop_frame(),
            }
        }
    }
}

/// Residues modulo `2^len` not owned by any reduced-dynamics word of length
/// at most `len`, in increasing order.
///
/// These are exactly the classes of the open prefixes of length `len`.
pub fn open_prefix_residues(len: usize) -> Vec<BigUint> {
    struct Frame {
        depth: usize,
        cnt_i: usize,
        residue: BigUint,
        value: BigUint,
        pow3: BigUint,
    }
    let mut bits = Pow3Bits::new();
    let mut out = Vec::new();
    let mut stack = alloc::vec![Frame {
        depth: 0,
        cnt_i: 0,
        residue: BigUint::zero(),
        value: BigUint::zero(),
        pow3: BigUint::one(),
    }];
    while let Some(f) = stack.pop() {
        if f.depth == len {
            out.push(f.residue);
            continue;
        }
        for t in [Transform::O, Transform::I] {
            let cnt_i = f.cnt_i + usize::from(t == Transform::I);
            if !bits.exceeds(cnt_i, f.depth + 1) {
                continue;
            }
            let mut residue = f.residue.clone();
            let mut value = f.value.clone();
            if value.is_odd() != t.requires_odd() {
                residue.set_bit(f.depth as u64, true);
                value += &f.pow3;
            }
            let mut pow3 = f.pow3.clone();
            match t {
                Transform::I => {
                    value = (value * 3u32 + 1u32) >> 1u32;
                    pow3 *= 3u32;
                }
                Transform::O => value >>= 1u32,
            }
            stack.push(Frame {
                depth: f.depth + 1,
                cnt_i,
                residue,
                value,
                pow3,
            });
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub word: Word,
    pub class: ResidueClass,
    pub representative: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("internal inconsistency: representative {representative} of {word} does not reproduce the word")]
    Inconsistent { word: Word, representative: BigUint },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// One [`ClassEntry`] per enumerated word, each cross-checked by running
/// the reduced dynamics of its representative.
pub fn class_table(max_len: usize) -> ClassTable {
    ClassTable {
        words: enumerate_words(max_len),
    }
}

#[derive(Debug, Clone)]
pub struct ClassTable {
    words: WordEnumerator,
}

pub fn class_entry(word: Word) -> Result<ClassEntry, EnumerateError> {
    let class = residue_of_word(&word);
    let representative = class.representative();
    let inconsistent = match reduced_dynamics(&representative, word.len() as u64) {
        Ok(r) => r.word() != &word,
        Err(DynamicsError::CapExceeded { .. }) => true,
        Err(e) => return Err(e.into()),
    };
    if inconsistent {
        return Err(EnumerateError::Inconsistent {
            word,
            representative,
        });
    }
    Ok(ClassEntry {
        word,
        class,
        representative,
    })
}

impl Iterator for ClassTable {
    type Item = Result<ClassEntry, EnumerateError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.words.next().map(class_entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn words(max_len: usize) -> Vec<String> {
        enumerate_words(max_len).map(|w| w.to_ascii()).collect()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(words(1), ["O"]);
        assert_eq!(words(2), ["O", "IO"]);
        assert_eq!(words(4), ["O", "IO", "IIOO"]);
        assert_eq!(words(5), ["O", "IO", "IIOO", "IIIOO", "IIOIO"]);
        assert!(words(0).is_empty());
    }

    #[test]
    fn enumeration_is_sorted_and_valid() {
        let all: Vec<Word> = enumerate_words(16).collect();
        assert!(all.windows(2).all(|p| p[0] < p[1]));
        for x in &all {
            assert_eq!(x.is_reduced_form(), Ok(true), "{x}");
        }
    }

    #[test]
    fn residues() {
        let rc = residue_of_word(&w("O"));
        assert_eq!((rc.residue().clone(), rc.exponent()), (BigUint::zero(), 1));
        assert_eq!(*residue_of_word(&w("IO")).residue(), BigUint::from(1u32));
        assert_eq!(*residue_of_word(&w("IIOO")).residue(), BigUint::from(3u32));
        assert_eq!(
            *residue_of_word(&w("IIOIO")).residue(),
            BigUint::from(11u32)
        );
        assert_eq!(residue_of_word(&w("IIOIO")).exponent(), 5);
        // invalid words still have a parity class
        assert_eq!(*residue_of_word(&w("OI")).residue(), BigUint::from(2u32));
        assert_eq!(residue_of_word(&Word::empty()).exponent(), 0);
    }

    #[test]
    fn class_membership() {
        let rc = ResidueClass::new(BigUint::from(3u32), 4);
        assert!(rc.contains(&BigUint::from(3u32)));
        assert!(rc.contains(&BigUint::from(19u32)));
        assert!(!rc.contains(&BigUint::from(7u32)));
        assert_eq!(rc.modulus(), BigUint::from(16u32));
        let zero = ResidueClass::new(BigUint::zero(), 1);
        assert_eq!(zero.representative(), BigUint::from(2u32));
        let one = ResidueClass::new(BigUint::one(), 2);
        assert_eq!(one.representative(), BigUint::from(5u32));
    }

    #[test]
    fn class_table_examples() {
        let t: Vec<ClassEntry> = class_table(2).map(Result::unwrap).collect();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].word, w("O"));
        assert_eq!(t[0].class, ResidueClass::new(BigUint::zero(), 1));
        assert_eq!(t[0].representative, BigUint::from(2u32));
        assert_eq!(t[1].word, w("IO"));
        assert_eq!(t[1].class, ResidueClass::new(BigUint::one(), 2));
        assert_eq!(t[1].representative, BigUint::from(5u32));

        let t: Vec<ClassEntry> = class_table(5).map(Result::unwrap).collect();
        let iiioo = t.iter().find(|e| e.word == w("IIIOO")).unwrap();
        // 7 -> 11 -> 17 -> 26 -> 13 -> ... is IIIOIOO, so IIIOO is [23]_32
        assert_eq!(*iiioo.class.residue(), BigUint::from(23u32));
        assert_eq!(iiioo.representative, BigUint::from(23u32));
    }

    #[test]
    fn inconsistent_entry_is_reported() {
        // IIO is not a reduced word; its representative climbs past 3 steps
        assert!(matches!(
            class_entry(w("IIO")),
            Err(EnumerateError::Inconsistent { .. })
        ));
    }

    #[test]
    fn open_prefixes() {
        let u: Vec<u64> = open_prefix_residues(4)
            .iter()
            .map(|r| r.try_into().unwrap())
            .collect();
        assert_eq!(u, [7, 11, 15]);
        assert_eq!(open_prefix_residues(1), [BigUint::one()]);
        assert_eq!(open_prefix_residues(0), [BigUint::zero()]);
    }
}
