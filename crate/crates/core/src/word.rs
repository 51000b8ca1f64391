//! The `{I, O}` transform alphabet and words over it.
//!
//! `I` stands for the odd step `(3x+1)/2`, `O` for the even step `x/2`.
//! A [`Word`] is a finite sequence of transforms with cached symbol counts;
//! equality, ordering and hashing look at the symbol sequence only.
//!
//! Validity of a word as a reduced dynamics ([`Word::is_reduced_form`]) is
//! decided with exact comparisons between powers of three and powers of two.
//! No floating point is involved anywhere.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// One step of the shortcut Collatz map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    /// `(3x+1)/2`, applicable to odd values.
    I,
    /// `x/2`, applicable to even values.
    O,
}

impl Transform {
    pub const fn as_char(self) -> char {
        match self {
            Transform::I => 'I',
            Transform::O => 'O',
        }
    }

    pub const fn as_byte(self) -> u8 {
        match self {
            Transform::I => b'I',
            Transform::O => b'O',
        }
    }

    pub const fn from_byte(b: u8) -> Option<Transform> {
        match b {
            b'I' => Some(Transform::I),
            b'O' => Some(Transform::O),
            _ => None,
        }
    }

    /// The transform whose parity requirement matches `odd`.
    pub const fn for_parity(odd: bool) -> Transform {
        if odd {
            Transform::I
        } else {
            Transform::O
        }
    }

    pub const fn requires_odd(self) -> bool {
        matches!(self, Transform::I)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::I => "I",
            Transform::O => "O",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("word must be non-empty")]
    Empty,
    #[error("segment (start {start}, length {len}) out of range for word of length {word_len}")]
    OutOfRange {
        start: usize,
        len: usize,
        word_len: usize,
    },
    #[error("invalid byte 0x{byte:02x} at position {position}; words use only 'I' and 'O'")]
    InvalidByte { position: usize, byte: u8 },
}

/// Result of comparing `3^a` with `2^b`.
///
/// There is no `Equal` variant: `3^a = 2^b` only when `a = b = 0`, which
/// [`cmp_pow3_pow2`] rejects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerOrdering {
    Less,
    Greater,
}

impl From<PowerOrdering> for Ordering {
    fn from(p: PowerOrdering) -> Ordering {
        match p {
            PowerOrdering::Less => Ordering::Less,
            PowerOrdering::Greater => Ordering::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("3^0 and 2^0 are both 1; the comparison is degenerate")]
pub struct DegeneratePowers;

/// Exact comparison of `3^a` against `2^b`.
///
/// `2^b` is never materialized: `3^a > 2^b` holds exactly when the bit length
/// of `3^a` exceeds `b`.
pub fn cmp_pow3_pow2(a: u64, b: u64) -> Result<PowerOrdering, DegeneratePowers> {
    match (a, b) {
        (0, 0) => Err(DegeneratePowers),
        (0, _) => Ok(PowerOrdering::Less),
        (_, 0) => Ok(PowerOrdering::Greater),
        _ => {
            let a = u32::try_from(a).expect("exponent of 3 exceeds u32");
            let bits = BigUint::from(3u32).pow(a).bits();
            Ok(if bits > b {
                PowerOrdering::Greater
            } else {
                PowerOrdering::Less
            })
        }
    }
}

/// Bit lengths of successive powers of three, extended on demand.
///
/// Each extension costs one multiplication by three, so walking a word
/// symbol by symbol never recomputes a power from scratch.
#[derive(Clone, Debug)]
pub struct Pow3Bits {
    top: BigUint,
    bits: Vec<u64>,
}

impl Default for Pow3Bits {
    fn default() -> Self {
        Self::new()
    }
}

impl Pow3Bits {
    pub fn new() -> Self {
        Pow3Bits {
            top: BigUint::one(),
            bits: alloc::vec![1],
        }
    }

    /// Bit length of `3^c`.
    pub fn bits(&mut self, c: usize) -> u64 {
        while self.bits.len() <= c {
            self.top *= 3u32;
            self.bits.push(self.top.bits());
        }
        self.bits[c]
    }

    /// Exact `3^c > 2^j`. For `(c, j) = (0, 0)` the values are equal and this
    /// returns `false`.
    pub fn exceeds(&mut self, c: usize, j: usize) -> bool {
        self.bits(c) > j as u64 && !(c == 0 && j == 0)
    }

    /// Exact `3^c < 2^j`.
    pub fn below(&mut self, c: usize, j: usize) -> bool {
        !self.exceeds(c, j) && !(c == 0 && j == 0)
    }
}

/// A finite sequence of transforms.
#[derive(Clone, Default)]
pub struct Word {
    seq: Vec<Transform>,
    cnt_i: usize,
    cnt_o: usize,
}

impl Word {
    pub const fn empty() -> Self {
        Word {
            seq: Vec::new(),
            cnt_i: 0,
            cnt_o: 0,
        }
    }

    pub fn with_capacity(cap: usize) -> Self {
        Word {
            seq: Vec::with_capacity(cap),
            cnt_i: 0,
            cnt_o: 0,
        }
    }

    pub fn from_transforms(seq: Vec<Transform>) -> Self {
        let cnt_i = seq.iter().filter(|&&t| t == Transform::I).count();
        let cnt_o = seq.len() - cnt_i;
        Word { seq, cnt_i, cnt_o }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Number of `I` symbols.
    pub fn cnt_i(&self) -> usize {
        self.cnt_i
    }

    /// Number of `O` symbols.
    pub fn cnt_o(&self) -> usize {
        self.cnt_o
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.seq
    }

    pub fn first(&self) -> Option<Transform> {
        self.seq.first().copied()
    }

    pub fn last(&self) -> Option<Transform> {
        self.seq.last().copied()
    }

    pub fn push(&mut self, t: Transform) {
        match t {
            Transform::I => self.cnt_i += 1,
            Transform::O => self.cnt_o += 1,
        }
        self.seq.push(t);
    }

    pub fn pop(&mut self) -> Option<Transform> {
        let t = self.seq.pop()?;
        match t {
            Transform::I => self.cnt_i -= 1,
            Transform::O => self.cnt_o -= 1,
        }
        Some(t)
    }

    /// The segment starting at 1-based position `start` with `len` symbols.
    ///
    /// A zero-length segment is the empty word, valid for any `start` up to
    /// `len() + 1`.
    pub fn substr(&self, start: usize, len: usize) -> Result<Word, WordError> {
        let err = WordError::OutOfRange {
            start,
            len,
            word_len: self.len(),
        };
        if start == 0 || start > self.len() + 1 {
            return Err(err);
        }
        let from = start - 1;
        if len > self.len() - from {
            return Err(err);
        }
        Ok(Word::from_transforms(self.seq[from..from + len].to_vec()))
    }

    /// The first `len` symbols. Panics if `len > self.len()`.
    pub fn prefix(&self, len: usize) -> Word {
        Word::from_transforms(self.seq[..len].to_vec())
    }

    /// Whether this word is the reduced dynamics of some integer.
    ///
    /// Holds for `O` alone, and otherwise iff `2^(|w|-1) < 3^CntI(w) < 2^|w|`
    /// and every proper prefix `p` has `3^CntI(p) > 2^|p|`.
    pub fn is_reduced_form(&self) -> Result<bool, WordError> {
        if self.is_empty() {
            return Err(WordError::Empty);
        }
        if self.seq == [Transform::O] {
            return Ok(true);
        }
        let mut pow3 = Pow3Bits::new();
        let mut c = 0;
        for (j, &t) in self.seq[..self.len() - 1].iter().enumerate() {
            if t == Transform::I {
                c += 1;
            }
            if !pow3.exceeds(c, j + 1) {
                return Ok(false);
            }
        }
        let (c, n) = (self.cnt_i, self.len());
        Ok(pow3.below(c, n) && pow3.exceeds(c, n - 1))
    }

    /// Whether `3^CntI(w) > 2^|w|`, i.e. the word can still be extended
    /// toward a reduced dynamics rather than already being one.
    pub fn is_extendable_prefix(&self) -> bool {
        !self.is_empty() && Pow3Bits::new().exceeds(self.cnt_i, self.len())
    }

    /// Parses the ASCII `{I, O}` text format.
    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut w = Word::with_capacity(text.len());
        for (position, &byte) in text.as_bytes().iter().enumerate() {
            let t = Transform::from_byte(byte).ok_or(WordError::InvalidByte { position, byte })?;
            w.push(t);
        }
        Ok(w)
    }

    pub fn to_ascii(&self) -> String {
        self.seq.iter().map(|t| t.as_char()).collect()
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.seq {
            fmt::Write::write_char(f, t.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.seq.hash(state);
    }
}

/// Shortlex: shorter words first, then lexicographic with `I < O`.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Transform> for Word {
    fn from_iter<T: IntoIterator<Item = Transform>>(iter: T) -> Self {
        let mut w = Word::empty();
        for t in iter {
            w.push(t);
        }
        w
    }
}

impl Extend<Transform> for Word {
    fn extend<T: IntoIterator<Item = Transform>>(&mut self, iter: T) {
        for t in iter {
            self.push(t);
        }
    }
}
