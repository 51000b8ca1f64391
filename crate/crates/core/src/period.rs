//! Periodicity of reduced dynamics.
//!
//! If `d_r(x) = w` with `|w| = L`, then `d_r(x + k·2^L) = w` for every
//! `k >= 1`, and no smaller shift preserves the word. This module computes
//! that period, checks it directly, and exposes the primed-word arithmetic
//! (`I` replaced by `I'(x) = 3x/2`) that relates the orbit of `x + P` to the
//! orbit of `x`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dynamics::{apply_word, reduced_dynamics, DynamicsError};
use crate::word::{Transform, Word};

/// Largest `|d_r(x)|` for which [`minimal_period_bruteforce`] scans every
/// candidate shift one at a time.
pub const LINEAR_SCAN_MAX_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error("precondition fails at prefix of length {prefix}: {reason}")]
    Contract { prefix: usize, reason: &'static str },
    #[error("no shift in 1..=2^{len} reproduces the reduced dynamics of {x}")]
    NoPeriod { x: BigUint, len: usize },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// An exact rational `numerator / 2^denom_exp`.
#[derive(Debug, Clone)]
pub struct PrimedValue {
    numerator: BigUint,
    denom_exp: u64,
}

impl PrimedValue {
    pub fn new(numerator: BigUint, denom_exp: u64) -> Self {
        PrimedValue {
            numerator,
            denom_exp,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u64 {
        self.denom_exp
    }

    pub fn is_integer(&self) -> bool {
        self.numerator.is_zero() || self.numerator.trailing_zeros().unwrap_or(0) >= self.denom_exp
    }

    pub fn to_integer(&self) -> Option<BigUint> {
        self.is_integer().then(|| &self.numerator >> self.denom_exp)
    }

    pub fn is_even_integer(&self) -> bool {
        self.numerator.is_zero() || self.numerator.trailing_zeros().unwrap_or(0) > self.denom_exp
    }

    /// Compares the exact value with an integer.
    pub fn cmp_integer(&self, n: &BigUint) -> Ordering {
        self.numerator.cmp(&(n << self.denom_exp))
    }
}

impl PartialEq for PrimedValue {
    fn eq(&self, other: &Self) -> bool {
        (&self.numerator << other.denom_exp) == (&other.numerator << self.denom_exp)
    }
}

impl Eq for PrimedValue {}

/// `2^|w|`.
pub fn period_of(w: &Word) -> BigUint {
    BigUint::one() << w.len()
}

/// The primed word applied to `p`: `3^CntI(w) · p / 2^|w|`, kept exact.
pub fn apply_primed(w: &Word, p: &BigUint) -> PrimedValue {
    let three_pow = BigUint::from(3u32).pow(w.cnt_i() as u32);
    PrimedValue::new(three_pow * p, w.len() as u64)
}

/// Values of the primed word on `p` after 0, 1, ..., `|w|` symbols.
pub fn primed_prefix_values(w: &Word, p: &BigUint) -> Vec<PrimedValue> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut num = p.clone();
    out.push(PrimedValue::new(num.clone(), 0));
    for (j, &t) in w.transforms().iter().enumerate() {
        if t == Transform::I {
            num *= 3u32;
        }
        out.push(PrimedValue::new(num.clone(), j as u64 + 1));
    }
    out
}

/// Length of the first prefix whose primed value on `p` is not an even
/// integer, considering prefixes of length `0..|w|`.
pub fn first_non_even_primed_prefix(w: &Word, p: &BigUint) -> Option<usize> {
    primed_prefix_values(w, p)
        .iter()
        .take(w.len())
        .position(|v| !v.is_even_integer())
}

/// Checks step by step that shifting the start by `p` preserves parity and
/// shifts every value by the primed word's value on `p`.
pub fn verify_separation(x: &BigUint, w: &Word, p: &BigUint) -> Result<bool, PeriodError> {
    if *x < BigUint::from(2u32) {
        return Err(DynamicsError::Domain {
            value: x.clone(),
            min: 2,
        }
        .into());
    }
    let base = match apply_word(w, x, true) {
        Ok(r) => r,
        Err(DynamicsError::Mismatch { step, .. }) => {
            return Err(PeriodError::Contract {
                prefix: step - 1,
                reason: "word does not apply to x",
            })
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(prefix) = first_non_even_primed_prefix(w, p) {
        return Err(PeriodError::Contract {
            prefix,
            reason: "primed value of the shift is not an even integer",
        });
    }
    let base_trace = base.trace().expect("trace requested");
    let primed = primed_prefix_values(w, p);
    let mut shifted = x + p;
    for (j, &t) in w.transforms().iter().enumerate() {
        if shifted.is_odd() != base_trace[j].is_odd() {
            return Ok(false);
        }
        match t {
            Transform::I => {
                shifted *= 3u32;
                shifted += 1u32;
                shifted >>= 1u32;
            }
            Transform::O => shifted >>= 1u32,
        }
        let Some(delta) = primed[j + 1].to_integer() else {
            return Ok(false);
        };
        if shifted != &base_trace[j + 1] + delta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of checking `d_r(x + k·2^L) = d_r(x)` for `k = 1..=checked_ks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodReport {
    pub x: BigUint,
    pub word: Word,
    pub period: BigUint,
    pub checked_ks: u64,
    pub all_equal: bool,
}

/// Whether `d_r(y) = w`. Stops after `|w|` steps.
fn has_reduced_word(y: &BigUint, w: &Word) -> Result<bool, DynamicsError> {
    match reduced_dynamics(y, w.len() as u64) {
        Ok(r) => Ok(r.word() == w),
        Err(DynamicsError::CapExceeded { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn verify_period(x: &BigUint, k_max: u64, cap: u64) -> Result<PeriodReport, PeriodError> {
    let word = reduced_dynamics(x, cap)?.into_word();
    let period = period_of(&word);
    let mut y = x.clone();
    let mut all_equal = true;
    for _ in 0..k_max {
        y += &period;
        if !has_reduced_word(&y, &word)? {
            all_equal = false;
            break;
        }
    }
    Ok(PeriodReport {
        x: x.clone(),
        word,
        period,
        checked_ks: k_max,
        all_equal,
    })
}

/// Smallest `P >= 1` with `d_r(x + P) = d_r(x)`.
///
/// Searches every candidate in `1..=2^L`: one at a time when
/// `L <= LINEAR_SCAN_MAX_LEN`, otherwise with [`minimal_period_exhaustive`].
pub fn minimal_period_bruteforce(x: &BigUint, cap: u64) -> Result<BigUint, PeriodError> {
    let word = reduced_dynamics(x, cap)?.into_word();
    if word.len() <= LINEAR_SCAN_MAX_LEN {
        minimal_period_linear(x, &word)
    } else {
        minimal_period_blocks(x, &word)
    }
}

/// Candidate-by-candidate scan over `P = 1, 2, ..., 2^|d_r(x)|`.
pub fn minimal_period_linear_scan(x: &BigUint, cap: u64) -> Result<BigUint, PeriodError> {
    let word = reduced_dynamics(x, cap)?.into_word();
    minimal_period_linear(x, &word)
}

fn minimal_period_linear(x: &BigUint, word: &Word) -> Result<BigUint, PeriodError> {
    let limit = period_of(word);
    let mut p = BigUint::one();
    while p <= limit {
        if has_reduced_word(&(x + &p), word)? {
            return Ok(p);
        }
        p += 1u32;
    }
    Err(PeriodError::NoPeriod {
        x: x.clone(),
        len: word.len(),
    })
}

/// Exhaustive search over `P in 1..=2^L` that evaluates whole arithmetic
/// progressions of candidates at once.
///
/// A block `{x + u0 + t·2^m}` is carried as the affine value `α + t·β` after
/// `k` steps. While `β` is even every member has the parity of `α`, so the
/// block either follows the next symbol of the word as a whole or is
/// discarded as a whole. When `β` turns odd the block splits on the parity of
/// `t`. Blocks that follow all `L` symbols are checked concretely.
pub fn minimal_period_exhaustive(x: &BigUint, cap: u64) -> Result<BigUint, PeriodError> {
    let word = reduced_dynamics(x, cap)?.into_word();
    minimal_period_blocks(x, &word)
}

struct Block {
    m: usize,
    u0: BigUint,
    alpha: BigUint,
    beta: BigUint,
    k: usize,
}

fn minimal_period_blocks(x: &BigUint, word: &Word) -> Result<BigUint, PeriodError> {
    let len = word.len();
    let symbols = word.transforms();
    let mut stack = alloc::vec![Block {
        m: 0,
        u0: BigUint::one(),
        alpha: x + 1u32,
        beta: BigUint::one(),
        k: 0,
    }];
    let mut best: Option<BigUint> = None;
    while let Some(mut b) = stack.pop() {
        if b.k == len {
            // m == len here, so the block is the single shift u0.
            debug_assert_eq!(b.m, len);
            if best.as_ref().is_none_or(|p| b.u0 < *p) && has_reduced_word(&(x + &b.u0), word)? {
                best = Some(b.u0);
            }
            continue;
        }
        if b.beta.is_odd() {
            let step = BigUint::one() << b.m;
            let beta = &b.beta << 1u32;
            stack.push(Block {
                m: b.m + 1,
                u0: &b.u0 + &step,
                alpha: &b.alpha + &b.beta,
                beta: beta.clone(),
                k: b.k,
            });
            stack.push(Block {
                m: b.m + 1,
                u0: b.u0,
                alpha: b.alpha,
                beta,
                k: b.k,
            });
            continue;
        }
        if Transform::for_parity(b.alpha.is_odd()) != symbols[b.k] {
            continue;
        }
        match symbols[b.k] {
            Transform::I => {
                b.alpha = (b.alpha * 3u32 + 1u32) >> 1u32;
                b.beta = (b.beta * 3u32) >> 1u32;
            }
            Transform::O => {
                b.alpha >>= 1u32;
                b.beta >>= 1u32;
            }
        }
        b.k += 1;
        stack.push(b);
    }
    best.ok_or(PeriodError::NoPeriod { x: x.clone(), len })
}
