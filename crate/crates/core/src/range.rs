//! Single-threaded verification of a contiguous range and the mergeable
//! report it produces. Parallel drivers split a range into chunks, verify
//! each with [`verify_chunk`], and fold the results with
//! [`RangeReport::absorb`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dynamics::{reduced_dynamics, reduced_len_u64};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RangeFailure {
    pub x: BigUint,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeReport {
    pub lo: BigUint,
    pub hi: BigUint,
    pub verified_count: u64,
    pub max_word_len: u64,
    pub length_histogram: BTreeMap<u64, u64>,
    pub failures: Vec<RangeFailure>,
}

impl RangeReport {
    pub fn new(lo: BigUint, hi: BigUint) -> Self {
        RangeReport {
            lo,
            hi,
            verified_count: 0,
            max_word_len: 0,
            length_histogram: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    pub fn record(&mut self, len: u64) {
        self.verified_count += 1;
        self.max_word_len = self.max_word_len.max(len);
        *self.length_histogram.entry(len).or_insert(0) += 1;
    }

    pub fn record_failure(&mut self, x: BigUint, reason: String) {
        self.failures.push(RangeFailure { x, reason });
    }

    /// Folds another report's counts into this one, keeping this report's
    /// bounds. Order of absorption does not affect the result.
    pub fn absorb(&mut self, other: &RangeReport) {
        self.verified_count += other.verified_count;
        self.max_word_len = self.max_word_len.max(other.max_word_len);
        for (&len, &n) in &other.length_histogram {
            *self.length_histogram.entry(len).or_insert(0) += n;
        }
        self.failures.extend(other.failures.iter().cloned());
        self.failures.sort();
    }

    /// Number of integers in `[lo, hi]`.
    pub fn span(&self) -> BigUint {
        if self.hi < self.lo {
            BigUint::ZERO
        } else {
            &self.hi - &self.lo + 1u32
        }
    }

    /// `verified_count + |failures|` equals the span.
    pub fn is_complete(&self) -> bool {
        BigUint::from(self.verified_count) + BigUint::from(self.failures.len()) == self.span()
    }
}

/// Computes `d_r(x)` for every `x` in `[lo, hi]`. Failures are recorded,
/// never raised.
pub fn verify_chunk(lo: &BigUint, hi: &BigUint, cap: u64) -> RangeReport {
    let mut report = RangeReport::new(lo.clone(), hi.clone());
    if let (Some(a), Some(b)) = (lo.to_u64(), hi.to_u64()) {
        for x in a..=b {
            match reduced_len_u64(x, cap) {
                Ok(len) => report.record(len),
                Err(e) => report.record_failure(BigUint::from(x), e.to_string()),
            }
        }
        return report;
    }
    let mut x = lo.clone();
    while x <= *hi {
        match reduced_dynamics(&x, cap) {
            Ok(r) => report.record(r.word().len() as u64),
            Err(e) => report.record_failure(x.clone(), e.to_string()),
        }
        x += 1u32;
    }
    report
}
