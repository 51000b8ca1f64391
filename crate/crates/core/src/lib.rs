//! Reduced Collatz dynamics over arbitrary-precision integers.
//!
//! * [`word`]: the `{I, O}` alphabet, words, and exact validity tests.
//! * [`dynamics`]: the shortcut map, word application, reduced and original
//!   dynamics.
//! * [`period`]: the `2^L` period of reduced dynamics and its checks.
//! * [`enumerate`]: every reduced word up to a length, and its residue class.
//! * [`coverage`]: residue coverage at a level and its cross-check.
//! * [`range`]: single-threaded range verification with mergeable reports.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod coverage;
pub mod dynamics;
pub mod enumerate;
pub mod period;
pub mod range;
pub mod word;

pub use num_bigint::BigUint;

pub use coverage::{coverage, cross_check_coverage, CoverageReport};
pub use dynamics::{
    apply_word, collatz_step, is_matched, original_dynamics, reduced_dynamics, DynamicsError,
    OrbitRecord, StoppingInfo,
};
pub use enumerate::{class_table, enumerate_words, residue_of_word, ClassEntry, ResidueClass};
pub use period::{
    apply_primed, minimal_period_bruteforce, period_of, verify_period, verify_separation,
    PeriodError, PeriodReport, PrimedValue,
};
pub use range::{verify_chunk, RangeFailure, RangeReport};
pub use word::{cmp_pow3_pow2, PowerOrdering, Transform, Word, WordError};
