//! How much of the residue space modulo `2^L` is settled by reduced-dynamics
//! words of length at most `L`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::dynamics::{reduced_len_u64, DEFAULT_REDUCED_CAP};
use crate::enumerate::{enumerate_words, open_prefix_residues, residue_of_word};

pub const DEFAULT_UNCOVERED_SAMPLE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub level: usize,
    /// `Σ 2^(L - |w|)` over reduced words `w` with `|w| <= L`.
    pub covered_residues: BigUint,
    pub total_residues: BigUint,
    /// Residues left open, counted independently as open prefixes of length `L`.
    pub uncovered_residues: BigUint,
    pub words_by_length: BTreeMap<usize, u64>,
    /// Smallest integers `>= 2` whose reduced dynamics is longer than `L`.
    pub uncovered_sample: Vec<BigUint>,
}

impl CoverageReport {
    /// Whether the word classes and the open prefixes partition the
    /// residues with no overlap.
    pub fn is_partition(&self) -> bool {
        &self.covered_residues + &self.uncovered_residues == self.total_residues
    }

    /// Display-only approximation of `covered / total`.
    pub fn covered_fraction(&self) -> f64 {
        let bits = self.total_residues.bits().saturating_sub(53);
        let c = (&self.covered_residues >> bits)
            .to_f64()
            .unwrap_or(f64::NAN);
        let t = (&self.total_residues >> bits).to_f64().unwrap_or(f64::NAN);
        c / t
    }
}

pub fn coverage(level: usize) -> CoverageReport {
    coverage_with_sample(level, DEFAULT_UNCOVERED_SAMPLE)
}

pub fn coverage_with_sample(level: usize, sample: usize) -> CoverageReport {
    let mut covered = BigUint::ZERO;
    let mut words_by_length = BTreeMap::new();
    for w in enumerate_words(level) {
        covered += BigUint::one() << (level - w.len());
        *words_by_length.entry(w.len()).or_insert(0) += 1;
    }
    let total = BigUint::one() << level;
    let open = open_prefix_residues(level);
    let two = BigUint::from(2u32);
    let mut reps: Vec<BigUint> = open
        .iter()
        .map(|r| if *r >= two { r.clone() } else { r + &total })
        .collect();
    reps.sort();
    reps.truncate(sample);
    CoverageReport {
        level,
        covered_residues: covered,
        total_residues: total,
        uncovered_residues: BigUint::from(open.len()),
        words_by_length,
        uncovered_sample: reps,
    }
}

/// First `x` in `[2, n]` where "residue of `x` is covered at `level`"
/// disagrees with `|d_r(x)| <= level`.
pub fn first_coverage_discrepancy(level: usize, n: u64) -> Option<u64> {
    let mut classes: Vec<BTreeSet<u64>> = alloc::vec![BTreeSet::new(); level + 1];
    for w in enumerate_words(level) {
        if let Some(r) = residue_of_word(&w).residue().to_u64() {
            classes[w.len()].insert(r);
        }
    }
    (2..=n).find(|&x| {
        let covered = classes.iter().enumerate().any(|(len, set)| {
            let r = if len >= 64 {
                x
            } else {
                x & ((1u64 << len) - 1)
            };
            set.contains(&r)
        });
        match reduced_len_u64(x, DEFAULT_REDUCED_CAP) {
            Ok(len) => covered != (len as usize <= level),
            Err(_) => true,
        }
    })
}

pub fn cross_check_coverage(level: usize, n: u64) -> bool {
    first_coverage_discrepancy(level, n).is_none()
}
