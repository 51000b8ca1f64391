//! Library results checked against independent brute-force or algebraic
//! routes that live only here.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rcollatz_core::dynamics::{reduced_len_u64, DEFAULT_REDUCED_CAP};
use rcollatz_core::enumerate::open_prefix_residues;
use rcollatz_core::{
    coverage, enumerate_words, reduced_dynamics, residue_of_word, Transform, Word,
};

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Plain `u128` shortcut-map loop, no shared code with the library.
fn dr_naive(x: u64) -> String {
    let start = x as u128;
    let mut y = start;
    let mut s = String::new();
    loop {
        if y % 2 == 1 {
            y = (3 * y + 1) >> 1;
            s.push('I');
        } else {
            y /= 2;
            s.push('O');
        }
        if y < start {
            return s;
        }
    }
}

fn all_words(len: usize) -> impl Iterator<Item = Word> {
    (0u32..1 << len).map(move |bits| {
        (0..len)
            .map(|i| {
                if bits >> (len - 1 - i) & 1 == 0 {
                    Transform::I
                } else {
                    Transform::O
                }
            })
            .collect()
    })
}

/// `y` follows `w` for `|w|` steps iff `2^L | 3^c·y + s`, where `s` is the
/// constant term of the formal composition. Solved with a modular inverse.
fn residue_by_inverse(w: &Word) -> BigUint {
    let mut b = BigUint::zero();
    for (d, &t) in w.transforms().iter().enumerate() {
        if t == Transform::I {
            b = b * 3u32 + (BigUint::one() << d);
        }
    }
    let modulus = BigUint::one() << w.len();
    if w.is_empty() {
        return BigUint::zero();
    }
    let three_c = BigUint::from(3u32).pow(w.cnt_i() as u32) % &modulus;
    let inv = three_c.modinv(&modulus).expect("3 is a unit mod 2^L");
    let neg_b = (&modulus - (&b % &modulus)) % &modulus;
    (neg_b * inv) % modulus
}

#[test]
fn reduced_dynamics_matches_naive_loop() {
    for x in 2..200_000u64 {
        let w = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP).unwrap();
        assert_eq!(w.word().to_ascii(), dr_naive(x), "x = {x}");
    }
}

#[test]
fn form_test_is_exact_up_to_length_12() {
    // Every class mod 2^12 has a representative in [2, 2^12 + 2], so this
    // collects every reduced word of length <= 12.
    let produced: BTreeSet<String> = (2..=(1u64 << 12) + 2)
        .map(dr_naive)
        .filter(|s| s.len() <= 12)
        .collect();
    for len in 1..=12 {
        for w in all_words(len) {
            let expected = produced.contains(&w.to_ascii());
            assert_eq!(w.is_reduced_form(), Ok(expected), "{w}");
        }
    }
}

#[test]
fn reduced_words_from_dynamics_pass_the_form_test() {
    for x in 2..(1u64 << 16) {
        let s = dr_naive(x);
        if s.len() <= 20 {
            let w: Word = s.parse().unwrap();
            assert_eq!(w.is_reduced_form(), Ok(true), "x = {x}");
            if w.len() > 1 {
                assert_eq!(w.first(), Some(Transform::I));
                assert_eq!(w.last(), Some(Transform::O));
            }
        }
    }
}

#[test]
fn residue_lifting_matches_inverse_and_search() {
    for len in 1..=10 {
        for w in all_words(len) {
            let lifted = residue_of_word(&w);
            assert_eq!(lifted.exponent(), len);
            assert_eq!(*lifted.residue(), residue_by_inverse(&w), "{w}");
            // direct search: only the class members follow all parities
            let m = 1u64 << len;
            let hits: Vec<u64> = (m..2 * m)
                .filter(|&y| rcollatz_core::apply_word(&w, &big(y), false).is_ok())
                .collect();
            assert_eq!(hits.len(), 1, "{w}");
            assert_eq!(big(hits[0] % m), *lifted.residue(), "{w}");
        }
    }
}

#[test]
fn residue_lifting_matches_inverse_on_long_words() {
    for x in [27u64, 703, 1_000_001, 837_799, 63_728_127] {
        let w = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP)
            .unwrap()
            .into_word();
        let r = residue_of_word(&w);
        assert_eq!(*r.residue(), residue_by_inverse(&w));
        assert!(r.contains(&big(x)));
    }
}

#[test]
fn enumeration_matches_brute_force_up_to_16() {
    let len = 16;
    let brute: BTreeSet<String> = (2..=(1u64 << len) + 2)
        .map(dr_naive)
        .filter(|s| s.len() <= len)
        .collect();
    let enumerated: BTreeSet<String> = enumerate_words(len).map(|w| w.to_ascii()).collect();
    assert_eq!(enumerated, brute);
}

#[test]
fn coverage_matches_bitmap_count() {
    for level in 1..=16usize {
        let m = 1usize << level;
        let mut owner = vec![0u8; m];
        for w in enumerate_words(level) {
            let r = residue_of_word(&w).residue().to_usize().unwrap();
            let step = 1usize << w.len();
            let mut k = r;
            while k < m {
                assert_eq!(owner[k], 0, "overlap at residue {k}, level {level}");
                owner[k] = 1;
                k += step;
            }
        }
        let covered = owner.iter().filter(|&&o| o == 1).count();
        let report = coverage(level);
        assert_eq!(report.covered_residues, big(covered as u64));
        assert!(report.is_partition());
        let open: Vec<u64> = (0..m as u64).filter(|&r| owner[r as usize] == 0).collect();
        let listed: Vec<u64> = open_prefix_residues(level)
            .iter()
            .map(|r| r.to_u64().unwrap())
            .collect();
        assert_eq!(listed, open, "level {level}");
    }
}

#[test]
fn coverage_agrees_with_direct_lengths_per_residue() {
    // residue r mod 2^L is covered iff some member in [2, 2^L + 2) has a
    // reduced dynamics of length <= L
    let level = 12;
    let m = 1u64 << level;
    let mut by_residue: HashMap<u64, bool> = HashMap::new();
    for x in 2..m + 2 {
        let len = reduced_len_u64(x, DEFAULT_REDUCED_CAP).unwrap() as usize;
        by_residue.insert(x % m, len <= level);
    }
    let covered = by_residue.values().filter(|&&c| c).count();
    assert_eq!(coverage(level).covered_residues, big(covered as u64));
}
