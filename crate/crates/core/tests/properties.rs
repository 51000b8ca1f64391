use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rcollatz_core::dynamics::{reduced_chain, DEFAULT_ORIGINAL_CAP, DEFAULT_REDUCED_CAP};
use rcollatz_core::period::{first_non_even_primed_prefix, primed_prefix_values};
use rcollatz_core::{
    apply_primed, apply_word, class_table, cmp_pow3_pow2, coverage, enumerate_words,
    original_dynamics, period_of, reduced_dynamics, verify_separation, PowerOrdering, Transform,
    Word,
};
use std::cmp::Ordering;

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::bool::ANY, 0..max).prop_map(|bits| {
        bits.into_iter()
            .map(|b| if b { Transform::I } else { Transform::O })
            .collect()
    })
}

proptest! {
    #[test]
    fn power_comparison_matches_bigint(a in 0u64..400, b in 0u64..700) {
        prop_assume!(a > 0 || b > 0);
        let lhs = BigUint::from(3u32).pow(a as u32);
        let rhs = BigUint::one() << b;
        let expected = match lhs.cmp(&rhs) {
            Ordering::Less => PowerOrdering::Less,
            Ordering::Greater => PowerOrdering::Greater,
            Ordering::Equal => unreachable!("3^a = 2^b only at a = b = 0"),
        };
        prop_assert_eq!(cmp_pow3_pow2(a, b), Ok(expected));
    }

    #[test]
    fn cached_counts_match_sequence(w in word_strategy(64)) {
        let i = w.transforms().iter().filter(|&&t| t == Transform::I).count();
        prop_assert_eq!(w.cnt_i(), i);
        prop_assert_eq!(w.cnt_o(), w.len() - i);
        prop_assert_eq!(w.to_ascii().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn substr_concatenation(w in word_strategy(40), cut in 0usize..40) {
        let cut = cut.min(w.len());
        let head = w.substr(1, cut).unwrap();
        let tail = w.substr(cut + 1, w.len() - cut).unwrap();
        let joined: Word = head.transforms().iter().chain(tail.transforms()).copied().collect();
        prop_assert_eq!(joined, w);
    }

    #[test]
    fn reduced_dynamics_replays(x in 2u64..u64::MAX) {
        let r = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP).unwrap();
        let replay = apply_word(r.word(), &big(x), true).unwrap();
        prop_assert_eq!(replay.final_value(), r.final_value());
        let trace = replay.trace().unwrap();
        prop_assert!(trace[..trace.len() - 1].iter().all(|v| *v >= big(x)));
        prop_assert!(*r.final_value() < big(x));
        prop_assert_eq!(r.word().last(), Some(Transform::O));
        prop_assert_eq!(r.word().is_reduced_form(), Ok(true));
    }

    #[test]
    fn separation_on_random_starts(x in 2u64..1_000_000) {
        let w = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP).unwrap().into_word();
        prop_assert_eq!(verify_separation(&big(x), &w, &period_of(&w)), Ok(true));
    }

    #[test]
    fn period_holds_for_big_starts(hi in 0u64..u64::MAX, lo in 0u64..u64::MAX, k in 1u32..50) {
        let x = (BigUint::from(hi) << 64u32) + lo + 2u32;
        let w = reduced_dynamics(&x, DEFAULT_REDUCED_CAP).unwrap().into_word();
        let y = &x + period_of(&w) * k;
        let shifted = reduced_dynamics(&y, DEFAULT_REDUCED_CAP).unwrap();
        prop_assert_eq!(shifted.word(), &w);
    }
}

#[test]
fn reduced_dynamics_to_a_million() {
    for x in 2..=1_000_000u64 {
        let r = reduced_dynamics(&big(x), 10_000).unwrap();
        assert!(*r.final_value() < big(x));
        assert_eq!(r.word().last(), Some(Transform::O));
    }
}

#[test]
fn reduced_dynamics_chain_to_original() {
    for x in (2..=100_000u64).step_by(7) {
        let (orig, info) = original_dynamics(&big(x), DEFAULT_ORIGINAL_CAP).unwrap();
        let joined: Word = reduced_chain(&big(x), DEFAULT_REDUCED_CAP)
            .unwrap()
            .iter()
            .flat_map(|r| r.word().transforms().to_vec())
            .collect();
        assert_eq!(&joined, orig.word(), "x = {x}");
        assert_eq!(info.cnt_3x1 as usize, orig.word().cnt_i());
        assert_eq!(info.cnt_half_total as usize, orig.word().len());
    }
}

#[test]
fn one_mod_four_reduces_by_io() {
    for x in (5..=100_000u64).step_by(4) {
        let r = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP).unwrap();
        assert_eq!(r.word().to_ascii(), "IO");
    }
    // 1 itself is excluded: IO maps 1 to 1
    assert!(reduced_dynamics(&big(1), DEFAULT_REDUCED_CAP).is_err());
    assert_eq!(
        *apply_word(&"IO".parse().unwrap(), &big(1), false)
            .unwrap()
            .final_value(),
        big(1)
    );
}

#[test]
fn primed_parity_boundary() {
    for x in 2..3000u64 {
        let w = reduced_dynamics(&big(x), DEFAULT_REDUCED_CAP)
            .unwrap()
            .into_word();
        let p = period_of(&w);
        assert_eq!(first_non_even_primed_prefix(&w, &p), None, "x = {x}");
        let half = &p >> 1u32;
        assert!(first_non_even_primed_prefix(&w, &half).is_some(), "x = {x}");
    }
}

#[test]
fn primed_values_against_the_period() {
    for w in enumerate_words(18) {
        let p = period_of(&w);
        assert_eq!(apply_primed(&w, &p).cmp_integer(&p), Ordering::Less, "{w}");
        let prefixes = primed_prefix_values(&w, &p);
        for (j, v) in prefixes.iter().enumerate().take(w.len()).skip(1) {
            assert_eq!(v.cmp_integer(&p), Ordering::Greater, "{w} prefix {j}");
        }
    }
}

#[test]
fn enumerated_words_shape() {
    for w in enumerate_words(20).filter(|w| w.len() >= 2) {
        assert_eq!(w.first(), Some(Transform::I));
        assert_eq!(w.last(), Some(Transform::O));
    }
}

#[test]
fn class_members_share_the_word() {
    for entry in class_table(14) {
        let entry = entry.unwrap();
        let m = entry.class.modulus();
        for k in 0..=10u32 {
            let y = &entry.representative + &m * k;
            let r = reduced_dynamics(&y, DEFAULT_REDUCED_CAP).unwrap();
            assert_eq!(r.word(), &entry.word, "{} + {k}·2^L", entry.representative);
        }
    }
}

#[test]
fn classes_of_equal_length_are_distinct() {
    let mut seen = std::collections::BTreeSet::new();
    for entry in class_table(18) {
        let entry = entry.unwrap();
        assert!(seen.insert((entry.word.len(), entry.class.residue().clone())));
    }
}

#[test]
fn coverage_is_monotone() {
    let mut last = 0.0;
    for level in 1..=20 {
        let r = coverage(level);
        assert!(r.is_partition(), "level {level}");
        let f = r.covered_fraction();
        assert!(f >= last, "level {level}");
        last = f;
    }
}
