//! Shortcut Collatz map over arbitrary-precision integers.
//!
//! Halving is a right shift and the odd step is an in-place multiply by three
//! followed by an increment and a shift. Starting values that fit in a `u64`
//! run on `u128` until the orbit outgrows it, then continue on [`BigUint`].

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::word::{Transform, Word};

/// Default step cap for [`reduced_dynamics`].
pub const DEFAULT_REDUCED_CAP: u64 = 10_000_000;
/// Default step cap for [`original_dynamics`].
pub const DEFAULT_ORIGINAL_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("{value} is outside the domain (must be at least {min})")]
    Domain { value: BigUint, min: u32 },
    #[error("step {step}: transform {transform} does not match value {value}")]
    Mismatch {
        step: usize,
        value: BigUint,
        transform: Transform,
    },
    #[error("orbit of {start} did not finish within {cap} steps")]
    CapExceeded { start: BigUint, cap: u64 },
}

/// One dynamics computation: a start value, the word applied to it, and
/// where it ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    start: BigUint,
    word: Word,
    final_value: BigUint,
    trace: Option<Vec<BigUint>>,
}

impl OrbitRecord {
    pub fn start(&self) -> &BigUint {
        &self.start
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn final_value(&self) -> &BigUint {
        &self.final_value
    }

    /// Values after 0, 1, ..., `|word|` transforms, when tracing was requested.
    pub fn trace(&self) -> Option<&[BigUint]> {
        self.trace.as_deref()
    }

    pub fn into_word(self) -> Word {
        self.word
    }

    pub fn stopping_info(&self) -> StoppingInfo {
        let n = self.word.len() as u64;
        StoppingInfo {
            stopping_time: n,
            cnt_3x1: self.word.cnt_i() as u64,
            cnt_half_total: n,
        }
    }
}

/// Step counts of a dynamics. Every transform halves once, so
/// `cnt_half_total` equals the number of transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StoppingInfo {
    pub stopping_time: u64,
    pub cnt_3x1: u64,
    pub cnt_half_total: u64,
}

#[inline]
fn step_in_place(x: &mut BigUint) -> Transform {
    if x.is_odd() {
        *x *= 3u32;
        *x += 1u32;
        *x >>= 1u32;
        Transform::I
    } else {
        *x >>= 1u32;
        Transform::O
    }
}

#[inline]
fn apply_in_place(x: &mut BigUint, t: Transform) {
    match t {
        Transform::I => {
            *x *= 3u32;
            *x += 1u32;
            *x >>= 1u32;
        }
        Transform::O => *x >>= 1u32,
    }
}

/// `(3y+1)/2` for odd `y`, `y/2` for even; `None` on overflow.
#[inline]
fn step_u128(y: u128) -> Option<(u128, Transform)> {
    if y & 1 == 1 {
        // (3y+1)/2 = y + (y >> 1) + 1 for odd y
        y.checked_add(y >> 1)?
            .checked_add(1)
            .map(|v| (v, Transform::I))
    } else {
        Some((y >> 1, Transform::O))
    }
}

fn require_at_least(x: &BigUint, min: u32) -> Result<(), DynamicsError> {
    if *x < BigUint::from(min) {
        return Err(DynamicsError::Domain {
            value: x.clone(),
            min,
        });
    }
    Ok(())
}

/// One application of the shortcut map.
pub fn collatz_step(x: &BigUint) -> Result<(BigUint, Transform), DynamicsError> {
    require_at_least(x, 1)?;
    let mut y = x.clone();
    let t = step_in_place(&mut y);
    Ok((y, t))
}

/// Whether `t` is the transform the shortcut map would apply to `x`.
pub fn is_matched(x: &BigUint, t: Transform) -> bool {
    x.is_odd() == t.requires_odd()
}

/// Applies `word` to `x` left to right, failing at the first step whose
/// parity does not match.
pub fn apply_word(
    word: &Word,
    x: &BigUint,
    keep_trace: bool,
) -> Result<OrbitRecord, DynamicsError> {
    require_at_least(x, 1)?;
    let mut y = x.clone();
    let mut trace = keep_trace.then(|| {
        let mut v = Vec::with_capacity(word.len() + 1);
        v.push(x.clone());
        v
    });
    for (k, &t) in word.transforms().iter().enumerate() {
        if !is_matched(&y, t) {
            return Err(DynamicsError::Mismatch {
                step: k + 1,
                value: y,
                transform: t,
            });
        }
        apply_in_place(&mut y, t);
        if let Some(tr) = trace.as_mut() {
            tr.push(y.clone());
        }
    }
    Ok(OrbitRecord {
        start: x.clone(),
        word: word.clone(),
        final_value: y,
        trace,
    })
}

enum SmallRun {
    Below(u64),
    Escaped(u128),
}

/// Reduced-dynamics loop on machine integers. Returns `Escaped` with the
/// current value once the next step would overflow `u128`.
fn reduced_small(x: u64, cap: u64, word: &mut Word) -> Result<SmallRun, u64> {
    let start = u128::from(x);
    let mut y = start;
    loop {
        if word.len() as u64 >= cap {
            return Err(cap);
        }
        let Some((next, t)) = step_u128(y) else {
            return Ok(SmallRun::Escaped(y));
        };
        word.push(t);
        y = next;
        if y < start {
            // y < x <= u64::MAX
            return Ok(SmallRun::Below(y as u64));
        }
    }
}

fn reduced_impl(x: &BigUint, cap: u64, keep_trace: bool) -> Result<OrbitRecord, DynamicsError> {
    require_at_least(x, 2)?;
    let cap_err = || DynamicsError::CapExceeded {
        start: x.clone(),
        cap,
    };
    let mut word = Word::empty();
    let mut y = x.clone();
    let mut trace = None;

    if keep_trace {
        trace = Some(alloc::vec![x.clone()]);
    } else if let Some(x64) = x.to_u64() {
        match reduced_small(x64, cap, &mut word).map_err(|_| cap_err())? {
            SmallRun::Below(f) => {
                return Ok(OrbitRecord {
                    start: x.clone(),
                    word,
                    final_value: BigUint::from(f),
                    trace: None,
                })
            }
            SmallRun::Escaped(v) => y = BigUint::from(v),
        }
    }

    loop {
        if word.len() as u64 >= cap {
            return Err(cap_err());
        }
        word.push(step_in_place(&mut y));
        if let Some(tr) = trace.as_mut() {
            tr.push(y.clone());
        }
        if y < *x {
            return Ok(OrbitRecord {
                start: x.clone(),
                word,
                final_value: y,
                trace,
            });
        }
    }
}

/// The reduced dynamics `d_r(x)`: transforms from `x` up to and including the
/// first value strictly below `x`. Requires `x >= 2`.
pub fn reduced_dynamics(x: &BigUint, cap: u64) -> Result<OrbitRecord, DynamicsError> {
    reduced_impl(x, cap, false)
}

/// [`reduced_dynamics`] with every intermediate value retained.
pub fn reduced_dynamics_traced(x: &BigUint, cap: u64) -> Result<OrbitRecord, DynamicsError> {
    reduced_impl(x, cap, true)
}

/// Length of `d_r(x)` for a machine-sized start, without building the word
/// when the orbit stays within `u128`.
pub fn reduced_len_u64(x: u64, cap: u64) -> Result<u64, DynamicsError> {
    if x < 2 {
        return Err(DynamicsError::Domain {
            value: BigUint::from(x),
            min: 2,
        });
    }
    let start = u128::from(x);
    let mut y = start;
    let mut n = 0u64;
    while n < cap {
        let Some((next, _)) = step_u128(y) else {
            return reduced_dynamics(&BigUint::from(x), cap).map(|r| r.word.len() as u64);
        };
        n += 1;
        y = next;
        if y < start {
            return Ok(n);
        }
    }
    Err(DynamicsError::CapExceeded {
        start: BigUint::from(x),
        cap,
    })
}

fn original_impl(
    x: &BigUint,
    cap: u64,
    mut on_run: impl FnMut(Transform, u64),
) -> Result<(BigUint, StoppingInfo), DynamicsError> {
    require_at_least(x, 1)?;
    let one = BigUint::from(1u32);
    let mut y = x.clone();
    let mut info = StoppingInfo::default();
    let cap_err = || DynamicsError::CapExceeded {
        start: x.clone(),
        cap,
    };
    while y != one {
        if y.is_odd() {
            if info.stopping_time >= cap {
                return Err(cap_err());
            }
            apply_in_place(&mut y, Transform::I);
            info.stopping_time += 1;
            info.cnt_3x1 += 1;
            on_run(Transform::I, 1);
        } else {
            // A run of halvings ends at an odd value; 1 can only appear at
            // the end of the run.
            let tz = y.trailing_zeros().unwrap_or(0);
            if info.stopping_time + tz > cap {
                return Err(cap_err());
            }
            y >>= tz;
            info.stopping_time += tz;
            on_run(Transform::O, tz);
        }
    }
    info.cnt_half_total = info.stopping_time;
    Ok((y, info))
}

/// The original dynamics `d(x)`: transforms from `x` to the first occurrence
/// of 1. For `x = 1` the word is empty.
pub fn original_dynamics(
    x: &BigUint,
    cap: u64,
) -> Result<(OrbitRecord, StoppingInfo), DynamicsError> {
    let mut word = Word::empty();
    let (final_value, info) = original_impl(x, cap, |t, n| {
        for _ in 0..n {
            word.push(t);
        }
    })?;
    Ok((
        OrbitRecord {
            start: x.clone(),
            word,
            final_value,
            trace: None,
        },
        info,
    ))
}

/// Step counts of [`original_dynamics`] without materializing the word.
pub fn original_counts(x: &BigUint, cap: u64) -> Result<StoppingInfo, DynamicsError> {
    original_impl(x, cap, |_, _| {}).map(|(_, info)| info)
}

/// Splits `d(x)` into consecutive reduced dynamics: `d_r(x)`, then `d_r` of
/// where that landed, and so on until 1.
pub fn reduced_chain(x: &BigUint, cap: u64) -> Result<Vec<OrbitRecord>, DynamicsError> {
    require_at_least(x, 1)?;
    let one = BigUint::from(1u32);
    let mut out = Vec::new();
    let mut y = x.clone();
    while y != one {
        let r = reduced_dynamics(&y, cap)?;
        y = r.final_value.clone();
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn dr(n: u64) -> alloc::string::String {
        reduced_dynamics(&big(n), DEFAULT_REDUCED_CAP)
            .unwrap()
            .word()
            .to_ascii()
    }

    #[test]
    fn single_steps() {
        assert_eq!(collatz_step(&big(3)).unwrap(), (big(5), Transform::I));
        assert_eq!(collatz_step(&big(8)).unwrap(), (big(4), Transform::O));
        assert_eq!(collatz_step(&big(1)).unwrap(), (big(2), Transform::I));
        assert!(matches!(
            collatz_step(&big(0)),
            Err(DynamicsError::Domain { min: 1, .. })
        ));
    }

    #[test]
    fn matching() {
        assert!(is_matched(&big(3), Transform::I));
        assert!(!is_matched(&big(4), Transform::I));
        assert!(is_matched(&big(4), Transform::O));
    }

    #[test]
    fn apply_word_examples() {
        let w: Word = "IIOO".parse().unwrap();
        let r = apply_word(&w, &big(3), true).unwrap();
        assert_eq!(*r.final_value(), big(2));
        assert_eq!(
            r.trace().unwrap(),
            &[big(3), big(5), big(8), big(4), big(2)]
        );

        let r = apply_word(&"II".parse().unwrap(), &big(3), false).unwrap();
        assert_eq!(*r.final_value(), big(8));
        assert!(r.trace().is_none());

        let r = apply_word(&Word::empty(), &big(7), false).unwrap();
        assert_eq!(*r.final_value(), big(7));

        assert_eq!(
            apply_word(&"O".parse().unwrap(), &big(3), false),
            Err(DynamicsError::Mismatch {
                step: 1,
                value: big(3),
                transform: Transform::O
            })
        );
        assert!(matches!(
            apply_word(&"IIIO".parse().unwrap(), &big(3), false),
            Err(DynamicsError::Mismatch { step: 3, .. })
        ));
    }

    #[test]
    fn reduced_examples() {
        assert_eq!(dr(3), "IIOO");
        assert_eq!(dr(5), "IO");
        assert_eq!(dr(7), "IIIOIOO");
        assert_eq!(dr(9), "IO");
        assert_eq!(dr(11), "IIOIO");
        assert_eq!(dr(10), "O");
        assert_eq!(dr(2), "O");
    }

    #[test]
    fn reduced_domain_and_cap() {
        assert!(matches!(
            reduced_dynamics(&big(1), 10),
            Err(DynamicsError::Domain { min: 2, .. })
        ));
        // d_r(27) has length 59
        assert_eq!(
            reduced_dynamics(&big(27), 50),
            Err(DynamicsError::CapExceeded {
                start: big(27),
                cap: 50
            })
        );
        assert_eq!(reduced_dynamics(&big(27), 59).unwrap().word().len(), 59);
        assert!(reduced_dynamics_traced(&big(27), 58).is_err());
        assert_eq!(reduced_len_u64(27, 58).ok(), None);
        assert_eq!(reduced_len_u64(27, 59), Ok(59));
    }

    #[test]
    fn traced_and_fast_paths_agree() {
        for n in 2..3000u64 {
            let a = reduced_dynamics(&big(n), 10_000).unwrap();
            let b = reduced_dynamics_traced(&big(n), 10_000).unwrap();
            assert_eq!(a.word(), b.word());
            assert_eq!(a.final_value(), b.final_value());
            let tr = b.trace().unwrap();
            assert_eq!(tr.len(), b.word().len() + 1);
            assert_eq!(tr.last(), Some(b.final_value()));
            assert_eq!(reduced_len_u64(n, 10_000), Ok(a.word().len() as u64));
        }
    }

    #[test]
    fn escapes_u128_near_the_top() {
        // u64::MAX is odd and climbs for 64 steps, far past u128 on the way.
        let x = big(u64::MAX);
        let fast = reduced_dynamics(&x, DEFAULT_REDUCED_CAP).unwrap();
        let slow = reduced_dynamics_traced(&x, DEFAULT_REDUCED_CAP).unwrap();
        assert_eq!(fast.word(), slow.word());
        assert_eq!(fast.final_value(), slow.final_value());
        assert!(fast.final_value() < &x);
    }

    #[test]
    fn original_examples() {
        let (r, info) = original_dynamics(&big(3), DEFAULT_ORIGINAL_CAP).unwrap();
        assert_eq!(r.word().to_ascii(), "IIOOO");
        assert_eq!(info.stopping_time, 5);
        assert_eq!(info.cnt_3x1, 2);
        assert_eq!(info.cnt_half_total, 5);
        assert_eq!(r.stopping_info(), info);

        let (r, info) = original_dynamics(&big(2), 10).unwrap();
        assert_eq!(r.word().to_ascii(), "O");
        assert_eq!(info.stopping_time, 1);

        let (r, info) = original_dynamics(&big(1), 10).unwrap();
        assert!(r.word().is_empty());
        assert_eq!(info.stopping_time, 0);

        assert!(original_dynamics(&big(0), 10).is_err());
        assert!(matches!(
            original_dynamics(&big(27), 20),
            Err(DynamicsError::CapExceeded { .. })
        ));
        assert!(matches!(
            original_dynamics(&big(1 << 20), 19),
            Err(DynamicsError::CapExceeded { .. })
        ));
        assert_eq!(
            original_counts(&big(1 << 20), 20).unwrap().stopping_time,
            20
        );
    }

    #[test]
    fn chain_concatenates_to_original() {
        for n in 1..2000u64 {
            let (orig, _) = original_dynamics(&big(n), DEFAULT_ORIGINAL_CAP).unwrap();
            let joined: Word = reduced_chain(&big(n), DEFAULT_REDUCED_CAP)
                .unwrap()
                .iter()
                .flat_map(|r| r.word().transforms().iter().copied())
                .collect();
            assert_eq!(&joined, orig.word(), "x = {n}");
        }
    }
}
