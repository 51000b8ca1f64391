//! File and output schemas. Arbitrary-precision integers are decimal
//! strings; counts and lengths are JSON numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use rcollatz_core::{
    ClassEntry, CoverageReport, OrbitRecord, PeriodReport, RangeFailure, RangeReport, ResidueClass,
    StoppingInfo, Word,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .filter(|_| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

mod decimal_vec {
    use num_bigint::BigUint;
    use serde::{Deserializer, Serialize, Serializer};

    #[derive(serde::Deserialize)]
    struct D(#[serde(with = "super::decimal")] BigUint);

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D2: Deserializer<'de>>(d: D2) -> Result<Vec<BigUint>, D2::Error> {
        let v: Vec<D> = serde::Deserialize::deserialize(d)?;
        Ok(v.into_iter().map(|x| x.0).collect())
    }
}

/// Maps keyed by integers, written with string keys. Parsing the keys by
/// hand keeps them readable when the map sits inside a tagged enum.
mod count_map {
    use std::collections::BTreeMap;
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<K: Display, S: Serializer>(
        m: &BTreeMap<K, u64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, u64>, D::Error>
    where
        K: FromStr + Ord,
        D: Deserializer<'de>,
    {
        let raw = BTreeMap::<String, u64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| match k.parse() {
                Ok(key) if k.bytes().all(|b| b.is_ascii_digit()) => Ok((key, v)),
                _ => Err(D::Error::custom(format!("not a length: {k:?}"))),
            })
            .collect()
    }
}

mod ascii_word {
    use rcollatz_core::Word;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(w)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// `{start, word, final, stopping_time, cnt_3x1, cnt_half_total}`.
/// `word` is omitted when only counts were requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitJson {
    #[serde(with = "decimal")]
    pub start: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(rename = "final", with = "decimal")]
    pub final_value: BigUint,
    pub stopping_time: u64,
    pub cnt_3x1: u64,
    pub cnt_half_total: u64,
}

impl OrbitJson {
    pub fn from_record(r: &OrbitRecord) -> Self {
        Self::from_parts(
            r.start(),
            Some(r.word()),
            r.final_value(),
            r.stopping_info(),
        )
    }

    pub fn from_parts(
        start: &BigUint,
        word: Option<&Word>,
        final_value: &BigUint,
        info: StoppingInfo,
    ) -> Self {
        OrbitJson {
            start: start.clone(),
            word: word.map(Word::to_ascii),
            final_value: final_value.clone(),
            stopping_time: info.stopping_time,
            cnt_3x1: info.cnt_3x1,
            cnt_half_total: info.cnt_half_total,
        }
    }
}

/// One class-table line: `{"word", "residue", "modulus_exp", "representative"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    #[serde(with = "ascii_word")]
    pub word: Word,
    #[serde(with = "decimal")]
    pub residue: BigUint,
    pub modulus_exp: usize,
    #[serde(with = "decimal")]
    pub representative: BigUint,
}

impl ClassJson {
    pub fn new(word: &Word, class: &ResidueClass) -> Self {
        ClassJson {
            word: word.clone(),
            residue: class.residue().clone(),
            modulus_exp: class.exponent(),
            representative: class.representative(),
        }
    }

    pub fn from_entry(e: &ClassEntry) -> Self {
        ClassJson {
            word: e.word.clone(),
            residue: e.class.residue().clone(),
            modulus_exp: e.class.exponent(),
            representative: e.representative.clone(),
        }
    }

    pub const CSV_HEADER: &'static str = "word,residue,modulus_exp,representative";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.word, self.residue, self.modulus_exp, self.representative
        )
    }

    pub fn parse_csv_row(line: &str) -> Option<Self> {
        let mut it = line.split(',');
        let row = ClassJson {
            word: it.next()?.parse().ok()?,
            residue: BigUint::from_str(it.next()?).ok()?,
            modulus_exp: it.next()?.parse().ok()?,
            representative: BigUint::from_str(it.next()?).ok()?,
        };
        it.next().is_none().then_some(row)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodJson {
    #[serde(with = "decimal")]
    pub x: BigUint,
    #[serde(with = "ascii_word")]
    pub word: Word,
    #[serde(with = "decimal")]
    pub period: BigUint,
    pub checked_ks: u64,
    pub all_equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_period: Option<String>,
}

impl PeriodJson {
    pub fn new(r: &PeriodReport, minimal: Option<&BigUint>) -> Self {
        PeriodJson {
            x: r.x.clone(),
            word: r.word.clone(),
            period: r.period.clone(),
            checked_ks: r.checked_ks,
            all_equal: r.all_equal,
            minimal_period: minimal.map(ToString::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureJson {
    #[serde(with = "decimal")]
    pub x: BigUint,
    pub reason: String,
}

/// Range verification report, also the per-chunk payload of checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeReportJson {
    #[serde(with = "decimal")]
    pub lo: BigUint,
    #[serde(with = "decimal")]
    pub hi: BigUint,
    pub verified_count: u64,
    pub max_word_len: u64,
    #[serde(with = "count_map")]
    pub length_histogram: BTreeMap<u64, u64>,
    pub failures: Vec<FailureJson>,
}

impl From<&RangeReport> for RangeReportJson {
    fn from(r: &RangeReport) -> Self {
        RangeReportJson {
            lo: r.lo.clone(),
            hi: r.hi.clone(),
            verified_count: r.verified_count,
            max_word_len: r.max_word_len,
            length_histogram: r.length_histogram.clone(),
            failures: r
                .failures
                .iter()
                .map(|f| FailureJson {
                    x: f.x.clone(),
                    reason: f.reason.clone(),
                })
                .collect(),
        }
    }
}

impl From<RangeReportJson> for RangeReport {
    fn from(j: RangeReportJson) -> Self {
        RangeReport {
            lo: j.lo,
            hi: j.hi,
            verified_count: j.verified_count,
            max_word_len: j.max_word_len,
            length_histogram: j.length_histogram,
            failures: j
                .failures
                .into_iter()
                .map(|f| RangeFailure {
                    x: f.x,
                    reason: f.reason,
                })
                .collect(),
        }
    }
}

pub fn range_report_json(r: &RangeReport) -> String {
    serde_json::to_string(&RangeReportJson::from(r)).expect("report serializes")
}

/// Histogram as CSV with header `length,count`.
pub fn histogram_csv(hist: &BTreeMap<u64, u64>) -> String {
    let mut s = String::from("length,count\n");
    for (len, n) in hist {
        let _ = writeln!(s, "{len},{n}");
    }
    s
}

pub fn parse_histogram_csv(text: &str) -> Option<BTreeMap<u64, u64>> {
    let mut lines = text.lines();
    if lines.next()? != "length,count" {
        return None;
    }
    lines
        .map(|l| {
            let (a, b) = l.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageJson {
    pub level: usize,
    #[serde(with = "decimal")]
    pub covered_residues: BigUint,
    #[serde(with = "decimal")]
    pub total_residues: BigUint,
    #[serde(with = "decimal")]
    pub uncovered_residues: BigUint,
    #[serde(with = "count_map")]
    pub words_by_length: BTreeMap<usize, u64>,
    #[serde(with = "decimal_vec")]
    pub uncovered_sample: Vec<BigUint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckJson {
    pub n: u64,
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_discrepancy: Option<u64>,
}

impl CoverageJson {
    pub fn new(r: &CoverageReport, cross_check: Option<CrossCheckJson>) -> Self {
        CoverageJson {
            level: r.level,
            covered_residues: r.covered_residues.clone(),
            total_residues: r.total_residues.clone(),
            uncovered_residues: r.uncovered_residues.clone(),
            words_by_length: r.words_by_length.clone(),
            uncovered_sample: r.uncovered_sample.clone(),
            cross_check,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rcollatz_core::{class_table, reduced_dynamics, verify_chunk};

    #[test]
    fn orbit_schema() {
        let r = reduced_dynamics(&BigUint::from(3u32), 100).unwrap();
        let s = serde_json::to_string(&OrbitJson::from_record(&r)).unwrap();
        assert_eq!(
            s,
            r#"{"start":"3","word":"IIOO","final":"2","stopping_time":4,"cnt_3x1":2,"cnt_half_total":4}"#
        );
        let back: OrbitJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back, OrbitJson::from_record(&r));
    }

    #[test]
    fn class_schema() {
        let e = class_table(4).nth(2).unwrap().unwrap();
        let j = ClassJson::from_entry(&e);
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(
            s,
            r#"{"word":"IIOO","residue":"3","modulus_exp":4,"representative":"3"}"#
        );
        assert_eq!(serde_json::from_str::<ClassJson>(&s).unwrap(), j);
        assert_eq!(j.csv_row(), "IIOO,3,4,3");
        assert_eq!(ClassJson::parse_csv_row(&j.csv_row()), Some(j));
    }

    #[test]
    fn rejects_non_decimal_integers() {
        let bad = r#"{"word":"IO","residue":"0x1","modulus_exp":2,"representative":"5"}"#;
        assert!(serde_json::from_str::<ClassJson>(bad).is_err());
        let bad = r#"{"word":"IX","residue":"1","modulus_exp":2,"representative":"5"}"#;
        assert!(serde_json::from_str::<ClassJson>(bad).is_err());
    }

    #[test]
    fn range_report_schema() {
        let r = verify_chunk(&BigUint::from(2u32), &BigUint::from(5u32), 100);
        let s = range_report_json(&r);
        assert_eq!(
            s,
            r#"{"lo":"2","hi":"5","verified_count":4,"max_word_len":4,"length_histogram":{"1":2,"2":1,"4":1},"failures":[]}"#
        );
        let back: RangeReportJson = serde_json::from_str(&s).unwrap();
        assert_eq!(RangeReport::from(back), r);
        let csv = histogram_csv(&r.length_histogram);
        assert_eq!(csv, "length,count\n1,2\n2,1\n4,1\n");
        assert_eq!(parse_histogram_csv(&csv), Some(r.length_histogram));
    }
}
