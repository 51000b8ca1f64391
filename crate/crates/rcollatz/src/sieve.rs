//! Parallel verification of `[lo, hi]` with resumable JSON-lines checkpoints.
//!
//! The range is cut into fixed-size chunks that workers claim from a shared
//! counter. Finished chunks flow over a channel to the calling thread, which
//! is the only checkpoint writer. Chunk reports are folded with
//! [`RangeReport::absorb`], so the result does not depend on completion
//! order or on how many runs it took to get there.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rcollatz_core::dynamics::DEFAULT_REDUCED_CAP;
use rcollatz_core::{verify_chunk, RangeReport};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::RangeReportJson;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("checkpoint {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot resume from {} (line {line}): {message}", path.display())]
    Resume {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("stopped after {completed} of {total} chunks")]
    Interrupted { completed: u64, total: u64 },
}

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub jobs: usize,
    pub step_cap: u64,
    pub chunk_size: u64,
    pub checkpoint: Option<PathBuf>,
    /// Stop once this many new chunks have been checkpointed in this run.
    pub stop_after: Option<u64>,
    /// Report progress on stderr.
    pub progress: bool,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            step_cap: DEFAULT_REDUCED_CAP,
            chunk_size: DEFAULT_CHUNK_SIZE,
            checkpoint: None,
            stop_after: None,
            progress: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub version: u32,
    pub run_id: String,
    #[serde(with = "crate::format::decimal")]
    pub lo: BigUint,
    #[serde(with = "crate::format::decimal")]
    pub hi: BigUint,
    pub chunk_size: u64,
    pub step_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkRecord {
    pub index: u64,
    /// Chunks recorded in the file so far, this one included.
    pub completed: u64,
    pub report: RangeReportJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckpointLine {
    Header(CheckpointHeader),
    Chunk(ChunkRecord),
}

struct Plan {
    lo: BigUint,
    hi: BigUint,
    chunk_size: u64,
    chunks: u64,
}

impl Plan {
    fn new(lo: &BigUint, hi: &BigUint, chunk_size: u64) -> Result<Plan, SieveError> {
        if *lo < BigUint::from(2u32) {
            return Err(SieveError::InvalidRange(format!(
                "lo = {lo} must be at least 2"
            )));
        }
        if lo > hi {
            return Err(SieveError::InvalidRange(format!(
                "lo = {lo} exceeds hi = {hi}"
            )));
        }
        if chunk_size == 0 {
            return Err(SieveError::InvalidRange(
                "chunk size must be positive".into(),
            ));
        }
        let span = hi - lo + 1u32;
        let chunks = (span + chunk_size - 1u32) / chunk_size;
        let chunks = chunks
            .to_u64()
            .ok_or_else(|| SieveError::InvalidRange("too many chunks".into()))?;
        Ok(Plan {
            lo: lo.clone(),
            hi: hi.clone(),
            chunk_size,
            chunks,
        })
    }

    fn bounds(&self, index: u64) -> (BigUint, BigUint) {
        let a = &self.lo + BigUint::from(index) * self.chunk_size;
        let b = (&a + self.chunk_size - 1u32).min(self.hi.clone());
        (a, b)
    }

    fn header(&self, step_cap: u64) -> CheckpointHeader {
        CheckpointHeader {
            version: CHECKPOINT_VERSION,
            run_id: format!("{}-{}-c{}-s{}", self.lo, self.hi, self.chunk_size, step_cap),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            chunk_size: self.chunk_size,
            step_cap,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SieveError + '_ {
    move |source| SieveError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Reads finished chunks from an existing checkpoint. A final line without
/// a newline is a torn write; it is dropped and the file truncated before it.
fn load_checkpoint(
    path: &Path,
    plan: &Plan,
    step_cap: u64,
) -> Result<(BTreeMap<u64, RangeReport>, bool), SieveError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((BTreeMap::new(), false)),
        Err(e) => return Err(io_err(path)(e)),
    };
    let complete_len = text.rfind('\n').map_or(0, |i| i + 1);
    if complete_len < text.len() {
        let f = OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(io_err(path))?;
        f.set_len(complete_len as u64).map_err(io_err(path))?;
    }
    let resume_err = |line: usize, message: String| SieveError::Resume {
        path: path.to_owned(),
        line,
        message,
    };
    let mut done = BTreeMap::new();
    let mut has_header = false;
    for (i, raw) in text[..complete_len].lines().enumerate() {
        let line_no = i + 1;
        let parsed: CheckpointLine =
            serde_json::from_str(raw).map_err(|e| resume_err(line_no, e.to_string()))?;
        match parsed {
            CheckpointLine::Header(h) => {
                if i != 0 {
                    return Err(resume_err(line_no, "header after the first line".into()));
                }
                if h.version != CHECKPOINT_VERSION {
                    return Err(resume_err(
                        line_no,
                        format!("unsupported checkpoint version {}", h.version),
                    ));
                }
                let expected = plan.header(step_cap);
                if (h.lo, h.hi, h.chunk_size, h.step_cap)
                    != (
                        expected.lo,
                        expected.hi,
                        expected.chunk_size,
                        expected.step_cap,
                    )
                {
                    return Err(resume_err(
                        line_no,
                        "checkpoint belongs to a run with different parameters".into(),
                    ));
                }
                has_header = true;
            }
            CheckpointLine::Chunk(c) => {
                if !has_header {
                    return Err(resume_err(line_no, "chunk before header".into()));
                }
                if c.index >= plan.chunks {
                    return Err(resume_err(
                        line_no,
                        format!("chunk index {} out of range", c.index),
                    ));
                }
                let (a, b) = plan.bounds(c.index);
                if c.report.lo != a || c.report.hi != b {
                    return Err(resume_err(line_no, "chunk bounds do not match".into()));
                }
                let report = RangeReport::from(c.report);
                if !report.is_complete() {
                    return Err(resume_err(
                        line_no,
                        "chunk counts do not cover its range".into(),
                    ));
                }
                if done.insert(c.index, report).is_some() {
                    return Err(resume_err(line_no, format!("duplicate chunk {}", c.index)));
                }
            }
        }
    }
    Ok((done, has_header))
}

fn write_line(file: &mut File, path: &Path, line: &CheckpointLine) -> Result<(), SieveError> {
    let mut s = serde_json::to_string(line).expect("checkpoint line serializes");
    s.push('\n');
    file.write_all(s.as_bytes()).map_err(io_err(path))?;
    file.flush().map_err(io_err(path))
}

/// Computes `d_r(x)` for every `x` in `[lo, hi]` on `config.jobs` threads.
pub fn verify_range(
    lo: &BigUint,
    hi: &BigUint,
    config: &SieveConfig,
) -> Result<RangeReport, SieveError> {
    let plan = Plan::new(lo, hi, config.chunk_size)?;
    let jobs = config.jobs.max(1);

    let mut done = BTreeMap::new();
    let mut writer = None;
    if let Some(path) = &config.checkpoint {
        let (loaded, has_header) = load_checkpoint(path, &plan, config.step_cap)?;
        done = loaded;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        if !has_header {
            write_line(
                &mut f,
                path,
                &CheckpointLine::Header(plan.header(config.step_cap)),
            )?;
        }
        writer = Some((f, path.as_path()));
    }

    let mut report = RangeReport::new(lo.clone(), hi.clone());
    for r in done.values() {
        report.absorb(r);
    }
    let pending: Vec<u64> = (0..plan.chunks).filter(|i| !done.contains_key(i)).collect();
    let mut completed = done.len() as u64;
    let mut new_chunks = 0u64;
    let mut write_error = None;
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(u64, RangeReport)>();

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(pending.len().max(1)) {
            let tx = tx.clone();
            let (next, stop, pending, plan) = (&next, &stop, &pending, &plan);
            scope.spawn(move || {
                while !stop.load(Ordering::Relaxed) {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&index) = pending.get(i) else { break };
                    let (a, b) = plan.bounds(index);
                    if tx
                        .send((index, verify_chunk(&a, &b, config.step_cap)))
                        .is_err()
                    {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut last_note = Instant::now();
        for (index, chunk) in &rx {
            completed += 1;
            if let Some((f, path)) = writer.as_mut() {
                let line = CheckpointLine::Chunk(ChunkRecord {
                    index,
                    completed,
                    report: RangeReportJson::from(&chunk),
                });
                if let Err(e) = write_line(f, path, &line) {
                    write_error = Some(e);
                    stop.store(true, Ordering::Relaxed);
                    break;
                }
            }
            report.absorb(&chunk);
            new_chunks += 1;
            if config.progress && last_note.elapsed() >= Duration::from_millis(500) {
                eprintln!("[verify-range] {completed}/{} chunks", plan.chunks);
                last_note = Instant::now();
            }
            if config.stop_after.is_some_and(|n| new_chunks >= n) {
                stop.store(true, Ordering::Relaxed);
                break;
            }
        }
    });

    if let Some(e) = write_error {
        return Err(e);
    }
    if completed < plan.chunks {
        return Err(SieveError::Interrupted {
            completed,
            total: plan.chunks,
        });
    }
    if config.progress {
        eprintln!("[verify-range] {completed}/{} chunks", plan.chunks);
    }
    Ok(report)
}
