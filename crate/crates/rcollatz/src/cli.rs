//! The `rcollatz` command line.
//!
//! Results go to stdout, progress and errors to stderr. Exit status: 0 on
//! success, 1 when a verification finds a failure, 2 on usage or parse
//! errors, 3 on I/O errors.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rcollatz_core::coverage::{
    coverage_with_sample, first_coverage_discrepancy, DEFAULT_UNCOVERED_SAMPLE,
};
use rcollatz_core::dynamics::{
    original_counts, reduced_dynamics_traced, DEFAULT_ORIGINAL_CAP, DEFAULT_REDUCED_CAP,
};
use rcollatz_core::{
    apply_word, class_table, enumerate_words, minimal_period_bruteforce, original_dynamics,
    reduced_dynamics, residue_of_word, verify_period, DynamicsError, PeriodError, Word,
};
use serde::Serialize;

use crate::expr::{parse_int_expr, DEFAULT_EXPONENT_LIMIT};
use crate::format::{
    histogram_csv, ClassJson, CoverageJson, CrossCheckJson, OrbitJson, OutputFormat, PeriodJson,
    RangeReportJson,
};
use crate::sieve::{verify_range, SieveConfig, SieveError, DEFAULT_CHUNK_SIZE};

pub const JOBS_ENV: &str = "RCOLLATZ_JOBS";

#[derive(Debug, Parser)]
#[command(name = "rcollatz", version, about = "Reduced Collatz dynamics toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,

    /// Largest exponent accepted in integer expressions.
    #[arg(long, global = true, default_value_t = DEFAULT_EXPONENT_LIMIT)]
    pub exponent_limit: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced dynamics of an integer.
    Dr {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_REDUCED_CAP)]
        cap: u64,
        /// Include every intermediate value.
        #[arg(long)]
        trace: bool,
    },
    /// Original dynamics (down to 1) of an integer.
    Orbit {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_ORIGINAL_CAP)]
        cap: u64,
        /// Print step counts only, not the word.
        #[arg(long)]
        counts_only: bool,
    },
    /// Apply a word to an integer with parity checking.
    Apply {
        word: String,
        expr: String,
        #[arg(long)]
        trace: bool,
    },
    /// Every reduced-dynamics word up to a length.
    Enum {
        #[arg(long)]
        max_len: usize,
    },
    /// Residue class of a word.
    Residue { word: String },
    /// Word, residue class and representative for every reduced word.
    Classes {
        #[arg(long)]
        max_len: usize,
    },
    /// Check d_r(x + k*2^L) = d_r(x) for k = 1..K.
    Period {
        expr: String,
        #[arg(long, default_value_t = 3)]
        k: u64,
        /// Also search for the smallest period exhaustively.
        #[arg(long)]
        min_brute: bool,
        #[arg(long, default_value_t = DEFAULT_REDUCED_CAP)]
        cap: u64,
    },
    /// Verify every integer in [lo, hi] reduces.
    VerifyRange {
        lo: String,
        hi: String,
        #[arg(long, env = JOBS_ENV)]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        #[arg(long, default_value_t = DEFAULT_REDUCED_CAP)]
        cap: u64,
        /// Stop after this many chunks (resume later from the checkpoint).
        #[arg(long)]
        stop_after: Option<u64>,
    },
    /// Residue coverage at modulus 2^L.
    Coverage {
        #[arg(long)]
        level: usize,
        /// Compare against direct computation for every x in [2, N].
        #[arg(long)]
        cross_check: Option<String>,
        #[arg(long, default_value_t = DEFAULT_UNCOVERED_SAMPLE)]
        sample: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) | CliError::Io(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Domain { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        match e {
            PeriodError::Dynamics(d) => d.into(),
            PeriodError::Contract { .. } => CliError::Usage(e.to_string()),
            PeriodError::NoPeriod { .. } => CliError::Failure(e.to_string()),
        }
    }
}

impl From<SieveError> for CliError {
    fn from(e: SieveError) -> Self {
        match e {
            SieveError::InvalidRange(_) => CliError::Usage(e.to_string()),
            SieveError::Io { .. } | SieveError::Resume { .. } => CliError::Io(e.to_string()),
            SieveError::Interrupted { .. } => CliError::Failure(e.to_string()),
        }
    }
}

struct Ctx<'a> {
    format: OutputFormat,
    exponent_limit: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn int(&self, text: &str) -> Result<BigUint, CliError> {
        parse_int_expr(text)
            .and_then(|e| e.eval_with_limit(self.exponent_limit))
            .map_err(|e| CliError::Usage(format!("{text:?}: {e}")))
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let s = serde_json::to_string(value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(self.out, "{s}")?;
        Ok(())
    }
}

fn parse_word(text: &str) -> Result<Word, CliError> {
    text.parse()
        .map_err(|e| CliError::Usage(format!("{text:?}: {e}")))
}

/// Runs with explicit arguments and output stream; returns the exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            let _ = out.flush();
            return 0;
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        exponent_limit: cli.exponent_limit,
        out,
    };
    let result = dispatch(&mut ctx, cli.command).and_then(|code| {
        ctx.out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run() -> ExitCode {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = run_with(std::env::args_os(), &mut out, &mut io::stderr());
    ExitCode::from(code)
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Result<u8, CliError> {
    match command {
        Command::Dr { expr, cap, trace } => cmd_dr(ctx, &expr, cap, trace),
        Command::Orbit {
            expr,
            cap,
            counts_only,
        } => cmd_orbit(ctx, &expr, cap, counts_only),
        Command::Apply { word, expr, trace } => cmd_apply(ctx, &word, &expr, trace),
        Command::Enum { max_len } => cmd_enum(ctx, max_len),
        Command::Residue { word } => cmd_residue(ctx, &word),
        Command::Classes { max_len } => cmd_classes(ctx, max_len),
        Command::Period {
            expr,
            k,
            min_brute,
            cap,
        } => cmd_period(ctx, &expr, k, min_brute, cap),
        Command::VerifyRange {
            lo,
            hi,
            jobs,
            checkpoint,
            chunk_size,
            cap,
            stop_after,
        } => {
            let config = SieveConfig {
                jobs: jobs.unwrap_or_else(|| SieveConfig::default().jobs),
                step_cap: cap,
                chunk_size,
                checkpoint,
                stop_after,
                progress: true,
            };
            cmd_verify_range(ctx, &lo, &hi, &config)
        }
        Command::Coverage {
            level,
            cross_check,
            sample,
        } => cmd_coverage(ctx, level, cross_check.as_deref(), sample),
    }
}

fn cmd_dr(ctx: &mut Ctx<'_>, expr: &str, cap: u64, trace: bool) -> Result<u8, CliError> {
    let x = ctx.int(expr)?;
    if x.is_one() {
        match ctx.format {
            OutputFormat::Json => ctx.json(&serde_json::json!({
                "start": "1",
                "note": "trivially at 1",
            }))?,
            _ => writeln!(ctx.out, "1 is trivially at 1")?,
        }
        return Ok(0);
    }
    let r = if trace {
        reduced_dynamics_traced(&x, cap)?
    } else {
        reduced_dynamics(&x, cap)?
    };
    write_orbit(ctx, &r, trace)?;
    Ok(0)
}

fn write_orbit(
    ctx: &mut Ctx<'_>,
    r: &rcollatz_core::OrbitRecord,
    trace: bool,
) -> Result<(), CliError> {
    match ctx.format {
        OutputFormat::Json => {
            let j = OrbitJson::from_record(r);
            if trace {
                let mut v = serde_json::to_value(&j).expect("orbit serializes");
                let tr: Vec<String> = r
                    .trace()
                    .unwrap_or(&[])
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                v["trace"] = serde_json::json!(tr);
                ctx.json(&v)?;
            } else {
                ctx.json(&j)?;
            }
        }
        OutputFormat::Csv => {
            writeln!(ctx.out, "start,word,length,final")?;
            writeln!(
                ctx.out,
                "{},{},{},{}",
                r.start(),
                r.word(),
                r.word().len(),
                r.final_value()
            )?;
        }
        OutputFormat::Text => {
            writeln!(ctx.out, "start: {}", r.start())?;
            writeln!(ctx.out, "word: {}", r.word())?;
            writeln!(ctx.out, "length: {}", r.word().len())?;
            writeln!(ctx.out, "cnt_i: {}", r.word().cnt_i())?;
            writeln!(ctx.out, "final: {}", r.final_value())?;
            if let Some(tr) = r.trace() {
                let vals: Vec<String> = tr.iter().map(ToString::to_string).collect();
                writeln!(ctx.out, "trace: {}", vals.join(" "))?;
            }
        }
    }
    Ok(())
}

fn cmd_orbit(ctx: &mut Ctx<'_>, expr: &str, cap: u64, counts_only: bool) -> Result<u8, CliError> {
    let x = ctx.int(expr)?;
    let (word, info) = if counts_only {
        (None, original_counts(&x, cap)?)
    } else {
        let (r, info) = original_dynamics(&x, cap)?;
        (Some(r.into_word()), info)
    };
    let j = OrbitJson::from_parts(&x, word.as_ref(), &BigUint::one(), info);
    match ctx.format {
        OutputFormat::Json => ctx.json(&j)?,
        OutputFormat::Csv => {
            writeln!(ctx.out, "start,stopping_time,cnt_3x1,cnt_half_total")?;
            writeln!(
                ctx.out,
                "{},{},{},{}",
                j.start, j.stopping_time, j.cnt_3x1, j.cnt_half_total
            )?;
        }
        OutputFormat::Text => {
            writeln!(ctx.out, "start: {}", j.start)?;
            if let Some(w) = &j.word {
                writeln!(ctx.out, "word: {w}")?;
            }
            writeln!(ctx.out, "stopping_time: {}", j.stopping_time)?;
            writeln!(ctx.out, "cnt_3x1: {}", j.cnt_3x1)?;
            writeln!(ctx.out, "cnt_half_total: {}", j.cnt_half_total)?;
        }
    }
    Ok(0)
}

fn cmd_apply(ctx: &mut Ctx<'_>, word: &str, expr: &str, trace: bool) -> Result<u8, CliError> {
    let w = parse_word(word)?;
    let x = ctx.int(expr)?;
    let r = apply_word(&w, &x, trace)?;
    write_orbit(ctx, &r, trace)?;
    Ok(0)
}

fn cmd_enum(ctx: &mut Ctx<'_>, max_len: usize) -> Result<u8, CliError> {
    if max_len == 0 {
        return Err(CliError::Usage("--max-len must be at least 1".into()));
    }
    if ctx.format == OutputFormat::Csv {
        writeln!(ctx.out, "word,length")?;
    }
    for w in enumerate_words(max_len) {
        match ctx.format {
            OutputFormat::Json => {
                ctx.json(&serde_json::json!({"word": w.to_ascii(), "length": w.len()}))?
            }
            OutputFormat::Csv => writeln!(ctx.out, "{w},{}", w.len())?,
            OutputFormat::Text => writeln!(ctx.out, "{w}")?,
        }
    }
    Ok(0)
}

fn write_class(ctx: &mut Ctx<'_>, row: &ClassJson) -> Result<(), CliError> {
    match ctx.format {
        OutputFormat::Json => ctx.json(row)?,
        OutputFormat::Csv => writeln!(ctx.out, "{}", row.csv_row())?,
        OutputFormat::Text => writeln!(
            ctx.out,
            "{} [{}]_2^{} rep {}",
            row.word, row.residue, row.modulus_exp, row.representative
        )?,
    }
    Ok(())
}

fn cmd_residue(ctx: &mut Ctx<'_>, word: &str) -> Result<u8, CliError> {
    let w = parse_word(word)?;
    if w.is_empty() {
        return Err(CliError::Usage("word must be non-empty".into()));
    }
    let row = ClassJson::new(&w, &residue_of_word(&w));
    if ctx.format == OutputFormat::Csv {
        writeln!(ctx.out, "{}", ClassJson::CSV_HEADER)?;
    }
    write_class(ctx, &row)?;
    Ok(0)
}

fn cmd_classes(ctx: &mut Ctx<'_>, max_len: usize) -> Result<u8, CliError> {
    if max_len == 0 {
        return Err(CliError::Usage("--max-len must be at least 1".into()));
    }
    if ctx.format == OutputFormat::Csv {
        writeln!(ctx.out, "{}", ClassJson::CSV_HEADER)?;
    }
    for entry in class_table(max_len) {
        let entry = entry.map_err(|e| CliError::Failure(e.to_string()))?;
        write_class(ctx, &ClassJson::from_entry(&entry))?;
    }
    Ok(0)
}

fn cmd_period(
    ctx: &mut Ctx<'_>,
    expr: &str,
    k: u64,
    min_brute: bool,
    cap: u64,
) -> Result<u8, CliError> {
    let x = ctx.int(expr)?;
    let report = verify_period(&x, k, cap)?;
    let minimal = if min_brute {
        Some(minimal_period_bruteforce(&x, cap)?)
    } else {
        None
    };
    let ok = report.all_equal && minimal.as_ref().is_none_or(|m| *m == report.period);
    let j = PeriodJson::new(&report, minimal.as_ref());
    match ctx.format {
        OutputFormat::Json => ctx.json(&j)?,
        OutputFormat::Csv => {
            writeln!(ctx.out, "x,word,period,checked_ks,all_equal,minimal_period")?;
            writeln!(
                ctx.out,
                "{},{},{},{},{},{}",
                j.x,
                j.word,
                j.period,
                j.checked_ks,
                j.all_equal,
                j.minimal_period.as_deref().unwrap_or("")
            )?;
        }
        OutputFormat::Text => {
            writeln!(ctx.out, "x: {}", j.x)?;
            writeln!(ctx.out, "word: {}", j.word)?;
            writeln!(ctx.out, "period: {}", j.period)?;
            writeln!(ctx.out, "checked_ks: {}", j.checked_ks)?;
            writeln!(ctx.out, "all_equal: {}", j.all_equal)?;
            if let Some(m) = &j.minimal_period {
                writeln!(ctx.out, "minimal_period: {m}")?;
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_verify_range(
    ctx: &mut Ctx<'_>,
    lo: &str,
    hi: &str,
    config: &SieveConfig,
) -> Result<u8, CliError> {
    let lo = ctx.int(lo)?;
    let hi = ctx.int(hi)?;
    let report = verify_range(&lo, &hi, config)?;
    match ctx.format {
        OutputFormat::Json => ctx.json(&RangeReportJson::from(&report))?,
        OutputFormat::Csv => write!(ctx.out, "{}", histogram_csv(&report.length_histogram))?,
        OutputFormat::Text => {
            writeln!(ctx.out, "range: [{}, {}]", report.lo, report.hi)?;
            writeln!(ctx.out, "verified: {}", report.verified_count)?;
            writeln!(ctx.out, "failures: {}", report.failures.len())?;
            writeln!(ctx.out, "max_word_len: {}", report.max_word_len)?;
            for (len, n) in &report.length_histogram {
                writeln!(ctx.out, "  length {len}: {n}")?;
            }
            for f in &report.failures {
                writeln!(ctx.out, "  failed {}: {}", f.x, f.reason)?;
            }
        }
    }
    Ok(if report.failures.is_empty() { 0 } else { 1 })
}

fn cmd_coverage(
    ctx: &mut Ctx<'_>,
    level: usize,
    cross_check: Option<&str>,
    sample: usize,
) -> Result<u8, CliError> {
    if level == 0 {
        return Err(CliError::Usage("--level must be at least 1".into()));
    }
    let cross = match cross_check {
        Some(text) => {
            let n = ctx.int(text)?;
            let n = n.to_u64().filter(|&n| n >= 2).ok_or_else(|| {
                CliError::Usage(format!("--cross-check {n} must be in [2, 2^64)"))
            })?;
            let first = first_coverage_discrepancy(level, n);
            Some(CrossCheckJson {
                n,
                consistent: first.is_none(),
                first_discrepancy: first,
            })
        }
        None => None,
    };
    let report = coverage_with_sample(level, sample);
    let ok = report.is_partition() && cross.as_ref().is_none_or(|c| c.consistent);
    let j = CoverageJson::new(&report, cross);
    match ctx.format {
        OutputFormat::Json => ctx.json(&j)?,
        OutputFormat::Csv => {
            writeln!(
                ctx.out,
                "level,covered_residues,total_residues,uncovered_residues"
            )?;
            writeln!(
                ctx.out,
                "{},{},{},{}",
                j.level, j.covered_residues, j.total_residues, j.uncovered_residues
            )?;
        }
        OutputFormat::Text => {
            writeln!(ctx.out, "level: {}", j.level)?;
            writeln!(
                ctx.out,
                "covered: {} of {} ({:.6})",
                j.covered_residues,
                j.total_residues,
                report.covered_fraction()
            )?;
            let sample: Vec<String> = j.uncovered_sample.iter().map(ToString::to_string).collect();
            writeln!(ctx.out, "uncovered sample: {}", sample.join(" "))?;
            if let Some(c) = &j.cross_check {
                writeln!(ctx.out, "cross-check up to {}: {}", c.n, c.consistent)?;
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}
