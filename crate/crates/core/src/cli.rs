//! Command-line front end: argument parsing, subcommand dispatch and
//! CSV/JSON export.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::amplitude::RecordReport;
use crate::arches::{detect_arches, skeleton_u};
use crate::binomial::binomial_i64;
use crate::compare::{compare, envelope, reference_constant, scaled_fluctuation, ComparisonReport};
use crate::error::{Error, Result};
use crate::pipeline::{analyze, required_n, verify_all, Analysis, MAX_BLOCK, MAX_LEVEL};
use crate::report::{Check, Kind, Report, Status};
use crate::sequences::{
    generate_conway_perturbed, generate_qtilde, parity_split, run_q, SequenceTrack,
};
use crate::words::height_profile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Levels beyond this depth are exploratory: failed observations there are findings.
pub const TESTED_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Q~, Q and b tracks as (n, value, value/n).
    Seq,
    /// Arch skeleton table and delta excursion data.
    Arches,
    /// Step words P_r and N_r, their heights, and gap profiles.
    Words,
    /// Dyadic block frequency tables and D_k.
    Freq,
    /// Staircase triangle, W_r, and record-claim reports.
    Amplitude,
    /// Run every verification and print a summary grid.
    Verify,
    /// Q versus Q~ comparison and fluctuation data.
    Compare,
}

/// Parity-perturbed Hofstadter sequence analysis.
#[derive(Debug, Clone, Parser)]
#[command(name = "qtilde", version, about)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Number of sequence terms (seq, compare).
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Deepest arch level.
    #[arg(long, global = true, default_value_t = 7)]
    pub r_max: usize,
    /// Deepest dyadic block.
    #[arg(long, global = true, default_value_t = 6)]
    pub k_max: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl RunConfig {
    /// Checks limits and their mutual consistency.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.r_max > MAX_LEVEL {
            return bad(format!("--r-max must be at most {MAX_LEVEL}"));
        }
        if self.k_max == 0 || self.k_max > MAX_BLOCK {
            return bad(format!("--k-max must be in 1..={MAX_BLOCK}"));
        }
        if let Some(n) = self.n_max {
            if n < 4 {
                return bad("--n-max must be at least 4".into());
            }
            if matches!(
                self.command,
                Command::Arches | Command::Words | Command::Amplitude | Command::Verify
            ) {
                let needed = required_n(self.r_max, self.k_max)?;
                if n < needed {
                    return bad(format!(
                        "--n-max {n} is too small for --r-max {} and --k-max {}; need {needed}",
                        self.r_max, self.k_max
                    ));
                }
            }
        }
        if matches!(self.command, Command::Amplitude | Command::Verify) && self.r_max == 0 {
            return bad("--r-max must be at least 1".into());
        }
        Ok(())
    }
}

fn write_note(w: &mut impl Write, note: Option<&str>) -> io::Result<()> {
    if let Some(note) = note {
        for line in note.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

/// Writes one table to `dir/stem.{csv,json}`. CSV always carries a header;
/// an optional note is emitted as leading `#` lines (CSV) or a `note` field (JSON).
pub fn write_table<T: Serialize + Default>(
    dir: &Path,
    stem: &str,
    rows: &[T],
    format: Format,
    note: Option<&str>,
) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let mut w = BufWriter::new(File::create(&path)?);
    match format {
        Format::Csv => {
            write_note(&mut w, note)?;
            let mut csv = csv::Writer::from_writer(w);
            if rows.is_empty() {
                let mut probe = csv::Writer::from_writer(Vec::new());
                probe.serialize(T::default())?;
                let bytes = probe.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                let header = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
                let mut inner = csv.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                inner.write_all(header)?;
                inner.write_all(b"\n")?;
                inner.flush()?;
            } else {
                for row in rows {
                    csv.serialize(row)?;
                }
                csv.flush()?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, T> {
                #[serde(skip_serializing_if = "Option::is_none")]
                note: Option<&'a str>,
                rows: &'a [T],
            }
            serde_json::to_writer_pretty(&mut w, &Doc { note, rows })?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(path)
}

#[derive(Debug, Default, Serialize)]
struct SeqRow {
    n: usize,
    value: i64,
    ratio: f64,
}

fn seq_rows(track: &SequenceTrack) -> Vec<SeqRow> {
    (1..=track.len())
        .map(|n| SeqRow {
            n,
            value: track.at(n),
            ratio: track.at(n) as f64 / n as f64,
        })
        .collect()
}

fn run_seq(cfg: &RunConfig) -> Result<i32> {
    let n = cfg.n_max.unwrap_or(10_000);
    let qt = generate_qtilde(n)?;
    write_table(
        &cfg.out,
        &format!("seq_qtilde_n{n}"),
        &seq_rows(&qt),
        cfg.format,
        None,
    )?;
    let q = run_q(n)?;
    let note = q
        .death
        .map(|d| format!("Q is undefined at n={d}; track truncated at n={}", d - 1));
    if let Some(note) = &note {
        eprintln!("warning: {note}");
    }
    write_table(
        &cfg.out,
        &format!("seq_q_n{n}"),
        &seq_rows(&q.track),
        cfg.format,
        note.as_deref(),
    )?;
    let b = generate_conway_perturbed(n)?;
    write_table(
        &cfg.out,
        &format!("seq_b_n{n}"),
        &seq_rows(&b),
        cfg.format,
        None,
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Default, Serialize)]
struct SkeletonRow {
    r: usize,
    a: i64,
    u: i64,
    v: i64,
    two_a: i64,
    v_plus: i64,
    v_minus: i64,
}

#[derive(Debug, Default, Serialize)]
struct DeltaRow {
    m: usize,
    delta: i64,
    r: usize,
    arch: &'static str,
}

fn run_arches(cfg: &RunConfig) -> Result<i32> {
    let r_max = cfg.r_max;
    let n = cfg
        .n_max
        .unwrap_or(2 * (skeleton_u(r_max + 1)? as usize + 1));
    let tracks = parity_split(&generate_qtilde(n)?)?;
    let arches = detect_arches(&tracks, r_max)?;
    let rows: Vec<SkeletonRow> = arches
        .iter()
        .map(|a| SkeletonRow {
            r: a.r,
            a: a.a,
            u: a.u,
            v: a.v,
            two_a: 2 * a.a,
            v_plus: a.v_plus.unwrap_or_default(),
            v_minus: a.v_minus.unwrap_or_default(),
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("skeleton_r0-{r_max}"),
        &rows,
        cfg.format,
        None,
    )?;
    let mut delta = Vec::new();
    for a in &arches {
        for m in a.u as usize..a.u_next as usize {
            delta.push(DeltaRow {
                m,
                delta: tracks.delta.at(m),
                r: a.r,
                arch: if (m as i64) < a.v {
                    "positive"
                } else {
                    "negative"
                },
            });
        }
    }
    write_table(
        &cfg.out,
        &format!("delta_r0-{r_max}"),
        &delta,
        cfg.format,
        None,
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Default, Serialize)]
struct WordRow {
    r: usize,
    word: &'static str,
    length: usize,
    bits: String,
}

#[derive(Debug, Default, Serialize)]
struct HeightRow {
    r: usize,
    word: &'static str,
    t: usize,
    h: i64,
}

#[derive(Debug, Default, Serialize)]
struct GapRow {
    r: usize,
    j: usize,
    gap: i64,
    excess: i64,
}

fn run_words(cfg: &RunConfig, an: &Analysis) -> Result<i32> {
    let r_max = cfg.r_max;
    let mut words = Vec::new();
    let mut heights = Vec::new();
    let mut gaps = Vec::new();
    for lv in &an.levels {
        for (name, w) in [("P", &lv.p), ("N", &lv.n)] {
            words.push(WordRow {
                r: lv.r,
                word: name,
                length: w.len(),
                bits: w.to_string(),
            });
            heights.extend(
                height_profile(w)
                    .into_iter()
                    .enumerate()
                    .map(|(t, h)| HeightRow {
                        r: lv.r,
                        word: name,
                        t,
                        h,
                    }),
            );
        }
        gaps.extend(lv.gap.gaps.iter().zip(&lv.gap.excess).enumerate().map(
            |(j, (&gap, &excess))| GapRow {
                r: lv.r,
                j,
                gap,
                excess,
            },
        ));
    }
    write_table(
        &cfg.out,
        &format!("words_r0-{r_max}"),
        &words,
        cfg.format,
        None,
    )?;
    write_table(
        &cfg.out,
        &format!("heights_r0-{r_max}"),
        &heights,
        cfg.format,
        None,
    )?;
    write_table(
        &cfg.out,
        &format!("gaps_r0-{r_max}"),
        &gaps,
        cfg.format,
        None,
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Default, Serialize)]
struct BlockRow {
    k: usize,
    r: usize,
    a: i64,
    b: i64,
    #[serde(rename = "S")]
    s: i64,
    #[serde(rename = "Delta")]
    delta: i64,
}

#[derive(Debug, Default, Serialize)]
struct BlockSummaryRow {
    k: usize,
    #[serde(rename = "D_k")]
    d_k: i64,
    #[serde(rename = "M_k")]
    m_k: i64,
    #[serde(rename = "C(2k+2,k+1)")]
    binom: i64,
}

fn run_freq(cfg: &RunConfig, an: &Analysis) -> Result<i32> {
    let k_max = cfg.k_max;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for blk in &an.blocks {
        for r in 1..=blk.max_multiplicity() {
            rows.push(BlockRow {
                k: blk.k,
                r,
                a: blk.a(r),
                b: blk.b(r),
                s: blk.s(r),
                delta: blk.delta(r),
            });
        }
        summary.push(BlockSummaryRow {
            k: blk.k,
            d_k: blk.d_k,
            m_k: blk.m_k,
            binom: binomial_i64(2 * blk.k as u64 + 2, blk.k as u64 + 1),
        });
    }
    write_table(
        &cfg.out,
        &format!("blocks_k0-{k_max}"),
        &rows,
        cfg.format,
        None,
    )?;
    write_table(
        &cfg.out,
        &format!("blocks_summary_k0-{k_max}"),
        &summary,
        cfg.format,
        None,
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Default, Serialize)]
struct StaircaseCsvRow {
    r: usize,
    l: usize,
    c: i64,
}

#[derive(Debug, Default, Serialize)]
struct AmplitudeRow {
    r: usize,
    v_plus: i64,
    tau: usize,
    #[serde(rename = "W_r")]
    w_r: Option<i64>,
    #[serde(rename = "C(2r+1,r)")]
    binom: i64,
}

/// Conditional labels attached to a record report at level r.
fn conditional_flags(an: &Analysis, r: usize) -> Vec<String> {
    let mut flags = Vec::new();
    if !(0..r).all(|s| an.hypothesis(s)) {
        flags.push("W_r conditional".to_string());
    }
    if !an.hypothesis(r) {
        flags.push(format!("W_{} conditional", r + 1));
    }
    flags
}

fn run_amplitude(cfg: &RunConfig, an: &Analysis) -> Result<i32> {
    let r_max = cfg.r_max;
    let mut stair = Vec::new();
    for lv in an.levels.iter().filter(|l| l.r >= 1) {
        stair.extend((1..=lv.staircase.c.len()).map(|l| StaircaseCsvRow {
            r: lv.r,
            l,
            c: lv.staircase.c(l),
        }));
    }
    write_table(
        &cfg.out,
        &format!("staircase_r1-{r_max}"),
        &stair,
        cfg.format,
        None,
    )?;
    let amps: Vec<AmplitudeRow> = an
        .levels
        .iter()
        .map(|lv| {
            let v = an.arches[lv.r].v_plus.unwrap_or_default();
            AmplitudeRow {
                r: lv.r,
                v_plus: v,
                tau: lv.staircase.tau,
                w_r: (lv.r >= 1).then(|| v - an.arches[lv.r - 1].v_plus.unwrap_or_default()),
                binom: binomial_i64(2 * lv.r as u64 + 1, lv.r as u64),
            }
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("amplitudes_r0-{r_max}"),
        &amps,
        cfg.format,
        None,
    )?;
    write_records(&cfg.out, an)?;
    Ok(EXIT_OK)
}

fn write_records(dir: &Path, an: &Analysis) -> Result<PathBuf> {
    let exports: Vec<_> = an
        .records
        .iter()
        .map(|rec: &RecordReport| rec.to_export(conditional_flags(an, rec.r)))
        .collect();
    let last = an.records.len().saturating_sub(1);
    let path = dir.join(format!("records_r0-{last}.json"));
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, &exports)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

/// Identity x level grid with one cell per check.
pub fn summary_grid(rep: &Report) -> String {
    let mut order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, i64), Status> = BTreeMap::new();
    let mut levels: Vec<i64> = Vec::new();
    for c in &rep.checks {
        if c.kind == Kind::Info {
            continue;
        }
        if !order.contains(&c.identity.as_str()) {
            order.push(&c.identity);
        }
        if !levels.contains(&c.level) {
            levels.push(c.level);
        }
        let cell = cells
            .entry((c.identity.as_str(), c.level))
            .or_insert(c.status);
        if c.status == Status::Fail {
            *cell = Status::Fail;
        }
    }
    levels.sort_unstable();
    let width = order.iter().map(|s| s.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:width$}", "identity");
    for l in &levels {
        out.push_str(&format!(" {l:>4}"));
    }
    out.push('\n');
    for id in &order {
        out.push_str(&format!("{id:width$}"));
        for l in &levels {
            let mark = match cells.get(&(*id, *l)) {
                Some(Status::Pass) => "ok",
                Some(Status::Fail) => "FAIL",
                Some(Status::Conditional) => "cond",
                Some(Status::Info) | None => ".",
            };
            out.push_str(&format!(" {mark:>4}"));
        }
        out.push('\n');
    }
    out
}

fn run_verify(cfg: &RunConfig, an: &Analysis) -> Result<i32> {
    let rep = verify_all(an)?;
    print!("{}", summary_grid(&rep));
    let proved: Vec<&Check> = rep.proved_failures().collect();
    for c in rep.failures().filter(|c| c.kind == Kind::Observed) {
        let scope = if c.level as usize > TESTED_DEPTH {
            "finding"
        } else {
            "warning"
        };
        eprintln!(
            "{scope}: observation {} fails at level {}: {}",
            c.identity, c.level, c.detail
        );
    }
    for c in &proved {
        eprintln!(
            "error: identity {} fails at level {}: {}",
            c.identity, c.level, c.detail
        );
    }
    let stem = format!("verify_r{}_k{}", cfg.r_max, cfg.k_max);
    write_table(&cfg.out, &stem, &rep.checks, cfg.format, None)?;
    println!(
        "{} checks, {} failed ({} proved)",
        rep.checks.len(),
        rep.failures().count(),
        proved.len()
    );
    Ok(if proved.is_empty() {
        EXIT_OK
    } else {
        EXIT_IDENTITY_FAILED
    })
}

#[derive(Debug, Default, Serialize)]
struct RatioRow {
    n: usize,
    q_over_n: Option<f64>,
    qtilde_over_n: f64,
}

#[derive(Debug, Default, Serialize)]
struct DiffRow {
    n: usize,
    q_minus_qtilde: Option<i64>,
    #[serde(rename = "envelope_0.70n_over_sqrt_ln_n")]
    envelope: f64,
}

#[derive(Debug, Default, Serialize)]
struct FluctuationRow {
    n: usize,
    #[serde(rename = "abs_qtilde_over_n_minus_half_times_sqrt_log2_n")]
    scaled: f64,
    #[serde(rename = "reference_1_over_3sqrt2pi")]
    reference: f64,
}

#[derive(Debug, Default, Serialize)]
struct CompareSummaryRow {
    r: usize,
    n_lo: usize,
    n_hi: usize,
    v_plus: i64,
    max_abs_diff: Option<i64>,
    ratio: Option<f64>,
    #[serde(rename = "envelope_peak_log2")]
    envelope_peak: f64,
    envelope_peak_n: usize,
}

/// Runs the comparison on n_max terms, using every arch period they cover.
pub fn comparison(
    n_max: usize,
) -> Result<(SequenceTrack, crate::sequences::QRun, ComparisonReport)> {
    let n = n_max - n_max % 2;
    let qt = generate_qtilde(n)?;
    let tracks = parity_split(&qt)?;
    let mut r_top = 0;
    while skeleton_u(r_top + 2)? as usize <= tracks.m_max() {
        r_top += 1;
    }
    let arches = detect_arches(&tracks, r_top)?;
    let q = run_q(n)?;
    let report = compare(&qt, &q, &arches);
    Ok((qt, q, report))
}

fn run_compare(cfg: &RunConfig) -> Result<i32> {
    let n_max = cfg.n_max.unwrap_or(200_000);
    let (qt, q, report) = comparison(n_max)?;
    let n = qt.len();
    let note = q.death.map(|d| {
        format!(
            "Q is undefined at n={d}; comparison truncated at n={}",
            d - 1
        )
    });
    if let Some(note) = &note {
        eprintln!("warning: {note}");
    }
    let q_at = |i: usize| q.track.get(i);
    let ratios: Vec<RatioRow> = (1..=n)
        .map(|i| RatioRow {
            n: i,
            q_over_n: q_at(i).map(|v| v as f64 / i as f64),
            qtilde_over_n: qt.at(i) as f64 / i as f64,
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("compare_ratios_n{n}"),
        &ratios,
        cfg.format,
        note.as_deref(),
    )?;
    let diffs: Vec<DiffRow> = (2..=n)
        .map(|i| DiffRow {
            n: i,
            q_minus_qtilde: q_at(i).map(|v| v - qt.at(i)),
            envelope: envelope(i),
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("compare_diff_n{n}"),
        &diffs,
        cfg.format,
        note.as_deref(),
    )?;
    let reference = reference_constant();
    let fluct: Vec<FluctuationRow> = (2..=n)
        .map(|i| FluctuationRow {
            n: i,
            scaled: scaled_fluctuation(qt.at(i), i),
            reference,
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("compare_fluctuation_n{n}"),
        &fluct,
        cfg.format,
        None,
    )?;
    let summary: Vec<CompareSummaryRow> = report
        .arches
        .iter()
        .map(|a| CompareSummaryRow {
            r: a.r,
            n_lo: a.n_lo,
            n_hi: a.n_hi,
            v_plus: a.v_plus,
            max_abs_diff: a.max_abs_diff,
            ratio: a.ratio,
            envelope_peak: a.envelope_peak,
            envelope_peak_n: a.envelope_peak_n,
        })
        .collect();
    write_table(
        &cfg.out,
        &format!("compare_summary_n{n}"),
        &summary,
        cfg.format,
        note.as_deref(),
    )?;
    Ok(EXIT_OK)
}

/// Executes a parsed configuration and returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if let Err(e) = fs::create_dir_all(&cfg.out) {
        eprintln!("error: cannot create {}: {e}", cfg.out.display());
        return EXIT_CONFIG;
    }
    let result = match cfg.command {
        Command::Seq => run_seq(cfg),
        Command::Arches => run_arches(cfg),
        Command::Compare => run_compare(cfg),
        Command::Words | Command::Freq | Command::Amplitude | Command::Verify => {
            analyze(cfg.r_max, cfg.k_max).and_then(|an| match cfg.command {
                Command::Words => run_words(cfg, &an),
                Command::Freq => run_freq(cfg, &an),
                Command::Amplitude => run_amplitude(cfg, &an),
                _ => run_verify(cfg, &an),
            })
        }
    };
    match result {
        Ok(code) => code,
        Err(e @ (Error::InvalidInput(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_IDENTITY_FAILED
        }
    }
}
