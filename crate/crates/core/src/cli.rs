//! Command-line front end: `mine`, `update`, `diff`, `sweep`, `gen`.
//!
//! Exit codes: 0 success, 2 usage, 3 data, 4 I/O.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diffmetric::{distance, symmetric_difference, PatternKeySet};
use crate::error::{Error, Result};
use crate::generator::{generate, EmbeddedPattern, GenConfig};
use crate::ius::{ius_update_with_stats, UpdateInput};
use crate::miner::{mine_with_cost, MiningParams, Threshold};
use crate::occurrence::CountParams;
use crate::pattern_file::PatternFile;
use crate::stream_model::{parse_event_log, Alphabet, StreamQueue, ViewWindow};
use crate::tpd::{
    curve_csv, recommend, recommendation_text, run_sweep, SweepConfig, TimingMode,
    NO_RECOMMENDATION,
};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "streamseq",
    about = "Sequential patterns over event streams",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine frequent sequences and negative border of a window.
    Mine(MineArgs),
    /// Incrementally update a pattern file with the next block of the log.
    Update(UpdateArgs),
    /// Distance between the frequent sections of two pattern files.
    Diff(DiffArgs),
    /// Sweep increment sizes and recommend an update ratio.
    Sweep(SweepArgs),
    /// Generate a synthetic event log.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub min_supp: String,
    #[arg(long)]
    pub min_nbd_supp: String,
    #[arg(long)]
    pub span: usize,
    #[arg(long)]
    pub max_len: Option<usize>,
}

impl ThresholdArgs {
    pub fn params(&self) -> Result<MiningParams> {
        MiningParams::new(
            self.min_supp.parse::<Threshold>()?,
            self.min_nbd_supp.parse::<Threshold>()?,
            CountParams::new(self.span)?,
            self.max_len,
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    /// Window size in tuples (one block).
    #[arg(long, conflicts_with = "blocks", required_unless_present = "blocks")]
    pub size: Option<usize>,
    /// Consecutive block sizes, counted without cross-block occurrences.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Option<Vec<usize>>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub old: PathBuf,
    #[arg(long)]
    pub log: PathBuf,
    /// Start of the increment; defaults to the end of the old window.
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long)]
    pub size: usize,
    /// Optional thresholds; when given they must match the old file.
    #[arg(long)]
    pub min_supp: Option<String>,
    #[arg(long)]
    pub min_nbd_supp: Option<String>,
    #[arg(long)]
    pub span: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DiffArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Compare frequent and border sections together.
    #[arg(long)]
    pub with_border: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Timing {
    Cost,
    Wall,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub initial: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<usize>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long, value_enum, default_value_t = Timing::Cost)]
    pub timing: Timing,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(long)]
    pub out_csv: PathBuf,
    #[arg(long)]
    pub out_rec: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 194)]
    pub types: usize,
    #[arg(long, default_value_t = 100_000)]
    pub events: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub fill: f64,
    /// Embedded pattern `i,j,k@rate` (type indices, rate per 1000 tuples).
    #[arg(long = "embed")]
    pub embed: Vec<String>,
    #[arg(long)]
    pub drift_at: Option<usize>,
    /// Pattern active after `--drift-at`, same syntax as `--embed`.
    #[arg(long = "drift-embed")]
    pub drift_embed: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_embedded(text: &str) -> Result<EmbeddedPattern> {
    let bad = || Error::Param(format!("bad pattern {text:?}, expected i,j,k@rate"));
    let (items, rate) = text.split_once('@').ok_or_else(bad)?;
    let items = items
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    let rate: f64 = rate.trim().parse().map_err(|_| bad())?;
    Ok(EmbeddedPattern::new(items, rate))
}

impl GenArgs {
    pub fn config(&self) -> Result<GenConfig> {
        let mut cfg = GenConfig::new(self.types, self.events, self.seed);
        cfg.tuple_fill = self.fill;
        cfg.embedded = self
            .embed
            .iter()
            .map(|s| parse_embedded(s))
            .collect::<Result<_>>()?;
        cfg.drift_at = self.drift_at;
        cfg.drift_embedded = self
            .drift_embed
            .iter()
            .map(|s| parse_embedded(s))
            .collect::<Result<_>>()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Param(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses arguments, runs the command, prints diagnostics, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("streamseq: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one command and returns the text it prints on success.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Mine(a) => cmd_mine(a),
        Command::Update(a) => cmd_update(a),
        Command::Diff(a) => cmd_diff(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn read_log(path: &Path) -> Result<StreamQueue> {
    parse_event_log(&fs::read_to_string(path)?)
}

fn read_pattern_file(path: &Path) -> Result<PatternFile> {
    PatternFile::parse(&fs::read_to_string(path)?)
}

fn blocks_from<'q>(
    queue: &'q StreamQueue,
    start: usize,
    sizes: &[usize],
) -> Result<Vec<ViewWindow<'q>>> {
    let mut at = start;
    sizes
        .iter()
        .map(|&size| {
            let w = queue.window(at, size)?;
            at += size;
            Ok(w)
        })
        .collect()
}

pub fn cmd_mine(a: &MineArgs) -> Result<String> {
    let params = a.thresholds.params()?;
    let queue = read_log(&a.log)?;
    let sizes = match (&a.blocks, a.size) {
        (Some(b), _) => b.clone(),
        (None, Some(s)) => vec![s],
        (None, None) => return Err(Error::Param("either --size or --blocks is required".into())),
    };
    let blocks = blocks_from(&queue, a.start, &sizes)?;
    let (set, cost) = mine_with_cost(&blocks, &params)?;
    fs::write(
        &a.out,
        PatternFile::from_pattern_set(&set, queue.alphabet()).to_string(),
    )?;
    Ok(format!(
        "frequent={} border={} window_size={} cost={}\n",
        set.frequent.len(),
        set.border.len(),
        set.window_size,
        cost.total()
    ))
}

pub fn cmd_update(a: &UpdateArgs) -> Result<String> {
    let old_file = read_pattern_file(&a.old)?;
    let params = old_file.params;
    if let Some(s) = &a.min_supp {
        check_same("min_supp", s.parse::<Threshold>()?, params.min_supp)?;
    }
    if let Some(s) = &a.min_nbd_supp {
        check_same("min_nbd_supp", s.parse::<Threshold>()?, params.min_nbd_supp)?;
    }
    if let Some(s) = a.span {
        check_same("span", s, params.span())?;
    }

    let queue = read_log(&a.log)?;
    let old = old_file.to_pattern_set(queue.alphabet())?;
    let old_blocks = old
        .blocks
        .iter()
        .map(|b| queue.window(b.start, b.size))
        .collect::<Result<Vec<_>>>()?;
    let old_end = old.blocks.last().map_or(0, |b| b.end());
    let start = a.start.unwrap_or(old_end);
    let delta_blocks = [queue.window(start, a.size)?];
    let (delta, _) = mine_with_cost(&delta_blocks, &params)?;
    let (updated, stats) = ius_update_with_stats(&UpdateInput {
        old: &old,
        delta: &delta,
        old_blocks: &old_blocks,
        delta_blocks: &delta_blocks,
        params,
    })?;
    fs::write(
        &a.out,
        PatternFile::from_pattern_set(&updated, queue.alphabet()).to_string(),
    )?;
    Ok(format!(
        "frequent={} border={} window_size={} cost={} rescans_old={} rescans_delta={}\n",
        updated.frequent.len(),
        updated.border.len(),
        updated.window_size,
        stats.cost.total(),
        stats.rescans_old,
        stats.rescans_delta
    ))
}

fn check_same<T: PartialEq + std::fmt::Display>(name: &str, given: T, stored: T) -> Result<()> {
    if given != stored {
        return Err(Error::Incompatible(format!(
            "--{name} {given} does not match the stored value {stored}"
        )));
    }
    Ok(())
}

pub fn cmd_diff(a: &DiffArgs) -> Result<String> {
    let mut alphabet = Alphabet::new();
    let fa = read_pattern_file(&a.a)?.to_pattern_set_interning(&mut alphabet)?;
    let fb = read_pattern_file(&a.b)?.to_pattern_set_interning(&mut alphabet)?;
    let keys = |s| {
        if a.with_border {
            PatternKeySet::with_border(s)
        } else {
            PatternKeySet::frequent(s)
        }
    };
    let (ka, kb) = (keys(&fa), keys(&fb));
    let d = distance(&ka, &kb);
    let sym = symmetric_difference(&ka, &kb);
    let mut out = format!("distance={d}\nsym_diff={}\nunion={}\n", d.sym_diff, d.union);
    for s in sym.keys() {
        let side = if ka.keys().contains(s) { "-" } else { "+" };
        out.push_str(&format!("{side} {}\n", s.display(&alphabet)));
    }
    Ok(out)
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let params = a.thresholds.params()?;
    let queue = read_log(&a.log)?;
    let threads = rayon::current_num_threads();
    if a.timing == Timing::Wall && threads > 1 {
        eprintln!(
            "streamseq: warning: wall-clock timings use {threads} counting threads; \
             set RAYON_NUM_THREADS=1 for single-threaded figures"
        );
    }
    let cfg = SweepConfig {
        initial_size: a.initial,
        delta_sizes: a.deltas.clone(),
        params,
        timing: match a.timing {
            Timing::Cost => TimingMode::CostUnits,
            Timing::Wall => TimingMode::WallClock,
        },
        repetitions: a.repetitions,
    };
    let points = run_sweep(&queue, &cfg)?;
    fs::write(&a.out_csv, curve_csv(&points)?)?;
    if points.len() < 2 {
        fs::write(&a.out_rec, NO_RECOMMENDATION)?;
        return Ok("fewer than two sweep points, no recommendation\n".into());
    }
    let rec = recommend(&points, a.initial)?;
    fs::write(&a.out_rec, recommendation_text(&rec))?;
    let mut out = String::new();
    match (rec.degenerate, rec.ratio) {
        (true, _) => out.push_str("degenerate sweep: flat speedup or difference curve\n"),
        (false, Some(r)) => out.push_str(&format!("ratio={r:.6}\n")),
        (false, None) => out.push_str("no crossing\n"),
    }
    Ok(out)
}

pub fn cmd_gen(a: &GenArgs) -> Result<String> {
    let cfg = a.config()?;
    let queue = generate(&cfg)?;
    fs::write(&a.out, queue.to_event_log())?;
    Ok(format!(
        "tuples={} events={}\n",
        queue.len(),
        queue.event_count()
    ))
}
