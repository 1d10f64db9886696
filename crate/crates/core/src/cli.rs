//! The `homfly` command line.
//!
//! Exit codes: 0 success, 2 bad input or parameters, 3 width budget
//! exceeded, 4 disagreement between algorithms or with an expected value.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::fpt::{homfly_fpt_with_stats, plan, DpStats, FptError, FptOptions, DEFAULT_WIDTH_BUDGET};
use crate::kauffman::{homfly_kauffman_with, ArcOrder, KauffmanError, KauffmanStats};
use crate::link::{parse_pd, random_braid_diagram, DiagramFile, LinkDiagram, LinkError};
use crate::poly::BiLaurent;
use crate::treewidth::Heuristic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

/// Inputs at or below this many crossings default to running both algorithms.
pub const BOTH_BY_DEFAULT_UP_TO: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "homfly", version, about = "Exact HOMFLY-PT polynomials of oriented link diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the polynomial of one diagram.
    Compute(ComputeArgs),
    /// Write random braid-closure diagrams as JSON files.
    Gen(GenArgs),
    /// Run both algorithms over a directory of diagrams.
    Verify(VerifyArgs),
    /// Report the tree decomposition used by the dynamic program.
    TdStats(TdStatsArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Kauffman,
    Fpt,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Pd,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicArg {
    #[default]
    MinDegree,
    MinFill,
}

impl From<HeuristicArg> for Heuristic {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::MinDegree => Heuristic::MinDegree,
            HeuristicArg::MinFill => Heuristic::MinFill,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t)]
    pub heuristic: HeuristicArg,
    #[arg(long, default_value_t = DEFAULT_WIDTH_BUDGET)]
    pub width_budget: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Args, Debug, Clone)]
pub struct ComputeArgs {
    /// Diagram file, `-` for standard input, or an inline PD or JSON code.
    pub input: String,
    /// Defaults to `both` up to 12 crossings and `fpt` above.
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    /// Defaults to the file extension, then to sniffing the content.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long)]
    pub stats: bool,
    /// Picks a random Kauffman arc order and a random tree-based order.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long)]
    pub strands: usize,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub corpus: PathBuf,
    /// Skip diagrams with more crossings than this.
    #[arg(long)]
    pub max_crossings: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TdStatsArgs {
    pub input: String,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long, value_enum, default_value_t)]
    pub heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

/// `Display` of an error prefixed with its variant name, so scripts can match
/// on the kind.
fn describe<E: std::fmt::Debug + std::fmt::Display>(e: &E) -> String {
    let dbg = format!("{e:?}");
    let kind: String = dbg.chars().take_while(|c| c.is_alphanumeric()).collect();
    format!("{kind}: {e}")
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        Failure::input(describe(&e))
    }
}

impl From<FptError> for Failure {
    fn from(e: FptError) -> Self {
        let code = match e {
            FptError::WidthBudgetExceeded { .. } => EXIT_BUDGET,
            FptError::NoComponents => EXIT_INPUT,
            _ => 1,
        };
        Failure { code, message: describe(&e) }
    }
}

impl From<KauffmanError> for Failure {
    fn from(e: KauffmanError) -> Self {
        let code = if e == KauffmanError::NoComponents { EXIT_INPUT } else { 1 };
        Failure { code, message: describe(&e) }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::TdStats(a) => cmd_td_stats(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_input(input: &str) -> Result<(String, Option<InputFormat>), Failure> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("stdin: {e}")))?;
        return Ok((s, None));
    }
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{input}: {e}")))?;
        return Ok((text, format_from_extension(path)));
    }
    let t = input.trim_start();
    if t.starts_with('{') || t.starts_with("PD") || t.starts_with('X') || t.starts_with('[') {
        return Ok((input.to_string(), None));
    }
    Err(Failure::input(format!("{input}: no such file")))
}

fn format_from_extension(path: &Path) -> Option<InputFormat> {
    match path.extension()?.to_str()? {
        "json" => Some(InputFormat::Json),
        "pd" | "txt" => Some(InputFormat::Pd),
        _ => None,
    }
}

/// Parses a diagram and, for JSON, its optional expected polynomial.
fn parse_diagram(text: &str, format: Option<InputFormat>) -> Result<(LinkDiagram, Option<BiLaurent>), Failure> {
    if text.trim().is_empty() {
        return Err(Failure::input("empty input"));
    }
    let format = format.unwrap_or(if text.trim_start().starts_with('{') { InputFormat::Json } else { InputFormat::Pd });
    match format {
        InputFormat::Pd => Ok((parse_pd(text)?, None)),
        InputFormat::Json => {
            let file = DiagramFile::parse(text)?;
            let expected = match &file.homfly {
                Some(v) => Some(BiLaurent::from_json(v).map_err(|e| Failure::input(format!("expected homfly: {e}")))?),
                None => None,
            };
            Ok((file.to_diagram()?, expected))
        }
    }
}

fn fpt_options(engine: &EngineArgs, seed: Option<u64>) -> FptOptions {
    FptOptions {
        heuristic: engine.heuristic.into(),
        order_seed: seed,
        width_budget: engine.width_budget,
        threads: engine.threads as usize,
        validate_tables: false,
        ..FptOptions::default()
    }
}

fn run_kauffman(d: &LinkDiagram, seed: Option<u64>, threads: u32) -> Result<(BiLaurent, KauffmanStats, f64), Failure> {
    let order = match seed {
        Some(s) => ArcOrder::random(d.arc_count(), s),
        None => ArcOrder::natural(d.arc_count()),
    };
    let start = Instant::now();
    let (p, stats) = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
        pool.install(|| homfly_kauffman_with(d, &order, true))?
    } else {
        homfly_kauffman_with(d, &order, false)?
    };
    Ok((p, stats, start.elapsed().as_secs_f64() * 1e3))
}

fn stats_json(fpt: Option<&DpStats>, kauffman: Option<(&KauffmanStats, f64)>) -> Value {
    let wall = fpt.map(|s| s.wall_ms).unwrap_or(0.0) + kauffman.map(|k| k.1).unwrap_or(0.0);
    json!({
        "width": fpt.map(|s| s.width),
        "bags": fpt.map(|s| s.bags),
        "peak_configs": fpt.map(|s| s.peak_configs),
        "total_configs": fpt.map(|s| s.total_configs),
        "leaves_visited": kauffman.map(|k| k.0.leaves),
        "wall_ms": wall,
    })
}

struct Outcome {
    polynomial: BiLaurent,
    fpt: Option<DpStats>,
    kauffman: Option<(KauffmanStats, f64)>,
}

fn compute(d: &LinkDiagram, algorithm: Algorithm, seed: Option<u64>, engine: &EngineArgs) -> Result<Outcome, Failure> {
    let fpt = match algorithm {
        Algorithm::Kauffman => None,
        _ => Some(homfly_fpt_with_stats(d, &fpt_options(engine, seed))?),
    };
    let kauffman = match algorithm {
        Algorithm::Fpt => None,
        _ => Some(run_kauffman(d, seed, engine.threads)?),
    };
    if let (Some((p, _)), Some((q, _, _))) = (&fpt, &kauffman) {
        if p != q {
            return Err(Failure {
                code: EXIT_DISAGREE,
                message: format!("algorithms disagree\n  fpt:      {p}\n  kauffman: {q}"),
            });
        }
    }
    let polynomial = match (&fpt, &kauffman) {
        (Some((p, _)), _) => p.clone(),
        (None, Some((q, _, _))) => q.clone(),
        (None, None) => unreachable!("at least one algorithm runs"),
    };
    Ok(Outcome { polynomial, fpt: fpt.map(|f| f.1), kauffman: kauffman.map(|(_, s, ms)| (s, ms)) })
}

fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Kauffman => "kauffman",
        Algorithm::Fpt => "fpt",
        Algorithm::Both => "both",
    }
}

fn cmd_compute(a: &ComputeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (text, sniffed) = read_input(&a.input)?;
    let (d, expected) = parse_diagram(&text, a.format.or(sniffed))?;
    let algorithm = a.algorithm.unwrap_or(if d.crossing_count() <= BOTH_BY_DEFAULT_UP_TO {
        Algorithm::Both
    } else {
        Algorithm::Fpt
    });
    let o = compute(&d, algorithm, a.seed, &a.engine)?;
    let stats = stats_json(o.fpt.as_ref(), o.kauffman.as_ref().map(|(s, ms)| (s, *ms)));
    let mismatch = expected.as_ref().is_some_and(|e| *e != o.polynomial);
    match a.engine.output {
        OutputFormat::Human => {
            writeln!(out, "{}", o.polynomial).ok();
            if a.stats {
                writeln!(out, "{stats}").ok();
            }
        }
        OutputFormat::Json => {
            let mut v = json!({
                "algorithm": algorithm_name(algorithm),
                "crossings": d.crossing_count(),
                "rendered": o.polynomial.render(),
                "homfly": o.polynomial.to_json(),
            });
            if a.stats {
                v["stats"] = stats;
            }
            writeln!(out, "{v}").ok();
        }
    }
    if mismatch {
        let e = expected.expect("checked above");
        return Err(Failure {
            code: EXIT_DISAGREE,
            message: format!("result differs from the expected value\n  computed: {}\n  expected: {e}", o.polynomial),
        });
    }
    Ok(EXIT_OK)
}

/// Seed of the `i`th diagram of a generated batch.
fn item_seed(seed: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.gen()
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.strands < 2 || a.length == 0 || a.count == 0 {
        return Err(Failure::input("need --strands >= 2, --length >= 1 and --count >= 1"));
    }
    fs::create_dir_all(&a.out).map_err(|e| Failure::input(format!("{}: {e}", a.out.display())))?;
    for i in 0..a.count {
        let d = random_braid_diagram(a.strands, a.length, item_seed(a.seed, i))?;
        let name = format!("braid_s{}_l{}_seed{}_{:04}.json", a.strands, a.length, a.seed, i);
        let path = a.out.join(name);
        let mut text = d.to_json_string();
        text.push('\n');
        fs::write(&path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        writeln!(out, "{}", path.display()).ok();
    }
    Ok(EXIT_OK)
}

enum FileResult {
    Equal { crossings: usize, rendered: String, checked_expected: bool },
    Skipped { crossings: usize },
    Unequal { message: String },
    Failed { code: i32, message: String },
}

fn verify_file(path: &Path, max: Option<usize>, engine: &EngineArgs) -> FileResult {
    let run = || -> Result<FileResult, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(e.to_string()))?;
        let (d, expected) = parse_diagram(&text, format_from_extension(path))?;
        if max.is_some_and(|m| d.crossing_count() > m) {
            return Ok(FileResult::Skipped { crossings: d.crossing_count() });
        }
        let o = match compute(&d, Algorithm::Both, None, engine) {
            Err(f) if f.code == EXIT_DISAGREE => return Ok(FileResult::Unequal { message: f.message }),
            r => r?,
        };
        if let Some(e) = &expected {
            if *e != o.polynomial {
                return Ok(FileResult::Unequal {
                    message: format!("expected value differs\n  computed: {}\n  expected: {e}", o.polynomial),
                });
            }
        }
        Ok(FileResult::Equal {
            crossings: d.crossing_count(),
            rendered: o.polynomial.render(),
            checked_expected: expected.is_some(),
        })
    };
    run().unwrap_or_else(|f| FileResult::Failed { code: f.code, message: f.message })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let entries = fs::read_dir(&a.corpus).map_err(|e| Failure::input(format!("{}: {e}", a.corpus.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && format_from_extension(p).is_some())
        .collect();
    files.sort();
    // one diagram per worker; each run is sequential inside
    let per_file = EngineArgs { threads: 1, ..a.engine.clone() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.engine.threads as usize)
        .build()
        .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    let results: Vec<FileResult> =
        pool.install(|| files.par_iter().map(|p| verify_file(p, a.max_crossings, &per_file)).collect());

    let name = |p: &PathBuf| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let (mut checked, mut skipped, mut with_expected) = (0usize, 0usize, 0usize);
    let mut first_bad: Option<(i32, String)> = None;
    let mut report = Vec::new();
    for (p, r) in files.iter().zip(&results) {
        let n = name(p);
        let (status, detail) = match r {
            FileResult::Equal { crossings, rendered, checked_expected } => {
                checked += 1;
                with_expected += usize::from(*checked_expected);
                ("equal", json!({ "crossings": crossings, "rendered": rendered }))
            }
            FileResult::Skipped { crossings } => {
                skipped += 1;
                ("skipped", json!({ "crossings": crossings }))
            }
            FileResult::Unequal { message } => {
                checked += 1;
                first_bad.get_or_insert((EXIT_DISAGREE, format!("{n}: {message}")));
                ("unequal", json!({ "message": message }))
            }
            FileResult::Failed { code, message } => {
                first_bad.get_or_insert((*code, format!("{n}: {message}")));
                ("error", json!({ "message": message }))
            }
        };
        if a.engine.output == OutputFormat::Human {
            writeln!(out, "{status:8} {n}").ok();
        }
        let mut entry = json!({ "file": n, "status": status });
        entry.as_object_mut().expect("object").extend(detail.as_object().expect("object").clone());
        report.push(entry);
    }
    if a.engine.output == OutputFormat::Json {
        let v = json!({
            "checked": checked,
            "skipped": skipped,
            "with_expected": with_expected,
            "all_equal": first_bad.is_none(),
            "files": report,
        });
        writeln!(out, "{v}").ok();
    } else {
        writeln!(out, "{checked} checked, {skipped} skipped, {with_expected} against expected values").ok();
    }
    if checked == 0 && first_bad.is_none() {
        writeln!(err, "warning: 0 checked").ok();
    }
    match first_bad {
        None => Ok(EXIT_OK),
        Some((code, message)) => Err(Failure { code, message }),
    }
}

fn cmd_td_stats(a: &TdStatsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (text, sniffed) = read_input(&a.input)?;
    let (d, _) = parse_diagram(&text, a.format.or(sniffed))?;
    let p = plan(&d, a.heuristic.into())?;
    let summary = match &p.decomposition {
        None => json!({
            "crossings": d.crossing_count(),
            "stripped_crossings": 0,
            "twists_removed": p.twists_removed,
            "width": -1,
        }),
        Some((td, ntd)) => json!({
            "crossings": d.crossing_count(),
            "stripped_crossings": p.diagram.crossing_count(),
            "twists_removed": p.twists_removed,
            "width": ntd.width(),
            "bags": td.bags.len(),
            "nice_nodes": ntd.len(),
            "max_bag": ntd.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0),
        }),
    };
    match a.output {
        OutputFormat::Human => {
            for (k, v) in summary.as_object().expect("object") {
                writeln!(out, "{k}: {v}").ok();
            }
        }
        OutputFormat::Json => {
            let mut v = summary;
            if let Some((_, ntd)) = &p.decomposition {
                v["decomposition"] = ntd.to_json();
            }
            writeln!(out, "{v}").ok();
        }
    }
    Ok(EXIT_OK)
}
