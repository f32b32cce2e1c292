//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and writes CSV (with `#` summary lines) or JSON.
//!
//! Exit status: 0 on success, 1 on a domain error (a JSON error record goes
//! to stderr), 2 on a usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::coding::{self, ContextTable, TypeTable};
use crate::conflict;
use crate::deplen;
use crate::distributions::{generate, scramble, JointSequenceModel, SequenceSource};
use crate::error::{Error, Result};
use crate::infotheory::{self, EntropyProfile, Objective, ProfileKind};
use crate::rate::{self, GammaGrid, HilbergVariant, PeriodicReading, ProfileOptions};
use crate::ring::{self, Filter, RingKernel, WordOrder, ALL_ORDERS};
use crate::rng;
use crate::transducer::CostTransducer;

#[derive(Debug, Parser)]
#[command(name = "wordorder", version, about = "Word order and information theory toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Uncertainty and predictability of the target at every placement.
    Placement(PlacementArgs),
    /// Dependency cost of every head position.
    Deplen(DeplenArgs),
    /// Dependency cost against head uncertainty.
    Conflict(ConflictArgs),
    /// The permutation ring of S, V and O.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Entropy-rate diagnostics of a token sequence.
    #[command(subcommand)]
    Rate(RateCommand),
    /// Optimal code lengths from a CSV of (type, probability[, context...]).
    Coding(CodingArgs),
    /// Generate a token sequence from a source description.
    Gen(GenArgs),
    /// Shuffle the tokens of a corpus.
    Scramble(ScrambleArgs),
}

#[derive(Debug, Args)]
struct PlacementArgs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated production order of the context roles.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Uncertainty)]
    objective: ObjectiveArg,
    /// Cost transducer: identity, square, cube, pow:<e> or exp:<base>.
    #[arg(long)]
    g: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Uncertainty,
    Predictability,
}

#[derive(Debug, Args)]
struct DeplenArgs {
    /// Sequence length (head plus dependents).
    #[arg(long)]
    m: usize,
    /// Cost transducer: identity, square, cube, pow:<e> or exp:<base>.
    #[arg(long, default_value = "identity")]
    g: String,
}

#[derive(Debug, Args)]
struct ConflictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    /// Weights of dependency cost in the mixed objective.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    lambda: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum RingCommand {
    /// Ring distance between two orders, or all 36 pairs.
    Distance {
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Adjacent orders.
    Neighbors {
        #[arg(long)]
        of: Option<String>,
    },
    /// Most likely destinations of a change of dominant order.
    Predict {
        #[arg(long)]
        from: String,
        /// Keep only ring neighbours.
        #[arg(long)]
        ring: bool,
        #[arg(long)]
        filter: Option<String>,
    },
    /// Simulate an ensemble of chains on the ring.
    Simulate {
        /// Simulation config (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare a distribution over the six orders with the reference shares.
    Compare {
        /// Six comma-separated shares in ring order SOV,SVO,VSO,VOS,OVS,OSV.
        #[arg(long, value_delimiter = ',', conflicts_with = "config")]
        distribution: Option<Vec<f64>>,
        /// Simulation config; its final-step distribution is compared.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// UTF-8 text file.
    input: Option<PathBuf>,
    /// Character-level tokens instead of whitespace-separated words.
    #[arg(long)]
    chars: bool,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Longest block length to estimate.
    #[arg(long, default_value_t = 6)]
    max_order: usize,
    /// Minimum number of windows per order.
    #[arg(long, default_value_t = 1)]
    min_windows: u64,
    /// Stop before an order whose distinct blocks exceed this share of windows.
    #[arg(long, default_value_t = 0.2)]
    coverage_cap: f64,
    /// Do not truncate by coverage.
    #[arg(long)]
    no_cap: bool,
    /// Read the input as one period of a cycle.
    #[arg(long)]
    cyclic: bool,
    /// Exact profile of a source description (JSON) instead of a corpus.
    #[arg(long, conflicts_with = "input")]
    source: Option<PathBuf>,
    /// Depth of an exact source profile.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Read a periodic source from its fixed start instead of a random phase.
    #[arg(long)]
    full_history: bool,
    /// Precomputed profile CSV with columns i,H_bits.
    #[arg(long, conflicts_with_all = ["input", "source"])]
    profile: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum RateCommand {
    /// Conditional entropy at each position.
    Profile(EstimateArgs),
    /// Constant-entropy-rate check.
    Cer {
        #[command(flatten)]
        estimate: EstimateArgs,
        /// Fixed flatness tolerance in bits; without it an i.i.d. noise band is used.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = 30)]
        resamples: usize,
    },
    /// Uniform-information-density classification of a model.
    Uid {
        #[arg(long)]
        model: PathBuf,
        /// Whitespace-separated sequence to score instead of classifying.
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long, default_value_t = rate::UID_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Fit a Hilberg decay to a profile.
    Hilberg {
        #[command(flatten)]
        estimate: EstimateArgs,
        #[arg(long, value_enum, default_value_t = VariantArg::Relaxed)]
        variant: VariantArg,
        /// Pure fit by regression in log-log space.
        #[arg(long)]
        log_space: bool,
    },
    /// Largest conditional entropy along a profile.
    Peak(EstimateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Pure,
    Relaxed,
}

#[derive(Debug, Args)]
struct CodingArgs {
    /// CSV rows: type, probability, then any context types.
    input: PathBuf,
    /// Permit zero-length codes for certain types.
    #[arg(long)]
    allow_full_reduction: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Source description (JSON).
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    length: usize,
}

#[derive(Debug, Args)]
struct ScrambleArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

/// Simulation config for `ring simulate` and `ring compare`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub kernel: RingKernel,
    pub start: WordOrder,
    pub steps: usize,
    pub ensemble_size: usize,
    /// Overrides `--seed`.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tokenization {
    Whitespace,
    Character,
}

/// A tokenized corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub tokens: Vec<String>,
    pub types: usize,
}

/// Read a UTF-8 file and split it into tokens. Character mode keeps every
/// character except line breaks.
pub fn ingest_corpus(path: &Path, tokenization: Tokenization) -> Result<Corpus> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::InputParse(format!("{}: invalid UTF-8: {e}", path.display())))?;
    Ok(tokenize(&text, tokenization))
}

pub fn tokenize(text: &str, tokenization: Tokenization) -> Corpus {
    let tokens: Vec<String> = match tokenization {
        Tokenization::Whitespace => text.split_whitespace().map(String::from).collect(),
        Tokenization::Character => text.chars().filter(|c| !matches!(c, '\n' | '\r')).map(String::from).collect(),
    };
    let types = tokens.iter().collect::<BTreeSet<_>>().len();
    Corpus { tokens, types }
}

#[derive(Debug, Clone)]
enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => x.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Bool(b) => json!(b),
            Cell::Str(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

/// A table plus summary fields, rendered as CSV or JSON.
#[derive(Debug, Default)]
struct Report {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<(String, Value)>,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Report { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    fn row(&mut self, cells: Vec<Cell>) {
        self.rows.push(cells);
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                if !self.header.is_empty() {
                    w.write_record(&self.header)?;
                }
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::csv))?;
                }
                let mut out = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                for (k, v) in &self.summary {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(n) if n.is_f64() => n.as_f64().map(|x| x.to_string()).unwrap_or_default(),
                        other => other.to_string(),
                    };
                    writeln!(out, "# {k}: {v}")?;
                }
                Ok(out)
            }
            Format::Json => {
                let mut obj = Map::new();
                if !self.header.is_empty() {
                    let rows: Vec<Value> = self
                        .rows
                        .iter()
                        .map(|r| {
                            Value::Object(self.header.iter().cloned().zip(r.iter().map(Cell::json)).collect())
                        })
                        .collect();
                    obj.insert("rows".into(), Value::Array(rows));
                }
                for (k, v) in &self.summary {
                    obj.insert(k.clone(), v.clone());
                }
                let mut out = serde_json::to_vec_pretty(&Value::Object(obj))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> Result<JointSequenceModel> {
    JointSequenceModel::from_json(&read_text(path)?)
}

fn read_source(path: &Path) -> Result<SequenceSource> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

fn context_order(model: &JointSequenceModel, order: &Option<Vec<String>>) -> Vec<String> {
    match order {
        Some(o) => o.clone(),
        None => model.context_roles().into_iter().map(String::from).collect(),
    }
}

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, err) {
        Ok(bytes) => match out.write_all(&bytes).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => report_error(err, &Error::Io(e.to_string())),
        },
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let record = json!({ "error": { "code": e.code(), "message": e.to_string() } });
    let _ = writeln!(err, "{record}");
    if matches!(e, Error::Usage(_)) {
        2
    } else {
        1
    }
}

fn warn(err: &mut dyn Write, code: &str, message: &str) {
    let record = json!({ "warning": { "code": code, "message": message } });
    let _ = writeln!(err, "{record}");
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<Vec<u8>> {
    let report = match &cli.command {
        Command::Placement(a) => placement(a)?,
        Command::Deplen(a) => deplen_cmd(a)?,
        Command::Conflict(a) => conflict_cmd(a)?,
        Command::Ring(c) => ring_cmd(c, cli.seed)?,
        Command::Rate(c) => rate_cmd(c, cli.seed, err)?,
        Command::Coding(a) => coding_cmd(a)?,
        Command::Gen(a) => {
            let source = read_source(&a.source)?;
            source.validate()?;
            let tokens = generate(&source, a.length, rng::substream_key(cli.seed, "gen"));
            return token_output(&tokens, false, cli.format);
        }
        Command::Scramble(a) => {
            let corpus = load_corpus(&a.corpus, err)?;
            let tokens = scramble(&corpus.tokens, rng::substream_key(cli.seed, "scramble"));
            return token_output(&tokens, a.corpus.chars, cli.format);
        }
    };
    report.render(cli.format)
}

fn token_output(tokens: &[String], chars: bool, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut s = if chars { tokens.concat() } else { tokens.join(" ") };
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&json!({ "tokens": tokens }))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn placement(a: &PlacementArgs) -> Result<Report> {
    let model = read_model(&a.model)?;
    let order = context_order(&model, &a.order);
    let h = infotheory::uncertainty_profile(&model, &order)?;
    let i = infotheory::predictability_profile(&model, &order)?;
    let objective = match a.objective {
        ObjectiveArg::Uncertainty => Objective::Uncertainty,
        ObjectiveArg::Predictability => Objective::Predictability,
    };
    let set = match &a.g {
        Some(spec) => {
            let g = CostTransducer::parse(spec)?;
            infotheory::optimal_placement_with_transducer(&model, &order, objective, &g)?
        }
        None => infotheory::optimal_target_placement(&model, &order, objective)?,
    };
    let mut r = Report::new(&["i", "H_bits", "I_bits", "in_optimal_set"]);
    for k in 0..h.len() {
        r.row(vec![k.into(), h.values[k].into(), i.values[k].into(), set.contains(&k).into()]);
    }
    r.note("target", model.target());
    r.note("context_order", json!(order));
    r.note("optimal_set", json!(set));
    Ok(r)
}

fn deplen_cmd(a: &DeplenArgs) -> Result<Report> {
    let g = CostTransducer::parse(&a.g)?;
    let l = deplen::landscape(a.m, &g)?;
    let mut r = Report::new(&["head_pos", "cost"]);
    for (p, c) in l.costs.iter().enumerate() {
        r.row(vec![(p + 1).into(), (*c).into()]);
    }
    let min = l.costs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = l.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    r.note("min", min);
    r.note("argmin", json!(l.argmin()));
    r.note("max", max);
    r.note("argmax", json!(l.argmax()));
    r.note("quasi_convex", l.quasi_convex);
    Ok(r)
}

fn conflict_cmd(a: &ConflictArgs) -> Result<Report> {
    let model = read_model(&a.model)?;
    let order = context_order(&model, &a.order);
    let report = conflict::conflict_report(&model, &order)?;
    let front = conflict::pareto_front(&report);
    let optima: Vec<BTreeSet<usize>> =
        a.lambda.iter().map(|&l| conflict::weighted_optimum(&report, l)).collect::<Result<_>>()?;
    let mut header = vec!["head_pos".to_string(), "dep_cost".into(), "H_bits".into(), "pareto".into()];
    header.extend(a.lambda.iter().map(|l| format!("weighted_opt_{l}")));
    let mut r = Report { header, ..Default::default() };
    for row in &report.rows {
        let mut cells: Vec<Cell> = vec![
            row.head_pos.into(),
            row.dependency_cost.into(),
            row.head_uncertainty_bits.into(),
            front.contains(&row.head_pos).into(),
        ];
        cells.extend(optima.iter().map(|s| Cell::Bool(s.contains(&row.head_pos))));
        r.row(cells);
    }
    let asym = conflict::asymmetry_of(&report);
    r.note("model", report.model_id.clone());
    r.note("dependency_optimal", json!(report.dependency_optimal()));
    r.note("uncertainty_optimal", json!(report.uncertainty_optimal()));
    r.note("objectives_conflict", report.objectives_conflict());
    r.note("extreme_is_worst_for_dlm", asym.extreme_is_worst_for_dlm);
    r.note("center_is_worst_for_uncertainty", serde_json::to_value(asym.center_is_worst_for_uncertainty)?);
    r.note("allies_enemies", conflict::allies_enemies_hold(&report));
    Ok(r)
}

fn load_simulation(path: &Path) -> Result<SimulationConfig> {
    let cfg: SimulationConfig = serde_json::from_str(&read_text(path)?)?;
    cfg.kernel.validate()?;
    Ok(cfg)
}

fn ring_cmd(c: &RingCommand, seed: u64) -> Result<Report> {
    match c {
        RingCommand::Distance { from, to } => {
            let parse = |s: &Option<String>| s.as_deref().map(str::parse::<WordOrder>).transpose();
            let (from, to) = (parse(from)?, parse(to)?);
            let mut r = Report::new(&["from", "to", "distance"]);
            for a in ALL_ORDERS.iter().filter(|o| from.is_none_or(|f| f == **o)) {
                for b in ALL_ORDERS.iter().filter(|o| to.is_none_or(|t| t == **o)) {
                    r.row(vec![a.name().into(), b.name().into(), ring::ring_distance(*a, *b).into()]);
                }
            }
            Ok(r)
        }
        RingCommand::Neighbors { of } => {
            let of = of.as_deref().map(str::parse::<WordOrder>).transpose()?;
            let mut r = Report::new(&["order", "neighbor"]);
            for a in ALL_ORDERS.iter().filter(|o| of.is_none_or(|f| f == **o)) {
                for b in ring::neighbors(*a) {
                    r.row(vec![a.name().into(), b.name().into()]);
                }
            }
            Ok(r)
        }
        RingCommand::Predict { from, ring: use_ring, filter } => {
            let source: WordOrder = from.parse()?;
            let filter = filter.as_deref().map(str::parse::<Filter>).transpose()?;
            let dest = ring::predicted_destinations(source, *use_ring, filter)?;
            let mut r = Report::new(&["destination"]);
            for d in &dest {
                r.row(vec![d.name().into()]);
            }
            Ok(r)
        }
        RingCommand::Simulate { config } => {
            let cfg = load_simulation(config)?;
            let seed = cfg.seed.unwrap_or(seed);
            let traj = ring::evolve(&cfg.kernel, cfg.start, cfg.steps, cfg.ensemble_size, seed)?;
            let mut header = vec!["step"];
            header.extend(ALL_ORDERS.iter().map(|o| o.name()));
            let mut r = Report::new(&header);
            for t in 0..=traj.steps() {
                let mut cells = vec![Cell::from(t)];
                cells.extend(traj.distribution(t).iter().map(|p| Cell::Float(*p)));
                r.row(cells);
            }
            r.note("ensemble_size", cfg.ensemble_size);
            r.note("seed", seed);
            Ok(r)
        }
        RingCommand::Compare { distribution, config } => {
            let dist: [f64; 6] = match (distribution, config) {
                (Some(d), _) => d.as_slice().try_into().map_err(|_| {
                    Error::Usage(format!("--distribution needs 6 values, got {}", d.len()))
                })?,
                (None, Some(path)) => {
                    let cfg = load_simulation(path)?;
                    let seed = cfg.seed.unwrap_or(seed);
                    let traj = ring::evolve(&cfg.kernel, cfg.start, cfg.steps, cfg.ensemble_size, seed)?;
                    traj.distribution(traj.steps())
                }
                (None, None) => return Err(Error::Usage("give --distribution or --config".into())),
            };
            let cmp = ring::compare_to_reference(&dist);
            let mut r = Report::new(&["higher", "lower", "agrees"]);
            for p in &cmp.ranks {
                r.row(vec![p.higher.name().into(), p.lower.name().into(), p.agrees.into()]);
            }
            r.note("total_variation", cmp.total_variation);
            r.note("rank_agreements", cmp.ranks.iter().filter(|p| p.agrees).count());
            Ok(r)
        }
    }
}

fn load_corpus(args: &CorpusArgs, err: &mut dyn Write) -> Result<Corpus> {
    let path = args.input.as_ref().ok_or_else(|| Error::Usage("missing input file".into()))?;
    let mode = if args.chars { Tokenization::Character } else { Tokenization::Whitespace };
    let corpus = ingest_corpus(path, mode)?;
    if corpus.tokens.is_empty() {
        warn(err, "cli.empty_input", &format!("{} has no tokens", path.display()));
    }
    Ok(corpus)
}

fn read_profile_csv(path: &Path) -> Result<EntropyProfile> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut values = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let i: usize = rec.get(0).unwrap_or("").trim().parse().map_err(|_| {
            Error::InputParse(format!("row {}: bad position {:?}", k + 1, rec.get(0)))
        })?;
        if i != k + 1 {
            return Err(Error::InputParse(format!("row {}: positions must run 1, 2, ...", k + 1)));
        }
        let v: f64 = rec.get(1).unwrap_or("").trim().parse().map_err(|_| {
            Error::InputParse(format!("row {}: bad value {:?}", k + 1, rec.get(1)))
        })?;
        values.push(v);
    }
    Ok(EntropyProfile::new(ProfileKind::EntropyRate, values))
}

/// The profile requested by the estimate flags, plus the corpus it came
/// from when there is one.
fn estimate(args: &EstimateArgs, err: &mut dyn Write) -> Result<(EntropyProfile, Option<Corpus>)> {
    if let Some(path) = &args.profile {
        return Ok((read_profile_csv(path)?, None));
    }
    if let Some(path) = &args.source {
        let reading = if args.full_history { PeriodicReading::FullHistory } else { PeriodicReading::Relaxed };
        return Ok((rate::source_profile(&read_source(path)?, args.depth, reading)?, None));
    }
    let corpus = load_corpus(&args.corpus, err)?;
    let table = if args.cyclic {
        rate::ngram_counts_cyclic(&corpus.tokens, args.max_order)?
    } else {
        rate::ngram_counts(&corpus.tokens, args.max_order)?
    };
    let opts = ProfileOptions {
        min_windows: args.min_windows,
        coverage_cap: if args.no_cap { None } else { Some(args.coverage_cap) },
    };
    Ok((rate::conditional_entropy_profile(&table, &opts)?, Some(corpus)))
}

fn profile_rows(profile: &EntropyProfile) -> Report {
    let mut r = Report::new(&["i", "H_bits"]);
    for (i, v) in profile.indexed() {
        r.row(vec![i.into(), v.into()]);
    }
    r
}

fn rate_cmd(c: &RateCommand, seed: u64, err: &mut dyn Write) -> Result<Report> {
    match c {
        RateCommand::Profile(a) => {
            let (profile, corpus) = estimate(a, err)?;
            let mut r = profile_rows(&profile);
            if let Some(c) = corpus {
                r.note("tokens", c.tokens.len());
                r.note("types", c.types);
            }
            r.note("depth", profile.len());
            Ok(r)
        }
        RateCommand::Cer { estimate: a, tolerance, resamples } => {
            let (profile, corpus) = estimate(a, err)?;
            let (tol, band) = match (tolerance, &corpus) {
                (Some(t), _) => (*t, None),
                (None, Some(c)) => {
                    let band = rate::iid_noise_band(
                        &c.tokens,
                        profile.len(),
                        *resamples,
                        rng::substream_key(seed, "rate.cer.noise_band"),
                    )?;
                    (band.band, Some(band))
                }
                (None, None) => (infotheory::TIE_TOLERANCE, None),
            };
            let v = rate::cer_diagnostic(&profile, tol)?;
            let mut r = profile_rows(&profile);
            r.note("flat", v.flat);
            r.note("spread", v.spread);
            r.note("tolerance", v.tolerance);
            if let Some(b) = band {
                r.note("noise_mean", b.mean);
                r.note("noise_sd", b.sd);
                r.note("resamples", b.resamples);
            }
            r.note("max_drop_position", json!(v.max_drop_position));
            r.note("max_drop", v.max_drop);
            Ok(r)
        }
        RateCommand::Uid { model, sequence, cap } => {
            let model = read_model(model)?;
            match sequence {
                Some(s) => {
                    let seq: Vec<&str> = s.split_whitespace().collect();
                    let probs = rate::uid_conditionals(&seq, &model)?;
                    let mut r = Report::new(&["i", "token", "p"]);
                    for (k, (t, p)) in seq.iter().zip(&probs).enumerate() {
                        r.row(vec![(k + 1).into(), (*t).into(), (*p).into()]);
                    }
                    r.note("spread", rate::uid_spread(&seq, &model)?);
                    Ok(r)
                }
                None => {
                    let u = rate::uid_classify(&model, *cap)?;
                    let mut r = Report::new(&[]);
                    r.note("class", serde_json::to_value(u.class)?);
                    r.note("sequences", u.sequences);
                    r.note("max_spread", u.max_spread);
                    Ok(r)
                }
            }
        }
        RateCommand::Hilberg { estimate: a, variant, log_space } => {
            let (profile, _) = estimate(a, err)?;
            let fit = if *log_space {
                rate::hilberg_fit_log_space(&profile.values)?
            } else {
                let v = match variant {
                    VariantArg::Pure => HilbergVariant::Pure,
                    VariantArg::Relaxed => HilbergVariant::Relaxed,
                };
                rate::hilberg_fit(&profile.values, v, &GammaGrid::default())?
            };
            let mut r = Report::new(&["i", "H_bits", "fitted"]);
            for (i, v) in profile.indexed() {
                r.row(vec![i.into(), v.into(), fit.predict(i).into()]);
            }
            r.note("variant", serde_json::to_value(fit.variant)?);
            r.note("a", fit.a);
            r.note("gamma", fit.gamma);
            r.note("b", fit.b);
            r.note("rms_residual", fit.rms_residual);
            Ok(r)
        }
        RateCommand::Peak(a) => {
            let (profile, _) = estimate(a, err)?;
            let (value, index) = rate::peak_cost(&profile)?;
            let mut r = profile_rows(&profile);
            r.note("peak", value);
            r.note("peak_position", index);
            Ok(r)
        }
    }
}

fn coding_cmd(a: &CodingArgs) -> Result<Report> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(&a.input)?;
    let mut joint: Vec<(Vec<String>, String, f64)> = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InputParse(format!("row {}: need type and probability", k + 1)));
        }
        let p: f64 = match rec[1].parse() {
            Ok(p) => p,
            // a header row
            Err(_) if k == 0 => continue,
            Err(_) => return Err(Error::InputParse(format!("row {}: bad probability {:?}", k + 1, &rec[1]))),
        };
        let context = rec.iter().skip(2).map(String::from).collect();
        joint.push((context, rec[0].to_string(), p));
    }
    let order = joint.first().map_or(0, |(c, _, _)| c.len());
    let table = ContextTable::with_optimal_lengths(order, joint, a.allow_full_reduction)?;

    let mut r = Report::new(&["type", "context", "probability", "ideal_length", "length"]);
    for row in &table.rows {
        let cond = table.rows.iter().filter(|o| o.context == row.context).map(|o| o.p).sum::<f64>();
        r.row(vec![
            row.target.as_str().into(),
            row.context.join(" ").into(),
            row.p.into(),
            (-(row.p / cond).log2()).into(),
            row.length.into(),
        ]);
    }
    let total = coding::contextual_mean_length(&table);
    r.note("order", order);
    if order == 0 {
        let t = TypeTable::new(
            table.rows.iter().map(|r| r.target.clone()).collect(),
            table.rows.iter().map(|r| r.p).collect(),
            table.rows.iter().map(|r| r.length).collect(),
            a.allow_full_reduction,
        )?;
        r.note("L", coding::mean_length(&t));
        r.note("entropy", t.entropy());
        r.note("kraft_sum", t.kraft_sum());
    } else {
        r.note("L_n", total);
    }
    let mut per_target = Map::new();
    for y in table.targets() {
        let l = coding::per_target_length(&table, y)?;
        let m = match coding::renormalized_length(&table, y) {
            Ok(m) => json!(m),
            Err(Error::ZeroTargetMass(_)) => Value::Null,
            Err(e) => return Err(e),
        };
        per_target.insert(y.to_string(), json!({ "L_n_y": l, "M_n_y": m }));
    }
    r.note("per_target", Value::Object(per_target));
    let verdict = table.abbreviation()?;
    r.note("tau", json!(verdict.tau));
    r.note("abbreviation_holds", verdict.holds);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["wordorder"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn deplen_rows() {
        let (code, out, _) = run_args(&["deplen", "--m", "5"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("head_pos,cost\n1,10\n2,7\n3,6\n4,7\n5,10\n"), "{out}");
    }

    #[test]
    fn predict_cell() {
        let (code, out, _) = run_args(&["ring", "predict", "--from", "SOV", "--ring", "--filter", "dlm"]);
        assert_eq!(code, 0);
        assert_eq!(out, "destination\nSVO\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["deplen", "--bogus"]).0, 2);
        let (code, _, err) = run_args(&["deplen", "--m", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("deplen.sequence_too_short"));
        let (code, _, err) = run_args(&["ring", "predict", "--from", "VSO"]);
        assert_eq!(code, 1);
        assert!(err.contains("ring.unsupported_source"));
    }

    #[test]
    fn tokenization() {
        assert_eq!(tokenize("a b  c\n", Tokenization::Whitespace).tokens, vec!["a", "b", "c"]);
        assert_eq!(tokenize("ab", Tokenization::Character).tokens, vec!["a", "b"]);
        let empty = tokenize("", Tokenization::Whitespace);
        assert!(empty.tokens.is_empty() && empty.types == 0);
    }
}
