//! Entropy-rate profiles of token sequences and the diagnostics built on
//! them: constant-entropy-rate flatness, uniform-information-density
//! classification, Hilberg decay fits and peak cost.
//!
//! Rate profiles are indexed from 1: entry `i` estimates
//! `H(X_i | X_1, …, X_{i-1})`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{JointSequenceModel, SequenceSource};
use crate::error::{Error, Result};
use crate::infotheory::{entropy_of_indices, EntropyProfile, ProfileKind};
use crate::rng;

/// Sliding-window block counts for orders `1..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramTable {
    pub max_order: usize,
    /// Token types in order of first appearance.
    pub vocabulary: Vec<String>,
    /// `counts[j - 1]` maps each `j`-block (as vocabulary indices) to its count.
    pub counts: Vec<HashMap<Vec<u32>, u64>>,
    /// `total_positions[j - 1]` is the number of `j`-windows.
    pub total_positions: Vec<u64>,
    /// Whether windows wrap around the end of the sequence.
    pub cyclic: bool,
}

impl NGramTable {
    pub fn count<S: AsRef<str>>(&self, block: &[S]) -> u64 {
        let Some(table) = block.len().checked_sub(1).and_then(|j| self.counts.get(j)) else {
            return 0;
        };
        let key: Option<Vec<u32>> = block
            .iter()
            .map(|s| self.vocabulary.iter().position(|v| v == s.as_ref()).map(|i| i as u32))
            .collect();
        key.and_then(|k| table.get(&k).copied()).unwrap_or(0)
    }

    pub fn distinct(&self, order: usize) -> usize {
        self.counts[order - 1].len()
    }

    /// Plug-in entropy of the `order`-block distribution, in bits.
    pub fn block_entropy(&self, order: usize) -> f64 {
        let w = self.total_positions[order - 1];
        if w == 0 {
            return 0.0;
        }
        let mut c: Vec<u64> = self.counts[order - 1].values().copied().collect();
        c.sort_unstable();
        let w = w as f64;
        0.0 - c.iter().map(|&c| { let p = c as f64 / w; p * p.log2() }).sum::<f64>()
    }
}

const SHARD_LEN: usize = 1 << 16;

fn intern<S: AsRef<str>>(sequence: &[S]) -> (Vec<String>, Vec<u32>) {
    let mut vocab: Vec<String> = Vec::new();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let ids = sequence
        .iter()
        .map(|s| {
            let s = s.as_ref();
            *index.entry(s).or_insert_with(|| {
                vocab.push(s.to_string());
                (vocab.len() - 1) as u32
            })
        })
        .collect();
    (vocab, ids)
}

fn count_windows(ids: &[u32], max_order: usize, cyclic: bool) -> (Vec<HashMap<Vec<u32>, u64>>, Vec<u64>) {
    let n = ids.len();
    let starts = |j: usize| if cyclic { n } else { (n + 1).saturating_sub(j) };
    let radix = u64::from(ids.iter().copied().max().unwrap_or(0)) + 1;
    let counts = (1..=max_order)
        .map(|j| match radix.checked_pow(j as u32) {
            Some(_) => count_packed(ids, j, starts(j), radix),
            None => count_order(ids, j, starts(j)),
        })
        .collect();
    let totals = (1..=max_order).map(|j| starts(j) as u64).collect();
    (counts, totals)
}

// Plug-in block entropies of orders 1..=depth (non-cyclic), counting runs
// of sorted packed keys. Falls back to hashed counts for huge vocabularies.
fn block_entropies(ids: &[u32], depth: usize) -> Vec<f64> {
    let n = ids.len();
    let radix = u64::from(ids.iter().copied().max().unwrap_or(0)) + 1;
    (1..=depth)
        .map(|j| {
            let w = (n + 1).saturating_sub(j);
            if w == 0 {
                return 0.0;
            }
            let mut c: Vec<u64> = if radix.checked_pow(j as u32).is_some() {
                let mut keys: Vec<u64> = ids
                    .windows(j)
                    .map(|b| b.iter().fold(0u64, |acc, &x| acc * radix + u64::from(x)))
                    .collect();
                keys.sort_unstable();
                keys.chunk_by(|a, b| a == b).map(|run| run.len() as u64).collect()
            } else {
                count_order(ids, j, w).into_values().collect()
            };
            c.sort_unstable();
            let w = w as f64;
            0.0 - c.iter().map(|&c| { let p = c as f64 / w; p * p.log2() }).sum::<f64>()
        })
        .collect()
}

// Each shard counts the windows starting inside it; merging is addition.
fn sharded<K, F>(starts: usize, count: F) -> HashMap<K, u64>
where
    K: std::hash::Hash + Eq + Send,
    F: Fn(usize, usize) -> HashMap<K, u64> + Sync,
{
    let shards = starts.div_ceil(SHARD_LEN).max(1);
    let partial: Vec<HashMap<K, u64>> = (0..shards)
        .into_par_iter()
        .map(|s| count(s * SHARD_LEN, ((s + 1) * SHARD_LEN).min(starts)))
        .collect();
    let mut acc = HashMap::new();
    for m in partial {
        for (k, c) in m {
            *acc.entry(k).or_insert(0) += c;
        }
    }
    acc
}

// Blocks packed into one integer in base `radix`.
fn count_packed(ids: &[u32], j: usize, starts: usize, radix: u64) -> HashMap<Vec<u32>, u64> {
    let n = ids.len();
    let packed = sharded(starts, |lo, hi| {
        let mut m: HashMap<u64, u64> = HashMap::new();
        for start in lo..hi.max(lo) {
            let key = (0..j).fold(0u64, |acc, k| acc * radix + u64::from(ids[(start + k) % n]));
            *m.entry(key).or_insert(0) += 1;
        }
        m
    });
    packed
        .into_iter()
        .map(|(mut key, c)| {
            let mut block = vec![0u32; j];
            for slot in block.iter_mut().rev() {
                *slot = (key % radix) as u32;
                key /= radix;
            }
            (block, c)
        })
        .collect()
}

fn count_order(ids: &[u32], j: usize, starts: usize) -> HashMap<Vec<u32>, u64> {
    let n = ids.len();
    sharded(starts, |lo, hi| {
        let mut m: HashMap<Vec<u32>, u64> = HashMap::new();
        for start in lo..hi.max(lo) {
            let key: Vec<u32> = (0..j).map(|k| ids[(start + k) % n]).collect();
            *m.entry(key).or_insert(0) += 1;
        }
        m
    })
}

/// Sliding-window counts of every block length `1..=max_order`.
pub fn ngram_counts<S: AsRef<str>>(sequence: &[S], max_order: usize) -> Result<NGramTable> {
    build_table(sequence, max_order, false)
}

/// Counts with windows wrapping around the end, so a sequence is read as
/// one period of a cycle.
pub fn ngram_counts_cyclic<S: AsRef<str>>(sequence: &[S], max_order: usize) -> Result<NGramTable> {
    build_table(sequence, max_order, true)
}

fn build_table<S: AsRef<str>>(sequence: &[S], max_order: usize, cyclic: bool) -> Result<NGramTable> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    if max_order == 0 {
        return Err(Error::Usage("max_order must be at least 1".into()));
    }
    let (vocabulary, ids) = intern(sequence);
    let (counts, total_positions) = count_windows(&ids, max_order, cyclic);
    Ok(NGramTable { max_order, vocabulary, counts, total_positions, cyclic })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Minimum number of windows for an order to be estimated.
    pub min_windows: u64,
    /// Stop before an order whose distinct blocks exceed this fraction of
    /// its windows. Order 1 is always kept.
    pub coverage_cap: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { min_windows: 1, coverage_cap: Some(0.2) }
    }
}

impl ProfileOptions {
    pub fn uncapped() -> Self {
        ProfileOptions { min_windows: 1, coverage_cap: None }
    }
}

/// Plug-in conditional entropies by block-entropy differencing.
pub fn conditional_entropy_profile(table: &NGramTable, opts: &ProfileOptions) -> Result<EntropyProfile> {
    if table.total_positions[0] < opts.min_windows {
        return Err(Error::InsufficientData(format!(
            "{} windows of order 1, need {}",
            table.total_positions[0], opts.min_windows
        )));
    }
    let mut values = Vec::new();
    let mut prev = 0.0;
    for j in 1..=table.max_order {
        let w = table.total_positions[j - 1];
        if w < opts.min_windows.max(1) {
            break;
        }
        if j > 1 {
            if let Some(cap) = opts.coverage_cap {
                if table.distinct(j) as f64 > cap * w as f64 {
                    break;
                }
            }
        }
        let h = table.block_entropy(j);
        values.push(h - prev);
        prev = h;
    }
    Ok(EntropyProfile::new(ProfileKind::EntropyRate, values))
}

/// Exact profile of an enumerable model read position by position in role
/// order: `H(X_1..X_i) - H(X_1..X_{i-1})`.
pub fn exact_rate_profile(model: &JointSequenceModel) -> EntropyProfile {
    let n = model.num_roles();
    let mut values = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 1..=n {
        let idx: Vec<usize> = (0..i).collect();
        let h = entropy_of_indices(model, &idx);
        values.push(h - prev);
        prev = h;
    }
    EntropyProfile::new(ProfileKind::EntropyRate, values)
}

/// How the conditioning context of a periodic sequence is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicReading {
    /// Any subsequence: the phase of the first element is uniform.
    #[default]
    Relaxed,
    /// The whole history from the fixed start of the sequence.
    FullHistory,
}

/// Exact profile of the first `depth` tokens of a source.
pub fn source_profile(source: &SequenceSource, depth: usize, reading: PeriodicReading) -> Result<EntropyProfile> {
    let source = match (source, reading) {
        (SequenceSource::Periodic { block, offset }, PeriodicReading::FullHistory) => {
            SequenceSource::Periodic { block: block.clone(), offset: Some(offset.unwrap_or(0)) }
        }
        (SequenceSource::Periodic { block, .. }, PeriodicReading::Relaxed) => {
            SequenceSource::Periodic { block: block.clone(), offset: None }
        }
        (s, _) => s.clone(),
    };
    Ok(exact_rate_profile(&source.joint(depth)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CerVerdict {
    pub flat: bool,
    pub spread: f64,
    pub tolerance: f64,
    /// Position `i` (1-based) with the largest drop from `i - 1`, if any.
    pub max_drop_position: Option<usize>,
    pub max_drop: f64,
}

/// Constant-entropy-rate check: flat when max − min ≤ `tolerance`.
pub fn cer_diagnostic(profile: &EntropyProfile, tolerance: f64) -> Result<CerVerdict> {
    if profile.is_empty() {
        return Err(Error::InsufficientData("empty profile".into()));
    }
    let spread = spread(&profile.values);
    let first = profile.first_index();
    let mut max_drop = 0.0;
    let mut max_drop_position = None;
    for (k, w) in profile.values.windows(2).enumerate() {
        let drop = w[0] - w[1];
        if drop > max_drop {
            max_drop = drop;
            max_drop_position = Some(first + k + 1);
        }
    }
    Ok(CerVerdict { flat: spread <= tolerance, spread, tolerance, max_drop_position, max_drop })
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Spread of plug-in profiles of i.i.d. resamples from a sequence's own
/// unigram distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBand {
    pub depth: usize,
    pub resamples: usize,
    pub mean: f64,
    pub sd: f64,
    /// `mean + 3 sd`
    pub band: f64,
}

pub fn iid_noise_band<S: AsRef<str> + Sync>(
    sequence: &[S],
    depth: usize,
    resamples: usize,
    seed: u64,
) -> Result<NoiseBand> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    if resamples < 2 {
        return Err(Error::Usage("need at least 2 resamples".into()));
    }
    let (_, ids) = intern(sequence);
    let n = ids.len();
    let spreads: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::shard(seed, "noise_band", r as u64);
            let sample: Vec<u32> = (0..n).map(|_| ids[rng.random_range(0..n)]).collect();
            let mut prev = 0.0;
            let rates: Vec<f64> = block_entropies(&sample, depth)
                .into_iter()
                .map(|h| {
                    let r = h - prev;
                    prev = h;
                    r
                })
                .collect();
            spread(&rates)
        })
        .collect();
    let k = spreads.len() as f64;
    let mean = spreads.iter().sum::<f64>() / k;
    let var = spreads.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sd = var.sqrt();
    Ok(NoiseBand { depth, resamples, mean, sd, band: mean + 3.0 * sd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UidClass {
    /// Every sequence in the full Cartesian product is produced, each with
    /// constant conditional probabilities.
    FullUid,
    /// Every produced sequence has constant conditional probabilities.
    StrongUid,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UidReport {
    pub class: UidClass,
    pub sequences: usize,
    /// Largest per-sequence spread of conditional probabilities.
    pub max_spread: f64,
}

/// Tolerance on per-sequence spread for UID classification.
pub const UID_TOLERANCE: f64 = 1e-9;
/// Default cap on enumerated support size.
pub const UID_ENUMERATION_CAP: usize = 1 << 20;

struct PrefixTables {
    tables: Vec<std::collections::BTreeMap<Vec<u32>, f64>>,
}

impl PrefixTables {
    fn new(model: &JointSequenceModel) -> Self {
        let n = model.num_roles();
        let tables = (1..=n).map(|i| model.marginal_table(&(0..i).collect::<Vec<_>>())).collect();
        PrefixTables { tables }
    }

    fn conditionals(&self, key: &[u32]) -> Vec<f64> {
        let mut out = Vec::with_capacity(key.len());
        let mut prev = 1.0;
        for (i, table) in self.tables.iter().enumerate() {
            let p = table.get(&key[..=i]).copied().unwrap_or(0.0);
            out.push(if prev > 0.0 { p / prev } else { 0.0 });
            prev = p;
        }
        out
    }
}

/// Classify a model by exhaustive enumeration of its supported sequences.
pub fn uid_classify(model: &JointSequenceModel, cap: usize) -> Result<UidReport> {
    let size = model.support_size();
    if size > cap {
        return Err(Error::UnsupportedModelSize { size, cap });
    }
    let prefixes = PrefixTables::new(model);
    let max_spread = model
        .entries()
        .map(|(k, _)| spread(&prefixes.conditionals(k)))
        .fold(0.0, f64::max);
    let full_size: Option<usize> =
        model.alphabets().iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    let class = if max_spread > UID_TOLERANCE {
        UidClass::Neither
    } else if full_size == Some(size) {
        UidClass::FullUid
    } else {
        UidClass::StrongUid
    };
    Ok(UidReport { class, sequences: size, max_spread })
}

/// Conditional probabilities `p(x_i | x_1..x_{i-1})` of one sequence under a
/// reference model whose roles are read as positions.
pub fn uid_conditionals<S: AsRef<str>>(sequence: &[S], model: &JointSequenceModel) -> Result<Vec<f64>> {
    let named: Vec<String> = sequence.iter().map(|s| s.as_ref().to_string()).collect();
    if model.prob(sequence)? <= 0.0 {
        return Err(Error::ZeroProbabilitySequence(named));
    }
    let key: Vec<u32> = sequence
        .iter()
        .zip(model.alphabets())
        .map(|(s, a)| a.index_of(s.as_ref()).expect("checked by prob"))
        .collect();
    Ok(PrefixTables::new(model).conditionals(&key))
}

/// Max − min of a sequence's conditional probabilities.
pub fn uid_spread<S: AsRef<str>>(sequence: &[S], model: &JointSequenceModel) -> Result<f64> {
    Ok(spread(&uid_conditionals(sequence, model)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbergVariant {
    /// `a i^-γ`
    Pure,
    /// `a i^-γ + b`
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbergFit {
    pub a: f64,
    pub gamma: f64,
    pub b: f64,
    pub variant: HilbergVariant,
    pub rms_residual: f64,
}

impl HilbergFit {
    pub fn predict(&self, i: usize) -> f64 {
        self.a * (i as f64).powf(-self.gamma) + self.b
    }
}

/// Grid of candidate exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for GammaGrid {
    fn default() -> Self {
        GammaGrid { lo: 0.05, hi: 1.5, step: 0.005 }
    }
}

impl GammaGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// `a i^-γ + b` for `i = 1..=len`.
pub fn hilberg_profile(a: f64, gamma: f64, b: f64, len: usize) -> Vec<f64> {
    (1..=len).map(|i| a * (i as f64).powf(-gamma) + b).collect()
}

// Least-squares (a, b) for y ≈ a x + b with a, b >= 0.
fn solve_ab(x: &[f64], y: &[f64], variant: HilbergVariant) -> (f64, f64) {
    let through_origin = || {
        let sxy: f64 = x.iter().zip(y).map(|(x, y)| x * y).sum();
        let sxx: f64 = x.iter().map(|x| x * x).sum();
        (sxy / sxx).max(0.0)
    };
    match variant {
        HilbergVariant::Pure => (through_origin(), 0.0),
        HilbergVariant::Relaxed => {
            let n = x.len() as f64;
            let mx = x.iter().sum::<f64>() / n;
            let my = y.iter().sum::<f64>() / n;
            let sxy: f64 = x.iter().zip(y).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = x.iter().map(|x| (x - mx) * (x - mx)).sum();
            let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            let b = my - a * mx;
            if a < 0.0 {
                (0.0, my.max(0.0))
            } else if b < 0.0 {
                (through_origin(), 0.0)
            } else {
                (a, b)
            }
        }
    }
}

/// Fit a Hilberg decay to a rate profile (entry `k` is position `k + 1`) by
/// grid search over γ with a closed-form solve for (a, b) at each γ.
pub fn hilberg_fit(values: &[f64], variant: HilbergVariant, grid: &GammaGrid) -> Result<HilbergFit> {
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 profile values, got {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateProfile("profile has non-finite values".into()));
    }
    if spread(values) <= 1e-12 {
        return Err(Error::DegenerateProfile("constant profile leaves gamma unidentifiable".into()));
    }
    let n = values.len() as f64;
    let mut best: Option<HilbergFit> = None;
    for gamma in grid.points() {
        let x: Vec<f64> = (1..=values.len()).map(|i| (i as f64).powf(-gamma)).collect();
        let (a, b) = solve_ab(&x, values, variant);
        let sse: f64 = x.iter().zip(values).map(|(x, y)| (a * x + b - y).powi(2)).sum();
        let fit = HilbergFit { a, gamma, b, variant, rms_residual: (sse / n).sqrt() };
        if best.as_ref().is_none_or(|f| fit.rms_residual < f.rms_residual) {
            best = Some(fit);
        }
    }
    let fit = best.ok_or_else(|| Error::Usage("empty gamma grid".into()))?;
    if fit.a == 0.0 {
        return Err(Error::DegenerateProfile("no decaying component fits the profile".into()));
    }
    Ok(fit)
}

/// Pure-variant fit by linear regression of `log2 H` on `log2 i`.
pub fn hilberg_fit_log_space(values: &[f64]) -> Result<HilbergFit> {
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 profile values, got {}", values.len())));
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::DegenerateProfile("log-space fit needs positive values".into()));
    }
    if spread(values) <= 1e-12 {
        return Err(Error::DegenerateProfile("constant profile leaves gamma unidentifiable".into()));
    }
    let xs: Vec<f64> = (1..=values.len()).map(|i| (i as f64).log2()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let gamma = -slope;
    let a = (my - slope * mx).exp2();
    let sse: f64 = values
        .iter()
        .enumerate()
        .map(|(k, y)| (a * ((k + 1) as f64).powf(-gamma) - y).powi(2))
        .sum();
    Ok(HilbergFit { a, gamma, b: 0.0, variant: HilbergVariant::Pure, rms_residual: (sse / n).sqrt() })
}

/// Largest conditional entropy along the profile and the first position
/// attaining it.
pub fn peak_cost(profile: &EntropyProfile) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in profile.indexed() {
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, i));
        }
    }
    best.ok_or_else(|| Error::InsufficientData("empty profile".into()))
}
