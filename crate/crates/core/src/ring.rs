//! The six orders of subject, verb and object as a permutation ring.
//!
//! Two orders are adjacent when one becomes the other by swapping two
//! adjacent constituents; the resulting graph is the 6-cycle
//! SOV–SVO–VSO–VOS–OVS–OSV–SOV.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WordOrder {
    SOV,
    SVO,
    VSO,
    VOS,
    OVS,
    OSV,
}

/// Ring order, starting at SOV.
pub const ALL_ORDERS: [WordOrder; 6] =
    [WordOrder::SOV, WordOrder::SVO, WordOrder::VSO, WordOrder::VOS, WordOrder::OVS, WordOrder::OSV];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constituent {
    Subject,
    Verb,
    Object,
}

impl Constituent {
    fn letter(self) -> char {
        match self {
            Constituent::Subject => 'S',
            Constituent::Verb => 'V',
            Constituent::Object => 'O',
        }
    }
}

impl FromStr for Constituent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "subject" => Ok(Constituent::Subject),
            "v" | "verb" => Ok(Constituent::Verb),
            "o" | "object" => Ok(Constituent::Object),
            _ => Err(Error::Usage(format!("unknown constituent {s:?}"))),
        }
    }
}

impl WordOrder {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> WordOrder {
        ALL_ORDERS[i % 6]
    }

    pub fn name(self) -> &'static str {
        match self {
            WordOrder::SOV => "SOV",
            WordOrder::SVO => "SVO",
            WordOrder::VSO => "VSO",
            WordOrder::VOS => "VOS",
            WordOrder::OVS => "OVS",
            WordOrder::OSV => "OSV",
        }
    }

    pub fn constituents(self) -> [Constituent; 3] {
        let mut out = [Constituent::Subject; 3];
        for (slot, c) in out.iter_mut().zip(self.name().chars()) {
            *slot = match c {
                'S' => Constituent::Subject,
                'V' => Constituent::Verb,
                _ => Constituent::Object,
            };
        }
        out
    }

    fn from_constituents(c: [Constituent; 3]) -> WordOrder {
        let name: String = c.iter().map(|x| x.letter()).collect();
        name.parse().expect("every permutation of S, V, O is a word order")
    }

    /// 1-based position of `c` in this order.
    pub fn position_of(self, c: Constituent) -> usize {
        self.constituents().iter().position(|x| *x == c).unwrap() + 1
    }
}

impl fmt::Display for WordOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WordOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_ORDERS
            .iter()
            .copied()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownOrder(s.to_string()))
    }
}

/// Minimum number of adjacent swaps turning `a` into `b`, i.e. the number of
/// constituent pairs the two orders rank differently.
pub fn ring_distance(a: WordOrder, b: WordOrder) -> usize {
    let ca = a.constituents();
    let pos_b = |c: Constituent| b.position_of(c);
    let mut inversions = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if pos_b(ca[i]) > pos_b(ca[j]) {
                inversions += 1;
            }
        }
    }
    inversions
}

/// The two orders one adjacent swap away, in ring order.
pub fn neighbors(order: WordOrder) -> BTreeSet<WordOrder> {
    let c = order.constituents();
    [[c[1], c[0], c[2]], [c[0], c[2], c[1]]].into_iter().map(WordOrder::from_constituents).collect()
}

/// The orders placing `target` last.
pub fn triple_optimal_orders(target: Constituent) -> BTreeSet<WordOrder> {
    ALL_ORDERS.iter().copied().filter(|o| o.position_of(target) == 3).collect()
}

/// Conditions that favour some destination orders over others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    /// Dependency length minimization: verb in the middle.
    Dlm,
    /// Minimizing uncertainty about the verb: verb last.
    VerbUncertainty,
    /// Minimizing uncertainty about the nominal constituents: verb first.
    NominalUncertainty,
    /// Subject first.
    AgentFirst,
}

impl Filter {
    pub fn favoured(self) -> BTreeSet<WordOrder> {
        let verb_at = |p: usize| -> BTreeSet<WordOrder> {
            ALL_ORDERS.iter().copied().filter(|o| o.position_of(Constituent::Verb) == p).collect()
        };
        match self {
            Filter::Dlm => verb_at(2),
            Filter::VerbUncertainty => verb_at(3),
            Filter::NominalUncertainty => verb_at(1),
            Filter::AgentFirst => ALL_ORDERS
                .iter()
                .copied()
                .filter(|o| o.position_of(Constituent::Subject) == 1)
                .collect(),
        }
    }
}

impl FromStr for Filter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dlm" => Ok(Filter::Dlm),
            "verb_uncertainty" => Ok(Filter::VerbUncertainty),
            "nominal_uncertainty" => Ok(Filter::NominalUncertainty),
            "agent_first" => Ok(Filter::AgentFirst),
            _ => Err(Error::Usage(format!("unknown filter {s:?}"))),
        }
    }
}

/// Most likely destinations from `source` under set logic: the ring alone
/// keeps the nearest orders, a filter alone keeps the orders it favours, and
/// both keep the intersection.
pub fn predicted_destinations(
    source: WordOrder,
    use_ring: bool,
    filter: Option<Filter>,
) -> Result<BTreeSet<WordOrder>> {
    if !matches!(source, WordOrder::SOV | WordOrder::SVO) {
        return Err(Error::UnsupportedSource(source.to_string()));
    }
    let mut out: BTreeSet<WordOrder> = ALL_ORDERS.iter().copied().filter(|o| *o != source).collect();
    if use_ring {
        out = out.intersection(&neighbors(source)).copied().collect();
    }
    if let Some(f) = filter {
        out = out.intersection(&f.favoured()).copied().collect();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// `exp(-beta * d)`
    Exponential { beta: f64 },
    /// `d^(-alpha)`
    InversePower { alpha: f64 },
    /// Weights for distances 1, 2, 3.
    Tabulated { weights: [f64; 3] },
}

impl Decay {
    pub fn weight(&self, distance: usize) -> f64 {
        let d = distance as f64;
        match self {
            Decay::Exponential { beta } => (-beta * d).exp(),
            Decay::InversePower { alpha } => d.powf(-alpha),
            Decay::Tabulated { weights } => weights[distance - 1],
        }
    }
}

impl Default for Decay {
    fn default() -> Self {
        Decay::Exponential { beta: 1.0 }
    }
}

/// Transition kernel on the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingKernel {
    #[serde(default)]
    pub decay: Decay,
    /// Multiplier applied to destinations a filter favours.
    #[serde(default)]
    pub filters: BTreeMap<Filter, f64>,
    #[serde(default)]
    pub self_weight: f64,
}

impl Default for RingKernel {
    fn default() -> Self {
        RingKernel { decay: Decay::default(), filters: BTreeMap::new(), self_weight: 0.0 }
    }
}

impl RingKernel {
    pub fn validate(&self) -> Result<()> {
        let w: Vec<f64> = (1..=3).map(|d| self.decay.weight(d)).collect();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidKernel(format!("decay weights {w:?} must be finite and >= 0")));
        }
        if w.windows(2).any(|p| p[1] > p[0]) {
            return Err(Error::InvalidKernel(format!("decay weights {w:?} increase with distance")));
        }
        if let Decay::Exponential { beta } = self.decay {
            if !(beta >= 0.0) {
                return Err(Error::InvalidKernel(format!("beta {beta} must be >= 0")));
            }
        }
        if let Decay::InversePower { alpha } = self.decay {
            if !(alpha >= 0.0) {
                return Err(Error::InvalidKernel(format!("alpha {alpha} must be >= 0")));
            }
        }
        if !(self.self_weight >= 0.0) || !self.self_weight.is_finite() {
            return Err(Error::InvalidKernel(format!("self weight {} must be >= 0", self.self_weight)));
        }
        for (f, m) in &self.filters {
            if !(*m >= 0.0) || !m.is_finite() {
                return Err(Error::InvalidKernel(format!("multiplier {m} for {f:?} must be >= 0")));
            }
        }
        Ok(())
    }

    fn multiplier(&self, dest: WordOrder) -> f64 {
        self.filters
            .iter()
            .filter(|(f, _)| f.favoured().contains(&dest))
            .map(|(_, m)| *m)
            .product()
    }
}

/// Row-stochastic 6×6 matrix indexed by [`WordOrder::index`].
pub type TransitionMatrix = [[f64; 6]; 6];

pub fn transition_matrix(kernel: &RingKernel) -> Result<TransitionMatrix> {
    kernel.validate()?;
    let mut out = [[0.0; 6]; 6];
    for src in ALL_ORDERS {
        let row = &mut out[src.index()];
        for dst in ALL_ORDERS {
            row[dst.index()] = if src == dst {
                kernel.self_weight
            } else {
                kernel.decay.weight(ring_distance(src, dst)) * kernel.multiplier(dst)
            };
        }
        let total: f64 = row.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateRow(src.to_string()));
        }
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    Ok(out)
}

/// Per-step empirical distribution of an ensemble of chains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub ensemble_size: usize,
    /// `counts[t][o]`: chains in order `o` after `t` steps.
    pub counts: Vec<[u64; 6]>,
}

impl Trajectory {
    pub fn distribution(&self, step: usize) -> [f64; 6] {
        let n = self.ensemble_size as f64;
        let mut out = [0.0; 6];
        for (o, c) in out.iter_mut().zip(&self.counts[step]) {
            *o = *c as f64 / n;
        }
        out
    }

    pub fn steps(&self) -> usize {
        self.counts.len() - 1
    }
}

const SHARD: usize = 4096;

fn sample_row<R: Rng>(rng: &mut R, row: &[f64; 6]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    row.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Run `ensemble_size` independent chains from `start` for `steps` steps.
///
/// Chains are split into fixed shards, each with its own seeded substream,
/// so the result does not depend on the thread count.
pub fn evolve(
    kernel: &RingKernel,
    start: WordOrder,
    steps: usize,
    ensemble_size: usize,
    seed: u64,
) -> Result<Trajectory> {
    if ensemble_size == 0 {
        return Err(Error::InvalidKernel("ensemble size must be >= 1".into()));
    }
    let matrix = transition_matrix(kernel)?;
    let shards = ensemble_size.div_ceil(SHARD);
    let partial: Vec<Vec<[u64; 6]>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let n = SHARD.min(ensemble_size - s * SHARD);
            let mut rng = rng::shard(seed, "evolve", s as u64);
            let mut state = vec![start.index(); n];
            let mut counts = vec![[0u64; 6]; steps + 1];
            counts[0][start.index()] = n as u64;
            for step_counts in counts.iter_mut().skip(1) {
                for x in state.iter_mut() {
                    *x = sample_row(&mut rng, &matrix[*x]);
                    step_counts[*x] += 1;
                }
            }
            counts
        })
        .collect();
    let mut counts = vec![[0u64; 6]; steps + 1];
    for shard in partial {
        for (acc, c) in counts.iter_mut().zip(shard) {
            for k in 0..6 {
                acc[k] += c[k];
            }
        }
    }
    Ok(Trajectory { ensemble_size, counts })
}

/// Exact distribution after `steps` steps from `start`.
pub fn exact_distribution(matrix: &TransitionMatrix, start: WordOrder, steps: usize) -> [f64; 6] {
    let mut dist = [0.0; 6];
    dist[start.index()] = 1.0;
    for _ in 0..steps {
        let mut next = [0.0; 6];
        for (i, p) in dist.iter().enumerate() {
            for j in 0..6 {
                next[j] += p * matrix[i][j];
            }
        }
        dist = next;
    }
    dist
}

/// One row of the reference table of dominant orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub label: &'static str,
    pub language_count: u32,
    pub language_pct: f64,
    pub family_count: u32,
    pub family_pct: f64,
}

impl FrequencyRow {
    const fn new(label: &'static str, lc: u32, lp: f64, fc: u32, fp: f64) -> Self {
        FrequencyRow { label, language_count: lc, language_pct: lp, family_count: fc, family_pct: fp }
    }
}

/// Counts of languages and families by dominant order (Hammarström 2016),
/// with percentages as printed (rounded to one decimal).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceFrequencies {
    /// In ring order.
    pub orders: [FrequencyRow; 6],
    pub no_dominant: FrequencyRow,
    pub verb_final: FrequencyRow,
    pub verb_medial: FrequencyRow,
    pub verb_initial: FrequencyRow,
    pub total_languages: u32,
    pub total_families: u32,
}

pub const REFERENCE: ReferenceFrequencies = ReferenceFrequencies {
    orders: [
        FrequencyRow::new("SOV", 2275, 43.3, 239, 65.3),
        FrequencyRow::new("SVO", 2117, 40.3, 55, 15.0),
        FrequencyRow::new("VSO", 503, 9.6, 27, 7.4),
        FrequencyRow::new("VOS", 174, 3.3, 15, 4.1),
        FrequencyRow::new("OVS", 40, 0.8, 3, 0.8),
        FrequencyRow::new("OSV", 19, 0.4, 1, 0.3),
    ],
    no_dominant: FrequencyRow::new("No dominant order", 124, 2.4, 26, 7.1),
    verb_final: FrequencyRow::new("**V", 2294, 43.7, 240, 65.6),
    verb_medial: FrequencyRow::new("*V*", 2157, 41.1, 58, 15.8),
    verb_initial: FrequencyRow::new("V**", 677, 13.9, 42, 11.5),
    total_languages: 5252,
    total_families: 366,
};

impl ReferenceFrequencies {
    pub fn row(&self, order: WordOrder) -> &FrequencyRow {
        &self.orders[order.index()]
    }

    /// Every row, including grouped ones, in printed order.
    pub fn all_rows(&self) -> Vec<&FrequencyRow> {
        let mut rows: Vec<&FrequencyRow> = self.orders.iter().collect();
        rows.extend([&self.no_dominant, &self.verb_final, &self.verb_medial, &self.verb_initial]);
        rows
    }

    /// Language percentage recomputed from counts.
    pub fn language_pct(&self, row: &FrequencyRow) -> f64 {
        100.0 * f64::from(row.language_count) / f64::from(self.total_languages)
    }

    pub fn family_pct(&self, row: &FrequencyRow) -> f64 {
        100.0 * f64::from(row.family_count) / f64::from(self.total_families)
    }

    /// Language shares renormalized over the six dominant orders.
    pub fn order_distribution(&self) -> [f64; 6] {
        let total: u32 = self.orders.iter().map(|r| r.language_count).sum();
        let mut out = [0.0; 6];
        for (o, r) in out.iter_mut().zip(&self.orders) {
            *o = f64::from(r.language_count) / f64::from(total);
        }
        out
    }

    /// Member orders of each grouped row.
    pub fn groups(&self) -> [(&FrequencyRow, [WordOrder; 2]); 3] {
        [
            (&self.verb_final, [WordOrder::SOV, WordOrder::OSV]),
            (&self.verb_medial, [WordOrder::SVO, WordOrder::OVS]),
            (&self.verb_initial, [WordOrder::VSO, WordOrder::VOS]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankAgreement {
    pub higher: WordOrder,
    pub lower: WordOrder,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub total_variation: f64,
    pub ranks: Vec<RankAgreement>,
}

/// Compare a distribution over the six orders (indexed by ring order) with
/// the reference language shares.
pub fn compare_to_reference(distribution: &[f64; 6]) -> Comparison {
    let reference = REFERENCE.order_distribution();
    let total_variation =
        0.5 * distribution.iter().zip(&reference).map(|(a, b)| (a - b).abs()).sum::<f64>();
    // Reference ranking happens to coincide with ring order.
    let mut ranked: Vec<WordOrder> = ALL_ORDERS.to_vec();
    ranked.sort_by(|a, b| reference[b.index()].total_cmp(&reference[a.index()]));
    let mut ranks = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            let (hi, lo) = (ranked[i], ranked[j]);
            ranks.push(RankAgreement {
                higher: hi,
                lower: lo,
                agrees: distribution[hi.index()] > distribution[lo.index()],
            });
        }
    }
    Comparison { total_variation, ranks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;
    use WordOrder::*;

    fn set(v: &[WordOrder]) -> BTreeSet<WordOrder> {
        v.iter().copied().collect()
    }

    fn bfs(a: WordOrder, b: WordOrder) -> usize {
        let mut dist = [usize::MAX; 6];
        dist[a.index()] = 0;
        let mut q = VecDeque::from([a]);
        while let Some(x) = q.pop_front() {
            for y in neighbors(x) {
                if dist[y.index()] == usize::MAX {
                    dist[y.index()] = dist[x.index()] + 1;
                    q.push_back(y);
                }
            }
        }
        dist[b.index()]
    }

    #[test]
    fn distances() {
        assert_eq!(ring_distance(SOV, SVO), 1);
        assert_eq!(ring_distance(SOV, OVS), 2);
        assert_eq!(ring_distance(SOV, SOV), 0);
        for a in ALL_ORDERS {
            for b in ALL_ORDERS {
                assert_eq!(ring_distance(a, b), bfs(a, b));
                assert_eq!(ring_distance(a, b), ring_distance(b, a));
            }
        }
    }

    #[test]
    fn neighbor_sets() {
        assert_eq!(neighbors(SOV), set(&[SVO, OSV]));
        assert_eq!(neighbors(SVO), set(&[SOV, VSO]));
        for (i, o) in ALL_ORDERS.iter().enumerate() {
            let want = set(&[ALL_ORDERS[(i + 1) % 6], ALL_ORDERS[(i + 5) % 6]]);
            assert_eq!(neighbors(*o), want);
        }
    }

    #[test]
    fn triple_optima() {
        assert_eq!(triple_optimal_orders(Constituent::Verb), set(&[SOV, OSV]));
        assert_eq!(triple_optimal_orders(Constituent::Object), set(&[SVO, VSO]));
        assert_eq!(triple_optimal_orders(Constituent::Subject), set(&[VOS, OVS]));
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_destinations(SOV, true, None).unwrap(), set(&[SVO, OSV]));
        assert_eq!(predicted_destinations(SOV, false, Some(Filter::Dlm)).unwrap(), set(&[SVO, OVS]));
        assert_eq!(predicted_destinations(SOV, true, Some(Filter::Dlm)).unwrap(), set(&[SVO]));
        assert_eq!(predicted_destinations(SVO, true, None).unwrap(), set(&[SOV, VSO]));
        assert_eq!(
            predicted_destinations(SVO, false, Some(Filter::NominalUncertainty)).unwrap(),
            set(&[VSO, VOS])
        );
        assert_eq!(
            predicted_destinations(SVO, true, Some(Filter::NominalUncertainty)).unwrap(),
            set(&[VSO])
        );
        assert!(matches!(predicted_destinations(VSO, true, None), Err(Error::UnsupportedSource(_))));
    }

    #[test]
    fn matrix_limits() {
        let k = RingKernel { decay: Decay::Exponential { beta: 60.0 }, ..Default::default() };
        let m = transition_matrix(&k).unwrap();
        assert!((m[SOV.index()][SVO.index()] - 0.5).abs() < 1e-12);
        assert!((m[SOV.index()][OSV.index()] - 0.5).abs() < 1e-12);

        let k = RingKernel { decay: Decay::Exponential { beta: 0.0 }, ..Default::default() };
        let m = transition_matrix(&k).unwrap();
        for o in ALL_ORDERS {
            let want = if o == SOV { 0.0 } else { 0.2 };
            assert!((m[SOV.index()][o.index()] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn dlm_filter_makes_svo_modal() {
        let k = RingKernel { filters: [(Filter::Dlm, 2.0)].into_iter().collect(), ..Default::default() };
        let m = transition_matrix(&k).unwrap();
        // Hand weights from SOV: SVO 2e^-1, OSV e^-1, VSO e^-2, OVS 2e^-2, VOS e^-3.
        let e = std::f64::consts::E;
        let w = [0.0, 2.0 / e, 1.0 / (e * e), 1.0 / (e * e * e), 2.0 / (e * e), 1.0 / e];
        let total: f64 = w.iter().sum();
        for o in ALL_ORDERS {
            assert!((m[SOV.index()][o.index()] - w[o.index()] / total).abs() < 1e-12);
        }
        let modal = (0..6).max_by(|&a, &b| m[0][a].total_cmp(&m[0][b])).unwrap();
        assert_eq!(WordOrder::from_index(modal), SVO);
    }

    #[test]
    fn kernel_validation() {
        let k = RingKernel { decay: Decay::Tabulated { weights: [1.0, 2.0, 0.5] }, ..Default::default() };
        assert!(matches!(transition_matrix(&k), Err(Error::InvalidKernel(_))));
        let k = RingKernel { filters: [(Filter::Dlm, 0.0), (Filter::NominalUncertainty, 0.0), (Filter::VerbUncertainty, 0.0)].into_iter().collect(), ..Default::default() };
        assert!(matches!(transition_matrix(&k), Err(Error::DegenerateRow(_))));
    }

    #[test]
    fn rows_are_stochastic() {
        let k = RingKernel {
            decay: Decay::InversePower { alpha: 1.5 },
            filters: [(Filter::AgentFirst, 3.0), (Filter::Dlm, 0.5)].into_iter().collect(),
            self_weight: 0.7,
        };
        let m = transition_matrix(&k).unwrap();
        for row in m {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(row.iter().all(|x| *x >= 0.0));
        }
    }

    #[test]
    fn evolve_basics() {
        let k = RingKernel::default();
        let t = evolve(&k, SOV, 0, 10, 1).unwrap();
        assert_eq!(t.distribution(0), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let a = evolve(&k, SVO, 5, 9000, 3).unwrap();
        let b = evolve(&k, SVO, 5, 9000, 3).unwrap();
        assert_eq!(a, b);
        for step in &a.counts {
            assert_eq!(step.iter().sum::<u64>(), 9000);
        }
    }

    #[test]
    fn symmetric_kernel_mixes_to_uniform() {
        let k = RingKernel { self_weight: 0.5, ..Default::default() };
        let m = transition_matrix(&k).unwrap();
        let exact = exact_distribution(&m, SOV, 60);
        let tv: f64 = 0.5 * exact.iter().map(|p| (p - 1.0 / 6.0).abs()).sum::<f64>();
        assert!(tv < 1e-6);
        let t = evolve(&k, SOV, 60, 100_000, 5).unwrap();
        let d = t.distribution(60);
        let tv: f64 = 0.5 * d.iter().map(|p| (p - 1.0 / 6.0).abs()).sum::<f64>();
        assert!(tv < 0.01, "tv {tv}");
    }

    #[test]
    fn reference_comparison() {
        let c = compare_to_reference(&REFERENCE.order_distribution());
        assert_eq!(c.total_variation, 0.0);
        assert_eq!(c.ranks.len(), 15);
        assert!(c.ranks.iter().all(|r| r.agrees));

        let counts: [f64; 6] = [2275.0, 2117.0, 503.0, 174.0, 40.0, 19.0];
        let tv: f64 = 0.5 * counts.iter().map(|c| (1.0 / 6.0 - c / 5128.0).abs()).sum::<f64>();
        let c = compare_to_reference(&[1.0 / 6.0; 6]);
        assert!((c.total_variation - tv).abs() < 1e-12);

        let c = compare_to_reference(&[0.3, 0.4, 0.1, 0.1, 0.05, 0.05]);
        let pair = c.ranks.iter().find(|r| r.higher == SOV && r.lower == SVO).unwrap();
        assert!(!pair.agrees);
    }

    #[test]
    fn parse_orders() {
        assert_eq!("svo".parse::<WordOrder>().unwrap(), SVO);
        assert!(matches!("SXV".parse::<WordOrder>(), Err(Error::UnknownOrder(_))));
    }
}
