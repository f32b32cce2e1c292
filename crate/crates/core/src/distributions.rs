//! Exact finite sequence models and the token sources built on them.
//!
//! A [`JointSequenceModel`] is a sparse probability table over tuples of
//! symbols, one symbol per role. All information-theoretic quantities in the
//! crate are computed by exact enumeration of such tables.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance on total mass accepted at construction.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Name of the role designated as the placement target when present.
pub const TARGET_ROLE: &str = "target";

/// Ordered set of distinct symbols. The position of a symbol is its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i as u32).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, index: u32) -> &str {
        &self.symbols[index as usize]
    }

    // Appends `symbol` if unseen and returns its index.
    fn intern(&mut self, symbol: &str) -> u32 {
        if let Some(i) = self.index.get(symbol) {
            return *i;
        }
        let i = self.symbols.len() as u32;
        self.symbols.push(symbol.to_string());
        self.index.insert(symbol.to_string(), i);
        i
    }

    fn empty() -> Self {
        Alphabet { symbols: Vec::new(), index: HashMap::new() }
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.symbols.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let symbols = Vec::<String>::deserialize(d)?;
        Alphabet::new(symbols).map_err(serde::de::Error::custom)
    }
}

/// Exact joint distribution over one symbol per role.
///
/// Zero-probability tuples are not stored. Keys are symbol indices into the
/// per-role alphabets, so iteration order is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSequenceModel {
    roles: Vec<String>,
    alphabets: Vec<Alphabet>,
    target: usize,
    table: BTreeMap<Vec<u32>, f64>,
}

impl JointSequenceModel {
    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    pub fn num_roles(&self) -> usize {
        self.roles.len()
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn alphabet(&self, role: &str) -> Result<&Alphabet> {
        Ok(&self.alphabets[self.role_index(role)?])
    }

    /// Name of the designated target role.
    pub fn target(&self) -> &str {
        &self.roles[self.target]
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    /// Roles other than the target, in canonical order.
    pub fn context_roles(&self) -> Vec<&str> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.target)
            .map(|(_, r)| r.as_str())
            .collect()
    }

    /// Re-designate the target role.
    pub fn with_target(mut self, role: &str) -> Result<Self> {
        self.target = self.role_index(role)?;
        Ok(self)
    }

    pub fn role_index(&self, role: &str) -> Result<usize> {
        self.roles
            .iter()
            .position(|r| r == role)
            .ok_or_else(|| Error::UnknownRole(role.to_string()))
    }

    pub fn role_indices<S: AsRef<str>>(&self, roles: &[S]) -> Result<Vec<usize>> {
        roles.iter().map(|r| self.role_index(r.as_ref())).collect()
    }

    /// Number of tuples with positive probability.
    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    /// Iterate `(symbol-index tuple, probability)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.table.iter().map(|(k, p)| (k.as_slice(), *p))
    }

    /// Iterate tuples as symbol strings.
    pub fn named_entries(&self) -> impl Iterator<Item = (Vec<&str>, f64)> + '_ {
        self.table.iter().map(move |(k, p)| {
            let t = k
                .iter()
                .zip(&self.alphabets)
                .map(|(i, a)| a.symbol(*i))
                .collect();
            (t, *p)
        })
    }

    /// Probability of a full tuple given as symbols.
    pub fn prob<S: AsRef<str>>(&self, tuple: &[S]) -> Result<f64> {
        let key = self.encode(tuple)?;
        Ok(self.table.get(&key).copied().unwrap_or(0.0))
    }

    pub fn total_mass(&self) -> f64 {
        self.table.values().sum()
    }

    fn encode<S: AsRef<str>>(&self, tuple: &[S]) -> Result<Vec<u32>> {
        if tuple.len() != self.roles.len() {
            return Err(Error::ArityMismatch {
                tuple: tuple.iter().map(|s| s.as_ref().to_string()).collect(),
                expected: self.roles.len(),
                got: tuple.len(),
            });
        }
        tuple
            .iter()
            .zip(&self.alphabets)
            .zip(&self.roles)
            .map(|((s, a), r)| {
                a.index_of(s.as_ref()).ok_or_else(|| Error::UnknownSymbol {
                    role: r.clone(),
                    symbol: s.as_ref().to_string(),
                })
            })
            .collect()
    }

    /// Marginal table over the roles at `idx`, keyed in the order of `idx`.
    pub fn marginal_table(&self, idx: &[usize]) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (k, p) in &self.table {
            let key: Vec<u32> = idx.iter().map(|&i| k[i]).collect();
            *out.entry(key).or_insert(0.0) += *p;
        }
        out
    }

    fn from_parts(
        roles: Vec<String>,
        alphabets: Vec<Alphabet>,
        table: BTreeMap<Vec<u32>, f64>,
    ) -> Result<Self> {
        if roles.is_empty() {
            return Err(Error::InvalidAlphabet("model needs at least one role".into()));
        }
        for (i, r) in roles.iter().enumerate() {
            if roles[..i].contains(r) {
                return Err(Error::RoleOverlap(r.clone()));
            }
        }
        let target = roles.iter().position(|r| r == TARGET_ROLE).unwrap_or(0);
        let mut model = JointSequenceModel { roles, alphabets, target, table };
        model.normalize()?;
        Ok(model)
    }

    // Drops zero entries and rescales a total that is off by more than
    // rounding noise. A table already within a few ulps of 1 is kept as is,
    // which makes reading a written model idempotent.
    fn normalize(&mut self) -> Result<()> {
        self.table.retain(|_, p| *p > 0.0);
        let total: f64 = self.table.values().sum();
        if !total.is_finite() || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::MassOutOfTolerance { total, tolerance: MASS_TOLERANCE });
        }
        let noise = f64::EPSILON * (self.table.len().max(1) as f64);
        if (total - 1.0).abs() > noise {
            for p in self.table.values_mut() {
                *p /= total;
            }
        }
        Ok(())
    }
}

/// Build a validated model from named tuples.
///
/// Alphabets are inferred in order of first appearance. Repeated tuples are
/// summed and zero-probability tuples dropped.
pub fn make_joint<R, S>(roles: &[R], entries: &[(Vec<S>, f64)]) -> Result<JointSequenceModel>
where
    R: AsRef<str>,
    S: AsRef<str>,
{
    let alphabets = vec![Alphabet::empty(); roles.len()];
    build(roles, alphabets, entries, true)
}

/// Build a validated model over explicitly declared alphabets.
pub fn make_joint_with_alphabets<R, S>(
    roles: &[R],
    alphabets: Vec<Alphabet>,
    entries: &[(Vec<S>, f64)],
) -> Result<JointSequenceModel>
where
    R: AsRef<str>,
    S: AsRef<str>,
{
    if alphabets.len() != roles.len() {
        return Err(Error::ArityMismatch {
            tuple: roles.iter().map(|r| r.as_ref().to_string()).collect(),
            expected: roles.len(),
            got: alphabets.len(),
        });
    }
    build(roles, alphabets, entries, false)
}

fn build<R, S>(
    roles: &[R],
    mut alphabets: Vec<Alphabet>,
    entries: &[(Vec<S>, f64)],
    infer: bool,
) -> Result<JointSequenceModel>
where
    R: AsRef<str>,
    S: AsRef<str>,
{
    let roles: Vec<String> = roles.iter().map(|r| r.as_ref().to_string()).collect();
    let mut table: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (tuple, p) in entries {
        let named = || tuple.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        if tuple.len() != roles.len() {
            return Err(Error::ArityMismatch {
                tuple: named(),
                expected: roles.len(),
                got: tuple.len(),
            });
        }
        if !(*p >= 0.0) || !p.is_finite() {
            return Err(Error::NegativeProbability { tuple: named(), p: *p });
        }
        let mut key = Vec::with_capacity(tuple.len());
        for ((s, a), r) in tuple.iter().zip(alphabets.iter_mut()).zip(&roles) {
            let i = if infer {
                a.intern(s.as_ref())
            } else {
                a.index_of(s.as_ref()).ok_or_else(|| Error::UnknownSymbol {
                    role: r.clone(),
                    symbol: s.as_ref().to_string(),
                })?
            };
            key.push(i);
        }
        *table.entry(key).or_insert(0.0) += *p;
    }
    if alphabets.iter().any(Alphabet::is_empty) {
        return Err(Error::MassOutOfTolerance { total: 0.0, tolerance: MASS_TOLERANCE });
    }
    JointSequenceModel::from_parts(roles, alphabets, table)
}

/// Default role labels: `target`, `context_1`, …, `context_{n-1}`.
pub fn placement_roles(n_roles: usize) -> Vec<String> {
    let mut roles = Vec::with_capacity(n_roles);
    if n_roles > 0 {
        roles.push(TARGET_ROLE.to_string());
    }
    roles.extend((1..n_roles).map(|i| format!("context_{i}")));
    roles
}

/// Position role labels `x_1`, …, `x_length`.
pub fn position_roles(length: usize) -> Vec<String> {
    (1..=length).map(|i| format!("x_{i}")).collect()
}

fn check_distribution<S: AsRef<str>>(marginal: &[(S, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for (s, p) in marginal {
        if !(*p >= 0.0) || !p.is_finite() {
            return Err(Error::NegativeProbability { tuple: vec![s.as_ref().to_string()], p: *p });
        }
        total += p;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::MassOutOfTolerance { total, tolerance: MASS_TOLERANCE });
    }
    Ok(total)
}

/// Product model of `n_roles` independent copies of `marginal`.
///
/// Roles are named `target`, `context_1`, ….
pub fn make_iid<S: AsRef<str>>(marginal: &[(S, f64)], n_roles: usize) -> Result<JointSequenceModel> {
    make_iid_with_roles(marginal, &placement_roles(n_roles))
}

pub fn make_iid_with_roles<S: AsRef<str>, R: AsRef<str>>(
    marginal: &[(S, f64)],
    roles: &[R],
) -> Result<JointSequenceModel> {
    check_distribution(marginal)?;
    if roles.is_empty() {
        return Err(Error::InvalidAlphabet("model needs at least one role".into()));
    }
    let alphabet = Alphabet::new(marginal.iter().map(|(s, _)| s.as_ref().to_string()))?;
    let probs: Vec<f64> = marginal.iter().map(|(_, p)| *p).collect();
    let n = roles.len();
    let mut table = BTreeMap::new();
    for key in product(&vec![alphabet.len(); n]) {
        let p: f64 = key.iter().map(|&i| probs[i as usize]).product();
        if p > 0.0 {
            table.insert(key, p);
        }
    }
    JointSequenceModel::from_parts(
        roles.iter().map(|r| r.as_ref().to_string()).collect(),
        vec![alphabet; n],
        table,
    )
}

/// Joint law of the first `length` states of a Markov chain.
///
/// Roles are named `x_1`, …, `x_length`; the target defaults to `x_1`.
pub fn make_markov<S: AsRef<str>>(
    states: &[S],
    initial: &[f64],
    transition: &[Vec<f64>],
    length: usize,
) -> Result<JointSequenceModel> {
    let chain = MarkovChain::new(states, initial, transition)?;
    chain.joint(length)
}

/// Validated Markov chain parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain {
    pub states: Vec<String>,
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
}

impl MarkovChain {
    pub fn new<S: AsRef<str>>(states: &[S], initial: &[f64], transition: &[Vec<f64>]) -> Result<Self> {
        let chain = MarkovChain {
            states: states.iter().map(|s| s.as_ref().to_string()).collect(),
            initial: initial.to_vec(),
            transition: transition.to_vec(),
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn validate(&self) -> Result<()> {
        Alphabet::new(self.states.clone())?;
        let k = self.states.len();
        if self.initial.len() != k {
            return Err(Error::ArityMismatch {
                tuple: self.states.clone(),
                expected: k,
                got: self.initial.len(),
            });
        }
        let named: Vec<(String, f64)> =
            self.states.iter().cloned().zip(self.initial.iter().copied()).collect();
        check_distribution(&named)?;
        if self.transition.len() != k {
            return Err(Error::ArityMismatch {
                tuple: self.states.clone(),
                expected: k,
                got: self.transition.len(),
            });
        }
        for (s, row) in self.states.iter().zip(&self.transition) {
            let total: f64 = row.iter().sum();
            if row.len() != k
                || row.iter().any(|p| !(*p >= 0.0) || !p.is_finite())
                || (total - 1.0).abs() > MASS_TOLERANCE
            {
                return Err(Error::NonStochasticRow { state: s.clone(), total });
            }
        }
        Ok(())
    }

    pub fn joint(&self, length: usize) -> Result<JointSequenceModel> {
        if length == 0 {
            return Err(Error::InvalidSource("markov length must be at least 1".into()));
        }
        let alphabet = Alphabet::new(self.states.clone())?;
        let mut layer: Vec<(Vec<u32>, f64)> = self
            .initial
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (vec![i as u32], *p))
            .collect();
        for _ in 1..length {
            let mut next = Vec::new();
            for (path, p) in &layer {
                let last = *path.last().unwrap() as usize;
                for (j, q) in self.transition[last].iter().enumerate() {
                    if *q > 0.0 {
                        let mut np = path.clone();
                        np.push(j as u32);
                        next.push((np, p * q));
                    }
                }
            }
            layer = next;
        }
        let table: BTreeMap<Vec<u32>, f64> = layer.into_iter().collect();
        JointSequenceModel::from_parts(position_roles(length), vec![alphabet; length], table)
    }
}

/// Sum out every role not in `kept_roles`. Kept roles retain their original
/// relative order.
pub fn marginalize<S: AsRef<str>>(
    model: &JointSequenceModel,
    kept_roles: &[S],
) -> Result<JointSequenceModel> {
    if kept_roles.is_empty() {
        return Err(Error::UnknownRole(String::new()));
    }
    let mut idx = model.role_indices(kept_roles)?;
    idx.sort_unstable();
    idx.dedup();
    let table = model.marginal_table(&idx);
    let roles: Vec<String> = idx.iter().map(|&i| model.roles[i].clone()).collect();
    let alphabets = idx.iter().map(|&i| model.alphabets[i].clone()).collect();
    let target = idx.iter().position(|&i| i == model.target).unwrap_or(0);
    let mut out = JointSequenceModel::from_parts(roles, alphabets, table)?;
    out.target = target;
    Ok(out)
}

/// Seeded random joint table with Dirichlet(1) weights over the full
/// product space; roles are `target`, `context_1`, ….
pub fn random_model(alphabet_sizes: &[usize], seed: u64) -> Result<JointSequenceModel> {
    let mut rng = rng::substream(seed, "random_model");
    let roles = placement_roles(alphabet_sizes.len());
    let alphabets: Vec<Alphabet> = alphabet_sizes
        .iter()
        .map(|&k| Alphabet::new((0..k).map(|i| format!("s{i}"))))
        .collect::<Result<_>>()?;
    let mut table = BTreeMap::new();
    let mut total = 0.0;
    for key in product(alphabet_sizes) {
        let u: f64 = rng.random();
        let w = -(1.0 - u).ln();
        total += w;
        table.insert(key, w);
    }
    for w in table.values_mut() {
        *w /= total;
    }
    JointSequenceModel::from_parts(roles, alphabets, table)
}

/// All index tuples of the product space with the given radices, in
/// lexicographic order.
pub fn product(radices: &[usize]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in radices {
        let mut next = Vec::with_capacity(out.len() * r);
        for prefix in &out {
            for s in 0..r as u32 {
                let mut t = prefix.clone();
                t.push(s);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// A generator of token sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSource", into = "RawSource")]
pub enum SequenceSource {
    Iid { marginal: Vec<(String, f64)> },
    Markov(MarkovChain),
    /// Repeats `block`; `offset` fixes the starting phase, otherwise it is
    /// drawn uniformly from the seed.
    Periodic { block: Vec<String>, offset: Option<usize> },
    Homogeneous { symbol: String },
    Empirical { tokens: Vec<String> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSource {
    Iid { marginal: Vec<(String, f64)> },
    Markov { states: Vec<String>, initial: Vec<f64>, transition: Vec<Vec<f64>> },
    Periodic {
        block: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<usize>,
    },
    Homogeneous { symbol: String },
    Empirical { tokens: Vec<String> },
}

impl TryFrom<RawSource> for SequenceSource {
    type Error = Error;
    fn try_from(raw: RawSource) -> Result<Self> {
        let s = match raw {
            RawSource::Iid { marginal } => SequenceSource::Iid { marginal },
            RawSource::Markov { states, initial, transition } => {
                SequenceSource::Markov(MarkovChain { states, initial, transition })
            }
            RawSource::Periodic { block, offset } => SequenceSource::Periodic { block, offset },
            RawSource::Homogeneous { symbol } => SequenceSource::Homogeneous { symbol },
            RawSource::Empirical { tokens } => SequenceSource::Empirical { tokens },
        };
        s.validate()?;
        Ok(s)
    }
}

impl From<SequenceSource> for RawSource {
    fn from(s: SequenceSource) -> Self {
        match s {
            SequenceSource::Iid { marginal } => RawSource::Iid { marginal },
            SequenceSource::Markov(c) => RawSource::Markov {
                states: c.states,
                initial: c.initial,
                transition: c.transition,
            },
            SequenceSource::Periodic { block, offset } => RawSource::Periodic { block, offset },
            SequenceSource::Homogeneous { symbol } => RawSource::Homogeneous { symbol },
            SequenceSource::Empirical { tokens } => RawSource::Empirical { tokens },
        }
    }
}

impl SequenceSource {
    pub fn iid<S: AsRef<str>>(marginal: &[(S, f64)]) -> Result<Self> {
        let s = SequenceSource::Iid {
            marginal: marginal.iter().map(|(s, p)| (s.as_ref().to_string(), *p)).collect(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn periodic<S: AsRef<str>>(block: &[S], offset: Option<usize>) -> Result<Self> {
        let s = SequenceSource::Periodic {
            block: block.iter().map(|s| s.as_ref().to_string()).collect(),
            offset,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn homogeneous(symbol: &str) -> Self {
        SequenceSource::Homogeneous { symbol: symbol.to_string() }
    }

    pub fn empirical<S: AsRef<str>>(tokens: &[S]) -> Self {
        SequenceSource::Empirical { tokens: tokens.iter().map(|s| s.as_ref().to_string()).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSource::Iid { marginal } => {
                if marginal.is_empty() {
                    return Err(Error::InvalidSource("iid marginal is empty".into()));
                }
                Alphabet::new(marginal.iter().map(|(s, _)| s.clone()))?;
                check_distribution(marginal).map(|_| ())
            }
            SequenceSource::Markov(chain) => chain.validate(),
            SequenceSource::Periodic { block, offset } => {
                if block.is_empty() {
                    return Err(Error::InvalidSource("periodic block must have length >= 1".into()));
                }
                if let Some(o) = offset {
                    if *o >= block.len() {
                        return Err(Error::InvalidSource(format!(
                            "offset {o} outside block of length {}",
                            block.len()
                        )));
                    }
                }
                Ok(())
            }
            SequenceSource::Homogeneous { .. } | SequenceSource::Empirical { .. } => Ok(()),
        }
    }

    /// Exact joint law of the first `length` tokens, over roles
    /// `x_1..x_length`. Empirical sources have no exact law.
    pub fn joint(&self, length: usize) -> Result<JointSequenceModel> {
        if length == 0 {
            return Err(Error::InvalidSource("length must be at least 1".into()));
        }
        let roles = position_roles(length);
        match self {
            SequenceSource::Iid { marginal } => make_iid_with_roles(marginal, &roles),
            SequenceSource::Markov(chain) => chain.joint(length),
            SequenceSource::Homogeneous { symbol } => {
                make_joint(&roles, &[(vec![symbol.as_str(); length], 1.0)])
            }
            SequenceSource::Periodic { block, offset } => {
                let t = block.len();
                let phases: Vec<usize> = match offset {
                    Some(o) => vec![*o],
                    None => (0..t).collect(),
                };
                let w = 1.0 / phases.len() as f64;
                let entries: Vec<(Vec<&str>, f64)> = phases
                    .iter()
                    .map(|&o| ((0..length).map(|k| block[(o + k) % t].as_str()).collect(), w))
                    .collect();
                let mut alphabet_symbols: Vec<&str> = Vec::new();
                for s in block {
                    if !alphabet_symbols.contains(&s.as_str()) {
                        alphabet_symbols.push(s);
                    }
                }
                let alphabet = Alphabet::new(alphabet_symbols)?;
                make_joint_with_alphabets(&roles, vec![alphabet; length], &entries)
            }
            SequenceSource::Empirical { .. } => Err(Error::InvalidSource(
                "empirical sources have no exact joint law; estimate from counts instead".into(),
            )),
        }
    }
}

fn sample_index<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave `acc` just below 1; fall back to the last positive entry.
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Emit `length` tokens from `source`. Deterministic in `(source, length, seed)`.
pub fn generate(source: &SequenceSource, length: usize, seed: u64) -> Vec<String> {
    let mut rng = rng::substream(seed, "generate");
    match source {
        SequenceSource::Iid { marginal } => {
            let probs: Vec<f64> = marginal.iter().map(|(_, p)| *p).collect();
            (0..length).map(|_| marginal[sample_index(&mut rng, &probs)].0.clone()).collect()
        }
        SequenceSource::Markov(chain) => {
            let mut out = Vec::with_capacity(length);
            if length == 0 {
                return out;
            }
            let mut state = sample_index(&mut rng, &chain.initial);
            out.push(chain.states[state].clone());
            for _ in 1..length {
                state = sample_index(&mut rng, &chain.transition[state]);
                out.push(chain.states[state].clone());
            }
            out
        }
        SequenceSource::Periodic { block, offset } => {
            let t = block.len();
            let start = offset.unwrap_or_else(|| rng.random_range(0..t));
            (0..length).map(|k| block[(start + k) % t].clone()).collect()
        }
        SequenceSource::Homogeneous { symbol } => vec![symbol.clone(); length],
        SequenceSource::Empirical { tokens } => {
            if tokens.is_empty() {
                return Vec::new();
            }
            (0..length).map(|k| tokens[k % tokens.len()].clone()).collect()
        }
    }
}

/// Uniformly random permutation of `sequence`, deterministic per seed.
pub fn scramble<T: Clone>(sequence: &[T], seed: u64) -> Vec<T> {
    let mut out = sequence.to_vec();
    let mut rng = rng::substream(seed, "scramble");
    out.shuffle(&mut rng);
    out
}

/// On-disk representation of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub roles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub alphabets: Vec<Vec<String>>,
    pub entries: Vec<ModelEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub tuple: Vec<String>,
    pub p: f64,
}

impl From<&JointSequenceModel> for ModelFile {
    fn from(m: &JointSequenceModel) -> Self {
        ModelFile {
            roles: m.roles.clone(),
            target: Some(m.target().to_string()),
            alphabets: m.alphabets.iter().map(|a| a.symbols.clone()).collect(),
            entries: m
                .named_entries()
                .map(|(t, p)| ModelEntry { tuple: t.into_iter().map(String::from).collect(), p })
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for JointSequenceModel {
    type Error = Error;
    fn try_from(f: ModelFile) -> Result<Self> {
        let alphabets = f.alphabets.into_iter().map(Alphabet::new).collect::<Result<Vec<_>>>()?;
        let entries: Vec<(Vec<String>, f64)> = f.entries.into_iter().map(|e| (e.tuple, e.p)).collect();
        let model = make_joint_with_alphabets(&f.roles, alphabets, &entries)?;
        match f.target {
            Some(t) => model.with_target(&t),
            None => Ok(model),
        }
    }
}

impl JointSequenceModel {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        f.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn two_point_mass() {
        let m = make_joint(&["target", "context_1"], &[(vec!["a", "a"], 0.5), (vec!["b", "b"], 0.5)])
            .unwrap();
        let t = marginalize(&m, &["target"]).unwrap();
        assert!(close(t.prob(&["a"]).unwrap(), 0.5));
    }

    #[test]
    fn mass_too_low_is_rejected() {
        let err = make_joint(&["x"], &[(vec!["a"], 0.5), (vec!["b"], 0.4)]).unwrap_err();
        assert!(matches!(err, Error::MassOutOfTolerance { .. }));
    }

    #[test]
    fn negative_and_arity_errors() {
        let err = make_joint(&["x"], &[(vec!["a"], 1.5), (vec!["b"], -0.5)]).unwrap_err();
        assert!(matches!(err, Error::NegativeProbability { .. }));
        let err = make_joint(&["x", "y"], &[(vec!["a"], 1.0)]).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 2, got: 1, .. }));
    }

    #[test]
    fn near_one_mass_is_renormalized() {
        let m = make_joint(&["x"], &[(vec!["a"], 0.5 + 4e-13), (vec!["b"], 0.5)]).unwrap();
        assert!((m.total_mass() - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn uniform_three_roles() {
        let entries: Vec<(Vec<String>, f64)> = product(&[2, 2, 2])
            .into_iter()
            .map(|k| (k.iter().map(|i| ["a", "b"][*i as usize].to_string()).collect(), 0.125))
            .collect();
        let m = make_joint(&["target", "context_1", "context_2"], &entries).unwrap();
        for r in m.roles().to_vec() {
            let mm = marginalize(&m, &[r.as_str()]).unwrap();
            assert!(close(mm.prob(&["a"]).unwrap(), 0.5));
        }
        let two = marginalize(&m, &["target", "context_2"]).unwrap();
        for t in [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]] {
            assert!(close(two.prob(&t).unwrap(), 0.25));
        }
        let all = marginalize(&m, &["target", "context_1", "context_2"]).unwrap();
        assert_eq!(all, m);
    }

    #[test]
    fn iid_products() {
        let m = make_iid(&[("a", 0.5), ("b", 0.5)], 3).unwrap();
        assert_eq!(m.support_size(), 8);
        assert!(m.entries().all(|(_, p)| close(p, 0.125)));

        let m = make_iid(&[("a", 1.0)], 2).unwrap();
        assert_eq!(m.support_size(), 1);
        assert_eq!(m.prob(&["a", "a"]).unwrap(), 1.0);

        let m = make_iid(&[("a", 0.25), ("b", 0.75)], 2).unwrap();
        assert!(close(m.prob(&["a", "b"]).unwrap(), 0.1875));
    }

    #[test]
    fn markov_tables() {
        let m = make_markov(&["a", "b"], &[1.0, 0.0], &[vec![0.0, 1.0], vec![1.0, 0.0]], 3).unwrap();
        assert_eq!(m.prob(&["a", "b", "a"]).unwrap(), 1.0);

        let m = make_markov(&["a", "b"], &[0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]], 2).unwrap();
        assert!(m.entries().all(|(_, p)| close(p, 0.25)));
        assert_eq!(m.support_size(), 4);

        let m = make_markov(&["a", "b"], &[0.6, 0.4], &[vec![0.9, 0.1], vec![0.2, 0.8]], 2).unwrap();
        assert!(close(m.prob(&["a", "a"]).unwrap(), 0.54));

        let err = make_markov(&["a", "b"], &[0.5, 0.5], &[vec![0.5, 0.4], vec![0.5, 0.5]], 2).unwrap_err();
        assert!(matches!(err, Error::NonStochasticRow { .. }));
    }

    #[test]
    fn unknown_role() {
        let m = make_iid(&[("a", 1.0)], 2).unwrap();
        assert!(matches!(marginalize(&m, &["nope"]), Err(Error::UnknownRole(_))));
    }

    #[test]
    fn generate_examples() {
        let s = SequenceSource::homogeneous("a");
        assert_eq!(generate(&s, 4, 1), vec!["a"; 4]);

        let s = SequenceSource::periodic(&["a", "b", "c"], Some(0)).unwrap();
        assert_eq!(generate(&s, 6, 99).join(" "), "a b c a b c");

        let s = SequenceSource::iid(&[("a", 0.5), ("b", 0.5)]).unwrap();
        let seq = generate(&s, 10_000, 42);
        let freq = seq.iter().filter(|t| *t == "a").count() as f64 / 1e4;
        assert!((freq - 0.5).abs() <= 0.02, "freq {freq}");
    }

    #[test]
    fn seeded_periodic_offset_is_uniform_phase() {
        let s = SequenceSource::periodic(&["a", "b", "c"], None).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let seq = generate(&s, 3, seed);
            seen.insert(seq.join(""));
        }
        let want: std::collections::BTreeSet<String> =
            ["abc", "bca", "cab"].iter().map(|s| s.to_string()).collect();
        assert_eq!(seen, want);
    }

    #[test]
    fn empirical_cycles() {
        let s = SequenceSource::empirical(&["x", "y"]);
        assert_eq!(generate(&s, 5, 0), vec!["x", "y", "x", "y", "x"]);
        assert_eq!(generate(&s, 1, 0), vec!["x"]);
    }

    #[test]
    fn scramble_examples() {
        assert_eq!(scramble(&["a", "a", "a"], 5), vec!["a", "a", "a"]);
        assert!(scramble::<String>(&[], 5).is_empty());
    }

    #[test]
    fn periodic_joint_has_uniform_phases() {
        let s = SequenceSource::periodic(&["a", "b", "c"], None).unwrap();
        let m = s.joint(4).unwrap();
        assert_eq!(m.support_size(), 3);
        assert!(close(m.prob(&["b", "c", "a", "b"]).unwrap(), 1.0 / 3.0));
    }

    #[test]
    fn source_json_validates() {
        let bad = r#"{"kind":"periodic","block":[]}"#;
        assert!(serde_json::from_str::<SequenceSource>(bad).is_err());
        let good = r#"{"kind":"iid","marginal":[["a",0.5],["b",0.5]]}"#;
        let s: SequenceSource = serde_json::from_str(good).unwrap();
        assert_eq!(s, SequenceSource::iid(&[("a", 0.5), ("b", 0.5)]).unwrap());
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let m = random_model(&[3, 2, 4], 11).unwrap();
        let text = m.to_json();
        let back = JointSequenceModel::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn scramble_preserves_multiset(tokens in proptest::collection::vec(0u8..6, 0..60), seed: u64) {
            let mut a = tokens.clone();
            let mut b = scramble(&tokens, seed);
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn generate_is_reproducible(seed: u64, len in 0usize..200) {
            let s = SequenceSource::iid(&[("a", 0.3), ("b", 0.7)]).unwrap();
            prop_assert_eq!(generate(&s, len, seed), generate(&s, len, seed));
        }

        #[test]
        fn iid_marginal_is_exact(w in proptest::collection::vec(1u32..100, 1..5), n in 1usize..4) {
            let total: u32 = w.iter().sum();
            let marginal: Vec<(String, f64)> = w
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("s{i}"), f64::from(*x) / f64::from(total)))
                .collect();
            let m = make_iid(&marginal, n).unwrap();
            prop_assert!((m.total_mass() - 1.0).abs() <= 1e-12);
            for role in m.roles().to_vec() {
                let one = marginalize(&m, &[role.as_str()]).unwrap();
                for (s, p) in &marginal {
                    prop_assert!((one.prob(&[s.as_str()]).unwrap() - p).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn json_round_trip_prop(sizes in proptest::collection::vec(1usize..4, 1..4), seed: u64) {
            let m = random_model(&sizes, seed).unwrap();
            let text = m.to_json();
            let again = JointSequenceModel::from_json(&text).unwrap().to_json();
            prop_assert_eq!(again, text);
        }
    }
}
