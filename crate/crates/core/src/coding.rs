//! Code-length assignment and the mean-length quantities of optimal coding,
//! with and without a preceding context.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on total probability mass of a table.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Slack on `tau <= 0` in the abbreviation verdict.
pub const TAU_SLACK: f64 = 1e-12;

fn check_mass(probs: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for (i, p) in probs.enumerate() {
        if !(p >= 0.0) {
            return Err(Error::NegativeProbability { tuple: vec![i.to_string()], p });
        }
        total += p;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::MassOutOfTolerance { total, tolerance: MASS_TOLERANCE });
    }
    Ok(())
}

fn check_lengths(lengths: &[u32], allow_full_reduction: bool) -> Result<()> {
    if !allow_full_reduction {
        if let Some(i) = lengths.iter().position(|&l| l == 0) {
            return Err(Error::InvalidLengths(format!(
                "length 0 at index {i} needs full reduction to be allowed"
            )));
        }
    }
    Ok(())
}

/// `ceil(-log2 p)` per entry. Lengths are at least 1 unless
/// `allow_full_reduction`, in which case a certain type gets length 0.
pub fn optimal_lengths(probabilities: &[f64], allow_full_reduction: bool) -> Result<Vec<u32>> {
    probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if p < 0.0 {
                return Err(Error::NegativeProbability { tuple: vec![i.to_string()], p });
            }
            if !(p > 0.0) {
                return Err(Error::ZeroProbability(i));
            }
            let l = (-p.log2()).ceil().max(0.0) as u32;
            Ok(if allow_full_reduction { l } else { l.max(1) })
        })
        .collect()
}

/// Entropy in bits of a probability list.
pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    0.0 - probabilities.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Types with their probabilities and code lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeTable {
    pub types: Vec<String>,
    pub probabilities: Vec<f64>,
    pub lengths: Vec<u32>,
    pub allow_full_reduction: bool,
}

impl TypeTable {
    pub fn new(
        types: Vec<String>,
        probabilities: Vec<f64>,
        lengths: Vec<u32>,
        allow_full_reduction: bool,
    ) -> Result<Self> {
        if types.len() != probabilities.len() || types.len() != lengths.len() {
            return Err(Error::InvalidLengths(format!(
                "{} types, {} probabilities, {} lengths",
                types.len(),
                probabilities.len(),
                lengths.len()
            )));
        }
        if types.is_empty() {
            return Err(Error::InvalidLengths("empty table".into()));
        }
        check_mass(probabilities.iter().copied())?;
        check_lengths(&lengths, allow_full_reduction)?;
        Ok(TypeTable { types, probabilities, lengths, allow_full_reduction })
    }

    /// Table with lengths from [`optimal_lengths`].
    pub fn optimal(types: Vec<String>, probabilities: Vec<f64>, allow_full_reduction: bool) -> Result<Self> {
        let lengths = optimal_lengths(&probabilities, allow_full_reduction)?;
        TypeTable::new(types, probabilities, lengths, allow_full_reduction)
    }

    /// Anonymous types named by their index.
    pub fn from_probabilities(probabilities: Vec<f64>, allow_full_reduction: bool) -> Result<Self> {
        let types = (0..probabilities.len()).map(|i| i.to_string()).collect();
        TypeTable::optimal(types, probabilities, allow_full_reduction)
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probabilities)
    }

    pub fn kraft_sum(&self) -> f64 {
        self.lengths.iter().map(|&l| (-f64::from(l)).exp2()).sum()
    }

    pub fn abbreviation(&self) -> Result<AbbreviationVerdict> {
        abbreviation_check(&self.probabilities, &self.lengths)
    }
}

/// `L = sum p_i l_i`
pub fn mean_length(table: &TypeTable) -> f64 {
    weighted_length(&table.probabilities, &table.lengths)
}

fn weighted_length(p: &[f64], l: &[u32]) -> f64 {
    p.iter().zip(l).map(|(p, &l)| p * f64::from(l)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextRow {
    pub context: Vec<String>,
    pub target: String,
    pub p: f64,
    pub length: u32,
}

/// Joint probabilities and lengths of a target type after a context of
/// `order` preceding types. Combinations not listed carry zero mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextTable {
    pub order: usize,
    pub rows: Vec<ContextRow>,
    pub allow_full_reduction: bool,
}

impl ContextTable {
    pub fn new(order: usize, rows: Vec<ContextRow>, allow_full_reduction: bool) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidLengths("empty table".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &rows {
            if r.context.len() != order {
                let mut tuple = r.context.clone();
                tuple.push(r.target.clone());
                return Err(Error::ArityMismatch { tuple, expected: order, got: r.context.len() });
            }
            if !seen.insert((&r.context, &r.target)) {
                return Err(Error::InputParse(format!(
                    "duplicate row for context {:?} and target {:?}",
                    r.context, r.target
                )));
            }
        }
        check_mass(rows.iter().map(|r| r.p))?;
        let lengths: Vec<u32> = rows.iter().map(|r| r.length).collect();
        check_lengths(&lengths, allow_full_reduction)?;
        Ok(ContextTable { order, rows, allow_full_reduction })
    }

    /// Lengths `ceil(-log2 p(y | context))` from joint masses
    /// `(context, target, p)`.
    pub fn with_optimal_lengths(
        order: usize,
        joint: Vec<(Vec<String>, String, f64)>,
        allow_full_reduction: bool,
    ) -> Result<Self> {
        let mut context_mass: BTreeMap<&[String], f64> = BTreeMap::new();
        for (c, _, p) in &joint {
            *context_mass.entry(c.as_slice()).or_insert(0.0) += p;
        }
        let conditional: Vec<f64> = joint.iter().map(|(c, _, p)| p / context_mass[c.as_slice()]).collect();
        for (i, (_, _, p)) in joint.iter().enumerate() {
            if *p < 0.0 {
                return Err(Error::NegativeProbability { tuple: vec![i.to_string()], p: *p });
            }
        }
        let lengths = optimal_lengths(&conditional, allow_full_reduction)?;
        let rows = joint
            .into_iter()
            .zip(lengths)
            .map(|((context, target, p), length)| ContextRow { context, target, p, length })
            .collect();
        ContextTable::new(order, rows, allow_full_reduction)
    }

    /// The empty-context table equivalent to a type table.
    pub fn from_types(table: &TypeTable) -> Self {
        let rows = table
            .types
            .iter()
            .zip(&table.probabilities)
            .zip(&table.lengths)
            .map(|((t, &p), &length)| ContextRow { context: Vec::new(), target: t.clone(), p, length })
            .collect();
        ContextTable { order: 0, rows, allow_full_reduction: table.allow_full_reduction }
    }

    /// Distinct targets in order of first appearance.
    pub fn targets(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.rows.iter().map(|r| r.target.as_str()).filter(|t| seen.insert(*t)).collect()
    }

    fn rows_for<'a>(&'a self, target: &'a str) -> Result<impl Iterator<Item = &'a ContextRow> + 'a> {
        if !self.rows.iter().any(|r| r.target == target) {
            return Err(Error::UnknownTarget(target.to_string()));
        }
        Ok(self.rows.iter().filter(move |r| r.target == target))
    }

    /// `p(y)`, the total mass of a target over all contexts.
    pub fn target_mass(&self, target: &str) -> Result<f64> {
        Ok(self.rows_for(target)?.map(|r| r.p).sum())
    }

    /// `p(context | y)` for each context the target occurs in.
    pub fn conditional_weights(&self, target: &str) -> Result<Vec<(Vec<String>, f64)>> {
        let mass = self.target_mass(target)?;
        if !(mass > 0.0) {
            return Err(Error::ZeroTargetMass(target.to_string()));
        }
        Ok(self.rows_for(target)?.map(|r| (r.context.clone(), r.p / mass)).collect())
    }

    pub fn abbreviation(&self) -> Result<AbbreviationVerdict> {
        let p: Vec<f64> = self.rows.iter().map(|r| r.p).collect();
        let l: Vec<u32> = self.rows.iter().map(|r| r.length).collect();
        abbreviation_check(&p, &l)
    }
}

/// `L_n = sum p(x.., y) l(x.., y)`
pub fn contextual_mean_length(table: &ContextTable) -> f64 {
    table.rows.iter().map(|r| r.p * f64::from(r.length)).sum()
}

/// `L_n(y)`, the contribution of one target to `L_n`.
pub fn per_target_length(table: &ContextTable, target: &str) -> Result<f64> {
    Ok(table.rows_for(target)?.map(|r| r.p * f64::from(r.length)).sum())
}

/// `M_n(y) = L_n(y) / p(y)`
pub fn renormalized_length(table: &ContextTable, target: &str) -> Result<f64> {
    let mass = table.target_mass(target)?;
    if !(mass > 0.0) {
        return Err(Error::ZeroTargetMass(target.to_string()));
    }
    Ok(per_target_length(table, target)? / mass)
}

/// Tie-corrected Kendall tau (tau-b).
pub fn kendall_tau(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::TooFewPairs { needed: 2, got: pairs.len() });
    }
    let (mut concordant, mut discordant, mut ties_x, mut ties_y, mut total) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for (i, a) in pairs.iter().enumerate() {
        for b in &pairs[i + 1..] {
            total += 1;
            let dx = a.0 - b.0;
            let dy = a.1 - b.1;
            if dx == 0.0 {
                ties_x += 1;
            }
            if dy == 0.0 {
                ties_y += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let denom = ((total - ties_x) as f64 * (total - ties_y) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::AllTied);
    }
    Ok((concordant - discordant) as f64 / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbbreviationVerdict {
    /// `None` when every pair is tied on one side.
    pub tau: Option<f64>,
    pub holds: bool,
}

/// Whether more probable types get weakly shorter codes: `tau(p, l) <= 0`.
/// A fully tied table holds vacuously.
pub fn abbreviation_check(probabilities: &[f64], lengths: &[u32]) -> Result<AbbreviationVerdict> {
    if probabilities.len() != lengths.len() {
        return Err(Error::InvalidLengths(format!(
            "{} probabilities, {} lengths",
            probabilities.len(),
            lengths.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = probabilities.iter().zip(lengths).map(|(&p, &l)| (p, f64::from(l))).collect();
    match kendall_tau(&pairs) {
        Ok(tau) => Ok(AbbreviationVerdict { tau: Some(tau), holds: tau <= TAU_SLACK }),
        Err(Error::AllTied) => Ok(AbbreviationVerdict { tau: None, holds: true }),
        Err(e) => Err(e),
    }
}

/// Every distinct arrangement of a multiset of lengths that minimizes the
/// mean length, by exhaustive search. Meant for small tables.
pub fn minimal_assignments(probabilities: &[f64], lengths: &[u32]) -> Result<Vec<Vec<u32>>> {
    if probabilities.len() != lengths.len() {
        return Err(Error::InvalidLengths(format!(
            "{} probabilities, {} lengths",
            probabilities.len(),
            lengths.len()
        )));
    }
    let arrangements: BTreeSet<Vec<u32>> = lengths.iter().copied().permutations(lengths.len()).collect();
    let scored: Vec<(f64, Vec<u32>)> =
        arrangements.into_iter().map(|a| (weighted_length(probabilities, &a), a)).collect();
    let best = scored.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
    Ok(scored.into_iter().filter(|(s, _)| *s <= best + 1e-12).map(|(_, a)| a).collect())
}

/// No transposition of two lengths lowers the mean length.
pub fn is_swap_optimal(probabilities: &[f64], lengths: &[u32]) -> bool {
    let base = weighted_length(probabilities, lengths);
    let mut l = lengths.to_vec();
    (0..l.len()).tuple_combinations().all(|(i, j)| {
        l.swap(i, j);
        let ok = weighted_length(probabilities, &l) >= base - 1e-12;
        l.swap(i, j);
        ok
    })
}

/// Lengths of a multiset sorted against the probabilities: the most probable
/// type gets the shortest length.
pub fn sort_against(probabilities: &[f64], lengths: &[u32]) -> Vec<u32> {
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let order: Vec<usize> = (0..probabilities.len())
        .sorted_by(|&a, &b| probabilities[b].total_cmp(&probabilities[a]).then(a.cmp(&b)))
        .collect();
    let mut out = vec![0; lengths.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        out[idx] = sorted[rank];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::random_model;
    use rand::Rng;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn lengths_by_hand() {
        assert_eq!(optimal_lengths(&[0.5, 0.25, 0.25], false).unwrap(), vec![1, 2, 2]);
        assert_eq!(optimal_lengths(&[0.125; 8], false).unwrap(), vec![3; 8]);
        assert_eq!(optimal_lengths(&[0.4, 0.3, 0.3], false).unwrap(), vec![2, 2, 2]);
        assert_eq!(optimal_lengths(&[1.0], false).unwrap(), vec![1]);
        assert_eq!(optimal_lengths(&[1.0], true).unwrap(), vec![0]);
        assert!(matches!(optimal_lengths(&[0.5, 0.0, 0.5], false), Err(Error::ZeroProbability(1))));
    }

    #[test]
    fn mean_lengths() {
        let t = TypeTable::optimal(s(&["a", "b", "c"]), vec![0.5, 0.25, 0.25], false).unwrap();
        assert_eq!(mean_length(&t), 1.5);
        let t = TypeTable::new(s(&["a", "b"]), vec![0.3, 0.7], vec![1, 1], false).unwrap();
        assert_eq!(mean_length(&t), 1.0);
        let t = TypeTable::new(s(&["a"]), vec![1.0], vec![5], false).unwrap();
        assert_eq!(mean_length(&t), 5.0);
        assert!(matches!(
            TypeTable::new(s(&["a"]), vec![1.0], vec![0], false),
            Err(Error::InvalidLengths(_))
        ));
        assert!(matches!(
            TypeTable::new(s(&["a", "b"]), vec![0.5, 0.4], vec![1, 1], false),
            Err(Error::MassOutOfTolerance { .. })
        ));
    }

    #[test]
    fn empty_context_reduces_to_mean_length() {
        let t = TypeTable::optimal(s(&["a", "b", "c", "d"]), vec![0.4, 0.3, 0.2, 0.1], false).unwrap();
        let c = ContextTable::from_types(&t);
        assert_eq!(contextual_mean_length(&c), mean_length(&t));
        let joint = t.types.iter().zip(&t.probabilities).map(|(y, p)| (vec![], y.clone(), *p)).collect();
        let c2 = ContextTable::with_optimal_lengths(0, joint, false).unwrap();
        assert_eq!(c2, c);
    }

    #[test]
    fn context_examples() {
        let rows = (0..4)
            .map(|i| ContextRow { context: vec![format!("c{}", i % 2)], target: format!("y{}", i / 2), p: 0.25, length: 2 })
            .collect();
        let t = ContextTable::new(1, rows, false).unwrap();
        assert_eq!(contextual_mean_length(&t), 2.0);
        assert_eq!(renormalized_length(&t, "y0").unwrap(), 2.0);
        assert!(matches!(per_target_length(&t, "zz"), Err(Error::UnknownTarget(_))));

        let rows = vec![
            ContextRow { context: s(&["c"]), target: "y".into(), p: 0.6, length: 3 },
            ContextRow { context: s(&["c"]), target: "z".into(), p: 0.4, length: 1 },
        ];
        let t = ContextTable::new(1, rows, false).unwrap();
        assert_eq!(renormalized_length(&t, "y").unwrap(), 3.0);

        let rows = vec![
            ContextRow { context: s(&["c"]), target: "y".into(), p: 1.0, length: 3 },
            ContextRow { context: s(&["d"]), target: "z".into(), p: 0.0, length: 1 },
        ];
        let t = ContextTable::new(1, rows, false).unwrap();
        assert_eq!(per_target_length(&t, "z").unwrap(), 0.0);
        assert_eq!(per_target_length(&t, "y").unwrap(), contextual_mean_length(&t));
        assert!(matches!(renormalized_length(&t, "z"), Err(Error::ZeroTargetMass(_))));
    }

    fn seeded_context_table(seed: u64) -> ContextTable {
        let m = random_model(&[3, 2, 4], seed).unwrap();
        let joint = m
            .named_entries()
            .map(|(k, p)| (vec![k[1].to_string(), k[2].to_string()], k[0].to_string(), p))
            .collect();
        ContextTable::with_optimal_lengths(2, joint, false).unwrap()
    }

    #[test]
    fn decomposition_identities() {
        for seed in 0..20 {
            let t = seeded_context_table(seed);
            let oracle: f64 = t.rows.iter().map(|r| r.p * r.length as f64).sum();
            let total = contextual_mean_length(&t);
            assert!((total - oracle).abs() <= 1e-12);
            let parts: f64 = t.targets().iter().map(|y| per_target_length(&t, y).unwrap()).sum();
            assert!((parts - total).abs() <= 1e-12);
            for y in t.targets() {
                let m = renormalized_length(&t, y).unwrap();
                let w = t.conditional_weights(y).unwrap();
                assert!((w.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() <= 1e-12);
                let direct: f64 = w
                    .iter()
                    .map(|(c, p)| p * t.rows.iter().find(|r| &r.context == c && r.target == y).unwrap().length as f64)
                    .sum();
                assert!((m - direct).abs() <= 1e-12);
                assert!((m * t.target_mass(y).unwrap() - per_target_length(&t, y).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn tau_cases() {
        assert_eq!(kendall_tau(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]).unwrap(), -1.0);
        assert_eq!(kendall_tau(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap(), 1.0);
        assert!(matches!(kendall_tau(&[(1.0, 1.0)]), Err(Error::TooFewPairs { .. })));
        assert!(matches!(kendall_tau(&[(1.0, 2.0), (3.0, 2.0)]), Err(Error::AllTied)));
        // (0.5,1) (0.3,2) (0.2,2): two discordant, one tie on lengths.
        let tau = kendall_tau(&[(0.5, 1.0), (0.3, 2.0), (0.2, 2.0)]).unwrap();
        assert!((tau - (-2.0 / (3.0f64 * 2.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn abbreviation_verdicts() {
        let p = [0.4, 0.3, 0.2, 0.1];
        assert!(abbreviation_check(&p, &optimal_lengths(&p, false).unwrap()).unwrap().holds);
        assert!(!abbreviation_check(&p, &[4, 3, 2, 1]).unwrap().holds);
        let v = abbreviation_check(&[0.4, 0.3, 0.3], &[2, 2, 2]).unwrap();
        assert_eq!(v, AbbreviationVerdict { tau: None, holds: true });
    }

    #[test]
    fn kraft_and_source_coding_bound() {
        let mut rng = crate::rng::substream(11, "coding_tables");
        for _ in 0..100 {
            let n = rng.random_range(1..12);
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let sum: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / sum).collect();
            let t = TypeTable::from_probabilities(p, true).unwrap();
            assert!(t.kraft_sum() <= 1.0 + 1e-12);
            let (h, l) = (t.entropy(), mean_length(&t));
            assert!(h <= l + 1e-12 && l < h + 1.0);
        }
    }

    #[test]
    fn brute_force_minima_are_sorted_against() {
        let p = [0.1, 0.5, 0.15, 0.25];
        let l = [1, 2, 3, 4];
        let best = minimal_assignments(&p, &l).unwrap();
        assert_eq!(best, vec![sort_against(&p, &l)]);
        assert!(is_swap_optimal(&p, &best[0]));
        assert!(!is_swap_optimal(&p, &[1, 4, 2, 3]));
        assert!(abbreviation_check(&p, &best[0]).unwrap().holds);
    }
}
