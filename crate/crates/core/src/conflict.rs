//! Trade-off between dependency length and uncertainty about the head.
//!
//! The head is the model's target role; the other roles are its dependents,
//! produced in a fixed linear order. Placing the head at position `p` puts
//! `p - 1` dependents before it.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::deplen;
use crate::distributions::JointSequenceModel;
use crate::error::{Error, Result};
use crate::infotheory::{self, Objective, TIE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConflictRow {
    pub head_pos: usize,
    pub dependency_cost: f64,
    /// `H(head | dependents preceding it)` in bits.
    pub head_uncertainty_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConflictReport {
    pub m: usize,
    pub rows: Vec<ConflictRow>,
    pub model_id: String,
}

impl ConflictReport {
    pub fn dependency_costs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.dependency_cost).collect()
    }

    pub fn uncertainties(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.head_uncertainty_bits).collect()
    }

    /// Head positions minimizing dependency cost.
    pub fn dependency_optimal(&self) -> BTreeSet<usize> {
        shift(infotheory::optimal_set(&self.dependency_costs(), Objective::Uncertainty, TIE_TOLERANCE))
    }

    /// Head positions minimizing uncertainty about the head.
    pub fn uncertainty_optimal(&self) -> BTreeSet<usize> {
        shift(infotheory::optimal_set(&self.uncertainties(), Objective::Uncertainty, TIE_TOLERANCE))
    }

    /// True when no placement is optimal for both objectives.
    pub fn objectives_conflict(&self) -> bool {
        self.dependency_optimal().is_disjoint(&self.uncertainty_optimal())
    }

    /// Whether any preceding dependent tells something about the head.
    pub fn has_dependence(&self) -> bool {
        let h = self.uncertainties();
        h.iter().any(|v| h[0] - v > TIE_TOLERANCE)
    }
}

fn shift(set: BTreeSet<usize>) -> BTreeSet<usize> {
    set.into_iter().map(|i| i + 1).collect()
}

fn model_id(model: &JointSequenceModel) -> String {
    format!("{}:{}", model.target(), model.roles().join(","))
}

/// Build the per-position report for the head (the model's target) with its
/// dependents in `context_order`.
pub fn conflict_report<S: AsRef<str>>(
    model: &JointSequenceModel,
    context_order: &[S],
) -> Result<ConflictReport> {
    let profile = infotheory::uncertainty_profile(model, context_order)?;
    let m = model.num_roles();
    let rows = (1..=m)
        .map(|p| {
            Ok(ConflictRow {
                head_pos: p,
                dependency_cost: deplen::dependency_sum(m, p)? as f64,
                head_uncertainty_bits: profile.values[p - 1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConflictReport { m, rows, model_id: model_id(model) })
}

/// Head positions not dominated in (dependency cost, uncertainty).
pub fn pareto_front(report: &ConflictReport) -> BTreeSet<usize> {
    let rows = &report.rows;
    let le = |a: f64, b: f64| a <= b + TIE_TOLERANCE;
    let lt = |a: f64, b: f64| a < b - TIE_TOLERANCE;
    rows.iter()
        .filter(|r| {
            !rows.iter().any(|o| {
                le(o.dependency_cost, r.dependency_cost)
                    && le(o.head_uncertainty_bits, r.head_uncertainty_bits)
                    && (lt(o.dependency_cost, r.dependency_cost)
                        || lt(o.head_uncertainty_bits, r.head_uncertainty_bits))
            })
        })
        .map(|r| r.head_pos)
        .collect()
}

fn min_max_normalize(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= TIE_TOLERANCE {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - lo) / (hi - lo)).collect()
}

/// Weighted mixed cost per position: `lambda * dep + (1 - lambda) * H`, both
/// min-max normalized to `[0, 1]`.
pub fn weighted_costs(report: &ConflictReport, lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidWeight(lambda));
    }
    let d = min_max_normalize(&report.dependency_costs());
    let h = min_max_normalize(&report.uncertainties());
    Ok(d.iter().zip(&h).map(|(d, h)| lambda * d + (1.0 - lambda) * h).collect())
}

/// Argmin set of the weighted mixed cost.
pub fn weighted_optimum(report: &ConflictReport, lambda: f64) -> Result<BTreeSet<usize>> {
    let costs = weighted_costs(report, lambda)?;
    Ok(shift(infotheory::optimal_set(&costs, Objective::Uncertainty, TIE_TOLERANCE)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    True,
    False,
    /// The question presupposes dependence the model does not have.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Asymmetry {
    pub extreme_is_worst_for_dlm: bool,
    pub center_is_worst_for_uncertainty: Flag,
}

/// An extreme head placement always maximizes dependency cost, while a
/// central placement need not maximize uncertainty.
pub fn asymmetry_check<S: AsRef<str>>(model: &JointSequenceModel, context_order: &[S]) -> Result<Asymmetry> {
    let report = conflict_report(model, context_order)?;
    Ok(asymmetry_of(&report))
}

pub fn asymmetry_of(report: &ConflictReport) -> Asymmetry {
    let dep = report.dependency_costs();
    let h = report.uncertainties();
    let m = report.m;
    let dep_max = dep.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let extreme = dep[0] == dep_max && dep[m - 1] == dep_max;
    let center = if !report.has_dependence() {
        Flag::NotApplicable
    } else {
        let h_max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let centers = deplen::min_dependency_sum(m).map(|(_, c)| c).unwrap_or_default();
        if centers.iter().all(|&p| h[p - 1] >= h_max - TIE_TOLERANCE) {
            Flag::True
        } else {
            Flag::False
        }
    };
    Asymmetry { extreme_is_worst_for_dlm: extreme, center_is_worst_for_uncertainty: center }
}

/// Moving the head one step right, from `p` to `p + 1`: before the upper
/// center both objectives weakly improve (allies); from the upper center on,
/// uncertainty weakly improves while dependency cost strictly worsens
/// (enemies).
pub fn allies_enemies_hold(report: &ConflictReport) -> bool {
    let m = report.m;
    let center = m / 2 + 1;
    let dep = report.dependency_costs();
    let h = report.uncertainties();
    (1..m).all(|p| {
        let (d0, d1) = (dep[p - 1], dep[p]);
        let h_ok = h[p] <= h[p - 1] + TIE_TOLERANCE;
        if p < center {
            h_ok && d1 <= d0
        } else {
            h_ok && d1 > d0
        }
    })
}
