//! Exact entropies, mutual informations and optimal target placement.
//!
//! All quantities are in bits. A placement index `i` counts the context
//! elements produced before the target, so `i` ranges over `0..=n` and
//! `i = n` puts the target last.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::distributions::JointSequenceModel;
use crate::error::{Error, Result};
use crate::transducer::{CostTransducer, Direction};

/// Tolerance for ties when selecting optimal placements.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Conditional mutual information above `-CMI_CLAMP` is clamped to zero.
pub const CMI_CLAMP: f64 = 1e-12;
/// Threshold below which conditional mutual information counts as zero.
pub const MARKOV_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `H(Y | first i context roles)`, indexed from 0.
    Uncertainty,
    /// `I(Y; first i context roles)`, indexed from 0.
    Predictability,
    /// `H(X_i | X_1..X_{i-1})`, indexed from 1.
    EntropyRate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub kind: ProfileKind,
    pub values: Vec<f64>,
}

impl EntropyProfile {
    pub fn new(kind: ProfileKind, values: Vec<f64>) -> Self {
        EntropyProfile { kind, values }
    }

    /// Index of `values[0]`.
    pub fn first_index(&self) -> usize {
        match self.kind {
            ProfileKind::EntropyRate => 1,
            _ => 0,
        }
    }

    /// Value at index `i` in the profile's own indexing.
    pub fn at(&self, i: usize) -> Option<f64> {
        i.checked_sub(self.first_index()).and_then(|k| self.values.get(k).copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(index, value)` pairs in the profile's own indexing.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let first = self.first_index();
        self.values.iter().enumerate().map(move |(k, v)| (k + first, *v))
    }

    /// Whether the profile respects its kind's monotonicity within `tol`.
    /// Entropy-rate profiles carry no monotonicity guarantee.
    pub fn is_monotone(&self, tol: f64) -> bool {
        match self.kind {
            ProfileKind::Uncertainty => self.values.windows(2).all(|w| w[1] <= w[0] + tol),
            ProfileKind::Predictability => self.values.windows(2).all(|w| w[1] + tol >= w[0]),
            ProfileKind::EntropyRate => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Uncertainty,
    Predictability,
}

fn plog(p: f64) -> f64 {
    if p > 0.0 {
        0.0 - p * p.log2()
    } else {
        0.0
    }
}

pub(crate) fn entropy_of_indices(model: &JointSequenceModel, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    model.marginal_table(idx).values().map(|p| plog(*p)).sum()
}

/// Joint entropy of the named roles.
pub fn entropy<S: AsRef<str>>(model: &JointSequenceModel, roles: &[S]) -> Result<f64> {
    let idx = model.role_indices(roles)?;
    Ok(entropy_of_indices(model, &idx))
}

fn disjoint(model: &JointSequenceModel, groups: &[&[usize]]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for g in groups {
        for &i in *g {
            if !seen.insert(i) {
                return Err(Error::RoleOverlap(model.roles()[i].clone()));
            }
        }
    }
    Ok(())
}

fn cond_entropy_idx(model: &JointSequenceModel, target: usize, context: &[usize]) -> f64 {
    let mut joint = Vec::with_capacity(context.len() + 1);
    joint.push(target);
    joint.extend_from_slice(context);
    entropy_of_indices(model, &joint) - entropy_of_indices(model, context)
}

/// `H(target | context)`.
pub fn conditional_entropy<S: AsRef<str>>(
    model: &JointSequenceModel,
    target_role: &str,
    context_roles: &[S],
) -> Result<f64> {
    let t = model.role_index(target_role)?;
    let ctx = model.role_indices(context_roles)?;
    disjoint(model, &[&[t], &ctx])?;
    Ok(cond_entropy_idx(model, t, &ctx))
}

/// `I(target; context)`. An empty context yields exactly 0.
pub fn mutual_information<S: AsRef<str>>(
    model: &JointSequenceModel,
    target_role: &str,
    context_roles: &[S],
) -> Result<f64> {
    let t = model.role_index(target_role)?;
    let ctx = model.role_indices(context_roles)?;
    disjoint(model, &[&[t], &ctx])?;
    if ctx.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of_indices(model, &[t]) - cond_entropy_idx(model, t, &ctx))
}

/// `I(target; new | given)`, clamped at zero inside the rounding band.
pub fn conditional_mutual_information<S: AsRef<str>>(
    model: &JointSequenceModel,
    target_role: &str,
    new_role: &str,
    given_roles: &[S],
) -> Result<f64> {
    let t = model.role_index(target_role)?;
    let x = model.role_index(new_role)?;
    let given = model.role_indices(given_roles)?;
    disjoint(model, &[&[t], &[x], &given])?;
    let mut with_new = given.clone();
    with_new.push(x);
    let cmi = cond_entropy_idx(model, t, &given) - cond_entropy_idx(model, t, &with_new);
    Ok(if (-CMI_CLAMP..0.0).contains(&cmi) { 0.0 } else { cmi })
}

/// True when adding `new` to `given` leaves the uncertainty about the target
/// unchanged, i.e. target and `new` are conditionally independent given
/// `given`.
pub fn is_markov_equality<S: AsRef<str>>(
    model: &JointSequenceModel,
    target_role: &str,
    new_role: &str,
    given_roles: &[S],
) -> Result<bool> {
    Ok(conditional_mutual_information(model, target_role, new_role, given_roles)? <= MARKOV_TOLERANCE)
}

fn order_indices<S: AsRef<str>>(model: &JointSequenceModel, order: &[S]) -> Result<Vec<usize>> {
    let target = model.target_index();
    let idx = model.role_indices(order).map_err(|e| match e {
        Error::UnknownRole(r) => Error::NotAPermutation(format!("unknown role {r:?}")),
        other => other,
    })?;
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    let expected: Vec<usize> = (0..model.num_roles()).filter(|&i| i != target).collect();
    if sorted != expected {
        let names: Vec<&str> = order.iter().map(AsRef::as_ref).collect();
        return Err(Error::NotAPermutation(format!(
            "{names:?} vs non-target roles {:?}",
            model.context_roles()
        )));
    }
    Ok(idx)
}

/// `values[i] = H(Y | first i roles of context_order)` for `i = 0..=n`.
pub fn uncertainty_profile<S: AsRef<str>>(
    model: &JointSequenceModel,
    context_order: &[S],
) -> Result<EntropyProfile> {
    let order = order_indices(model, context_order)?;
    let target = model.target_index();
    let values = (0..=order.len()).map(|i| cond_entropy_idx(model, target, &order[..i])).collect();
    Ok(EntropyProfile::new(ProfileKind::Uncertainty, values))
}

/// `values[i] = I(Y; first i roles of context_order)`, with `values[0] = 0`.
pub fn predictability_profile<S: AsRef<str>>(
    model: &JointSequenceModel,
    context_order: &[S],
) -> Result<EntropyProfile> {
    let h = uncertainty_profile(model, context_order)?;
    let hy = h.values[0];
    let mut values: Vec<f64> = h.values.iter().map(|v| hy - v).collect();
    values[0] = 0.0;
    Ok(EntropyProfile::new(ProfileKind::Predictability, values))
}

fn profile_for(
    model: &JointSequenceModel,
    order: &[impl AsRef<str>],
    objective: Objective,
) -> Result<EntropyProfile> {
    match objective {
        Objective::Uncertainty => uncertainty_profile(model, order),
        Objective::Predictability => predictability_profile(model, order),
    }
}

/// Indices whose value lies within `tol` of the best one.
pub fn optimal_set(values: &[f64], objective: Objective, tol: f64) -> BTreeSet<usize> {
    let best = match objective {
        Objective::Uncertainty => values.iter().copied().fold(f64::INFINITY, f64::min),
        Objective::Predictability => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| (**v - best).abs() <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Full argmin of uncertainty (or argmax of predictability) over `i = 0..=n`.
pub fn optimal_target_placement<S: AsRef<str>>(
    model: &JointSequenceModel,
    context_order: &[S],
    objective: Objective,
) -> Result<BTreeSet<usize>> {
    let profile = profile_for(model, context_order, objective)?;
    Ok(optimal_set(&profile.values, objective, TIE_TOLERANCE))
}

/// Placement set minimizing a transduced cost.
///
/// Uncertainty costs take an increasing transducer, predictability costs a
/// decreasing one; both are minimized. The transducer picks the optimum and
/// ties are grouped in bits around it, so the result is the same set as the
/// untransduced one for every strictly monotone transducer.
pub fn optimal_placement_with_transducer<S: AsRef<str>>(
    model: &JointSequenceModel,
    context_order: &[S],
    objective: Objective,
    transducer: &CostTransducer,
) -> Result<BTreeSet<usize>> {
    let target_alphabet = model.alphabets()[model.target_index()].len().max(2) as f64;
    let domain_max = target_alphabet.log2();
    let direction = match objective {
        Objective::Uncertainty => Direction::Increasing,
        Objective::Predictability => Direction::Decreasing,
    };
    transducer.require(direction, domain_max)?;
    let profile = profile_for(model, context_order, objective)?;
    let raw = &profile.values;
    let costs: Vec<f64> = raw.iter().map(|v| transducer.apply(*v)).collect();
    // Break cost ties by the raw value so a numerically flat transducer
    // still lands on the raw optimum.
    let best = (0..raw.len())
        .min_by(|&a, &b| {
            costs[a].total_cmp(&costs[b]).then_with(|| match objective {
                Objective::Uncertainty => raw[a].total_cmp(&raw[b]),
                Objective::Predictability => raw[b].total_cmp(&raw[a]),
            })
        })
        .expect("profile has at least one entry");
    Ok((0..raw.len()).filter(|&i| (raw[i] - raw[best]).abs() <= TIE_TOLERANCE).collect())
}
