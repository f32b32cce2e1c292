//! Dependency-length costs for a single head with atomic dependents.
//!
//! Positions are 1-indexed. A sequence of length `m` holds the head and
//! `m - 1` dependents, each occupying one position.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transducer::{CostTransducer, Direction};

/// A head placed at `head_pos` in a sequence of `m` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarPlacement {
    m: usize,
    head_pos: usize,
}

impl StarPlacement {
    pub fn new(m: usize, head_pos: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::SequenceTooShort(m));
        }
        if head_pos == 0 || head_pos > m {
            return Err(Error::PositionOutOfRange { m, pos: head_pos });
        }
        Ok(StarPlacement { m, head_pos })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn head_pos(&self) -> usize {
        self.head_pos
    }

    /// Lengths of the `m - 1` dependencies.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.m).filter(move |&d| d != self.head_pos).map(move |d| d.abs_diff(self.head_pos))
    }
}

/// Sum of dependency lengths with the head at `head_pos`.
pub fn dependency_sum(m: usize, head_pos: usize) -> Result<u64> {
    Ok(StarPlacement::new(m, head_pos)?.lengths().map(|l| l as u64).sum())
}

/// Sum of `g(length)` over the dependencies; `g` must be strictly increasing.
pub fn dependency_cost(m: usize, head_pos: usize, transducer: &CostTransducer) -> Result<f64> {
    transducer.require(Direction::Increasing, m as f64)?;
    Ok(cost_unchecked(StarPlacement::new(m, head_pos)?, transducer))
}

// Summed over sorted lengths so mirrored placements give bit-identical costs.
fn cost_unchecked(p: StarPlacement, g: &CostTransducer) -> f64 {
    let mut lengths: Vec<usize> = p.lengths().collect();
    lengths.sort_unstable();
    lengths.into_iter().map(|l| g.apply(l as f64)).sum()
}

/// Minimum sum, `(m^2 - m mod 2) / 4`, and the central position(s) attaining it.
pub fn min_dependency_sum(m: usize) -> Result<(u64, BTreeSet<usize>)> {
    if m < 2 {
        return Err(Error::SequenceTooShort(m));
    }
    let m64 = m as u64;
    let value = (m64 * m64 - m64 % 2) / 4;
    let positions = if m % 2 == 1 {
        [m.div_ceil(2)].into_iter().collect()
    } else {
        [m / 2, m / 2 + 1].into_iter().collect()
    };
    Ok((value, positions))
}

/// Maximum sum, `m (m - 1) / 2`, attained at both ends.
pub fn max_dependency_sum(m: usize) -> Result<(u64, BTreeSet<usize>)> {
    if m < 2 {
        return Err(Error::SequenceTooShort(m));
    }
    let m64 = m as u64;
    Ok((m64 * (m64 - 1) / 2, [1, m].into_iter().collect()))
}

/// Cost of every head placement for one sequence length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyLandscape {
    pub m: usize,
    /// `costs[p - 1]` is the cost with the head at position `p`.
    pub costs: Vec<f64>,
    #[serde(skip)]
    pub transducer: CostTransducer,
    pub quasi_convex: bool,
}

impl DependencyLandscape {
    pub fn cost(&self, head_pos: usize) -> Option<f64> {
        head_pos.checked_sub(1).and_then(|i| self.costs.get(i).copied())
    }

    /// Positions attaining the minimum cost.
    pub fn argmin(&self) -> BTreeSet<usize> {
        let best = self.costs.iter().copied().fold(f64::INFINITY, f64::min);
        positions_where(&self.costs, |c| c == best)
    }

    pub fn argmax(&self) -> BTreeSet<usize> {
        let best = self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        positions_where(&self.costs, |c| c == best)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.costs.len();
        (0..n).all(|i| self.costs[i] == self.costs[n - 1 - i])
    }
}

fn positions_where(costs: &[f64], pred: impl Fn(f64) -> bool) -> BTreeSet<usize> {
    costs.iter().enumerate().filter(|(_, c)| pred(**c)).map(|(i, _)| i + 1).collect()
}

/// A sequence is quasi-convex when it never rises and then falls again:
/// non-increasing up to its minimum, non-decreasing after.
pub fn is_quasi_convex(values: &[f64]) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] && rising {
            return false;
        }
    }
    true
}

/// Full cost landscape over head positions `1..=m`.
pub fn landscape(m: usize, transducer: &CostTransducer) -> Result<DependencyLandscape> {
    if m < 2 {
        return Err(Error::SequenceTooShort(m));
    }
    transducer.require(Direction::Increasing, m as f64)?;
    let costs: Vec<f64> = (1..=m)
        .map(|p| cost_unchecked(StarPlacement { m, head_pos: p }, transducer))
        .collect();
    let quasi_convex = is_quasi_convex(&costs);
    Ok(DependencyLandscape { m, costs, transducer: transducer.clone(), quasi_convex })
}
