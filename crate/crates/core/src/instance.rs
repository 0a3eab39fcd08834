//! Instances, bundles and allocations with exact integer valuations.
//!
//! Valuations are stored unnormalized. Every fairness inequality is
//! homogeneous in an agent's valuation row, so comparisons are carried out
//! by cross-multiplying in `u128` instead of dividing by `v_i(M)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type AgentId = usize;
pub type GoodId = usize;

/// Headroom factor applied on top of `(n + 1)^2 * max_total` when checking
/// that comparison intermediates fit in `u128`.
const OVERFLOW_HEADROOM: u128 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least one agent")]
    NoAgents,
    #[error("valuation row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("agent index {agent} out of range for {n_agents} agents")]
    AgentOutOfRange { agent: AgentId, n_agents: usize },
    #[error("good index {good} out of range for {n_goods} goods")]
    GoodOutOfRange { good: GoodId, n_goods: usize },
    #[error(
        "valuations too large: {n_agents} agents with a row total of {max_total} \
         exceed the exact-arithmetic bound"
    )]
    Overflow { n_agents: usize, max_total: u128 },
}

/// A fair-division instance: `n_agents` agents with additive valuations over
/// `n_goods` indivisible goods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n_agents: usize,
    n_goods: usize,
    values: Vec<u64>,
    totals: Vec<u128>,
}

impl Instance {
    /// Builds an instance from one valuation row per agent.
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self, InstanceError> {
        let n_agents = rows.len();
        if n_agents == 0 {
            return Err(InstanceError::NoAgents);
        }
        let n_goods = rows[0].len();
        let mut values = Vec::with_capacity(n_agents * n_goods);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n_goods {
                return Err(InstanceError::RaggedRow {
                    row,
                    expected: n_goods,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::from_flat(n_agents, n_goods, values)
    }

    /// Builds an instance from a row-major valuation matrix.
    pub fn from_flat(
        n_agents: usize,
        n_goods: usize,
        values: Vec<u64>,
    ) -> Result<Self, InstanceError> {
        if n_agents == 0 {
            return Err(InstanceError::NoAgents);
        }
        if values.len() != n_agents * n_goods {
            return Err(InstanceError::RaggedRow {
                row: values.len() / n_goods.max(1),
                expected: n_agents * n_goods,
                found: values.len(),
            });
        }
        let overflow = |max_total| InstanceError::Overflow {
            n_agents,
            max_total,
        };
        let mut totals = Vec::with_capacity(n_agents);
        for row in values.chunks(n_goods.max(1)).take(n_agents) {
            let total = row
                .iter()
                .try_fold(0u128, |acc, &v| acc.checked_add(u128::from(v)))
                .ok_or_else(|| overflow(u128::MAX))?;
            totals.push(total);
        }
        if n_goods == 0 {
            totals.resize(n_agents, 0);
        }
        let max_total = totals.iter().copied().max().unwrap_or(0);
        if !within_exact_bound(n_agents, max_total) {
            return Err(overflow(max_total));
        }
        Ok(Self {
            n_agents,
            n_goods,
            values,
            totals,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_goods(&self) -> usize {
        self.n_goods
    }

    /// Agent `agent`'s value for good `good`. Panics on out-of-range indices.
    #[inline]
    pub fn value(&self, agent: AgentId, good: GoodId) -> u64 {
        self.values[agent * self.n_goods + good]
    }

    /// Agent `agent`'s valuation row.
    pub fn row(&self, agent: AgentId) -> &[u64] {
        &self.values[agent * self.n_goods..(agent + 1) * self.n_goods]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.n_agents).map(move |i| self.row(i))
    }

    /// `v_i(M)`: the agent's value for the whole good set.
    pub fn total_value(&self, agent: AgentId) -> Result<u128, InstanceError> {
        self.check_agent(agent)?;
        Ok(self.totals[agent])
    }

    #[inline]
    pub(crate) fn total(&self, agent: AgentId) -> u128 {
        self.totals[agent]
    }

    pub fn bundle_value(&self, agent: AgentId, bundle: &Bundle) -> Result<u128, InstanceError> {
        self.check_agent(agent)?;
        self.check_bundle(bundle)?;
        Ok(self.sum_values(agent, bundle.iter()))
    }

    /// `m_i(S)`: the agent's least value for a good in the bundle, 0 for the
    /// empty bundle.
    pub fn min_good_value(&self, agent: AgentId, bundle: &Bundle) -> Result<u64, InstanceError> {
        self.check_agent(agent)?;
        self.check_bundle(bundle)?;
        Ok(self.min_value(agent, bundle.iter()))
    }

    #[inline]
    pub(crate) fn sum_values(
        &self,
        agent: AgentId,
        goods: impl IntoIterator<Item = GoodId>,
    ) -> u128 {
        let row = self.row(agent);
        goods.into_iter().map(|g| u128::from(row[g])).sum()
    }

    #[inline]
    pub(crate) fn min_value(&self, agent: AgentId, goods: impl IntoIterator<Item = GoodId>) -> u64 {
        let row = self.row(agent);
        goods.into_iter().map(|g| row[g]).min().unwrap_or(0)
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<(), InstanceError> {
        if agent >= self.n_agents {
            return Err(InstanceError::AgentOutOfRange {
                agent,
                n_agents: self.n_agents,
            });
        }
        Ok(())
    }

    pub(crate) fn check_good(&self, good: GoodId) -> Result<(), InstanceError> {
        if good >= self.n_goods {
            return Err(InstanceError::GoodOutOfRange {
                good,
                n_goods: self.n_goods,
            });
        }
        Ok(())
    }

    fn check_bundle(&self, bundle: &Bundle) -> Result<(), InstanceError> {
        match bundle.goods.last() {
            Some(&g) => self.check_good(g),
            None => Ok(()),
        }
    }

    /// Returns a copy with `agent`'s row multiplied by `factor`.
    pub fn scale_row(&self, agent: AgentId, factor: u64) -> Result<Self, InstanceError> {
        self.check_agent(agent)?;
        let mut values = self.values.clone();
        for v in &mut values[agent * self.n_goods..(agent + 1) * self.n_goods] {
            *v = v.checked_mul(factor).ok_or(InstanceError::Overflow {
                n_agents: self.n_agents,
                max_total: u128::MAX,
            })?;
        }
        Self::from_flat(self.n_agents, self.n_goods, values)
    }
}

/// Every comparison intermediate is at most `(n + 1)^2 * max_total` times a
/// small constant; this checks that bound fits in `u128`.
pub fn within_exact_bound(n_agents: usize, max_total: u128) -> bool {
    (n_agents as u128 + 1)
        .checked_mul(n_agents as u128 + 1)
        .and_then(|s| s.checked_mul(OVERFLOW_HEADROOM))
        .and_then(|s| s.checked_mul(max_total))
        .is_some()
}

/// A set of goods.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle {
    goods: BTreeSet<GoodId>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.goods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goods.is_empty()
    }

    pub fn contains(&self, good: GoodId) -> bool {
        self.goods.contains(&good)
    }

    pub fn insert(&mut self, good: GoodId) -> bool {
        self.goods.insert(good)
    }

    pub fn remove(&mut self, good: GoodId) -> bool {
        self.goods.remove(&good)
    }

    /// Goods in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = GoodId> + '_ {
        self.goods.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<GoodId> {
        self.iter().collect()
    }
}

impl FromIterator<GoodId> for Bundle {
    fn from_iter<I: IntoIterator<Item = GoodId>>(iter: I) -> Self {
        Self {
            goods: iter.into_iter().collect(),
        }
    }
}

impl<const N: usize> From<[GoodId; N]> for Bundle {
    fn from(goods: [GoodId; N]) -> Self {
        goods.into_iter().collect()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, g) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "g{}", g + 1)?;
        }
        f.write_str("}")
    }
}

/// One bundle per agent. Whether the bundles partition the goods is checked
/// by [`validate_allocation`], not on construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Self { bundles }
    }

    /// Every good goes to agent 0; the rest get nothing.
    pub fn all_to_first(n_agents: usize, n_goods: usize) -> Self {
        let mut bundles = vec![Bundle::new(); n_agents];
        if let Some(first) = bundles.first_mut() {
            *first = (0..n_goods).collect();
        }
        Self { bundles }
    }

    /// Builds an allocation from `owner[g]`, the agent receiving good `g`.
    pub fn from_assignment(n_agents: usize, owner: &[AgentId]) -> Self {
        let mut bundles = vec![Bundle::new(); n_agents];
        for (g, &a) in owner.iter().enumerate() {
            bundles[a].insert(g);
        }
        Self { bundles }
    }

    /// Inverse of [`Allocation::from_assignment`]; `None` unless the
    /// allocation is a partition of `0..n_goods`.
    pub fn to_assignment(&self, n_goods: usize) -> Option<Vec<AgentId>> {
        let mut owner = vec![usize::MAX; n_goods];
        for (a, b) in self.bundles.iter().enumerate() {
            for g in b.iter() {
                if g >= n_goods || owner[g] != usize::MAX {
                    return None;
                }
                owner[g] = a;
            }
        }
        owner.iter().all(|&a| a != usize::MAX).then_some(owner)
    }

    pub fn n_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: AgentId) -> &Bundle {
        &self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn into_bundles(self) -> Vec<Bundle> {
        self.bundles
    }

    pub fn to_lists(&self) -> Vec<Vec<GoodId>> {
        self.bundles.iter().map(Bundle::to_vec).collect()
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, b) in self.bundles.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            if b.is_empty() {
                f.write_str("∅")?;
            } else {
                write!(f, "{b}")?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationViolation {
    #[error("allocation has {found} bundles for {expected} agents")]
    AgentCount { expected: usize, found: usize },
    #[error("agent {agent} holds good {good}, which does not exist")]
    UnknownGood { agent: AgentId, good: GoodId },
    #[error("good {good} is held by both agent {first} and agent {second}")]
    DuplicateGood {
        good: GoodId,
        first: AgentId,
        second: AgentId,
    },
    #[error("goods {missing:?} are not allocated")]
    UncoveredGoods { missing: Vec<GoodId> },
}

/// Checks that `alloc` partitions the instance's goods among its agents and
/// reports the first violation found.
pub fn validate_allocation(inst: &Instance, alloc: &Allocation) -> Result<(), AllocationViolation> {
    if alloc.n_agents() != inst.n_agents() {
        return Err(AllocationViolation::AgentCount {
            expected: inst.n_agents(),
            found: alloc.n_agents(),
        });
    }
    let mut owner: Vec<Option<AgentId>> = vec![None; inst.n_goods()];
    for (agent, bundle) in alloc.bundles().iter().enumerate() {
        for good in bundle.iter() {
            let slot = owner
                .get_mut(good)
                .ok_or(AllocationViolation::UnknownGood { agent, good })?;
            if let Some(first) = *slot {
                return Err(AllocationViolation::DuplicateGood {
                    good,
                    first,
                    second: agent,
                });
            }
            *slot = Some(agent);
        }
    }
    let missing: Vec<GoodId> = owner
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_none())
        .map(|(g, _)| g)
        .collect();
    if !missing.is_empty() {
        return Err(AllocationViolation::UncoveredGoods { missing });
    }
    Ok(())
}
