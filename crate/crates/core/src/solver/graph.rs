//! Slot partitions and the bipartite graph between non-chooser agents and
//! slots.
//!
//! For a level with `n` agents and a partition of its goods into `n` slots
//! with reserve slot `r`, agent `i` (not the chooser) is adjacent to slot
//! `u` iff
//!
//! ```text
//! n(n-1)·v_i(X_u) + n·Σ_{u' ∉ {r, u}} m_i(X_u') >= (n-1)·v_i(M_level)
//! ```
//!
//! i.e. receiving `X_u` would leave `i` satisfied on average even if the
//! reserve bundle's least good counted for nothing.

use crate::instance::{AgentId, Bundle, GoodId, Instance};
use crate::matching::{self, BipartiteGraph, Matching};

use super::SolveError;

/// A partition of a level's goods into `level_n` slot bundles, one of which
/// is the reserve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotPartition {
    bundles: Vec<Bundle>,
    reserve: usize,
}

impl SlotPartition {
    pub fn new(bundles: Vec<Bundle>, reserve: usize) -> Result<Self, SolveError> {
        if reserve >= bundles.len() {
            return Err(SolveError::InvalidLevel(format!(
                "reserve slot {reserve} out of range for {} slots",
                bundles.len()
            )));
        }
        Ok(Self { bundles, reserve })
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, slot: usize) -> &Bundle {
        &self.bundles[slot]
    }

    pub fn reserve_slot(&self) -> usize {
        self.reserve
    }

    pub fn level_n(&self) -> usize {
        self.bundles.len()
    }

    /// Moves `good` from `slot` into the reserve bundle.
    pub fn move_to_reserve(&mut self, slot: usize, good: GoodId) -> Result<(), SolveError> {
        if slot == self.reserve || slot >= self.bundles.len() || !self.bundles[slot].remove(good) {
            return Err(SolveError::InvalidLevel(format!(
                "good {good} is not in non-reserve slot {slot}"
            )));
        }
        self.bundles[self.reserve].insert(good);
        Ok(())
    }

    fn check_covers(&self, inst: &Instance, goods: &[GoodId]) -> Result<(), SolveError> {
        let mut seen = vec![false; inst.n_goods()];
        for &g in goods {
            inst.check_good(g)?;
            seen[g] = true;
        }
        let mut count = 0;
        for b in &self.bundles {
            for g in b.iter() {
                if g >= seen.len() || !seen[g] {
                    return Err(SolveError::InvalidLevel(format!(
                        "good {g} is not a good of this level or appears twice"
                    )));
                }
                seen[g] = false;
                count += 1;
            }
        }
        if count != goods.len() {
            return Err(SolveError::InvalidLevel(format!(
                "partition holds {count} goods, level has {}",
                goods.len()
            )));
        }
        Ok(())
    }
}

/// The agent-to-slot graph of a [`SlotPartition`], with the per-agent
/// values and minima it was computed from.
#[derive(Debug, Clone)]
pub struct PropavgGraph {
    graph: BipartiteGraph,
    partition: SlotPartition,
    agents: Vec<AgentId>,
    /// `value[i][u] = v_i(X_u)` for non-chooser agent `i`.
    value: Vec<Vec<u128>>,
    /// `min[i][u] = m_i(X_u)`.
    min: Vec<Vec<u64>>,
    /// `v_i` of the whole level.
    totals: Vec<u128>,
}

#[inline]
fn edge_holds(n: u128, value: u128, other_mins: u128, total: u128) -> bool {
    n * (n - 1) * value + n * other_mins >= (n - 1) * total
}

impl PropavgGraph {
    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn partition(&self) -> &SlotPartition {
        &self.partition
    }

    /// Level agents; the last one is the chooser.
    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn chooser(&self) -> AgentId {
        *self.agents.last().expect("levels have at least two agents")
    }

    pub fn level_n(&self) -> usize {
        self.agents.len()
    }

    pub fn has_edge(&self, left: usize, slot: usize) -> bool {
        self.graph.has_edge(left, slot)
    }

    fn edges_from_stats(
        n: usize,
        reserve: usize,
        value: &[Vec<u128>],
        min: &[Vec<u64>],
        totals: &[u128],
    ) -> BipartiteGraph {
        let nn = n as u128;
        let mut adj = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let min_sum: u128 = min[i]
                .iter()
                .enumerate()
                .filter(|&(u, _)| u != reserve)
                .map(|(_, &m)| u128::from(m))
                .sum();
            let row: Vec<usize> = (0..n)
                .filter(|&u| {
                    let others = if u == reserve {
                        min_sum
                    } else {
                        min_sum - u128::from(min[i][u])
                    };
                    edge_holds(nn, value[i][u], others, totals[i])
                })
                .collect();
            adj.push(row);
        }
        BipartiteGraph::from_adjacency(n, adj).expect("slots are in range")
    }

    /// Tests moving `good` out of `slot` into the reserve without touching
    /// `self`: returns the graph the moved partition would have.
    fn graph_after_move(
        &self,
        inst: &Instance,
        slot: usize,
        good: GoodId,
        mins: &SlotMinima,
    ) -> BipartiteGraph {
        let r = self.partition.reserve;
        let n = self.level_n();
        let mut value = self.value.clone();
        let mut min = self.min.clone();
        let single = self.partition.bundles[slot].len() == 1;
        for (i, &agent) in self.agents[..n - 1].iter().enumerate() {
            let v = inst.value(agent, good);
            value[i][slot] -= u128::from(v);
            value[i][r] += u128::from(v);
            min[i][slot] = if single { 0 } else { mins.after_removing(i, v) };
        }
        Self::edges_from_stats(n, r, &value, &min, &self.totals)
    }
}

/// Smallest and second-smallest value of one slot's goods for each agent,
/// so the minimum after removing one good is available in O(1).
struct SlotMinima {
    smallest: Vec<(u64, usize)>,
    second: Vec<u64>,
}

impl SlotMinima {
    fn new(inst: &Instance, agents: &[AgentId], bundle: &Bundle) -> Self {
        let mut smallest = Vec::with_capacity(agents.len());
        let mut second = Vec::with_capacity(agents.len());
        for &a in agents {
            let row = inst.row(a);
            let (mut lo, mut count, mut next) = (u64::MAX, 0usize, u64::MAX);
            for g in bundle.iter() {
                let v = row[g];
                if v < lo {
                    next = lo;
                    lo = v;
                    count = 1;
                } else if v == lo {
                    count += 1;
                } else if v < next {
                    next = v;
                }
            }
            smallest.push((lo, count));
            second.push(next);
        }
        Self { smallest, second }
    }

    fn after_removing(&self, i: usize, removed_value: u64) -> u64 {
        let (lo, count) = self.smallest[i];
        if removed_value == lo && count == 1 {
            self.second[i]
        } else {
            lo
        }
    }
}

/// Builds the agent-to-slot graph for `part`. `agents` lists the level's
/// agents with the chooser last; `goods` is the level's good set.
pub fn build_propavg_graph(
    inst: &Instance,
    agents: &[AgentId],
    goods: &[GoodId],
    part: &SlotPartition,
) -> Result<PropavgGraph, SolveError> {
    let n = agents.len();
    if n < 2 {
        return Err(SolveError::InvalidLevel(format!(
            "the slot graph needs at least two agents, got {n}"
        )));
    }
    if part.level_n() != n {
        return Err(SolveError::InvalidLevel(format!(
            "{} slots for {n} agents",
            part.level_n()
        )));
    }
    for &a in agents {
        inst.check_agent(a)?;
    }
    part.check_covers(inst, goods)?;

    let left = &agents[..n - 1];
    let value: Vec<Vec<u128>> = left
        .iter()
        .map(|&a| {
            part.bundles
                .iter()
                .map(|b| inst.sum_values(a, b.iter()))
                .collect()
        })
        .collect();
    let min: Vec<Vec<u64>> = left
        .iter()
        .map(|&a| {
            part.bundles
                .iter()
                .map(|b| inst.min_value(a, b.iter()))
                .collect()
        })
        .collect();
    let totals: Vec<u128> = value.iter().map(|row| row.iter().sum()).collect();
    let graph = PropavgGraph::edges_from_stats(n, part.reserve, &value, &min, &totals);
    Ok(PropavgGraph {
        graph,
        partition: part.clone(),
        agents: agents.to_vec(),
        value,
        min,
        totals,
    })
}

/// The graph minus the reserve slot has a perfect matching.
pub fn satisfies_p1(g: &PropavgGraph) -> bool {
    matching::has_perfect_matching(&g.graph, Some(g.partition.reserve))
}

/// The graph minus any single slot has a perfect matching.
pub fn satisfies_p2(g: &PropavgGraph) -> bool {
    let Some(base) = matching::perfect_matching(&g.graph, Some(g.partition.reserve)) else {
        return false;
    };
    (0..g.level_n())
        .all(|u| matching::perfect_matching_from(&g.graph, Some(u), base.clone()).is_some())
}

/// A single good moved from a non-reserve slot into the reserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub slot: usize,
    pub good: GoodId,
}

/// Finds the first good (slots ascending, goods ascending within a slot)
/// whose move into the reserve keeps a perfect matching of the graph minus
/// the reserve.
///
/// Callable only when the partition has that matching but some single-slot
/// removal does not.
pub fn find_p1_preserving_move(inst: &Instance, g: &PropavgGraph) -> Result<Move, SolveError> {
    let r = g.partition.reserve;
    let Some(base) = matching::perfect_matching(&g.graph, Some(r)) else {
        return Err(SolveError::InvalidLevel(
            "move search requires a perfect matching avoiding the reserve".into(),
        ));
    };
    if satisfies_p2(g) {
        return Err(SolveError::InvalidLevel(
            "move search called on a partition that already tolerates any slot removal".into(),
        ));
    }
    let n = g.level_n();
    for slot in (0..n).filter(|&u| u != r) {
        let bundle = &g.partition.bundles[slot];
        if bundle.is_empty() {
            continue;
        }
        let mins = SlotMinima::new(inst, &g.agents[..n - 1], bundle);
        for good in bundle.iter() {
            let next = g.graph_after_move(inst, slot, good, &mins);
            if matching::perfect_matching_from(&next, Some(r), base.clone()).is_some() {
                return Ok(Move { slot, good });
            }
        }
    }
    Err(super::InternalError::NoP1PreservingMove {
        agents: g.agents.clone(),
    }
    .into())
}

/// Edges present before a move from a slot holding at least two goods that
/// are missing afterwards, ignoring edges into the source slot.
pub(crate) fn lost_edges(
    before: &PropavgGraph,
    after: &PropavgGraph,
    source: usize,
) -> Vec<(usize, usize)> {
    before
        .graph
        .edges()
        .filter(|&(i, u)| u != source && !after.graph.has_edge(i, u))
        .collect()
}

/// The chooser takes her most valuable slot (lowest index on ties); a
/// perfect matching of the remaining slots assigns the other agents.
/// Returns bundles in level-agent order.
pub fn finalize(inst: &Instance, g: &PropavgGraph) -> Result<Vec<Bundle>, SolveError> {
    let n = g.level_n();
    let choice = chooser_slot(inst, g);
    let assignment: Matching =
        matching::perfect_matching(&g.graph, Some(choice)).ok_or_else(|| {
            super::InternalError::NoPerfectMatchingAtFinalize {
                agents: g.agents.clone(),
                chosen_slot: choice,
            }
        })?;
    let mut bundles = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let slot = assignment
            .partner_of_left(i)
            .expect("perfect matching covers every agent");
        bundles.push(g.partition.bundles[slot].clone());
    }
    bundles.push(g.partition.bundles[choice].clone());
    Ok(bundles)
}

/// Slot the chooser takes in [`finalize`].
pub(crate) fn chooser_slot(inst: &Instance, g: &PropavgGraph) -> usize {
    let chooser = g.chooser();
    (0..g.level_n())
        .map(|u| (inst.sum_values(chooser, g.partition.bundles[u].iter()), u))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, u)| u)
        .expect("at least two slots")
}
