//! Handing out single goods that already satisfy an agent.
//!
//! With `n` level agents (fixed on entry), level totals `V_i`, and the goods
//! `g_j` already handed to removed agents `j`, agent `i` may take good `g`
//! alone and leave the level when
//!
//! ```text
//! n(n-1)·v_i(g) + n·Σ_j v_i(g_j) >= (n-1)·V_i
//! ```
//!
//! Removal stops while a single active agent is left: that agent keeps every
//! remaining good, which is enough for her.

use crate::instance::{AgentId, GoodId, Instance};

use super::SolveError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessState {
    /// Agents still in play, in level order.
    pub active_agents: Vec<AgentId>,
    /// Goods still in play, ascending.
    pub active_goods: Vec<GoodId>,
    /// `(agent, good)` in removal order.
    pub removed: Vec<(AgentId, GoodId)>,
}

impl PreprocessState {
    pub fn removed_agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.removed.iter().map(|&(a, _)| a)
    }

    pub fn removed_goods(&self) -> impl Iterator<Item = GoodId> + '_ {
        self.removed.iter().map(|&(_, g)| g)
    }
}

#[inline]
fn takes_single_good(n: u128, value: u64, removed_sum: u128, total: u128) -> bool {
    n * (n - 1) * u128::from(value) + n * removed_sum >= (n - 1) * total
}

/// Repeatedly removes the first qualifying `(agent, good)` pair, scanning
/// agents in level order and goods ascending.
pub fn preprocess(
    inst: &Instance,
    agents: &[AgentId],
    goods: &[GoodId],
) -> Result<PreprocessState, SolveError> {
    let n = agents.len();
    if n < 2 {
        return Err(SolveError::InvalidLevel(format!(
            "preprocessing needs at least two agents, got {n}"
        )));
    }
    for &a in agents {
        inst.check_agent(a)?;
    }
    for &g in goods {
        inst.check_good(g)?;
    }
    let nn = n as u128;
    let totals: Vec<u128> = agents
        .iter()
        .map(|&a| inst.sum_values(a, goods.iter().copied()))
        .collect();
    // Σ_j v_i(g_j) per level agent.
    let mut removed_sum = vec![0u128; n];
    let mut active = vec![true; n];
    let mut active_count = n;
    let mut good_active: Vec<bool> = vec![true; goods.len()];
    let mut removed = Vec::new();

    while active_count > 1 {
        let pick = (0..n).filter(|&k| active[k]).find_map(|k| {
            let row = inst.row(agents[k]);
            (0..goods.len())
                .filter(|&p| good_active[p])
                .find(|&p| takes_single_good(nn, row[goods[p]], removed_sum[k], totals[k]))
                .map(|p| (k, p))
        });
        let Some((k, p)) = pick else { break };
        let good = goods[p];
        active[k] = false;
        active_count -= 1;
        good_active[p] = false;
        for (j, &a) in agents.iter().enumerate() {
            removed_sum[j] += u128::from(inst.value(a, good));
        }
        removed.push((agents[k], good));
    }

    Ok(PreprocessState {
        active_agents: (0..n).filter(|&k| active[k]).map(|k| agents[k]).collect(),
        active_goods: (0..goods.len())
            .filter(|&p| good_active[p])
            .map(|p| goods[p])
            .collect(),
        removed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_goods_example_first_removal() {
        let inst = Instance::new(vec![vec![10, 7, 7, 6]; 3]).unwrap();
        let state = preprocess(&inst, &[0, 1, 2], &[0, 1, 2, 3]).unwrap();
        // 6·10 >= 2·30: agent 1 takes g1. Then 6·7 + 3·10 >= 60: agent 2 takes g2.
        assert_eq!(state.removed, vec![(0, 0), (1, 1)]);
        assert_eq!(state.active_agents, vec![2]);
        assert_eq!(state.active_goods, vec![2, 3]);
    }

    #[test]
    fn many_small_goods_remove_nothing() {
        let inst = Instance::new(vec![vec![1; 12]; 3]).unwrap();
        let state = preprocess(&inst, &[0, 1, 2], &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(state.removed.is_empty());
        assert_eq!(state.active_agents, vec![0, 1, 2]);
        assert_eq!(state.active_goods.len(), 12);
    }

    #[test]
    fn zero_total_agent_is_removed_first() {
        let inst = Instance::new(vec![vec![1, 1, 1, 1, 1], vec![0; 5], vec![1; 5]]).unwrap();
        let state = preprocess(&inst, &[0, 1, 2], &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(state.removed[0], (1, 0));
    }

    #[test]
    fn level_subsets() {
        let inst = Instance::new(vec![vec![9, 1, 1], vec![1, 1, 1], vec![1, 1, 9]]).unwrap();
        let state = preprocess(&inst, &[0, 2], &[0, 2]).unwrap();
        assert_eq!(state.removed, vec![(0, 0)]);
        assert_eq!(state.active_agents, vec![2]);
        assert_eq!(state.active_goods, vec![2]);
        assert_eq!(state.removed_agents().collect::<Vec<_>>(), vec![0]);
        assert_eq!(state.removed_goods().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn rejects_single_agent() {
        let inst = Instance::new(vec![vec![1]]).unwrap();
        assert!(matches!(
            preprocess(&inst, &[0], &[0]),
            Err(SolveError::InvalidLevel(_))
        ));
    }
}
