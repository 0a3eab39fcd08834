//! Polynomial-time construction of PROPavg allocations.
//!
//! A level is an ordered agent list (chooser last) and a good set. Each level
//! either hands out single goods that already satisfy some agents and
//! recurses on the rest, or recurses on all agents but the chooser, turns
//! that sub-allocation into a slot partition with an empty reserve, moves
//! goods into the reserve until every slot can be dropped from the graph
//! without losing a perfect matching, and then lets the chooser pick.

mod graph;
mod preprocess;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AgentId, Allocation, Bundle, GoodId, Instance, InstanceError};

pub use graph::{
    build_propavg_graph, finalize, find_p1_preserving_move, satisfies_p1, satisfies_p2, Move,
    PropavgGraph, SlotPartition,
};
pub use preprocess::{preprocess, PreprocessState};

/// Failures that indicate a bug in the solver rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InternalError {
    #[error(
        "initial slot partition for agents {agents:?} has no perfect matching avoiding the reserve"
    )]
    InitialPartitionNotP1 { agents: Vec<AgentId> },
    #[error("repair loop for agents {agents:?} lost its reserve-avoiding perfect matching")]
    P1Lost { agents: Vec<AgentId> },
    #[error("no single-good move into the reserve keeps a perfect matching for agents {agents:?}")]
    NoP1PreservingMove { agents: Vec<AgentId> },
    #[error("repair loop for agents {agents:?} exceeded {limit} iterations")]
    RepairLoopExceeded { agents: Vec<AgentId>, limit: usize },
    #[error("moving good {good} out of slot {slot} removed edges {lost:?}")]
    EdgeLost {
        slot: usize,
        good: GoodId,
        lost: Vec<(usize, usize)>,
    },
    #[error("no perfect matching without chosen slot {chosen_slot} for agents {agents:?}")]
    NoPerfectMatchingAtFinalize {
        agents: Vec<AgentId>,
        chosen_slot: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("internal solver error: {0}")]
    Internal(#[from] InternalError),
}

impl SolveError {
    pub fn is_internal(&self) -> bool {
        matches!(self, SolveError::Internal(_))
    }
}

/// One iteration of the reserve-filling loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub slot: usize,
    pub good: GoodId,
    /// Whether the graph minus the reserve had a perfect matching when the
    /// iteration began.
    pub p1_at_entry: bool,
    pub reserve_before: usize,
    pub reserve_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTrace {
    pub moves: Vec<MoveRecord>,
    pub chooser: AgentId,
    pub chooser_slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub agents: Vec<AgentId>,
    pub n_goods: usize,
    /// Single goods handed out before recursing.
    pub removed: Vec<(AgentId, GoodId)>,
    /// Present when the level ran the slot-partition path.
    pub repair: Option<RepairTrace>,
}

impl LevelTrace {
    pub fn iterations(&self) -> usize {
        self.repair.as_ref().map_or(0, |r| r.moves.len())
    }
}

/// Levels in the order they were entered.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub levels: Vec<LevelTrace>,
}

impl SolverTrace {
    pub fn max_iterations(&self) -> usize {
        self.levels
            .iter()
            .map(LevelTrace::iterations)
            .max()
            .unwrap_or(0)
    }

    pub fn total_iterations(&self) -> usize {
        self.levels.iter().map(LevelTrace::iterations).sum()
    }
}

/// Wraps a PROPavg sub-allocation of the level's goods to all agents but the
/// chooser as a slot partition with an empty reserve in the last slot, and
/// checks that the non-reserve slots admit a perfect matching.
pub fn initial_partition_from_subsolution(
    inst: &Instance,
    agents: &[AgentId],
    goods: &[GoodId],
    sub_alloc: &[Bundle],
) -> Result<SlotPartition, SolveError> {
    let n = agents.len();
    if n < 2 || sub_alloc.len() != n - 1 {
        return Err(SolveError::InvalidLevel(format!(
            "expected a sub-allocation for {} agents, got {}",
            n.saturating_sub(1),
            sub_alloc.len()
        )));
    }
    let mut bundles = sub_alloc.to_vec();
    bundles.push(Bundle::new());
    let part = SlotPartition::new(bundles, n - 1)?;
    let g = build_propavg_graph(inst, agents, goods, &part)?;
    if !satisfies_p1(&g) {
        return Err(InternalError::InitialPartitionNotP1 {
            agents: agents.to_vec(),
        }
        .into());
    }
    Ok(part)
}

/// Computes a PROPavg allocation.
pub fn solve(inst: &Instance) -> Result<Allocation, SolveError> {
    solve_with_trace(inst).map(|(alloc, _)| alloc)
}

pub fn solve_with_trace(inst: &Instance) -> Result<(Allocation, SolverTrace), SolveError> {
    let agents: Vec<AgentId> = (0..inst.n_agents()).collect();
    let goods: Vec<GoodId> = (0..inst.n_goods()).collect();
    let mut trace = SolverTrace::default();
    let bundles = solve_level(inst, &agents, &goods, &mut trace)?;
    Ok((Allocation::new(bundles), trace))
}

fn solve_level(
    inst: &Instance,
    agents: &[AgentId],
    goods: &[GoodId],
    trace: &mut SolverTrace,
) -> Result<Vec<Bundle>, SolveError> {
    let n = agents.len();
    let idx = trace.levels.len();
    trace.levels.push(LevelTrace {
        agents: agents.to_vec(),
        n_goods: goods.len(),
        removed: Vec::new(),
        repair: None,
    });
    if n == 1 {
        return Ok(vec![goods.iter().copied().collect()]);
    }

    let state = preprocess(inst, agents, goods)?;
    if !state.removed.is_empty() {
        trace.levels[idx].removed = state.removed.clone();
        let sub = solve_level(inst, &state.active_agents, &state.active_goods, trace)?;
        let mut out = Vec::with_capacity(n);
        for &a in agents {
            if let Some(p) = state.active_agents.iter().position(|&x| x == a) {
                out.push(sub[p].clone());
            } else {
                let &(_, g) = state
                    .removed
                    .iter()
                    .find(|&&(x, _)| x == a)
                    .expect("removed agent");
                out.push(Bundle::from([g]));
            }
        }
        return Ok(out);
    }

    let sub = solve_level(inst, &agents[..n - 1], goods, trace)?;
    let mut part = initial_partition_from_subsolution(inst, agents, goods, &sub)?;
    let mut g = build_propavg_graph(inst, agents, goods, &part)?;
    let mut moves = Vec::new();
    while !satisfies_p2(&g) {
        if moves.len() >= goods.len() {
            return Err(InternalError::RepairLoopExceeded {
                agents: agents.to_vec(),
                limit: goods.len(),
            }
            .into());
        }
        let p1_at_entry = satisfies_p1(&g);
        if !p1_at_entry {
            return Err(InternalError::P1Lost {
                agents: agents.to_vec(),
            }
            .into());
        }
        let mv = find_p1_preserving_move(inst, &g)?;
        let source_len = part.bundle(mv.slot).len();
        let reserve_before = part.bundle(part.reserve_slot()).len();
        part.move_to_reserve(mv.slot, mv.good)?;
        let next = build_propavg_graph(inst, agents, goods, &part)?;
        if cfg!(debug_assertions) && source_len >= 2 {
            let lost = graph::lost_edges(&g, &next, mv.slot);
            if !lost.is_empty() {
                return Err(InternalError::EdgeLost {
                    slot: mv.slot,
                    good: mv.good,
                    lost,
                }
                .into());
            }
        }
        moves.push(MoveRecord {
            slot: mv.slot,
            good: mv.good,
            p1_at_entry,
            reserve_before,
            reserve_after: part.bundle(part.reserve_slot()).len(),
        });
        g = next;
    }
    let chooser_slot = graph::chooser_slot(inst, &g);
    let bundles = finalize(inst, &g)?;
    trace.levels[idx].repair = Some(RepairTrace {
        moves,
        chooser: agents[n - 1],
        chooser_slot,
    });
    Ok(bundles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{verify, Notion};

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::new(vec![vec![3, 0, 8]]).unwrap();
        let alloc = solve(&inst).unwrap();
        assert_eq!(alloc.to_lists(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn four_goods_example_is_propavg() {
        let inst = Instance::new(vec![vec![10, 7, 7, 6]; 3]).unwrap();
        let (alloc, trace) = solve_with_trace(&inst).unwrap();
        assert!(verify(&inst, &alloc, Notion::PropAvg)
            .unwrap()
            .all_satisfied());
        assert_eq!(alloc.to_lists(), vec![vec![0], vec![1], vec![2, 3]]);
        assert_eq!(trace.levels[0].removed, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn one_good_two_agents() {
        let inst = Instance::new(vec![vec![5], vec![7]]).unwrap();
        let alloc = solve(&inst).unwrap();
        assert!(verify(&inst, &alloc, Notion::PropAvg)
            .unwrap()
            .all_satisfied());
    }

    #[test]
    fn no_goods() {
        let inst = Instance::new(vec![vec![]; 4]).unwrap();
        let alloc = solve(&inst).unwrap();
        assert!(alloc.bundles().iter().all(Bundle::is_empty));
        assert_eq!(alloc.n_agents(), 4);
    }

    #[test]
    fn uniform_goods_run_the_repair_loop() {
        let inst = Instance::new(vec![vec![1; 12]; 3]).unwrap();
        let (alloc, trace) = solve_with_trace(&inst).unwrap();
        assert!(verify(&inst, &alloc, Notion::PropAvg)
            .unwrap()
            .all_satisfied());
        assert!(trace.levels[0].repair.is_some());
        assert!(trace.total_iterations() > 0);
        for level in &trace.levels {
            for mv in level.repair.iter().flat_map(|r| &r.moves) {
                assert!(mv.p1_at_entry);
                assert_eq!(mv.reserve_after, mv.reserve_before + 1);
            }
        }
    }

    #[test]
    fn initial_partition_rejects_wrong_shape() {
        let inst = Instance::new(vec![vec![1, 1]; 3]).unwrap();
        assert!(matches!(
            initial_partition_from_subsolution(&inst, &[0, 1, 2], &[0, 1], &[[0, 1].into()]),
            Err(SolveError::InvalidLevel(_))
        ));
    }

    #[test]
    fn initial_partition_for_two_agents() {
        let inst = Instance::new(vec![vec![2, 3, 4], vec![4, 3, 2]]).unwrap();
        let part =
            initial_partition_from_subsolution(&inst, &[0, 1], &[0, 1, 2], &[[0, 1, 2].into()])
                .unwrap();
        assert_eq!(part.reserve_slot(), 1);
        assert!(part.bundle(1).is_empty());
    }
}
