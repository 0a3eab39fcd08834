//! Exhaustive ground truth for small instances.
//!
//! Every map from goods to agents is visited with a mixed-radix counter
//! (good 0 is the least significant digit), so the "first" satisfying
//! allocation is canonical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fairness::{AgentView, BundleView, Notion};
use crate::instance::{AgentId, Allocation, Instance};

pub const DEFAULT_MAX_ASSIGNMENTS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_assignments: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n_agents}^{n_goods} assignments exceed the budget of {max}")]
    BudgetExceeded {
        n_agents: usize,
        n_goods: usize,
        max: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Number of assignments visited, `n^m`.
    pub total: u64,
    pub count: u64,
    pub first_witness: Option<Allocation>,
}

fn assignment_count(inst: &Instance, budget: &EnumerationBudget) -> Result<u64, OracleError> {
    let err = OracleError::BudgetExceeded {
        n_agents: inst.n_agents(),
        n_goods: inst.n_goods(),
        max: budget.max_assignments,
    };
    let exp = u32::try_from(inst.n_goods()).map_err(|_| err.clone())?;
    match (inst.n_agents() as u64).checked_pow(exp) {
        Some(total) if total <= budget.max_assignments => Ok(total),
        _ => Err(err),
    }
}

/// Calls `visit(owner, satisfied)` for every assignment `owner[g] = agent`,
/// in counter order.
pub fn enumerate_with<F>(
    inst: &Instance,
    notion: Notion,
    budget: &EnumerationBudget,
    mut visit: F,
) -> Result<u64, OracleError>
where
    F: FnMut(&[AgentId], bool),
{
    let total = assignment_count(inst, budget)?;
    let n = inst.n_agents();
    let m = inst.n_goods();
    let mut owner = vec![0usize; m];
    let mut views: Vec<AgentView> = (0..n)
        .map(|i| AgentView {
            agent: i,
            total: inst.total(i),
            bundles: vec![BundleView::default(); n],
        })
        .collect();
    for _ in 0..total {
        let satisfied = views.iter_mut().all(|view| {
            fill_view(inst, &owner, view);
            view.certificate(notion).satisfied
        });
        visit(&owner, satisfied);
        for digit in owner.iter_mut() {
            *digit += 1;
            if *digit < n {
                break;
            }
            *digit = 0;
        }
    }
    Ok(total)
}

fn fill_view(inst: &Instance, owner: &[AgentId], view: &mut AgentView) {
    let row = inst.row(view.agent);
    for b in &mut view.bundles {
        *b = BundleView {
            value: 0,
            min: u64::MAX,
            max: 0,
        };
    }
    for (g, &k) in owner.iter().enumerate() {
        let b = &mut view.bundles[k];
        let v = row[g];
        b.value += u128::from(v);
        b.min = b.min.min(v);
        b.max = b.max.max(v);
    }
    for b in &mut view.bundles {
        if b.min == u64::MAX {
            b.min = 0;
        }
    }
}

/// Counts allocations satisfying `notion` and returns the first one.
pub fn enumerate_satisfying(
    inst: &Instance,
    notion: Notion,
    budget: &EnumerationBudget,
) -> Result<Enumeration, OracleError> {
    let n = inst.n_agents();
    let mut count = 0u64;
    let mut first = None;
    let total = enumerate_with(inst, notion, budget, |owner, ok| {
        if ok {
            count += 1;
            if first.is_none() {
                first = Some(Allocation::from_assignment(n, owner));
            }
        }
    })?;
    Ok(Enumeration {
        total,
        count,
        first_witness: first,
    })
}

/// A finite, indexable family of instances.
pub trait InstanceFamily: Sync {
    fn len(&self) -> usize;
    fn instance(&self, index: usize) -> Instance;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl InstanceFamily for [Instance] {
    fn len(&self) -> usize {
        <[Instance]>::len(self)
    }

    fn instance(&self, index: usize) -> Instance {
        self[index].clone()
    }
}

impl InstanceFamily for Vec<Instance> {
    fn len(&self) -> usize {
        <[Instance]>::len(self)
    }

    fn instance(&self, index: usize) -> Instance {
        self[index].clone()
    }
}

/// Every `n_agents × n_goods` matrix with entries in `0..=max_value`,
/// indexed in mixed radix with entry `(0, 0)` least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveFamily {
    pub n_agents: usize,
    pub n_goods: usize,
    pub max_value: u64,
}

impl InstanceFamily for ExhaustiveFamily {
    fn len(&self) -> usize {
        let cells = u32::try_from(self.n_agents * self.n_goods).expect("family too large");
        (self.max_value as usize + 1)
            .checked_pow(cells)
            .expect("family too large")
    }

    fn instance(&self, index: usize) -> Instance {
        let radix = self.max_value as usize + 1;
        let mut rest = index;
        let values = (0..self.n_agents * self.n_goods)
            .map(|_| {
                let v = rest % radix;
                rest /= radix;
                v as u64
            })
            .collect();
        Instance::from_flat(self.n_agents, self.n_goods, values).expect("small values")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub valuations: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub notion: Notion,
    pub checked: usize,
    /// Instances with no allocation satisfying the notion.
    pub counterexamples: Vec<Counterexample>,
    /// Instances over budget, by index.
    pub skipped: Vec<usize>,
}

/// Runs [`enumerate_satisfying`] over a family, in parallel, and reports
/// instances without any satisfying allocation. Results are in index order.
pub fn existence_sweep<F: InstanceFamily + ?Sized>(
    family: &F,
    notion: Notion,
    budget: &EnumerationBudget,
) -> SweepReport {
    enum Outcome {
        Exists,
        Empty(Counterexample),
        Skipped(usize),
    }
    let outcomes: Vec<Outcome> = (0..family.len())
        .into_par_iter()
        .map(|index| {
            let inst = family.instance(index);
            let mut found = false;
            let res = enumerate_with(&inst, notion, budget, |_, ok| found |= ok);
            match res {
                Err(_) => Outcome::Skipped(index),
                Ok(_) if found => Outcome::Exists,
                Ok(_) => Outcome::Empty(Counterexample {
                    index,
                    valuations: inst.rows().map(<[u64]>::to_vec).collect(),
                }),
            }
        })
        .collect();
    let mut report = SweepReport {
        notion,
        checked: 0,
        counterexamples: Vec::new(),
        skipped: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Exists => report.checked += 1,
            Outcome::Empty(c) => {
                report.checked += 1;
                report.counterexamples.push(c);
            }
            Outcome::Skipped(i) => report.skipped.push(i),
        }
    }
    report
}
