//! JSON file formats for instances, allocations and solver results.
//!
//! Instance file:
//!
//! ```json
//! { "agents": 3, "goods": 4, "valuations": [[10, 7, 7, 6], [10, 7, 7, 6], [10, 7, 7, 6]] }
//! ```
//!
//! Allocation file (any document with an `allocation` field, including a
//! result file, is accepted): `{ "allocation": [[0], [1, 3], [2]] }`.
//! Good indices are 0-based. Output is pretty-printed with a trailing
//! newline.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::fairness::{verify_many, Certificate, FairnessError, Notion};
use crate::instance::{AgentId, Allocation, GoodId, Instance, InstanceError};
use crate::solver::SolverTrace;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("declared {declared} {what}, found {found}")]
    Shape {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("bundle {agent} lists good {good} more than once")]
    RepeatedGood { agent: AgentId, good: GoodId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub agents: usize,
    pub goods: usize,
    pub valuations: Vec<Vec<u64>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            agents: inst.n_agents(),
            goods: inst.n_goods(),
            valuations: inst.rows().map(<[u64]>::to_vec).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        if self.valuations.len() != self.agents {
            return Err(FormatError::Shape {
                what: "agents",
                declared: self.agents,
                found: self.valuations.len(),
            });
        }
        if let Some(row) = self.valuations.iter().find(|r| r.len() != self.goods) {
            return Err(FormatError::Shape {
                what: "goods",
                declared: self.goods,
                found: row.len(),
            });
        }
        Ok(Instance::from_flat(
            self.agents,
            self.goods,
            self.valuations.concat(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationFile {
    pub allocation: Vec<Vec<GoodId>>,
}

impl AllocationFile {
    pub fn from_allocation(alloc: &Allocation) -> Self {
        Self {
            allocation: alloc.to_lists(),
        }
    }

    /// Converts the lists to an allocation. Partition checks are left to the
    /// verifier; only repeats inside one list are rejected here because a
    /// set cannot represent them.
    pub fn to_allocation(&self) -> Result<Allocation, FormatError> {
        let mut bundles = Vec::with_capacity(self.allocation.len());
        for (agent, list) in self.allocation.iter().enumerate() {
            let bundle: crate::instance::Bundle = list.iter().copied().collect();
            if bundle.len() != list.len() {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                let good = sorted
                    .windows(2)
                    .find(|w| w[0] == w[1])
                    .map(|w| w[0])
                    .unwrap_or_default();
                return Err(FormatError::RepeatedGood { agent, good });
            }
            bundles.push(bundle);
        }
        Ok(Allocation::new(bundles))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotionCertificates {
    pub notion: Notion,
    pub satisfied: bool,
    pub agents: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub agents: Vec<AgentId>,
    pub goods: usize,
    pub removed: Vec<(AgentId, GoodId)>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub allocation: Vec<Vec<GoodId>>,
    pub certificates: Vec<NotionCertificates>,
    pub trace: Vec<LevelSummary>,
}

impl ResultFile {
    /// Certificates for `notions`, in the given order with duplicates dropped.
    pub fn build(
        inst: &Instance,
        alloc: &Allocation,
        trace: &SolverTrace,
        notions: &[Notion],
    ) -> Result<Self, FairnessError> {
        let mut wanted: Vec<Notion> = Vec::with_capacity(notions.len());
        for &n in notions {
            if !wanted.contains(&n) {
                wanted.push(n);
            }
        }
        let certificates = verify_many(inst, alloc, &wanted)?
            .into_iter()
            .map(|r| NotionCertificates {
                notion: r.notion,
                satisfied: r.all_satisfied(),
                agents: r.agents,
            })
            .collect();
        Ok(Self {
            allocation: alloc.to_lists(),
            certificates,
            trace: trace
                .levels
                .iter()
                .map(|l| LevelSummary {
                    agents: l.agents.clone(),
                    goods: l.n_goods,
                    removed: l.removed.clone(),
                    iterations: l.iterations(),
                })
                .collect(),
        })
    }

    pub fn allocation(&self) -> Result<Allocation, FormatError> {
        AllocationFile {
            allocation: self.allocation.clone(),
        }
        .to_allocation()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable types");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    from_json::<InstanceFile>(text)?.to_instance()
}

pub fn write_instance(inst: &Instance) -> String {
    to_json(&InstanceFile::from_instance(inst))
}

pub fn parse_allocation(text: &str) -> Result<Allocation, FormatError> {
    from_json::<AllocationFile>(text)?.to_allocation()
}
