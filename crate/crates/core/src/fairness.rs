//! Exact verdicts for proportionality relaxations and envy-based notions.
//!
//! Every proportionality-family notion has the shape
//! `v_i(X_i) >= v_i(M)/n - d_i(X)` with `d_i(X) = num/coef`. Multiplying by
//! `coef * n` gives the integer test
//! `coef*n*v_i(X_i) + n*num >= coef*v_i(M)`, which is what the certificates
//! record. Envy-family notions compare pairs of bundles directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{
    validate_allocation, AgentId, Allocation, AllocationViolation, Instance, InstanceError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Notion {
    #[serde(rename = "PROP")]
    Prop,
    #[serde(rename = "PROP1")]
    Prop1,
    #[serde(rename = "PROPM")]
    PropM,
    #[serde(rename = "PROPAVG")]
    PropAvg,
    #[serde(rename = "AVG_EFX")]
    AvgEfx,
    #[serde(rename = "PROPX")]
    PropX,
    #[serde(rename = "EF")]
    Ef,
    #[serde(rename = "EF1")]
    Ef1,
    #[serde(rename = "EFX")]
    Efx,
}

impl Notion {
    pub const ALL: [Notion; 9] = [
        Notion::Prop,
        Notion::Prop1,
        Notion::PropM,
        Notion::PropAvg,
        Notion::AvgEfx,
        Notion::PropX,
        Notion::Ef,
        Notion::Ef1,
        Notion::Efx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Prop => "PROP",
            Notion::Prop1 => "PROP1",
            Notion::PropM => "PROPM",
            Notion::PropAvg => "PROPAVG",
            Notion::AvgEfx => "AVG_EFX",
            Notion::PropX => "PROPX",
            Notion::Ef => "EF",
            Notion::Ef1 => "EF1",
            Notion::Efx => "EFX",
        }
    }

    /// True for notions of the form `v_i(X_i) >= v_i(M)/n - d_i(X)`.
    pub fn is_proportional(self) -> bool {
        !matches!(self, Notion::Ef | Notion::Ef1 | Notion::Efx)
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown fairness notion {0:?}")]
pub struct UnknownNotion(pub String);

impl FromStr for Notion {
    type Err = UnknownNotion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        Notion::ALL
            .into_iter()
            .find(|n| n.name() == key || (key == "AVGEFX" && *n == Notion::AvgEfx))
            .ok_or_else(|| UnknownNotion(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairnessError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("invalid allocation: {0}")]
    Allocation(#[from] AllocationViolation),
    #[error("{0} is an envy-based notion and has no deficiency term")]
    NotProportional(Notion),
}

/// `d_i(X)` as the exact fraction `num / coef`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deficiency {
    pub coef: u128,
    pub num: u128,
}

/// The integer comparison that decided one agent's verdict.
///
/// For envy-family notions `against` names the other agent of the tightest
/// pair (smallest `lhs - rhs`, lowest index on ties).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub agent: AgentId,
    pub lhs: u128,
    pub rhs: u128,
    pub satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub against: Option<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatisfactionReport {
    pub notion: Notion,
    pub agents: Vec<Certificate>,
}

impl SatisfactionReport {
    /// The allocation satisfies the notion iff every agent does.
    pub fn all_satisfied(&self) -> bool {
        self.agents.iter().all(|c| c.satisfied)
    }

    pub fn failing_agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.iter().filter(|c| !c.satisfied).map(|c| c.agent)
    }
}

/// One agent's view of one bundle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct BundleView {
    pub value: u128,
    /// `m_i`, 0 when empty.
    pub min: u64,
    /// Largest single-good value, 0 when empty.
    pub max: u64,
}

/// How one agent sees every bundle of an allocation, together with her
/// total value. Verdicts are functions of this view alone.
#[derive(Debug, Clone)]
pub(crate) struct AgentView {
    pub agent: AgentId,
    pub total: u128,
    pub bundles: Vec<BundleView>,
}

impl AgentView {
    pub fn new(inst: &Instance, alloc: &Allocation, agent: AgentId) -> Self {
        let row = inst.row(agent);
        let bundles = alloc
            .bundles()
            .iter()
            .map(|b| {
                let mut view = BundleView {
                    min: u64::MAX,
                    ..BundleView::default()
                };
                for g in b.iter() {
                    let v = row[g];
                    view.value += u128::from(v);
                    view.min = view.min.min(v);
                    view.max = view.max.max(v);
                }
                if b.is_empty() {
                    view.min = 0;
                }
                view
            })
            .collect();
        Self {
            agent,
            total: inst.total(agent),
            bundles,
        }
    }

    fn others(&self) -> impl Iterator<Item = (AgentId, &BundleView)> + '_ {
        self.bundles
            .iter()
            .enumerate()
            .filter(move |(k, _)| *k != self.agent)
    }

    fn n(&self) -> u128 {
        self.bundles.len() as u128
    }

    pub fn deficiency(&self, notion: Notion) -> Option<Deficiency> {
        let n = self.n();
        if n <= 1 {
            return notion
                .is_proportional()
                .then_some(Deficiency { coef: 1, num: 0 });
        }
        let mins = || self.others().map(|(_, b)| u128::from(b.min));
        let d = match notion {
            Notion::Prop => Deficiency { coef: 1, num: 0 },
            Notion::Prop1 => Deficiency {
                coef: 1,
                num: self
                    .others()
                    .map(|(_, b)| u128::from(b.max))
                    .max()
                    .unwrap_or(0),
            },
            Notion::PropM => Deficiency {
                coef: 1,
                num: mins().max().unwrap_or(0),
            },
            Notion::PropAvg => Deficiency {
                coef: n - 1,
                num: mins().sum(),
            },
            Notion::AvgEfx => Deficiency {
                coef: n,
                num: mins().sum(),
            },
            Notion::PropX => Deficiency {
                coef: 1,
                num: mins().min().unwrap_or(0),
            },
            Notion::Ef | Notion::Ef1 | Notion::Efx => return None,
        };
        Some(d)
    }

    pub fn certificate(&self, notion: Notion) -> Certificate {
        let own = self.bundles[self.agent].value;
        if let Some(Deficiency { coef, num }) = self.deficiency(notion) {
            let n = self.n();
            let lhs = coef * n * own + n * num;
            let rhs = coef * self.total;
            return Certificate {
                agent: self.agent,
                lhs,
                rhs,
                satisfied: lhs >= rhs,
                against: None,
            };
        }
        let pair = |b: &BundleView| -> (u128, u128) {
            match notion {
                Notion::Ef => (own, b.value),
                Notion::Ef1 => (own + u128::from(b.max), b.value),
                Notion::Efx => (own + u128::from(b.min), b.value),
                _ => unreachable!("proportional notions handled above"),
            }
        };
        let tightest = self
            .others()
            .map(|(k, b)| {
                let (lhs, rhs) = pair(b);
                (lhs as i128 - rhs as i128, k, lhs, rhs)
            })
            .min_by_key(|&(slack, k, _, _)| (slack, k));
        match tightest {
            Some((slack, k, lhs, rhs)) => Certificate {
                agent: self.agent,
                lhs,
                rhs,
                satisfied: slack >= 0,
                against: Some(k),
            },
            None => Certificate {
                agent: self.agent,
                lhs: own,
                rhs: own,
                satisfied: true,
                against: None,
            },
        }
    }
}

fn checked_view(
    inst: &Instance,
    alloc: &Allocation,
    agent: AgentId,
) -> Result<AgentView, FairnessError> {
    inst.check_agent(agent)?;
    validate_allocation(inst, alloc)?;
    Ok(AgentView::new(inst, alloc, agent))
}

/// `d_i(X)` for a proportionality-family notion.
pub fn deficiency(
    inst: &Instance,
    alloc: &Allocation,
    agent: AgentId,
    notion: Notion,
) -> Result<Deficiency, FairnessError> {
    checked_view(inst, alloc, agent)?
        .deficiency(notion)
        .ok_or(FairnessError::NotProportional(notion))
}

pub fn certificate(
    inst: &Instance,
    alloc: &Allocation,
    agent: AgentId,
    notion: Notion,
) -> Result<Certificate, FairnessError> {
    Ok(checked_view(inst, alloc, agent)?.certificate(notion))
}

pub fn is_satisfied(
    inst: &Instance,
    alloc: &Allocation,
    agent: AgentId,
    notion: Notion,
) -> Result<bool, FairnessError> {
    Ok(certificate(inst, alloc, agent, notion)?.satisfied)
}

/// Per-agent verdicts for one notion.
pub fn verify(
    inst: &Instance,
    alloc: &Allocation,
    notion: Notion,
) -> Result<SatisfactionReport, FairnessError> {
    validate_allocation(inst, alloc)?;
    Ok(verify_unchecked(inst, alloc, notion))
}

/// Verdicts for several notions, computing each agent's view once.
pub fn verify_many(
    inst: &Instance,
    alloc: &Allocation,
    notions: &[Notion],
) -> Result<Vec<SatisfactionReport>, FairnessError> {
    validate_allocation(inst, alloc)?;
    let views: Vec<AgentView> = (0..inst.n_agents())
        .map(|i| AgentView::new(inst, alloc, i))
        .collect();
    Ok(notions
        .iter()
        .map(|&notion| SatisfactionReport {
            notion,
            agents: views.iter().map(|v| v.certificate(notion)).collect(),
        })
        .collect())
}

pub(crate) fn verify_unchecked(
    inst: &Instance,
    alloc: &Allocation,
    notion: Notion,
) -> SatisfactionReport {
    SatisfactionReport {
        notion,
        agents: (0..inst.n_agents())
            .map(|i| AgentView::new(inst, alloc, i).certificate(notion))
            .collect(),
    }
}
