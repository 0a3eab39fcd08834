//! Seeded random instances.
//!
//! ChaCha8 streams are fixed across platforms and crate releases, so the
//! same seed always produces the same matrix.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{AgentId, Instance};
use crate::oracle::InstanceFamily;

/// Values drawn independently and uniformly from `0..=max_value`.
pub fn random_instance(n_agents: usize, n_goods: usize, max_value: u64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with(&mut rng, n_agents, n_goods, max_value)
}

pub fn random_instance_with<R: Rng + ?Sized>(
    rng: &mut R,
    n_agents: usize,
    n_goods: usize,
    max_value: u64,
) -> Instance {
    let values = (0..n_agents * n_goods)
        .map(|_| rng.gen_range(0..=max_value))
        .collect();
    Instance::from_flat(n_agents, n_goods, values).expect("generator parameters within bounds")
}

/// Each good goes to a uniformly random agent.
pub fn random_assignment<R: Rng + ?Sized>(
    rng: &mut R,
    n_agents: usize,
    n_goods: usize,
) -> Vec<AgentId> {
    (0..n_goods).map(|_| rng.gen_range(0..n_agents)).collect()
}

/// `count` instances; instance `k` is drawn from a generator seeded with
/// `seed + k`, which first picks the agent and good counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomFamily {
    pub agents: RangeInclusive<usize>,
    pub goods: RangeInclusive<usize>,
    pub max_value: u64,
    pub seed: u64,
    pub count: usize,
}

impl InstanceFamily for RandomFamily {
    fn len(&self) -> usize {
        self.count
    }

    fn instance(&self, index: usize) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64));
        let n = rng.gen_range(self.agents.clone());
        let m = rng.gen_range(self.goods.clone());
        random_instance_with(&mut rng, n, m, self.max_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(random_instance(3, 5, 20, 42), random_instance(3, 5, 20, 42));
        assert_ne!(random_instance(3, 5, 20, 42), random_instance(3, 5, 20, 43));
    }

    #[test]
    fn zero_max_value() {
        let inst = random_instance(3, 4, 0, 7);
        assert!(inst.rows().all(|r| r.iter().all(|&v| v == 0)));
    }

    #[test]
    fn family_respects_ranges() {
        let fam = RandomFamily {
            agents: 2..=5,
            goods: 3..=10,
            max_value: 50,
            seed: 1,
            count: 200,
        };
        for k in 0..fam.len() {
            let inst = fam.instance(k);
            assert!((2..=5).contains(&inst.n_agents()));
            assert!((3..=10).contains(&inst.n_goods()));
            assert!(inst.rows().flatten().all(|&v| v <= 50));
        }
        assert_eq!(fam.instance(17), fam.instance(17));
    }
}
