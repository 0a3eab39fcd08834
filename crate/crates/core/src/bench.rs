//! Timing harness: solve seeded random instances one after another and
//! verify every output.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::fairness::{verify, Notion};
use crate::generate::random_instance;
use crate::solver::{solve_with_trace, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub agents: usize,
    pub goods: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub solve_ms: f64,
    pub max_iterations: usize,
    pub total_iterations: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub trials: Vec<TrialResult>,
    /// `None` when no trials ran.
    pub median_solve_ms: Option<f64>,
    pub max_solve_ms: Option<f64>,
    pub max_iterations: usize,
    pub failures: usize,
}

impl BenchReport {
    pub fn all_verified(&self) -> bool {
        self.failures == 0
    }
}

fn median(sorted: &[Duration]) -> Option<Duration> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Trial `k` uses seed `config.seed + k`. Runs on the calling thread.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, SolveError> {
    let mut trials = Vec::with_capacity(config.trials);
    let mut times = Vec::with_capacity(config.trials);
    for k in 0..config.trials {
        let seed = config.seed.wrapping_add(k as u64);
        let inst = random_instance(config.agents, config.goods, config.max_value, seed);
        let start = Instant::now();
        let (alloc, trace) = solve_with_trace(&inst)?;
        let elapsed = start.elapsed();
        let verified = verify(&inst, &alloc, Notion::PropAvg)
            .map(|r| r.all_satisfied())
            .unwrap_or(false);
        times.push(elapsed);
        trials.push(TrialResult {
            seed,
            solve_ms: ms(elapsed),
            max_iterations: trace.max_iterations(),
            total_iterations: trace.total_iterations(),
            verified,
        });
    }
    times.sort_unstable();
    Ok(BenchReport {
        config: config.clone(),
        median_solve_ms: median(&times).map(ms),
        max_solve_ms: times.last().copied().map(ms),
        max_iterations: trials.iter().map(|t| t.max_iterations).max().unwrap_or(0),
        failures: trials.iter().filter(|t| !t.verified).count(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials() {
        let report = run_bench(&BenchConfig {
            agents: 3,
            goods: 5,
            trials: 0,
            seed: 1,
            max_value: 10,
        })
        .unwrap();
        assert!(report.trials.is_empty());
        assert_eq!(report.median_solve_ms, None);
        assert!(report.all_verified());
    }

    #[test]
    fn small_run_verifies() {
        let report = run_bench(&BenchConfig {
            agents: 4,
            goods: 12,
            trials: 5,
            seed: 9,
            max_value: 100,
        })
        .unwrap();
        assert_eq!(report.trials.len(), 5);
        assert!(report.all_verified());
        assert!(report.median_solve_ms.is_some());
    }

    #[test]
    fn median_even_and_odd() {
        let d = |ms| Duration::from_millis(ms);
        assert_eq!(median(&[d(1), d(3), d(9)]), Some(d(3)));
        assert_eq!(median(&[d(2), d(4)]), Some(d(3)));
    }
}
