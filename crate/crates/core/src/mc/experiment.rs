use std::collections::BTreeMap;

use rayon::prelude::*;

use super::dgp::{gen_panel_with_truth, DgpConfig};
use super::rng::ReplicationRng;
use crate::cd_tests::{run_all_tests, TestName, TestResult};
use crate::error::{Error, Result};

/// Rejection frequencies of the battery over one design.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub config: DgpConfig,
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Replications whose model fit or test computation failed.
    pub excluded: usize,
    pub rejection_rate: BTreeMap<TestName, f64>,
    /// Binomial standard error √(p(1-p)/m) over the m usable replications.
    pub mc_se: BTreeMap<TestName, f64>,
}

impl McReport {
    pub fn used(&self) -> usize {
        self.replications - self.excluded
    }

    pub fn rate(&self, test: TestName) -> f64 {
        self.rejection_rate[&test]
    }

    pub fn se(&self, test: TestName) -> f64 {
        self.mc_se[&test]
    }
}

/// Battery results for a single replication.
pub fn run_replication(config: &DgpConfig, alpha: f64, seed: u64, replication: u64) -> Result<Vec<TestResult>> {
    let sim = gen_panel_with_truth(config, &ReplicationRng::new(seed, replication))?;
    run_all_tests(&sim.data, config.k, alpha)
}

/// Full battery output of every replication, in replication order.
pub fn simulate_statistics(
    config: &DgpConfig,
    replications: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<Result<Vec<TestResult>>>> {
    config.validate()?;
    if replications == 0 {
        return Err(Error::InvalidArgument("replications must be >= 1".into()));
    }
    Ok((0..replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, alpha, seed, rep))
        .collect())
}

/// Empirical rejection rates of the battery at level `alpha`.
///
/// Each replication depends only on `(config, seed, index)`, and tallies are
/// integer counts, so the report does not depend on the thread count.
pub fn run_experiment(config: &DgpConfig, replications: usize, alpha: f64, seed: u64) -> Result<McReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    config.validate()?;
    if replications == 0 {
        return Err(Error::InvalidArgument("replications must be >= 1".into()));
    }
    let outcomes: Vec<Option<[bool; 7]>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            run_replication(config, alpha, seed, rep).ok().map(|results| {
                let mut flags = [false; 7];
                for (flag, r) in flags.iter_mut().zip(results.iter()) {
                    *flag = r.reject;
                }
                flags
            })
        })
        .collect();

    let mut counts = [0usize; 7];
    let mut excluded = 0;
    for outcome in &outcomes {
        match outcome {
            Some(flags) => {
                for (c, &f) in counts.iter_mut().zip(flags.iter()) {
                    *c += usize::from(f);
                }
            }
            None => excluded += 1,
        }
    }
    let used = replications - excluded;
    if used == 0 {
        return Err(Error::InvalidArgument(format!(
            "all {replications} replications failed for {config:?}"
        )));
    }

    let mut rejection_rate = BTreeMap::new();
    let mut mc_se = BTreeMap::new();
    for (test, &count) in TestName::BATTERY.iter().zip(counts.iter()) {
        let p = count as f64 / used as f64;
        rejection_rate.insert(*test, p);
        mc_se.insert(*test, (p * (1.0 - p) / used as f64).sqrt());
    }
    Ok(McReport {
        config: config.clone(),
        replications,
        alpha,
        seed,
        excluded,
        rejection_rate,
        mc_se,
    })
}
