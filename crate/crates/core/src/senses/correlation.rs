use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClusterSet, DEFAULT_MIN_CLUSTER_FRAC};
use crate::corpus::OccurrenceSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    LowestIndex,
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationConfig {
    /// Pairs scoring strictly above this join the pivot's cluster.
    pub sigma: f64,
    /// A cluster is "big" when it holds at least this fraction of the points.
    pub min_cluster_frac: f64,
    /// Stop once this many consecutive clusters came out small...
    pub stall_window: usize,
    /// ...and at least this many big clusters exist.
    pub min_big_clusters: usize,
    pub pivot: PivotRule,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self {
            sigma: 0.85,
            min_cluster_frac: DEFAULT_MIN_CLUSTER_FRAC,
            stall_window: 5,
            min_big_clusters: 2,
            pivot: PivotRule::LowestIndex,
        }
    }
}

impl CorrelationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be in [0, 1], got {}",
                self.sigma
            )));
        }
        if !(self.min_cluster_frac > 0.0 && self.min_cluster_frac < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "min cluster fraction must be in (0, 1), got {}",
                self.min_cluster_frac
            )));
        }
        Ok(())
    }
}

/// Greedy pivot clustering over `n` points with a pairwise similarity.
///
/// Each round takes an unassigned pivot and gathers every other point,
/// assigned or not, whose similarity to the pivot exceeds `sigma`. A point
/// can therefore land in several clusters. Only the pivot and newly covered
/// points count as assigned.
pub fn correlation_cluster_by<F>(n: usize, cfg: &CorrelationConfig, mut sim: F) -> Result<Vec<Vec<usize>>>
where
    F: FnMut(usize, usize) -> f64,
{
    cfg.validate()?;
    let mut rng = match cfg.pivot {
        PivotRule::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        PivotRule::LowestIndex => None,
    };
    let big = cfg.min_cluster_frac * n as f64;
    let mut assigned = vec![false; n];
    let mut n_assigned = 0;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut n_big = 0;
    let mut small_run = 0;

    while n_assigned < n {
        let pivot = match rng.as_mut() {
            None => assigned.iter().position(|a| !a).expect("unassigned point"),
            Some(rng) => {
                let free: Vec<usize> = (0..n).filter(|&i| !assigned[i]).collect();
                *free.choose(rng).expect("unassigned point")
            }
        };
        let mut members = vec![pivot];
        for other in 0..n {
            if other != pivot && sim(pivot, other) > cfg.sigma {
                members.push(other);
            }
        }
        members.sort_unstable();
        for &m in &members {
            if !assigned[m] {
                assigned[m] = true;
                n_assigned += 1;
            }
        }
        if members.len() as f64 >= big {
            n_big += 1;
            small_run = 0;
        } else {
            small_run += 1;
        }
        clusters.push(members);

        if n_big >= cfg.min_big_clusters && small_run >= cfg.stall_window {
            break;
        }
    }
    Ok(clusters)
}

/// Correlation-cluster a word's occurrences with a similarity over their
/// (pruned, merged) token bags.
pub fn correlation_cluster<F>(occs: &OccurrenceSet, cfg: &CorrelationConfig, sim: F) -> Result<ClusterSet>
where
    F: Fn(&[&str], &[&str]) -> f64,
{
    if occs.is_empty() {
        return Err(Error::EmptyInput(
            "correlation clustering needs at least one occurrence",
        ));
    }
    let bags: Vec<Vec<&str>> = occs.occurrences.iter().map(|o| o.tokens().collect()).collect();
    let clusters = correlation_cluster_by(bags.len(), cfg, |i, j| sim(&bags[i], &bags[j]))?;
    Ok(ClusterSet {
        target: occs.target.clone(),
        source_ids: occs.occurrences.iter().map(|o| o.source_id.clone()).collect(),
        clusters,
        root_features: None,
        log_joint: None,
    })
}
