//! Word sense induction.
//!
//! Two clustering backends group a word's occurrences: the greedy pivot
//! [`correlation_cluster`] and the depth-two nested-CRP Gibbs sampler
//! [`tiered_cluster`]. Small clusters are then dropped with
//! [`filter_clusters`] and each survivor becomes a prototype by summing the
//! unpruned context vectors of its members.

mod correlation;
mod io;
mod tiered;

use std::collections::BTreeMap;

use crate::corpus::OccurrenceSet;
use crate::error::{Error, Result};
use crate::vsm::{build_count_matrix, ppmi_transform, SparseMatrix, SparseVector};

pub use correlation::{correlation_cluster, correlation_cluster_by, CorrelationConfig, PivotRule};
pub use io::{load_cluster_sets, load_inventory, save_cluster_sets, save_inventory};
pub use tiered::{tiered_cluster, tiered_cluster_traced, EtaRole, TieredConfig, TieredTrace};

pub const DEFAULT_MIN_CLUSTER_FRAC: f64 = 0.025;

/// Clusters of one word's occurrences, by occurrence index.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub target: String,
    /// Source id of every occurrence, clustered or not.
    pub source_ids: Vec<String>,
    /// Sorted member indices per cluster.
    pub clusters: Vec<Vec<usize>>,
    /// Tiered only: token positions of each occurrence assigned to the root.
    pub root_features: Option<Vec<Vec<usize>>>,
    /// Tiered only: joint log probability of the returned state.
    pub log_joint: Option<f64>,
}

impl ClusterSet {
    /// Everything in one cluster.
    pub fn single(occs: &OccurrenceSet) -> Self {
        Self {
            target: occs.target.clone(),
            source_ids: occs.occurrences.iter().map(|o| o.source_id.clone()).collect(),
            clusters: if occs.is_empty() {
                Vec::new()
            } else {
                vec![(0..occs.len()).collect()]
            },
            root_features: None,
            log_joint: None,
        }
    }

    pub fn n_occurrences(&self) -> usize {
        self.source_ids.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Cluster index per occurrence, or `None` for unassigned ones. For
    /// overlapping clusters the first containing cluster wins.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n_occurrences()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &m in members {
                out[m].get_or_insert(c);
            }
        }
        out
    }
}

/// Drop clusters holding less than `min_frac` of all occurrences. When
/// nothing survives, the result is one cluster of every occurrence.
pub fn filter_clusters(cs: &ClusterSet, min_frac: f64) -> Result<ClusterSet> {
    if !(min_frac > 0.0 && min_frac < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "min cluster fraction must be in (0, 1), got {min_frac}"
        )));
    }
    let n = cs.n_occurrences() as f64;
    let kept: Vec<Vec<usize>> = cs
        .clusters
        .iter()
        .filter(|c| c.len() as f64 >= min_frac * n)
        .cloned()
        .collect();
    let clusters = if kept.is_empty() && cs.n_occurrences() > 0 {
        vec![(0..cs.n_occurrences()).collect()]
    } else {
        kept
    };
    Ok(ClusterSet { clusters, ..cs.clone() })
}

/// One induced sense: its prototype vector and prior mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Sense {
    pub vector: SparseVector,
    pub prior: f64,
}

/// Sum the unpruned context vectors of each cluster's members.
///
/// Priors are cluster size over the larger of the occurrence count and the
/// summed cluster sizes, so dropped clusters give up their mass and
/// overlapping clusters still sum to at most one.
pub fn build_prototypes(cs: &ClusterSet, full_occurrences: &BTreeMap<String, SparseVector>) -> Result<Vec<Sense>> {
    if cs.clusters.is_empty() {
        return Err(Error::EmptyInput("no clusters to build prototypes from"));
    }
    let clustered: usize = cs.clusters.iter().map(Vec::len).sum();
    let denom = clustered.max(cs.n_occurrences()) as f64;
    cs.clusters
        .iter()
        .map(|members| {
            let mut vector = SparseVector::new();
            for &m in members {
                let id = &cs.source_ids[m];
                let bag = full_occurrences
                    .get(id)
                    .ok_or_else(|| Error::MissingOriginal(id.clone()))?;
                vector.add_vector(bag);
            }
            Ok(Sense {
                vector,
                prior: members.len() as f64 / denom,
            })
        })
        .collect()
}

/// Senses per word. Row labels in matrices are `word#index`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseInventory {
    pub words: BTreeMap<String, Vec<Sense>>,
}

pub fn sense_label(word: &str, index: usize) -> String {
    format!("{word}#{index}")
}

/// Split `word#index`.
pub fn parse_sense_label(label: &str) -> Option<(&str, usize)> {
    let (w, i) = label.rsplit_once('#')?;
    Some((w, i.parse().ok()?))
}

impl SenseInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: impl Into<String>, senses: Vec<Sense>) {
        self.words.insert(word.into(), senses);
    }

    pub fn get(&self, word: &str) -> Option<&[Sense]> {
        self.words.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn n_senses(&self) -> usize {
        self.words.values().map(Vec::len).sum()
    }

    /// Every sense vector keyed by its `word#index` label.
    pub fn labelled_vectors(&self) -> BTreeMap<String, SparseVector> {
        self.words
            .iter()
            .flat_map(|(w, ss)| {
                ss.iter()
                    .enumerate()
                    .map(move |(i, s)| (sense_label(w, i), s.vector.clone()))
            })
            .collect()
    }

    pub fn priors(&self) -> BTreeMap<String, f64> {
        self.words
            .iter()
            .flat_map(|(w, ss)| ss.iter().enumerate().map(move |(i, s)| (sense_label(w, i), s.prior)))
            .collect()
    }

    /// Rebuild from a labelled matrix and priors.
    pub fn from_matrix(m: &SparseMatrix, priors: &BTreeMap<String, f64>) -> Result<Self> {
        let mut grouped: BTreeMap<String, BTreeMap<usize, Sense>> = BTreeMap::new();
        for (label, row) in m.iter() {
            let (w, i) = parse_sense_label(label)
                .ok_or_else(|| Error::InvalidArgument(format!("row label {label:?} is not word#index")))?;
            let prior = *priors
                .get(label)
                .ok_or_else(|| Error::InvalidArgument(format!("no prior for sense {label}")))?;
            grouped.entry(w.to_owned()).or_default().insert(
                i,
                Sense {
                    vector: row.clone(),
                    prior,
                },
            );
        }
        let words = grouped
            .into_iter()
            .map(|(w, ss)| (w, ss.into_values().collect()))
            .collect();
        Ok(Self { words })
    }

    /// PPMI-weight every prototype against one shared matrix of all senses.
    pub fn ppmi(&self, side_tagged: bool) -> Result<SenseInventory> {
        let counts = build_count_matrix(&self.labelled_vectors(), side_tagged)?;
        let weighted = ppmi_transform(&counts)?;
        Self::from_matrix(&weighted, &self.priors())
    }
}

/// Single-prototype baseline: all occurrences in one sense with prior 1.
pub fn baseline_senses(occs: &OccurrenceSet) -> Result<Vec<Sense>> {
    build_prototypes(&ClusterSet::single(occs), &occs.full_bags())
}
