//! Sparse vector-space machinery.
//!
//! Feature ids are strings. Context tokens coming out of the corpus stage are
//! side-tagged (`L:tok`, `R:tok`); [`build_count_matrix`] either keeps the
//! tag or folds both sides into the bare token.

mod io;
mod ranked;
mod svd;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub use io::{load_latent, load_priors, load_sparse_matrix, save_latent, save_priors, save_sparse_matrix};
pub use ranked::{rank_features, RankedFeatureList};
pub use svd::{truncated_svd, truncated_svd_with, LatentMatrix, SvdMethod};

pub const LEFT_TAG: &str = "L:";
pub const RIGHT_TAG: &str = "R:";

/// Drop a side tag, if any.
pub fn strip_side(feature: &str) -> &str {
    feature
        .strip_prefix(LEFT_TAG)
        .or_else(|| feature.strip_prefix(RIGHT_TAG))
        .unwrap_or(feature)
}

/// Feature id to non-negative weight. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: BTreeMap<String, f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Set `feature` to `weight`, removing it when the weight is zero.
    pub fn insert(&mut self, feature: impl Into<String>, weight: f64) {
        let feature = feature.into();
        if weight == 0.0 {
            self.entries.remove(&feature);
        } else {
            self.entries.insert(feature, weight);
        }
    }

    pub fn add(&mut self, feature: &str, weight: f64) {
        if weight == 0.0 {
            return;
        }
        match self.entries.get_mut(feature) {
            Some(w) => {
                *w += weight;
                if *w == 0.0 {
                    self.entries.remove(feature);
                }
            }
            None => {
                self.entries.insert(feature.to_owned(), weight);
            }
        }
    }

    pub fn add_vector(&mut self, other: &SparseVector) {
        for (f, w) in other.iter() {
            self.add(f, w);
        }
    }

    pub fn get(&self, feature: &str) -> f64 {
        self.entries.get(feature).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.entries.contains_key(feature)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in feature-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(f, w)| (f.as_str(), *w))
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (f, w) in iter {
            let f = f.into();
            v.add(&f, w);
        }
        v
    }
}

/// Labelled rows of sparse vectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<SparseVector>,
}

impl SparseMatrix {
    pub fn row(&self, label: &str) -> Option<&SparseVector> {
        self.labels.iter().position(|l| l == label).map(|i| &self.rows[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SparseVector)> {
        self.labels.iter().map(String::as_str).zip(self.rows.iter())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Every feature id stored in any row.
    pub fn columns(&self) -> BTreeSet<String> {
        self.rows.iter().flat_map(|r| r.features().map(str::to_owned)).collect()
    }
}

/// Raw co-occurrence counts, one row per label.
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    pub matrix: SparseMatrix,
    pub columns: BTreeSet<String>,
}

/// Assemble prototypes into a count matrix with label-sorted rows.
///
/// With `side_tagged` the `L:`/`R:` feature tags are kept as distinct
/// columns; without it they are folded into the bare token.
pub fn build_count_matrix(prototypes: &BTreeMap<String, SparseVector>, side_tagged: bool) -> Result<CountMatrix> {
    if prototypes.is_empty() {
        return Err(Error::EmptyInput("count matrix needs at least one row"));
    }
    let mut labels = Vec::with_capacity(prototypes.len());
    let mut rows = Vec::with_capacity(prototypes.len());
    for (label, v) in prototypes {
        let row = if side_tagged {
            v.clone()
        } else {
            let mut merged = SparseVector::new();
            for (f, w) in v.iter() {
                merged.add(strip_side(f), w);
            }
            merged
        };
        labels.push(label.clone());
        rows.push(row);
    }
    let matrix = SparseMatrix { labels, rows };
    let columns = matrix.columns();
    Ok(CountMatrix { matrix, columns })
}

/// Positive pointwise mutual information (log base 2) of a count matrix.
pub fn ppmi_transform(m: &CountMatrix) -> Result<SparseMatrix> {
    let rows = &m.matrix.rows;
    let row_sums: Vec<f64> = rows.iter().map(SparseVector::total).collect();
    let total: f64 = row_sums.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    let mut col_sums: BTreeMap<&str, f64> = BTreeMap::new();
    for r in rows {
        for (f, c) in r.iter() {
            *col_sums.entry(f).or_default() += c;
        }
    }
    let weighted = rows
        .iter()
        .zip(&row_sums)
        .map(|(r, &rs)| {
            let mut out = SparseVector::new();
            for (f, c) in r.iter() {
                let pmi = (c * total / (rs * col_sums[f])).log2();
                if pmi > 0.0 {
                    out.insert(f, pmi);
                }
            }
            out
        })
        .collect();
    Ok(SparseMatrix {
        labels: m.matrix.labels.clone(),
        rows: weighted,
    })
}
