use std::collections::HashMap;

use super::SparseVector;
use crate::error::{Error, Result};

/// Features ordered by descending weight, ties by ascending feature id.
#[derive(Debug, Clone, Default)]
pub struct RankedFeatureList {
    entries: Vec<(String, f64)>,
    ranks: HashMap<String, usize>,
}

impl RankedFeatureList {
    /// Build from entries already in rank order.
    fn from_sorted(entries: Vec<(String, f64)>) -> Self {
        let ranks = entries
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (f.clone(), i + 1))
            .collect();
        Self { entries, ranks }
    }

    /// Build from feature ids in rank order, each with unit weight. Handy for
    /// tests that only care about ranks.
    pub fn from_features<S: AsRef<str>>(features: &[S]) -> Self {
        let mut seen = std::collections::HashSet::new();
        let entries = features
            .iter()
            .filter(|f| seen.insert(f.as_ref().to_owned()))
            .map(|f| (f.as_ref().to_owned(), 1.0))
            .collect();
        Self::from_sorted(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based rank, if present.
    pub fn rank(&self, feature: &str) -> Option<usize> {
        self.ranks.get(feature).copied()
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.ranks.contains_key(feature)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(f, _)| f.as_str())
    }

    pub fn to_vector(&self) -> SparseVector {
        self.entries.iter().map(|(f, w)| (f.as_str(), *w)).collect()
    }
}

impl PartialEq for RankedFeatureList {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

pub fn rank_features(v: &SparseVector, cap: usize) -> Result<RankedFeatureList> {
    if cap == 0 {
        return Err(Error::InvalidArgument("feature cap must be at least 1".into()));
    }
    let mut entries: Vec<(String, f64)> = v
        .iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|(f, w)| (f.to_owned(), w))
        .collect();
    // Entries arrive in feature order, so a stable sort on weight keeps ties ascending.
    entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    entries.truncate(cap);
    Ok(RankedFeatureList::from_sorted(entries))
}
