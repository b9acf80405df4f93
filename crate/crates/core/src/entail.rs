//! balAPinc and multi-sense score combination.
//!
//! balAPinc is the geometric mean of APinc, an average-precision style
//! measure of how much of `u`'s ranked feature list is included in `v`'s, and
//! Lin's symmetric feature-overlap similarity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vsm::{rank_features, RankedFeatureList, SparseVector};

/// Default length of the ranked feature lists.
pub const DEFAULT_FEATURE_CAP: usize = 1000;

/// `1 - rank/(|F|+1)` for a present feature, else 0.
pub fn rel_score(feature: &str, list: &RankedFeatureList) -> f64 {
    match list.rank(feature) {
        Some(r) => 1.0 - r as f64 / (list.len() as f64 + 1.0),
        None => 0.0,
    }
}

/// Average precision of `fu`'s features against `fv`, each hit weighted by
/// its relevance in `fv`.
///
/// The sum is kept as an exact fraction while it fits in `u128`, so the
/// result is the correctly rounded value for short lists and `apinc(F, F)`
/// is exactly one half.
pub fn apinc(fu: &RankedFeatureList, fv: &RankedFeatureList) -> f64 {
    if fu.is_empty() {
        return 0.0;
    }
    // apinc = (1 / ((|Fv|+1) |Fu|)) * sum over hits of (included/r) * (|Fv|+1-rank_v)
    let m1 = fv.len() as u128 + 1;
    let mut exact: Option<(u128, u128)> = Some((0, 1));
    let mut approx = 0.0;
    let mut included = 0u128;
    for (r, f) in fu.features().enumerate() {
        let Some(rank) = fv.rank(f) else { continue };
        included += 1;
        let r = r as u128 + 1;
        let weight = m1 - rank as u128;
        approx += (included as f64 / r as f64) * weight as f64;
        exact = exact.and_then(|(n, d)| add_fraction(n, d, included * weight, r));
    }
    let denom = m1 * fu.len() as u128;
    match exact.and_then(|(n, d)| Some((n, d.checked_mul(denom)?))) {
        Some((n, d)) => fraction_to_f64(n, d),
        None => approx / denom as f64,
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `n/d + a/b`, reduced; `None` on overflow.
fn add_fraction(n: u128, d: u128, a: u128, b: u128) -> Option<(u128, u128)> {
    let g = gcd(d, b);
    let num = n.checked_mul(b / g)?.checked_add(a.checked_mul(d / g)?)?;
    let den = d.checked_mul(b / g)?;
    let h = gcd(num, den).max(1);
    Some((num / h, den / h))
}

fn fraction_to_f64(n: u128, d: u128) -> f64 {
    let g = gcd(n, d).max(1);
    (n / g) as f64 / (d / g) as f64
}

/// Lin's measure: weight mass on shared features over total weight mass.
pub fn lin_similarity(u: &SparseVector, v: &SparseVector) -> f64 {
    if u.is_empty() || v.is_empty() {
        return 0.0;
    }
    let shared: f64 = u.iter().filter(|(f, _)| v.contains(f)).map(|(f, w)| w + v.get(f)).sum();
    shared / (u.total() + v.total())
}

/// Score that `u` entails `v`.
pub fn balapinc(u: &SparseVector, v: &SparseVector, cap: usize) -> Result<f64> {
    let fu = rank_features(u, cap)?;
    let fv = rank_features(v, cap)?;
    Ok(balapinc_ranked(&fu, &fv, u, v))
}

/// balAPinc with the ranked lists already built.
pub fn balapinc_ranked(fu: &RankedFeatureList, fv: &RankedFeatureList, u: &SparseVector, v: &SparseVector) -> f64 {
    (apinc(fu, fv) * lin_similarity(u, v)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombinationStrategy {
    AvgScore,
    MaxScore,
    WeightedAvgScore,
    WeightedMaxScore,
}

impl CombinationStrategy {
    pub const ALL: [CombinationStrategy; 4] = [
        CombinationStrategy::AvgScore,
        CombinationStrategy::MaxScore,
        CombinationStrategy::WeightedAvgScore,
        CombinationStrategy::WeightedMaxScore,
    ];

    pub fn is_weighted(self) -> bool {
        matches!(self, Self::WeightedAvgScore | Self::WeightedMaxScore)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::AvgScore => "AvgScore",
            Self::MaxScore => "MaxScore",
            Self::WeightedAvgScore => "WeightedAvgScore",
            Self::WeightedMaxScore => "WeightedMaxScore",
        }
    }
}

impl fmt::Display for CombinationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombinationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown combination strategy {s:?}")))
    }
}

/// Collapse a score matrix into one score.
///
/// `scores[i][j]` scores sense `i` of the first word against sense `j` of
/// the second. The weighted variants scale each cell by the product of the
/// two senses' priors.
pub fn combine_scores(
    scores: &[Vec<f64>],
    priors_u: &[f64],
    priors_v: &[f64],
    strategy: CombinationStrategy,
) -> Result<f64> {
    if scores.is_empty() || scores.iter().any(Vec::is_empty) {
        return Err(Error::EmptyInput("score matrix needs at least one sense per side"));
    }
    let cells = || {
        scores.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, &s)| (priors_u[i] * priors_v[j], s))
        })
    };
    let n = scores.iter().map(Vec::len).sum::<usize>() as f64;
    Ok(match strategy {
        CombinationStrategy::MaxScore => cells().map(|(_, s)| s).fold(f64::NEG_INFINITY, f64::max),
        CombinationStrategy::AvgScore => cells().map(|(_, s)| s).sum::<f64>() / n,
        CombinationStrategy::WeightedAvgScore => {
            let (num, den) = cells().fold((0.0, 0.0), |(num, den), (p, s)| (num + p * s, den + p));
            num / den
        }
        CombinationStrategy::WeightedMaxScore => {
            let top = cells().map(|(p, _)| p).fold(f64::NEG_INFINITY, f64::max);
            cells().map(|(p, s)| p * s).fold(f64::NEG_INFINITY, f64::max) / top
        }
    })
}

/// Score every sense pair with `base` and combine.
pub fn combine_sense_scores<F>(
    senses_u: &[(&SparseVector, f64)],
    senses_v: &[(&SparseVector, f64)],
    strategy: CombinationStrategy,
    mut base: F,
) -> Result<f64>
where
    F: FnMut(&SparseVector, &SparseVector) -> Result<f64>,
{
    if senses_u.is_empty() || senses_v.is_empty() {
        return Err(Error::EmptyInput("both words need at least one sense"));
    }
    let scores = senses_u
        .iter()
        .map(|(u, _)| senses_v.iter().map(|(v, _)| base(u, v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let pu: Vec<f64> = senses_u.iter().map(|(_, p)| *p).collect();
    let pv: Vec<f64> = senses_v.iter().map(|(_, p)| *p).collect();
    combine_scores(&scores, &pu, &pv, strategy)
}
