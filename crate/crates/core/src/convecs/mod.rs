//! ConVecs: an SVM over the concatenated latent vectors of a word pair.
//!
//! Each half of the `(u, v)` concatenation is scaled to unit length, the
//! kernel is `(x·y + 1)^degree` and a sigmoid fitted on out-of-fold decision
//! values turns the margin into the probability of entailment.

mod model_io;
mod svm;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entail::balapinc;
use crate::error::{Error, Result};
use crate::vsm::SparseVector;

pub use model_io::{load_model, read_model, save_model, write_model, MODEL_VERSION};
pub use svm::{
    kernel_matrix, platt_fit, platt_predict, poly_kernel, train_smo, train_smo_bounded, KernelMachine, SmoParams,
};

pub const DEFAULT_DEGREE: u32 = 2;
pub const DEFAULT_REGULARIZATION: f64 = 1.0;
pub const CALIBRATION_FOLDS: usize = 5;
const SMO_TOLERANCE: f64 = 1e-8;
const SMO_MAX_ITER: usize = 10_000_000;

/// One training example: latent vectors of `u` and `v` and whether `u`
/// entails `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairExample {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub label: bool,
}

/// A sense with its raw prototype, latent vector and prior.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSense {
    pub vector: SparseVector,
    pub latent: Vec<f64>,
    pub prior: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrainPairStrategy {
    BestOverlap,
    AvgVector,
}

/// Which sense pair BestOverlap uses for negative examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NegativePairs {
    #[default]
    MostOverlap,
    LeastOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalStrategy {
    AvgScore,
    MaxScore,
    AvgVector,
}

impl TrainPairStrategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::BestOverlap => "BestOverlap",
            Self::AvgVector => "AvgVector",
        }
    }
}

impl EvalStrategy {
    pub const ALL: [EvalStrategy; 3] = [Self::AvgScore, Self::MaxScore, Self::AvgVector];

    pub fn name(self) -> &'static str {
        match self {
            Self::AvgScore => "AvgScore",
            Self::MaxScore => "MaxScore",
            Self::AvgVector => "AvgVector",
        }
    }
}

impl fmt::Display for TrainPairStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for EvalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrainPairStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::BestOverlap, Self::AvgVector]
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown training pair strategy {s:?}")))
    }
}

impl FromStr for EvalStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown evaluation strategy {s:?}")))
    }
}

/// Prior-weighted mean of latent sense vectors.
pub fn average_latent(senses: &[LatentSense]) -> Result<Vec<f64>> {
    let first = senses.first().ok_or(Error::EmptyInput("sense list is empty"))?;
    let k = first.latent.len();
    let mut out = vec![0.0; k];
    let mut mass = 0.0;
    for s in senses {
        if s.latent.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: s.latent.len(),
            });
        }
        for (o, x) in out.iter_mut().zip(&s.latent) {
            *o += s.prior * x;
        }
        mass += s.prior;
    }
    if mass <= 0.0 {
        return Err(Error::InvalidArgument("sense priors sum to zero".into()));
    }
    for o in &mut out {
        *o /= mass;
    }
    Ok(out)
}

/// Turn a labelled word pair into a training example.
pub fn select_training_pair(
    label: bool,
    senses_u: &[LatentSense],
    senses_v: &[LatentSense],
    strategy: TrainPairStrategy,
    feature_cap: usize,
) -> Result<PairExample> {
    select_training_pair_with(
        label,
        senses_u,
        senses_v,
        strategy,
        feature_cap,
        NegativePairs::MostOverlap,
    )
}

pub fn select_training_pair_with(
    label: bool,
    senses_u: &[LatentSense],
    senses_v: &[LatentSense],
    strategy: TrainPairStrategy,
    feature_cap: usize,
    negatives: NegativePairs,
) -> Result<PairExample> {
    if senses_u.is_empty() || senses_v.is_empty() {
        return Err(Error::EmptyInput("both words need at least one sense"));
    }
    match strategy {
        TrainPairStrategy::AvgVector => Ok(PairExample {
            u: average_latent(senses_u)?,
            v: average_latent(senses_v)?,
            label,
        }),
        TrainPairStrategy::BestOverlap => {
            let least = !label && negatives == NegativePairs::LeastOverlap;
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, su) in senses_u.iter().enumerate() {
                for (j, sv) in senses_v.iter().enumerate() {
                    let s = balapinc(&su.vector, &sv.vector, feature_cap)?;
                    let better = match best {
                        None => true,
                        Some((b, _, _)) => (least && s < b) || (!least && s > b),
                    };
                    if better {
                        best = Some((s, i, j));
                    }
                }
            }
            let (_, i, j) = best.expect("non-empty sense lists");
            Ok(PairExample {
                u: senses_u[i].latent.clone(),
                v: senses_v[j].latent.clone(),
                label,
            })
        }
    }
}

fn unit(x: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
    x.iter().map(move |a| a * scale)
}

/// `[u/|u|, v/|v|]`, zero halves left at zero.
pub fn concat_features(u: &[f64], v: &[f64]) -> Vec<f64> {
    unit(u).chain(unit(v)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvecsModel {
    /// Latent dimension of each half.
    pub k: usize,
    pub machine: KernelMachine,
    pub platt_a: f64,
    pub platt_b: f64,
    /// Names the latent space the model was trained in, if anything does.
    pub projection: Option<String>,
}

impl ConvecsModel {
    pub fn degree(&self) -> u32 {
        self.machine.degree
    }

    fn check(&self, u: &[f64], v: &[f64]) -> Result<()> {
        for x in [u, v] {
            if x.len() != self.k {
                return Err(Error::DimensionMismatch {
                    expected: self.k,
                    got: x.len(),
                });
            }
        }
        Ok(())
    }

    /// Signed margin for the pair, positive leaning towards entailment.
    pub fn decision_value(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u, v)?;
        Ok(self.machine.decision(&concat_features(u, v)))
    }
}

fn smo_params(degree: u32, regularization: f64) -> SmoParams {
    SmoParams {
        c: regularization,
        degree,
        tolerance: SMO_TOLERANCE,
        max_iter: SMO_MAX_ITER,
    }
}

fn to_signed(labels: &[bool]) -> Vec<f64> {
    labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect()
}

/// Each copy of a repeated example gets `regularization / copies`, so the
/// problem equals the deduplicated one with box `regularization`.
fn fit_machine(xs: &[Vec<f64>], labels: &[bool], degree: u32, regularization: f64) -> Result<KernelMachine> {
    let mut copies: HashMap<(Vec<u64>, bool), usize> = HashMap::new();
    let key = |x: &[f64], l: bool| (x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), l);
    for (x, &l) in xs.iter().zip(labels) {
        *copies.entry(key(x, l)).or_default() += 1;
    }
    let bounds: Vec<f64> = xs
        .iter()
        .zip(labels)
        .map(|(x, &l)| regularization / copies[&key(x, l)] as f64)
        .collect();
    train_smo_bounded(xs, &to_signed(labels), &bounds, &smo_params(degree, regularization))
}

/// Out-of-fold decision values for calibration.
fn held_out_decisions(
    xs: &[Vec<f64>],
    labels: &[bool],
    degree: u32,
    regularization: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = xs.len();
    let folds = CALIBRATION_FOLDS.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![0.0; n];
    for f in 0..folds {
        let test: Vec<usize> = order.iter().copied().skip(f).step_by(folds).collect();
        let train: Vec<usize> = order
            .iter()
            .enumerate()
            .filter(|(pos, _)| pos % folds != f)
            .map(|(_, &i)| i)
            .collect();
        let tl: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
        let pos = tl.iter().filter(|&&l| l).count();
        if pos == 0 || pos == tl.len() {
            let d = if pos == 0 { -1.0 } else { 1.0 };
            for &i in &test {
                out[i] = d;
            }
            continue;
        }
        let txs: Vec<Vec<f64>> = train.iter().map(|&i| xs[i].clone()).collect();
        let m = fit_machine(&txs, &tl, degree, regularization)?;
        for &i in &test {
            out[i] = m.decision(&xs[i]);
        }
    }
    Ok(out)
}

/// Train the classifier and its probability calibration.
///
/// The box constraint is `regularization` per distinct example, shared
/// among exact repeats, so repeating the training set leaves the decision
/// function unchanged.
pub fn train_convecs(
    examples: &[PairExample],
    kernel_degree: u32,
    regularization: f64,
    seed: u64,
) -> Result<ConvecsModel> {
    if kernel_degree == 0 {
        return Err(Error::InvalidArgument("kernel degree must be at least 1".into()));
    }
    if !(regularization > 0.0 && regularization.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "regularization must be positive, got {regularization}"
        )));
    }
    let first = examples.first().ok_or(Error::DegenerateTrainingSet)?;
    let k = first.u.len();
    for e in examples {
        if e.u.len() != k || e.v.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: if e.u.len() != k { e.u.len() } else { e.v.len() },
            });
        }
    }
    let labels: Vec<bool> = examples.iter().map(|e| e.label).collect();
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::DegenerateTrainingSet);
    }
    let xs: Vec<Vec<f64>> = examples.iter().map(|e| concat_features(&e.u, &e.v)).collect();
    let machine = fit_machine(&xs, &labels, kernel_degree, regularization)?;
    let held = held_out_decisions(&xs, &labels, kernel_degree, regularization, seed)?;
    let (platt_a, platt_b) = platt_fit(&held, &labels);
    Ok(ConvecsModel {
        k,
        machine,
        platt_a,
        platt_b,
        projection: None,
    })
}

/// Calibrated probability that `u` entails `v`.
pub fn score_pair(m: &ConvecsModel, u: &[f64], v: &[f64]) -> Result<f64> {
    let d = m.decision_value(u, v)?;
    Ok(platt_predict(d, m.platt_a, m.platt_b))
}

/// Score a word pair from its sense lists.
pub fn eval_pair(
    m: &ConvecsModel,
    senses_u: &[LatentSense],
    senses_v: &[LatentSense],
    strategy: EvalStrategy,
) -> Result<f64> {
    if senses_u.is_empty() || senses_v.is_empty() {
        return Err(Error::EmptyInput("both words need at least one sense"));
    }
    match strategy {
        EvalStrategy::AvgVector => score_pair(m, &average_latent(senses_u)?, &average_latent(senses_v)?),
        EvalStrategy::AvgScore | EvalStrategy::MaxScore => {
            let mut scores = Vec::with_capacity(senses_u.len() * senses_v.len());
            for su in senses_u {
                for sv in senses_v {
                    scores.push(score_pair(m, &su.latent, &sv.latent)?);
                }
            }
            Ok(combine(&scores, strategy))
        }
    }
}

fn combine(scores: &[f64], strategy: EvalStrategy) -> f64 {
    match strategy {
        EvalStrategy::MaxScore => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        _ => scores.iter().sum::<f64>() / scores.len() as f64,
    }
}
