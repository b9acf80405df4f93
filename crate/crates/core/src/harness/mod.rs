//! Datasets, stratified folds, threshold tuning and experiment runs.

mod experiment;
mod report;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use experiment::{
    cluster_word, fit_fold, induce_senses, induce_word_senses, run_experiment, run_experiment_with, score_pairs,
    with_token_similarity, Clustering, ExperimentConfig, ExperimentOutput, FoldModel, PairScore, Scorer, WordSenses,
};
pub use report::{format_report, load_report, merge_reports, save_report, write_scores, ReportRow};

/// A dataset pair. `label` is true when `u` entails `v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledPair {
    pub u: String,
    pub v: String,
    pub label: bool,
}

impl LabeledPair {
    pub fn new(u: impl Into<String>, v: impl Into<String>, label: bool) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            label,
        }
    }
}

/// Parse `word1<TAB>word2<TAB>0|1` lines. `#` lines and blank lines are skipped.
pub fn parse_dataset(text: &str, path: &Path) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [u, v, l] = fields.as_slice() else {
            return Err(Error::parse(path, i + 1, "expected word1<TAB>word2<TAB>label"));
        };
        if u.is_empty() || v.is_empty() {
            return Err(Error::parse(path, i + 1, "empty word"));
        }
        let label = match l.trim() {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(path, i + 1, format!("unknown label {other:?}"))),
        };
        if u == v {
            warn!("{}:{}: pair relates {u} to itself", path.display(), i + 1);
        }
        if !seen.insert((u.to_string(), v.to_string())) {
            return Err(Error::DuplicatePair(u.to_string(), v.to_string()));
        }
        out.push(LabeledPair::new(*u, *v, label));
    }
    if out.is_empty() {
        warn!("{}: dataset has no pairs", path.display());
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledPair>> {
    let path = path.as_ref();
    parse_dataset(&fs::read_to_string(path)?, path)
}

/// Example indices of each fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Every index outside fold `f`, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Label-stratified folds: each class is shuffled and dealt round robin,
/// negatives picking up where positives stopped so fold sizes differ by at
/// most one. Indices within a fold are ascending.
pub fn make_folds(data: &[LabeledPair], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if data.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{} examples cannot fill {k} folds",
            data.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data[i].label == class).collect();
        if idx.len() < k {
            return Err(Error::InvalidArgument(format!(
                "label {} has {} examples, fewer than {k} folds",
                u8::from(class),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan { folds, seed })
}

/// Decision rule `score > value`, or `score >= value` when `inclusive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub inclusive: bool,
}

impl Threshold {
    pub fn predict(&self, score: f64) -> bool {
        score > self.value || (self.inclusive && score == self.value)
    }
}

/// Pick the threshold with the best training accuracy.
///
/// Candidates are the midpoints between consecutive distinct scores, plus
/// "everything positive" and "everything negative" with zero margin. Ties go
/// to the wider gap, then the lower threshold.
pub fn tune_threshold(scores: &[f64], labels: &[bool]) -> Result<Threshold> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            got: labels.len(),
        });
    }
    if !labels.iter().any(|&l| l) || !labels.iter().any(|&l| !l) {
        return Err(Error::InvalidArgument("threshold tuning needs both labels".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let n_pos = labels.iter().filter(|&&l| l).count();

    // Everything positive: correct = n_pos.
    let lowest = scores[order[0]];
    let mut best = (
        n_pos,
        0.0,
        Threshold {
            value: lowest,
            inclusive: true,
        },
    );
    let better = |cand: (usize, f64, f64), best: &(usize, f64, Threshold)| {
        cand.0 > best.0
            || (cand.0 == best.0 && cand.1 > best.1)
            || (cand.0 == best.0 && cand.1 == best.1 && cand.2 < best.2.value)
    };
    // Walk distinct score groups; `correct` counts accuracy with the cut
    // just above the current group.
    let mut correct = n_pos;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                correct -= 1;
            } else {
                correct += 1;
            }
            i += 1;
        }
        let (margin, value) = match order.get(i) {
            Some(&j) => ((scores[j] - s) / 2.0, (s + scores[j]) / 2.0),
            None => (0.0, s),
        };
        if better((correct, margin, value), &best) {
            best = (
                correct,
                margin,
                Threshold {
                    value,
                    inclusive: false,
                },
            );
        }
    }
    Ok(best.2)
}

/// Fraction of predictions equal to their label.
pub fn evaluate_accuracy(predictions: &[bool], labels: &[bool]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("accuracy of nothing"));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn data(pos: usize, neg: usize) -> Vec<LabeledPair> {
        (0..pos + neg)
            .map(|i| LabeledPair::new(format!("a{i}"), format!("b{i}"), i < pos))
            .collect()
    }

    #[test]
    fn dataset_parses() {
        let d = parse_dataset("# header\ndog\tanimal\t1\n\ncar\tanimal\t0\n", Path::new("d")).unwrap();
        assert_eq!(
            d,
            vec![
                LabeledPair::new("dog", "animal", true),
                LabeledPair::new("car", "animal", false)
            ]
        );
        assert!(parse_dataset("", Path::new("d")).unwrap().is_empty());
    }

    #[test]
    fn dataset_errors() {
        let e = parse_dataset("dog\tanimal\t1\ncat animal 1\n", Path::new("d")).unwrap_err();
        assert!(e.to_string().starts_with("d:2:"), "{e}");
        assert!(parse_dataset("dog\tanimal\tyes\n", Path::new("d")).is_err());
        let e = parse_dataset("dog\tanimal\t1\ndog\tanimal\t0\n", Path::new("d")).unwrap_err();
        assert!(matches!(e, Error::DuplicatePair(ref u, ref v) if u == "dog" && v == "animal"));
    }

    #[test]
    fn folds_of_720() {
        let plan = make_folds(&data(360, 360), 10, 1).unwrap();
        assert!(plan.folds.iter().all(|f| f.len() == 72));
    }

    #[test]
    fn folds_of_1228() {
        let plan = make_folds(&data(614, 614), 10, 1).unwrap();
        let mut sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [vec![122; 2], vec![123; 8]].concat());
    }

    #[test]
    fn folds_are_seeded() {
        let d = data(40, 27);
        assert_eq!(make_folds(&d, 5, 9).unwrap(), make_folds(&d, 5, 9).unwrap());
        assert_ne!(make_folds(&d, 5, 9).unwrap(), make_folds(&d, 5, 10).unwrap());
    }

    #[test]
    fn small_class_rejected() {
        assert!(make_folds(&data(3, 30), 5, 0).is_err());
        assert!(make_folds(&data(3, 3), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn folds_partition_and_stratify(pos in 10usize..80, neg in 10usize..80, k in 2usize..10, seed in 0u64..100) {
            let d = data(pos, neg);
            let plan = make_folds(&d, k, seed).unwrap();
            let mut all: Vec<usize> = plan.folds.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..pos + neg).collect::<Vec<_>>());
            let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let global = pos as f64 / (pos + neg) as f64;
            for f in &plan.folds {
                let p = f.iter().filter(|&&i| d[i].label).count() as f64;
                prop_assert!((p / f.len() as f64 - global).abs() <= 1.0 / f.len() as f64);
            }
        }
    }

    #[test]
    fn threshold_example() {
        let t = tune_threshold(&[0.1, 0.4, 0.8, 0.9], &[false, false, true, true]).unwrap();
        assert!((t.value - 0.6).abs() < 1e-15);
        let preds: Vec<bool> = [0.1, 0.4, 0.8, 0.9].iter().map(|&s| t.predict(s)).collect();
        assert_eq!(preds, [false, false, true, true]);
    }

    #[test]
    fn threshold_on_equal_scores() {
        let t = tune_threshold(&[0.3; 5], &[true, true, true, false, false]).unwrap();
        assert_eq!(t.value, 0.3);
        assert!(t.predict(0.3));
        let t = tune_threshold(&[0.3; 5], &[true, false, false, false, true]).unwrap();
        assert_eq!(t.value, 0.3);
        assert!(!t.predict(0.3));
    }

    #[test]
    fn inverted_scores_fall_back_to_majority() {
        let scores = [0.9, 0.8, 0.7, 0.2, 0.1];
        let labels = [false, false, false, true, true];
        let t = tune_threshold(&scores, &labels).unwrap();
        let preds: Vec<bool> = scores.iter().map(|&s| t.predict(s)).collect();
        assert!(evaluate_accuracy(&preds, &labels).unwrap() >= 0.6);
    }

    #[test]
    fn threshold_needs_both_classes() {
        assert!(tune_threshold(&[0.1, 0.2], &[true, true]).is_err());
    }

    /// Accuracy of the best cut found by trying every candidate directly.
    fn sweep_oracle(scores: &[f64], labels: &[bool]) -> usize {
        let mut cands: Vec<Threshold> = scores
            .iter()
            .map(|&s| Threshold {
                value: s,
                inclusive: true,
            })
            .collect();
        cands.push(Threshold {
            value: f64::INFINITY,
            inclusive: false,
        });
        cands
            .iter()
            .map(|t| scores.iter().zip(labels).filter(|(&s, &l)| t.predict(s) == l).count())
            .max()
            .unwrap()
    }

    proptest! {
        #[test]
        fn threshold_is_optimal(v in proptest::collection::vec((0u8..6, any::<bool>()), 2..30)) {
            let scores: Vec<f64> = v.iter().map(|&(s, _)| f64::from(s) / 5.0).collect();
            let mut labels: Vec<bool> = v.iter().map(|&(_, l)| l).collect();
            labels[0] = true;
            labels[1] = false;
            let t = tune_threshold(&scores, &labels).unwrap();
            let got = scores.iter().zip(&labels).filter(|(&s, &l)| t.predict(s) == l).count();
            prop_assert_eq!(got, sweep_oracle(&scores, &labels));
        }

        #[test]
        fn accuracy_matches_counting(v in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..50)) {
            let (p, l): (Vec<bool>, Vec<bool>) = v.iter().copied().unzip();
            let oracle = v.iter().filter(|(a, b)| a == b).count() as f64 / v.len() as f64;
            prop_assert_eq!(evaluate_accuracy(&p, &l).unwrap(), oracle);
        }
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(evaluate_accuracy(&[true, false], &[true, false]).unwrap(), 1.0);
        assert_eq!(
            evaluate_accuracy(&[true, true, false, false], &[true, false, true, false]).unwrap(),
            0.5
        );
        assert!(evaluate_accuracy(&[true], &[true, false]).is_err());
    }
}
