use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;

use super::{evaluate_accuracy, load_dataset, make_folds, tune_threshold, LabeledPair, ReportRow, Threshold};
use crate::convecs::{
    eval_pair, select_training_pair_with, train_convecs, ConvecsModel, EvalStrategy, LatentSense, NegativePairs,
    TrainPairStrategy, DEFAULT_DEGREE, DEFAULT_REGULARIZATION,
};
use crate::corpus::{
    load_occurrences, prune_features, sample_occurrences, OccurrenceSet, DEFAULT_SAMPLE, DEFAULT_TOP_FEATURES,
};
use crate::entail::{balapinc_ranked, combine_scores, CombinationStrategy, DEFAULT_FEATURE_CAP};
use crate::error::{Error, Result, StageExt};
use crate::lexsim::{llm_similarity, load_taxonomy};
use crate::senses::{
    baseline_senses, build_prototypes, correlation_cluster, filter_clusters, load_inventory, sense_label,
    tiered_cluster, ClusterSet, CorrelationConfig, EtaRole, PivotRule, SenseInventory, TieredConfig,
    DEFAULT_MIN_CLUSTER_FRAC,
};
use crate::vsm::{rank_features, truncated_svd, LatentMatrix, RankedFeatureList, SparseMatrix};

/// Raw (count) prototypes per word.
pub type WordSenses = SenseInventory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clustering {
    None,
    Correlation,
    Tiered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scorer {
    Balapinc,
    Convecs,
}

impl Clustering {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Correlation => "correlation",
            Self::Tiered => "tiered",
        }
    }
}

impl Scorer {
    pub fn name(self) -> &'static str {
        match self {
            Self::Balapinc => "balapinc",
            Self::Convecs => "convecs",
        }
    }
}

impl fmt::Display for Clustering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Clustering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::None, Self::Correlation, Self::Tiered]
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown clustering backend {s:?}")))
    }
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Balapinc, Self::Convecs]
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scorer {s:?}")))
    }
}

/// Everything one report row depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    /// Report label; defaults to the dataset file stem.
    pub name: Option<String>,
    /// Unpruned occurrence file to induce senses from.
    pub occurrences: Option<PathBuf>,
    /// Prebuilt sense inventory (matrix and priors), used instead of occurrences.
    pub inventory: Option<PathBuf>,
    pub priors: Option<PathBuf>,
    /// Taxonomy for Wu-Palmer token similarity in correlation clustering.
    /// Without one, tokens only match themselves.
    pub taxonomy: Option<PathBuf>,
    pub clustering: Clustering,
    pub scorer: Scorer,
    /// A combination strategy for balAPinc or an evaluation strategy for ConVecs.
    pub strategy: String,
    pub train_pairs: TrainPairStrategy,
    pub negatives: NegativePairs,
    pub folds: usize,
    pub seed: u64,
    pub sample: usize,
    pub top_features: usize,
    pub min_cluster_frac: f64,
    pub side_tagged: bool,
    pub feature_cap: usize,
    pub correlation: CorrelationConfig,
    pub tiered: TieredConfig,
    pub latent_dim: usize,
    pub kernel_degree: u32,
    pub regularization: f64,
    /// Where to append the report row.
    pub report: Option<PathBuf>,
    /// Where to write per-pair test scores.
    pub scores: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::new(),
            name: None,
            occurrences: None,
            inventory: None,
            priors: None,
            taxonomy: None,
            clustering: Clustering::None,
            scorer: Scorer::Balapinc,
            strategy: "AvgScore".into(),
            train_pairs: TrainPairStrategy::AvgVector,
            negatives: NegativePairs::MostOverlap,
            folds: 10,
            seed: 0,
            sample: DEFAULT_SAMPLE,
            top_features: DEFAULT_TOP_FEATURES,
            min_cluster_frac: DEFAULT_MIN_CLUSTER_FRAC,
            side_tagged: false,
            feature_cap: DEFAULT_FEATURE_CAP,
            correlation: CorrelationConfig::default(),
            tiered: TieredConfig::default(),
            latent_dim: 100,
            kernel_degree: DEFAULT_DEGREE,
            regularization: DEFAULT_REGULARIZATION,
            report: None,
            scores: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Set one `key = value` field. Relative paths are joined onto `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || base.join(value);
        match key {
            "dataset" => self.dataset = path(),
            "name" => self.name = Some(value.to_owned()),
            "occurrences" => self.occurrences = Some(path()),
            "inventory" => self.inventory = Some(path()),
            "priors" => self.priors = Some(path()),
            "taxonomy" => self.taxonomy = Some(path()),
            "report" => self.report = Some(path()),
            "scores" => self.scores = Some(path()),
            "clustering" | "backend" => self.clustering = value.parse()?,
            "scorer" => self.scorer = value.parse()?,
            "strategy" => self.strategy = value.to_owned(),
            "train_pairs" => self.train_pairs = value.parse()?,
            "negatives" => {
                self.negatives = match value {
                    "most" => NegativePairs::MostOverlap,
                    "least" => NegativePairs::LeastOverlap,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "negatives must be most or least, got {value:?}"
                        )))
                    }
                }
            }
            "folds" => self.folds = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "sample" => self.sample = parse_value(key, value)?,
            "top_features" => self.top_features = parse_value(key, value)?,
            "min_frac" | "min_cluster_frac" => self.min_cluster_frac = parse_value(key, value)?,
            "side_tagged" => self.side_tagged = parse_value(key, value)?,
            "feature_cap" => self.feature_cap = parse_value(key, value)?,
            "sigma" => self.correlation.sigma = parse_value(key, value)?,
            "pivot" => {
                self.correlation.pivot = match value {
                    "lowest" => PivotRule::LowestIndex,
                    "random" => PivotRule::Random { seed: self.seed },
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "pivot must be lowest or random, got {value:?}"
                        )))
                    }
                }
            }
            "alpha" => self.tiered.alpha = parse_value(key, value)?,
            "beta" => self.tiered.beta = parse_value(key, value)?,
            "eta" => self.tiered.eta = parse_value(key, value)?,
            "eta_role" => {
                self.tiered.eta_role = match value {
                    "root" => EtaRole::RootSmoothing,
                    "level" => EtaRole::LevelSmoothing,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "eta_role must be root or level, got {value:?}"
                        )))
                    }
                }
            }
            "level_prior" => self.tiered.level_prior = parse_value(key, value)?,
            "iters" | "iterations" => self.tiered.iterations = parse_value(key, value)?,
            "latent_dim" => self.latent_dim = parse_value(key, value)?,
            "kernel_degree" => self.kernel_degree = parse_value(key, value)?,
            "regularization" => self.regularization = parse_value(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, "expected key = value"))?;
            cfg.set(k.trim(), v.trim(), base)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path)?, path)
    }

    pub fn combination(&self) -> Result<CombinationStrategy> {
        self.strategy.parse()
    }

    pub fn eval_strategy(&self) -> Result<EvalStrategy> {
        self.strategy.parse()
    }

    /// Check the strategy fits the scorer and the numeric settings are sane.
    pub fn validate(&self) -> Result<()> {
        match self.scorer {
            Scorer::Balapinc => {
                self.combination()?;
            }
            Scorer::Convecs => {
                self.eval_strategy()?;
            }
        }
        if self.latent_dim == 0 || self.feature_cap == 0 || self.sample == 0 || self.top_features == 0 {
            return Err(Error::InvalidArgument("sizes must be at least 1".into()));
        }
        self.correlation.validate()?;
        self.tiered.validate()
    }

    /// Label for the strategy column of the report.
    pub fn strategy_label(&self) -> Result<String> {
        Ok(match self.scorer {
            Scorer::Balapinc => self.combination()?.to_string(),
            Scorer::Convecs => format!("{}+{}", self.train_pairs, self.eval_strategy()?),
        })
    }

    fn dataset_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map_or_else(|| "dataset".to_owned(), |s| s.to_string_lossy().into_owned())
        })
    }
}

/// Mix a tag and index into a seed so streams for different purposes differ.
pub(crate) fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes().chain(index.to_le_bytes()).chain(seed.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    // splitmix finaliser
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Sample and cluster one word's occurrences, before size filtering.
/// Returns the sample too, whose full bags the prototypes are built from.
pub fn cluster_word(
    occs: &OccurrenceSet,
    cfg: &ExperimentConfig,
    similarity: &dyn Fn(&str, &str) -> f64,
) -> Result<(OccurrenceSet, ClusterSet)> {
    let sampled = sample_occurrences(occs, cfg.sample)?;
    if sampled.is_empty() {
        return Err(Error::InvalidArgument(format!("no occurrences of {:?}", occs.target)));
    }
    let clusters = match cfg.clustering {
        Clustering::None => ClusterSet::single(&sampled),
        Clustering::Correlation => {
            let pruned = prune_features(&sampled, cfg.top_features)?;
            correlation_cluster(&pruned, &cfg.correlation, |a, b| llm_similarity(a, b, similarity))?
        }
        Clustering::Tiered => {
            let pruned = prune_features(&sampled, cfg.top_features)?;
            let tiered = TieredConfig {
                seed: derive_seed(cfg.seed, &occs.target, 0),
                ..cfg.tiered
            };
            tiered_cluster(&pruned, &tiered)?
        }
    };
    Ok((sampled, clusters))
}

/// Cluster one word's occurrences and build its raw prototypes.
pub fn induce_word_senses(
    occs: &OccurrenceSet,
    cfg: &ExperimentConfig,
    similarity: &dyn Fn(&str, &str) -> f64,
) -> Result<Vec<crate::senses::Sense>> {
    let (sampled, clusters) = cluster_word(occs, cfg, similarity)?;
    if cfg.clustering == Clustering::None {
        return baseline_senses(&sampled);
    }
    let kept = filter_clusters(&clusters, cfg.min_cluster_frac)?;
    build_prototypes(&kept, &sampled.full_bags())
}

/// Run `f` with Wu-Palmer over the configured taxonomy, or exact token
/// match without one.
pub fn with_token_similarity<T>(
    cfg: &ExperimentConfig,
    f: impl FnOnce(&dyn Fn(&str, &str) -> f64) -> Result<T>,
) -> Result<T> {
    match cfg.taxonomy.as_ref().map(load_taxonomy).transpose()? {
        Some(t) => {
            let wup = t.cached();
            f(&|a, b| wup.similarity(a, b))
        }
        None => f(&|a, b| f64::from(u8::from(a == b))),
    }
}

/// Induce raw prototypes for `words` with the configured backend.
pub fn induce_senses(
    occurrences: &BTreeMap<String, OccurrenceSet>,
    words: &BTreeSet<String>,
    cfg: &ExperimentConfig,
) -> Result<WordSenses> {
    with_token_similarity(cfg, |similarity| {
        let mut inv = SenseInventory::new();
        for w in words {
            let occs = occurrences
                .get(w)
                .ok_or_else(|| Error::InvalidArgument(format!("no occurrences of {w:?}")))?;
            let senses = induce_word_senses(occs, cfg, similarity)?;
            info!("{w}: {} senses", senses.len());
            inv.insert(w.clone(), senses);
        }
        Ok(inv)
    })
}

/// What a fold learns from its training pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum FoldModel {
    Balapinc(Threshold),
    Convecs { latent: LatentMatrix, model: ConvecsModel },
}

/// Per-pair outcome on its test fold.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScore {
    pub pair: LabeledPair,
    pub fold: usize,
    pub score: f64,
    pub prediction: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub row: ReportRow,
    /// In dataset order.
    pub scores: Vec<PairScore>,
}

/// Shared read-only state: PPMI senses and their ranked feature lists.
struct Context<'a> {
    cfg: &'a ExperimentConfig,
    ppmi: &'a SenseInventory,
    ranked: BTreeMap<&'a str, Vec<RankedFeatureList>>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig, ppmi: &'a SenseInventory, pairs: &'a [LabeledPair]) -> Result<Self> {
        let mut ranked = BTreeMap::new();
        for p in pairs {
            for w in [p.u.as_str(), p.v.as_str()] {
                if ranked.contains_key(w) {
                    continue;
                }
                let senses = ppmi
                    .get(w)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::InvalidArgument(format!("no senses for {w:?}")))?;
                let lists = if cfg.scorer == Scorer::Balapinc {
                    senses
                        .iter()
                        .map(|s| rank_features(&s.vector, cfg.feature_cap))
                        .collect::<Result<_>>()?
                } else {
                    Vec::new()
                };
                ranked.insert(w, lists);
            }
        }
        Ok(Self { cfg, ppmi, ranked })
    }

    fn senses(&self, w: &str) -> &[crate::senses::Sense] {
        self.ppmi.get(w).expect("checked in Context::new")
    }

    fn balapinc_score(&self, p: &LabeledPair, strategy: CombinationStrategy) -> Result<f64> {
        let (su, sv) = (self.senses(&p.u), self.senses(&p.v));
        let (ru, rv) = (&self.ranked[p.u.as_str()], &self.ranked[p.v.as_str()]);
        let scores: Vec<Vec<f64>> = su
            .iter()
            .zip(ru)
            .map(|(a, fa)| {
                sv.iter()
                    .zip(rv)
                    .map(|(b, fb)| balapinc_ranked(fa, fb, &a.vector, &b.vector))
                    .collect()
            })
            .collect();
        let pu: Vec<f64> = su.iter().map(|s| s.prior).collect();
        let pv: Vec<f64> = sv.iter().map(|s| s.prior).collect();
        combine_scores(&scores, &pu, &pv, strategy)
    }

    fn latent_senses(&self, latent: &LatentMatrix, w: &str) -> Result<Vec<LatentSense>> {
        self.senses(w)
            .iter()
            .map(|s| {
                Ok(LatentSense {
                    vector: s.vector.clone(),
                    latent: latent.project(&s.vector)?,
                    prior: s.prior,
                })
            })
            .collect()
    }

    fn fit(&self, pairs: &[LabeledPair], train: &[usize], seed: u64, cache: Option<&[f64]>) -> Result<FoldModel> {
        let cfg = self.cfg;
        match cfg.scorer {
            Scorer::Balapinc => {
                let strategy = cfg.combination()?;
                let scores = train
                    .iter()
                    .map(|&i| match cache {
                        Some(c) => Ok(c[i]),
                        None => self.balapinc_score(&pairs[i], strategy),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let labels: Vec<bool> = train.iter().map(|&i| pairs[i].label).collect();
                Ok(FoldModel::Balapinc(
                    tune_threshold(&scores, &labels).stage("threshold")?,
                ))
            }
            Scorer::Convecs => {
                let vocab: BTreeSet<&str> = train
                    .iter()
                    .flat_map(|&i| [pairs[i].u.as_str(), pairs[i].v.as_str()])
                    .collect();
                let mut labels = Vec::new();
                let mut rows = Vec::new();
                for w in &vocab {
                    for (j, s) in self.senses(w).iter().enumerate() {
                        labels.push(sense_label(w, j));
                        rows.push(s.vector.clone());
                    }
                }
                let matrix = SparseMatrix { labels, rows };
                let latent = truncated_svd(&matrix, cfg.latent_dim, derive_seed(seed, "svd", 0)).stage("svd")?;
                let mut by_word = BTreeMap::new();
                for w in &vocab {
                    by_word.insert(*w, self.latent_senses(&latent, w)?);
                }
                let examples = train
                    .iter()
                    .map(|&i| {
                        let p = &pairs[i];
                        select_training_pair_with(
                            p.label,
                            &by_word[p.u.as_str()],
                            &by_word[p.v.as_str()],
                            cfg.train_pairs,
                            cfg.feature_cap,
                            cfg.negatives,
                        )
                    })
                    .collect::<Result<Vec<_>>>()
                    .stage("training pairs")?;
                let model = train_convecs(
                    &examples,
                    cfg.kernel_degree,
                    cfg.regularization,
                    derive_seed(seed, "calibration", 0),
                )
                .stage("train")?;
                Ok(FoldModel::Convecs { latent, model })
            }
        }
    }

    fn score(&self, m: &FoldModel, p: &LabeledPair, cache: Option<f64>) -> Result<(f64, bool)> {
        match m {
            FoldModel::Balapinc(t) => {
                let s = match cache {
                    Some(s) => s,
                    None => self.balapinc_score(p, self.cfg.combination()?)?,
                };
                Ok((s, t.predict(s)))
            }
            FoldModel::Convecs { latent, model } => {
                let su = self.latent_senses(latent, &p.u)?;
                let sv = self.latent_senses(latent, &p.v)?;
                let s = eval_pair(model, &su, &sv, self.cfg.eval_strategy()?)?;
                Ok((s, s > 0.5))
            }
        }
    }
}

/// Score pairs outside cross-validation. balAPinc needs no model; with one
/// the tuned threshold also yields a prediction. ConVecs requires a model.
pub fn score_pairs(
    cfg: &ExperimentConfig,
    ppmi: &SenseInventory,
    pairs: &[LabeledPair],
    model: Option<&FoldModel>,
) -> Result<Vec<(f64, Option<bool>)>> {
    cfg.validate()?;
    let ctx = Context::new(cfg, ppmi, pairs)?;
    pairs
        .iter()
        .map(|p| match model {
            Some(m) => ctx.score(m, p, None).map(|(s, pred)| (s, Some(pred))),
            None if cfg.scorer == Scorer::Balapinc => Ok((ctx.balapinc_score(p, cfg.combination()?)?, None)),
            None => Err(Error::InvalidArgument("ConVecs scoring needs a trained model".into())),
        })
        .collect()
}

/// Fit one fold's model from PPMI-weighted senses and the training indices.
///
/// Only senses of words in training pairs enter the SVD; everything else
/// is folded in later, so test-only words cannot influence the model.
pub fn fit_fold(
    cfg: &ExperimentConfig,
    ppmi: &SenseInventory,
    pairs: &[LabeledPair],
    train: &[usize],
    seed: u64,
) -> Result<FoldModel> {
    cfg.validate()?;
    let train_pairs: Vec<LabeledPair> = train.iter().map(|&i| pairs[i].clone()).collect();
    let ctx = Context::new(cfg, ppmi, &train_pairs)?;
    let idx: Vec<usize> = (0..train_pairs.len()).collect();
    ctx.fit(&train_pairs, &idx, seed, None)
}

/// Cross-validate on in-memory pairs and raw prototypes.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    pairs: &[LabeledPair],
    raw: &WordSenses,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let ppmi = raw.ppmi(cfg.side_tagged).stage("ppmi")?;
    let ctx = Context::new(cfg, &ppmi, pairs).stage("senses")?;
    let plan = make_folds(pairs, cfg.folds, cfg.seed).stage("folds")?;

    let cache = match cfg.scorer {
        Scorer::Balapinc => {
            let strategy = cfg.combination()?;
            Some(
                pairs
                    .iter()
                    .map(|p| ctx.balapinc_score(p, strategy))
                    .collect::<Result<Vec<f64>>>()
                    .stage("score")?,
            )
        }
        Scorer::Convecs => None,
    };

    let mut fold_acc = Vec::with_capacity(plan.k());
    let mut outcomes: Vec<Option<PairScore>> = vec![None; pairs.len()];
    for (f, test) in plan.folds.iter().enumerate() {
        let train = plan.train_indices(f);
        let model = ctx.fit(pairs, &train, derive_seed(cfg.seed, "fold", f as u64), cache.as_deref())?;
        let mut preds = Vec::with_capacity(test.len());
        let mut labels = Vec::with_capacity(test.len());
        for &i in test {
            let (score, prediction) = ctx
                .score(&model, &pairs[i], cache.as_ref().map(|c| c[i]))
                .stage("score")?;
            preds.push(prediction);
            labels.push(pairs[i].label);
            outcomes[i] = Some(PairScore {
                pair: pairs[i].clone(),
                fold: f,
                score,
                prediction,
            });
        }
        let acc = evaluate_accuracy(&preds, &labels)?;
        info!("fold {}: accuracy {acc:.4}", f + 1);
        fold_acc.push(acc);
    }
    let row = ReportRow {
        dataset: cfg.dataset_name(),
        scorer: cfg.scorer.to_string(),
        clustering: cfg.clustering.to_string(),
        strategy: cfg.strategy_label()?,
        accuracy: fold_acc.iter().sum::<f64>() / fold_acc.len() as f64,
        folds: fold_acc,
    };
    Ok(ExperimentOutput {
        row,
        scores: outcomes
            .into_iter()
            .map(|o| o.expect("every pair is in a fold"))
            .collect(),
    })
}

/// Load the dataset and senses named by `cfg` and cross-validate.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let pairs = load_dataset(&cfg.dataset).stage("dataset")?;
    let words: BTreeSet<String> = pairs.iter().flat_map(|p| [p.u.clone(), p.v.clone()]).collect();
    let raw = match (&cfg.inventory, &cfg.occurrences) {
        (Some(m), _) => {
            let priors = cfg.priors.clone().unwrap_or_else(|| m.with_extension("priors"));
            load_inventory(m, priors).stage("inventory")?
        }
        (None, Some(o)) => {
            let occs = load_occurrences(o).stage("occurrences")?;
            induce_senses(&occs, &words, cfg).stage("senses")?
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "config needs either an inventory or an occurrence file".into(),
            ))
        }
    };
    let out = run_experiment_with(cfg, &pairs, &raw)?;
    if let Some(path) = &cfg.report {
        super::report::append_report(path, &out.row).stage("report")?;
    }
    if let Some(path) = &cfg.scores {
        super::report::save_scores(path, &out.scores).stage("scores")?;
    }
    Ok(out)
}
