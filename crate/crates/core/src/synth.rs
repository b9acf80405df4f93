//! Synthetic corpora with known structure, for tests, examples and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Occurrence, OccurrenceSet};
use crate::harness::LabeledPair;
use crate::lexsim::Taxonomy;

/// One word's occurrences drawn from two topics plus shared background words.
#[derive(Debug, Clone)]
pub struct PlantedTopics {
    pub occurrences: OccurrenceSet,
    /// Planted topic of each occurrence.
    pub labels: Vec<usize>,
    pub background: BTreeSet<String>,
}

/// `n` occurrences of `bank`, alternating topics in a shuffled order, each
/// with `tokens` context tokens of which `round(tokens * background_frac)`
/// are background words.
pub fn planted_topic_corpus(n: usize, tokens: usize, background_frac: f64, seed: u64) -> PlantedTopics {
    const TOPIC_VOCAB: usize = 12;
    const BACKGROUND_VOCAB: usize = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_bg = (tokens as f64 * background_frac).round() as usize;
    let background: Vec<String> = (0..BACKGROUND_VOCAB).map(|i| format!("bg{i}")).collect();
    let mut labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    labels.shuffle(&mut rng);
    let occurrences = labels
        .iter()
        .enumerate()
        .map(|(i, &topic)| {
            let mut ctx: Vec<String> = (0..tokens - n_bg)
                .map(|_| format!("t{topic}w{}", rng.random_range(0..TOPIC_VOCAB)))
                .collect();
            ctx.extend((0..n_bg).map(|_| background[rng.random_range(0..BACKGROUND_VOCAB)].clone()));
            ctx.shuffle(&mut rng);
            let right = ctx.split_off(ctx.len() / 2);
            Occurrence {
                target: "bank".into(),
                source_id: format!("p{i:05}"),
                left: ctx,
                right,
            }
        })
        .collect();
    PlantedTopics {
        occurrences: OccurrenceSet::from_occurrences("bank", occurrences),
        labels,
        background: background.into_iter().collect(),
    }
}

/// Knobs for [`polysemy_benchmark`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolysemyConfig {
    pub categories: usize,
    pub hyponyms_per_category: usize,
    /// Share of hyponyms given a second sense in another category.
    pub polysemous_frac: f64,
    /// Prior of the second sense.
    pub minority_prior: f64,
    pub occurrences_per_word: usize,
    /// Context tokens per side.
    pub window: usize,
    /// Context words per category.
    pub category_vocab: usize,
    /// Category words a single hyponym draws from.
    pub hyponym_vocab: usize,
    /// Words shared by every category.
    pub general_vocab: usize,
    /// Chance that a context token is a general word.
    pub background_frac: f64,
    /// Share of occurrences whose context is drawn from a large pool of
    /// rare words instead of any sense.
    pub noise_frac: f64,
    /// Size of that pool, shared by all words.
    pub noise_vocab: usize,
    pub seed: u64,
}

impl Default for PolysemyConfig {
    fn default() -> Self {
        Self {
            categories: 8,
            hyponyms_per_category: 10,
            polysemous_frac: 0.2,
            minority_prior: 0.3,
            occurrences_per_word: 60,
            window: 4,
            category_vocab: 24,
            hyponym_vocab: 10,
            general_vocab: 30,
            background_frac: 0.2,
            noise_frac: 0.1,
            noise_vocab: 5000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolysemyBenchmark {
    pub occurrences: BTreeMap<String, OccurrenceSet>,
    pub pairs: Vec<LabeledPair>,
    /// Planted categories of every word, dominant sense first.
    pub senses: BTreeMap<String, Vec<usize>>,
}

impl PolysemyBenchmark {
    pub fn is_polysemous(&self, word: &str) -> bool {
        self.senses.get(word).is_some_and(|s| s.len() > 1)
    }
}

pub fn hypernym_name(category: usize) -> String {
    format!("kind{category}")
}

/// Hyponyms of `categories` hypernyms. Each hyponym's contexts come from a
/// private subset of its category's words, each hypernym's from all of
/// them, so hyponym contexts are included in their hypernym's. A fraction
/// of hyponyms also has a minority sense in a second category and entails
/// both hypernyms.
///
/// Pairs: every (hyponym, hypernym of one of its senses) is positive; each
/// hyponym also gets one negative against an unrelated hypernym and one
/// reversed negative (hypernym, hyponym).
pub fn polysemy_benchmark(cfg: &PolysemyConfig) -> PolysemyBenchmark {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cat_word = |c: usize, i: usize| format!("c{c}x{i}");
    let general: Vec<String> = (0..cfg.general_vocab).map(|i| format!("g{i}")).collect();

    let mut senses: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut vocab_of: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    let mut hyponyms = Vec::new();
    for c in 0..cfg.categories {
        let h = hypernym_name(c);
        senses.insert(h.clone(), vec![c]);
        vocab_of.insert(h, vec![(0..cfg.category_vocab).map(|i| cat_word(c, i)).collect()]);
        for i in 0..cfg.hyponyms_per_category {
            hyponyms.push((format!("w{c}n{i}"), c));
        }
    }
    let n_poly = (hyponyms.len() as f64 * cfg.polysemous_frac).round() as usize;
    let mut order: Vec<usize> = (0..hyponyms.len()).collect();
    order.shuffle(&mut rng);
    let poly: BTreeSet<usize> = order[..n_poly].iter().copied().collect();

    let private_vocab = |rng: &mut ChaCha8Rng, c: usize| -> Vec<String> {
        let mut idx: Vec<usize> = (0..cfg.category_vocab).collect();
        idx.shuffle(rng);
        idx[..cfg.hyponym_vocab].iter().map(|&i| cat_word(c, i)).collect()
    };
    for (i, (w, c)) in hyponyms.iter().enumerate() {
        let mut cats = vec![*c];
        if poly.contains(&i) {
            let other = (c + 1 + rng.random_range(0..cfg.categories - 1)) % cfg.categories;
            cats.push(other);
        }
        let vocabs = cats.iter().map(|&k| private_vocab(&mut rng, k)).collect();
        senses.insert(w.clone(), cats);
        vocab_of.insert(w.clone(), vocabs);
    }

    let mut occurrences = BTreeMap::new();
    for (w, vocabs) in &vocab_of {
        let occs = (0..cfg.occurrences_per_word)
            .map(|j| {
                let sense = if vocabs.len() > 1 && rng.random::<f64>() < cfg.minority_prior {
                    1
                } else {
                    0
                };
                let noise = rng.random::<f64>() < cfg.noise_frac;
                let side = |rng: &mut ChaCha8Rng| -> Vec<String> {
                    (0..cfg.window)
                        .map(|_| {
                            if noise {
                                format!("z{}", rng.random_range(0..cfg.noise_vocab))
                            } else if rng.random::<f64>() < cfg.background_frac {
                                general[rng.random_range(0..general.len())].clone()
                            } else {
                                let v = &vocabs[sense];
                                v[rng.random_range(0..v.len())].clone()
                            }
                        })
                        .collect()
                };
                let left = side(&mut rng);
                let right = side(&mut rng);
                Occurrence {
                    target: w.clone(),
                    source_id: format!("{w}:{j:05}"),
                    left,
                    right,
                }
            })
            .collect();
        occurrences.insert(w.clone(), OccurrenceSet::from_occurrences(w.clone(), occs));
    }

    let mut pairs = Vec::new();
    for (w, c) in &hyponyms {
        let cats = &senses[w];
        for &k in cats {
            pairs.push(LabeledPair::new(w.clone(), hypernym_name(k), true));
        }
        let unrelated: Vec<usize> = (0..cfg.categories).filter(|k| !cats.contains(k)).collect();
        if let Some(&k) = unrelated.get(rng.random_range(0..unrelated.len().max(1))) {
            pairs.push(LabeledPair::new(w.clone(), hypernym_name(k), false));
        }
        pairs.push(LabeledPair::new(hypernym_name(*c), w.clone(), false));
    }
    PolysemyBenchmark {
        occurrences,
        pairs,
        senses,
    }
}

/// A small animal/artifact hierarchy.
pub fn toy_taxonomy() -> Taxonomy {
    Taxonomy::from_entries([
        ("entity.n.01", vec![], vec!["entity"]),
        ("organism.n.01", vec!["entity.n.01"], vec!["organism"]),
        ("animal.n.01", vec!["organism.n.01"], vec!["animal", "beast"]),
        ("dog.n.01", vec!["animal.n.01"], vec!["dog"]),
        ("cat.n.01", vec!["animal.n.01"], vec!["cat"]),
        ("bird.n.01", vec!["animal.n.01"], vec!["bird"]),
        ("plant.n.01", vec!["organism.n.01"], vec!["plant"]),
        ("tree.n.01", vec!["plant.n.01"], vec!["tree"]),
        ("artifact.n.01", vec!["entity.n.01"], vec!["artifact"]),
        ("vehicle.n.01", vec!["artifact.n.01"], vec!["vehicle"]),
        ("car.n.01", vec!["vehicle.n.01"], vec!["car"]),
        ("bus.n.01", vec!["vehicle.n.01"], vec!["bus"]),
        ("bank.n.01", vec!["artifact.n.01"], vec!["bank"]),
        ("bank.n.02", vec!["entity.n.01"], vec!["bank", "shore"]),
    ])
    .expect("toy taxonomy is well formed")
}
