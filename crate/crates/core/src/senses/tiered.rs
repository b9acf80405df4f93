//! Tiered clustering: a nested Chinese restaurant process fixed at depth two.
//!
//! Generative story, per word:
//!
//! - each occurrence `o` picks a cluster `c_o ~ CRP(alpha)`;
//! - each occurrence draws level proportions `θ_o ~ Dirichlet(γ, γ)`;
//! - each token picks a level `z ~ θ_o`, either the shared root or `c_o`;
//! - the token is drawn from that level's topic; cluster topics have a
//!   symmetric `Dirichlet(beta)` prior and the root topic `Dirichlet(eta)`.
//!
//! `γ` is `level_prior` (1 by default). With [`EtaRole::LevelSmoothing`]
//! `eta` plays `γ` instead and the root shares `beta`; on a corpus with two
//! topics that variant tends to make the root a second cluster.
//!
//! θ and all topics are integrated out. One Gibbs sweep resamples every
//! occurrence's cluster, then every token's level, in index order. The state
//! with the highest joint log probability seen after any sweep is returned.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ClusterSet;
use crate::corpus::OccurrenceSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieredConfig {
    /// CRP concentration.
    pub alpha: f64,
    /// Topic smoothing, root and clusters alike.
    pub beta: f64,
    /// Smoothing named by `eta_role`.
    pub eta: f64,
    pub eta_role: EtaRole,
    /// Level-proportion smoothing when `eta` smooths the root topic.
    pub level_prior: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Which prior `eta` sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaRole {
    /// `θ_o ~ Dirichlet(eta, eta)`; the root topic shares `beta`.
    LevelSmoothing,
    /// Root topic `~ Dirichlet(eta)`; `θ_o ~ Dirichlet(level_prior, level_prior)`.
    RootSmoothing,
}

impl Default for TieredConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.1,
            eta: 0.01,
            eta_role: EtaRole::RootSmoothing,
            level_prior: 1.0,
            iterations: 12_000,
            seed: 0,
        }
    }
}

impl TieredConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("level prior", self.level_prior),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-sweep diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TieredTrace {
    /// Joint log probability after each sweep.
    pub log_joint: Vec<f64>,
    /// Occupied clusters after each sweep.
    pub n_clusters: Vec<usize>,
    /// Sum of table occupancies after each sweep; always the occurrence count.
    pub customers: Vec<usize>,
    /// Sweep whose state was returned.
    pub best_iteration: usize,
}

const ROOT: usize = 0;
const LEAF: usize = 1;

/// Lanczos approximation (g = 7, n = 9).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

struct Topic {
    counts: Vec<u32>,
    total: u32,
}

impl Topic {
    fn new(vocab: usize) -> Self {
        Self {
            counts: vec![0; vocab],
            total: 0,
        }
    }

    fn add(&mut self, w: usize) {
        self.counts[w] += 1;
        self.total += 1;
    }

    fn remove(&mut self, w: usize) {
        self.counts[w] -= 1;
        self.total -= 1;
    }
}

struct Sampler<'a> {
    docs: &'a [Vec<usize>],
    vocab: usize,
    cfg: TieredConfig,
    rng: ChaCha8Rng,
    /// Cluster slot per occurrence.
    assign: Vec<usize>,
    /// Level per token.
    levels: Vec<Vec<usize>>,
    /// Tokens per level per occurrence.
    doc_levels: Vec<[u32; 2]>,
    root: Topic,
    /// Indexed by slot; free slots have zero occupancy.
    topics: Vec<Topic>,
    occupancy: Vec<usize>,
}

impl<'a> Sampler<'a> {
    fn new(docs: &'a [Vec<usize>], vocab: usize, cfg: TieredConfig) -> Self {
        Self {
            docs,
            vocab,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            assign: vec![usize::MAX; docs.len()],
            levels: docs.iter().map(|d| vec![LEAF; d.len()]).collect(),
            doc_levels: vec![[0, 0]; docs.len()],
            root: Topic::new(vocab),
            topics: Vec::new(),
            occupancy: Vec::new(),
        }
    }

    fn vbeta(&self) -> f64 {
        self.vocab as f64 * self.cfg.beta
    }

    fn root_smoothing(&self) -> f64 {
        match self.cfg.eta_role {
            EtaRole::LevelSmoothing => self.cfg.beta,
            EtaRole::RootSmoothing => self.cfg.eta,
        }
    }

    fn level_smoothing(&self) -> f64 {
        match self.cfg.eta_role {
            EtaRole::LevelSmoothing => self.cfg.eta,
            EtaRole::RootSmoothing => self.cfg.level_prior,
        }
    }

    /// Random levels, then seat occurrences one at a time from the conditional.
    fn initialize(&mut self) {
        for o in 0..self.docs.len() {
            for j in 0..self.docs[o].len() {
                let lvl = if self.rng.random::<bool>() { ROOT } else { LEAF };
                self.levels[o][j] = lvl;
                self.doc_levels[o][lvl] += 1;
                if lvl == ROOT {
                    self.root.add(self.docs[o][j]);
                }
            }
            let slot = self.sample_cluster(o);
            self.seat(o, slot);
        }
    }

    fn leaf_words(&self, o: usize) -> BTreeMap<usize, u32> {
        let mut counts = BTreeMap::new();
        for (j, &w) in self.docs[o].iter().enumerate() {
            if self.levels[o][j] == LEAF {
                *counts.entry(w).or_insert(0) += 1;
            }
        }
        counts
    }

    fn seat(&mut self, o: usize, slot: usize) {
        if slot == self.topics.len() {
            self.topics.push(Topic::new(self.vocab));
            self.occupancy.push(0);
        }
        self.assign[o] = slot;
        self.occupancy[slot] += 1;
        for (j, &w) in self.docs[o].iter().enumerate() {
            if self.levels[o][j] == LEAF {
                self.topics[slot].add(w);
            }
        }
    }

    fn unseat(&mut self, o: usize) {
        let slot = self.assign[o];
        self.occupancy[slot] -= 1;
        for (j, &w) in self.docs[o].iter().enumerate() {
            if self.levels[o][j] == LEAF {
                self.topics[slot].remove(w);
            }
        }
        self.assign[o] = usize::MAX;
    }

    /// Log predictive probability of a bag under a topic's counts.
    fn bag_log_likelihood(&self, topic: Option<&Topic>, bag: &BTreeMap<usize, u32>) -> f64 {
        let beta = self.cfg.beta;
        let vbeta = self.vbeta();
        let (counts, total) = match topic {
            Some(t) => (Some(&t.counts), f64::from(t.total)),
            None => (None, 0.0),
        };
        let mut lp = 0.0;
        let mut seen = 0.0;
        for (&w, &x) in bag {
            let base = counts.map_or(0.0, |c| f64::from(c[w])) + beta;
            for i in 0..x {
                lp += (base + f64::from(i)).ln();
                lp -= (total + vbeta + seen).ln();
                seen += 1.0;
            }
        }
        lp
    }

    /// Draw a slot for an unseated occurrence; `topics.len()` means a new one.
    /// Opening a cluster reuses the lowest free slot.
    fn sample_cluster(&mut self, o: usize) -> usize {
        let bag = self.leaf_words(o);
        let mut slots = Vec::with_capacity(self.topics.len() + 1);
        let mut logp = Vec::with_capacity(self.topics.len() + 1);
        for (slot, topic) in self.topics.iter().enumerate() {
            if self.occupancy[slot] > 0 {
                slots.push(slot);
                logp.push((self.occupancy[slot] as f64).ln() + self.bag_log_likelihood(Some(topic), &bag));
            }
        }
        let new_slot = self.occupancy.iter().position(|&n| n == 0).unwrap_or(self.topics.len());
        slots.push(new_slot);
        logp.push(self.cfg.alpha.ln() + self.bag_log_likelihood(None, &bag));

        let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logp.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut u = self.rng.random::<f64>() * total;
        for (slot, w) in slots.iter().zip(&weights) {
            if u < *w {
                return *slot;
            }
            u -= w;
        }
        *slots.last().expect("at least the new slot")
    }

    fn resample_level(&mut self, o: usize, j: usize) {
        let w = self.docs[o][j];
        let slot = self.assign[o];
        let old = self.levels[o][j];
        self.doc_levels[o][old] -= 1;
        if old == ROOT {
            self.root.remove(w);
        } else {
            self.topics[slot].remove(w);
        }

        let beta = self.cfg.beta;
        let vbeta = self.vbeta();
        let eta = self.level_smoothing();
        let root_beta = self.root_smoothing();
        let leaf = &self.topics[slot];
        let p_root = (f64::from(self.doc_levels[o][ROOT]) + eta) * (f64::from(self.root.counts[w]) + root_beta)
            / (f64::from(self.root.total) + self.vocab as f64 * root_beta);
        let p_leaf = (f64::from(self.doc_levels[o][LEAF]) + eta) * (f64::from(leaf.counts[w]) + beta)
            / (f64::from(leaf.total) + vbeta);
        let lvl = if self.rng.random::<f64>() * (p_root + p_leaf) < p_root {
            ROOT
        } else {
            LEAF
        };

        self.levels[o][j] = lvl;
        self.doc_levels[o][lvl] += 1;
        if lvl == ROOT {
            self.root.add(w);
        } else {
            self.topics[slot].add(w);
        }
    }

    fn sweep(&mut self) {
        for o in 0..self.docs.len() {
            self.unseat(o);
            let slot = self.sample_cluster(o);
            self.seat(o, slot);
        }
        for o in 0..self.docs.len() {
            for j in 0..self.docs[o].len() {
                self.resample_level(o, j);
            }
        }
    }

    fn topic_log_marginal(&self, t: &Topic, beta: f64) -> f64 {
        let vbeta = self.vocab as f64 * beta;
        let lg_beta = ln_gamma(beta);
        let mut lp = ln_gamma(vbeta) - ln_gamma(f64::from(t.total) + vbeta);
        for &c in &t.counts {
            if c > 0 {
                lp += ln_gamma(f64::from(c) + beta) - lg_beta;
            }
        }
        lp
    }

    /// log p(clusters, levels, words) with θ and topics integrated out.
    fn log_joint(&self) -> f64 {
        let alpha = self.cfg.alpha;
        let eta = self.level_smoothing();
        let n = self.docs.len() as f64;

        let mut lp = ln_gamma(alpha) - ln_gamma(n + alpha);
        for (slot, &occ) in self.occupancy.iter().enumerate() {
            if occ > 0 {
                lp += alpha.ln() + ln_gamma(occ as f64);
                lp += self.topic_log_marginal(&self.topics[slot], self.cfg.beta);
            }
        }

        let level_norm = ln_gamma(2.0 * eta) - 2.0 * ln_gamma(eta);
        for dl in &self.doc_levels {
            let (r, l) = (f64::from(dl[ROOT]), f64::from(dl[LEAF]));
            lp += level_norm + ln_gamma(r + eta) + ln_gamma(l + eta) - ln_gamma(r + l + 2.0 * eta);
        }

        lp + self.topic_log_marginal(&self.root, self.root_smoothing())
    }

    fn snapshot(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        (self.assign.clone(), self.levels.clone())
    }
}

/// Cluster occurrences with the tiered model.
pub fn tiered_cluster(occs: &OccurrenceSet, cfg: &TieredConfig) -> Result<ClusterSet> {
    tiered_cluster_traced(occs, cfg).map(|(cs, _)| cs)
}

/// As [`tiered_cluster`], also returning per-sweep diagnostics.
pub fn tiered_cluster_traced(occs: &OccurrenceSet, cfg: &TieredConfig) -> Result<(ClusterSet, TieredTrace)> {
    cfg.validate()?;
    let alphabet: BTreeSet<&str> = occs.occurrences.iter().flat_map(|o| o.tokens()).collect();
    if alphabet.is_empty() {
        return Err(Error::NoTokens);
    }
    let index: BTreeMap<&str, usize> = alphabet.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let docs: Vec<Vec<usize>> = occs
        .occurrences
        .iter()
        .map(|o| o.tokens().map(|t| index[t]).collect())
        .collect();

    let mut sampler = Sampler::new(&docs, index.len(), *cfg);
    sampler.initialize();

    let mut trace = TieredTrace::default();
    let mut best: Option<(f64, (Vec<usize>, Vec<Vec<usize>>))> = None;
    for it in 0..cfg.iterations {
        sampler.sweep();
        let lj = sampler.log_joint();
        trace.log_joint.push(lj);
        trace
            .n_clusters
            .push(sampler.occupancy.iter().filter(|&&n| n > 0).count());
        trace.customers.push(sampler.occupancy.iter().sum());
        if best.as_ref().is_none_or(|(b, _)| lj > *b) {
            best = Some((lj, sampler.snapshot()));
            trace.best_iteration = it;
        }
    }
    let (log_joint, (assign, levels)) = best.expect("at least one iteration");

    // Canonical cluster order: by smallest member.
    let mut by_slot: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (o, &slot) in assign.iter().enumerate() {
        by_slot.entry(slot).or_default().push(o);
    }
    let mut clusters: Vec<Vec<usize>> = by_slot.into_values().collect();
    clusters.sort_by_key(|c| c[0]);

    let root_features = levels
        .iter()
        .map(|ls| {
            ls.iter()
                .enumerate()
                .filter(|(_, &l)| l == ROOT)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    Ok((
        ClusterSet {
            target: occs.target.clone(),
            source_ids: occs.occurrences.iter().map(|o| o.source_id.clone()).collect(),
            clusters,
            root_features: Some(root_features),
            log_joint: Some(log_joint),
        },
        trace,
    ))
}
