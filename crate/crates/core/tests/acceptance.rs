//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! `cargo test --release --test acceptance`

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sense_entail::convecs::{concat_features, kernel_matrix, score_pair, train_convecs, PairExample};
use sense_entail::corpus::save_occurrences;
use sense_entail::entail::{apinc, balapinc};
use sense_entail::harness::{
    fit_fold, induce_senses, make_folds, run_experiment, run_experiment_with, Clustering, ExperimentConfig,
    LabeledPair, Scorer,
};
use sense_entail::lexsim::llm_similarity;
use sense_entail::senses::{
    correlation_cluster_by, save_cluster_sets, tiered_cluster_traced, CorrelationConfig, TieredConfig,
};
use sense_entail::synth::{planted_topic_corpus, polysemy_benchmark, PolysemyBenchmark, PolysemyConfig};
use sense_entail::vsm::{build_count_matrix, ppmi_transform, RankedFeatureList, SparseVector};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn list(features: &[String]) -> RankedFeatureList {
    RankedFeatureList::from_features(features)
}

// 1
fn balapinc_identities() -> Outcome {
    for n in 1..=50 {
        let f: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
        let a = apinc(&list(&f), &list(&f));
        check(a == 0.5, format!("apinc(F,F) = {a:e} at length {n}"))?;
        let u: SparseVector = f
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), (n - i) as f64))
            .collect();
        let b = balapinc(&u, &u, 1000).map_err(|e| e.to_string())?;
        check(
            (b - 0.5f64.sqrt()).abs() <= 1e-12,
            format!("balapinc(u,u) = {b} at length {n}"),
        )?;
        let v: SparseVector = f.iter().map(|s| (format!("g{s}"), 1.0)).collect();
        let d = balapinc(&u, &v, 1000).map_err(|e| e.to_string())?;
        check(d == 0.0, format!("disjoint score {d} at length {n}"))?;
    }
    Ok("lengths 1..50".into())
}

/// Fraction with exact integer arithmetic, kept reduced.
#[derive(Clone, Copy)]
struct Q(i128, i128);

impl Q {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            Self::gcd(b, a % b)
        }
    }
    fn new(n: i128, d: i128) -> Self {
        let g = Self::gcd(n, d).max(1);
        Q(n / g, d / g)
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
    fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

/// Precision at each rank of `fu` times the relevance of that rank's feature
/// in `fv`, averaged over `|fu|`.
fn apinc_oracle(fu: &[String], fv: &[String]) -> f64 {
    if fu.is_empty() {
        return 0.0;
    }
    let mut sum = Q(0, 1);
    for r in 1..=fu.len() {
        let included = fu[..r].iter().filter(|f| fv.contains(f)).count() as i128;
        let precision = Q::new(included, r as i128);
        let rel = match fv.iter().position(|g| *g == fu[r - 1]) {
            Some(p) => Q::new(fv.len() as i128 + 1 - (p as i128 + 1), fv.len() as i128 + 1),
            None => Q(0, 1),
        };
        sum = sum.add(precision.mul(rel));
    }
    Q::new(sum.0, sum.1 * fu.len() as i128).to_f64()
}

fn random_list(rng: &mut ChaCha8Rng, universe: &[String], max_len: usize) -> Vec<String> {
    let mut f = universe.to_vec();
    f.shuffle(rng);
    f.truncate(rng.random_range(0..=max_len));
    f
}

// 2
fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let universe: Vec<String> = (0..12).map(|i| format!("f{i}")).collect();
    for t in 0..1000 {
        let (fu, fv) = (random_list(&mut rng, &universe, 8), random_list(&mut rng, &universe, 8));
        let (got, want) = (apinc(&list(&fu), &list(&fv)), apinc_oracle(&fu, &fv));
        check(
            got == want,
            format!("apinc case {t}: {got} vs oracle {want} for {fu:?} / {fv:?}"),
        )?;
    }

    for t in 0..500 {
        let (nr, nc) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let mut counts = vec![vec![0.0f64; nc]; nr];
        for row in counts.iter_mut() {
            for c in row.iter_mut() {
                if rng.random_bool(0.6) {
                    *c = rng.random_range(1..20) as f64;
                }
            }
            if row.iter().all(|&c| c == 0.0) {
                row[rng.random_range(0..nc)] = 1.0;
            }
        }
        let protos: BTreeMap<String, SparseVector> = counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let v: SparseVector = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0.0)
                    .map(|(j, &c)| (format!("c{j}"), c))
                    .collect();
                (format!("r{i}"), v)
            })
            .collect();
        let m = ppmi_transform(&build_count_matrix(&protos, true).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let total: f64 = counts.iter().flatten().sum();
        for i in 0..nr {
            let row_sum: f64 = counts[i].iter().sum();
            for j in 0..nc {
                let col_sum: f64 = (0..nr).map(|k| counts[k][j]).sum();
                let want = if counts[i][j] > 0.0 {
                    (counts[i][j] * total / (row_sum * col_sum)).log2().max(0.0)
                } else {
                    0.0
                };
                let got = m.row(&format!("r{i}")).map_or(0.0, |r| r.get(&format!("c{j}")));
                check(
                    (got - want).abs() <= 1e-9,
                    format!("ppmi case {t} cell ({i},{j}): {got} vs {want}"),
                )?;
            }
        }
    }

    let vocab: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
    for t in 0..1000 {
        let mut table = [[0.0f64; 8]; 8];
        for a in 0..8 {
            for b in a..8 {
                let s = if a == b {
                    1.0
                } else {
                    rng.random_range(0..=100) as f64 / 100.0
                };
                table[a][b] = s;
                table[b][a] = s;
            }
        }
        let idx = |w: &str| w[1..].parse::<usize>().unwrap();
        let sim = |a: &str, b: &str| table[idx(a)][idx(b)];
        let bag = |rng: &mut ChaCha8Rng| -> Vec<String> {
            (0..rng.random_range(0..=10))
                .map(|_| vocab[rng.random_range(0..8)].clone())
                .collect()
        };
        let (s1, s2) = (bag(&mut rng), bag(&mut rng));
        let (big, small) = if s1.len() < s2.len() { (&s2, &s1) } else { (&s1, &s2) };
        let want = if small.is_empty() {
            0.0
        } else {
            let mut total = 0.0;
            for v in small.iter() {
                let mut best = 0.0f64;
                for u in big.iter() {
                    best = best.max(sim(u, v));
                }
                total += best;
            }
            total / small.len() as f64
        };
        let got = llm_similarity(&s1, &s2, sim);
        check(got == want, format!("llm case {t}: {got} vs {want}"))?;
    }
    Ok("1000 apinc, 500 PPMI, 1000 llm cases".into())
}

fn rand_index(a: &[usize], b: &[usize]) -> f64 {
    let (mut agree, mut total) = (0usize, 0usize);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            total += 1;
            agree += usize::from((a[i] == a[j]) == (b[i] == b[j]));
        }
    }
    agree as f64 / total as f64
}

// 3
fn planted_partition() -> Outcome {
    let cfg = CorrelationConfig::default();
    check(cfg.sigma == 0.85, "default sigma is not 0.85")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut truth: Vec<usize> = (0..40).map(|i| i % 2).collect();
    truth.shuffle(&mut rng);
    let clusters = correlation_cluster_by(truth.len(), &cfg, |i, j| if truth[i] == truth[j] { 0.9 } else { 0.1 })
        .map_err(|e| e.to_string())?;
    let mut found = vec![usize::MAX; truth.len()];
    for (c, members) in clusters.iter().enumerate() {
        for &m in members {
            check(found[m] == usize::MAX, format!("occurrence {m} in two clusters"))?;
            found[m] = c;
        }
    }
    let ri = rand_index(&truth, &found);
    check(ri == 1.0, format!("Rand index {ri}"))?;

    let singletons = correlation_cluster_by(10, &cfg, |_, _| 0.5).map_err(|e| e.to_string())?;
    let want: Vec<Vec<usize>> = (0..10).map(|i| vec![i]).collect();
    check(singletons == want, format!("singleton trace {singletons:?}"))?;
    Ok(format!("Rand index {ri}, {} clusters; 10 singletons", clusters.len()))
}

// 4
fn tiered_sampler() -> Outcome {
    let mut summary = Vec::new();
    for seed in 0..5 {
        let planted = planted_topic_corpus(100, 10, 0.2, seed);
        let cfg = TieredConfig {
            seed,
            ..Default::default()
        };
        check(
            cfg.alpha == 1.0 && cfg.beta == 0.1 && cfg.eta == 0.01,
            "default hyperparameters changed",
        )?;
        let (cs, trace) = tiered_cluster_traced(&planted.occurrences, &cfg).map_err(|e| e.to_string())?;
        let labels: Vec<usize> = cs.labels().iter().map(|l| l.unwrap_or(usize::MAX)).collect();
        let agreement = rand_index(&labels, &planted.labels);
        let roots = cs.root_features.as_ref().ok_or("no root assignments")?;
        let (mut bg, mut at_root) = (0usize, 0usize);
        for (o, root) in planted.occurrences.occurrences.iter().zip(roots) {
            for (pos, tok) in o.tokens().enumerate() {
                if planted.background.contains(tok) {
                    bg += 1;
                    at_root += usize::from(root.contains(&pos));
                }
            }
        }
        let root_share = at_root as f64 / bg as f64;
        check(agreement >= 0.9, format!("seed {seed}: agreement {agreement:.3}"))?;
        check(
            root_share >= 0.6,
            format!("seed {seed}: background at root {root_share:.3}"),
        )?;
        let best = cs.log_joint.ok_or("no log joint")?;
        let max_seen = trace.log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        check(
            best >= max_seen,
            format!("seed {seed}: returned {best} below sampled {max_seen}"),
        )?;

        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        save_cluster_sets(&a, [&cs]).map_err(|e| e.to_string())?;
        let (again, _) = tiered_cluster_traced(&planted.occurrences, &cfg).map_err(|e| e.to_string())?;
        save_cluster_sets(&b, [&again]).map_err(|e| e.to_string())?;
        check(
            std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap(),
            format!("seed {seed}: reruns differ"),
        )?;
        summary.push(format!("{agreement:.3}/{root_share:.3}"));
    }
    Ok(format!("agreement/root share per seed: {}", summary.join(" ")))
}

fn small_benchmark() -> (PolysemyBenchmark, Vec<LabeledPair>) {
    let b = polysemy_benchmark(&PolysemyConfig {
        categories: 4,
        hyponyms_per_category: 6,
        occurrences_per_word: 40,
        noise_frac: 0.0,
        seed: 5,
        ..Default::default()
    });
    let pairs = b.pairs.iter().take(50).cloned().collect();
    (b, pairs)
}

fn words_of(pairs: &[LabeledPair]) -> BTreeSet<String> {
    pairs.iter().flat_map(|p| [p.u.clone(), p.v.clone()]).collect()
}

// 5
fn baseline_equivalence() -> Outcome {
    let (b, pairs) = small_benchmark();
    let words = words_of(&pairs);
    let base = ExperimentConfig {
        folds: 5,
        seed: 5,
        latent_dim: 20,
        ..Default::default()
    };
    let mut one = ExperimentConfig {
        clustering: Clustering::Tiered,
        ..base.clone()
    };
    one.tiered.alpha = 1e-300;
    one.tiered.iterations = 20;
    let raw_base = induce_senses(&b.occurrences, &words, &base).map_err(|e| e.to_string())?;
    let raw_one = induce_senses(&b.occurrences, &words, &one).map_err(|e| e.to_string())?;
    check(
        raw_one.words.values().all(|s| s.len() == 1),
        "a word kept more than one cluster",
    )?;
    let mut n = 0;
    for (scorer, strategies) in [
        (
            Scorer::Balapinc,
            &["AvgScore", "MaxScore", "WeightedAvgScore", "WeightedMaxScore"][..],
        ),
        (Scorer::Convecs, &["AvgScore", "MaxScore", "AvgVector"][..]),
    ] {
        for s in strategies {
            let run = |cfg: &ExperimentConfig, raw| {
                let cfg = ExperimentConfig {
                    scorer,
                    strategy: s.to_string(),
                    ..cfg.clone()
                };
                run_experiment_with(&cfg, &pairs, raw).map_err(|e| e.to_string())
            };
            let (x, y) = (run(&base, &raw_base)?, run(&one, &raw_one)?);
            for (p, q) in x.scores.iter().zip(&y.scores) {
                check(
                    p.score.to_bits() == q.score.to_bits(),
                    format!(
                        "{} {s}: {} {} scored {} vs {}",
                        scorer.name(),
                        p.pair.u,
                        p.pair.v,
                        p.score,
                        q.score
                    ),
                )?;
                n += 1;
            }
        }
    }
    Ok(format!("{} pairs, {n} scores bit-identical", pairs.len()))
}

// 6
fn polysemy() -> Outcome {
    let cfg_b = PolysemyConfig::default();
    let b = polysemy_benchmark(&cfg_b);
    let words: BTreeSet<String> = b.occurrences.keys().cloned().collect();
    let base = ExperimentConfig {
        scorer: Scorer::Convecs,
        strategy: "AvgVector".into(),
        ..Default::default()
    };
    let tiered = ExperimentConfig {
        clustering: Clustering::Tiered,
        ..base.clone()
    };
    let raw_base = induce_senses(&b.occurrences, &words, &base).map_err(|e| e.to_string())?;
    let raw_tiered = induce_senses(&b.occurrences, &words, &tiered).map_err(|e| e.to_string())?;
    let run = |cfg: &ExperimentConfig, scorer: Scorer, s: &str, raw| {
        let cfg = ExperimentConfig {
            scorer,
            strategy: s.into(),
            ..cfg.clone()
        };
        run_experiment_with(&cfg, &b.pairs, raw).map_err(|e| e.to_string())
    };
    let single = run(&base, Scorer::Convecs, "AvgVector", &raw_base)?.row.accuracy;
    let multi = run(&tiered, Scorer::Convecs, "AvgVector", &raw_tiered)?.row.accuracy;

    let mut per_pair = 0;
    let mut report = Vec::new();
    for scorer in [Scorer::Convecs, Scorer::Balapinc] {
        let avg = run(&tiered, scorer, "AvgScore", &raw_tiered)?;
        let max = run(&tiered, scorer, "MaxScore", &raw_tiered)?;
        for (a, m) in avg.scores.iter().zip(&max.scores) {
            check(
                m.score >= a.score,
                format!(
                    "{}: MaxScore {} < AvgScore {} for {} {}",
                    scorer.name(),
                    m.score,
                    a.score,
                    a.pair.u,
                    a.pair.v
                ),
            )?;
            per_pair += 1;
        }
        report.push(format!(
            "{} avg {:.3} max {:.3}",
            scorer.name(),
            avg.row.accuracy,
            max.row.accuracy
        ));
    }
    let senses = raw_tiered.n_senses() as f64 / raw_tiered.len() as f64;
    let msg = format!(
        "single {single:.4}, tiered {multi:.4} ({:+.1} points, {senses:.2} senses/word); {}; max>=avg on {per_pair} pairs",
        100.0 * (multi - single),
        report.join(", ")
    );
    check(multi - single >= 0.03, msg.clone())?;
    Ok(msg)
}

// 7
fn harness_hygiene() -> Outcome {
    let (b, pairs) = small_benchmark();
    let words = words_of(&pairs);

    // leakage: test-only words may change arbitrarily without moving the model
    for scorer in [Scorer::Balapinc, Scorer::Convecs] {
        let cfg = ExperimentConfig {
            scorer,
            strategy: if scorer == Scorer::Convecs {
                "AvgVector"
            } else {
                "AvgScore"
            }
            .into(),
            latent_dim: 20,
            folds: 5,
            ..Default::default()
        };
        let raw = induce_senses(&b.occurrences, &words, &cfg).map_err(|e| e.to_string())?;
        let ppmi = raw.ppmi(false).map_err(|e| e.to_string())?;
        let plan = make_folds(&pairs, cfg.folds, cfg.seed).map_err(|e| e.to_string())?;
        for f in 0..plan.k() {
            let train = plan.train_indices(f);
            let train_words = words_of(&train.iter().map(|&i| pairs[i].clone()).collect::<Vec<_>>());
            let mut perturbed = ppmi.clone();
            let mut touched = 0;
            for (w, senses) in perturbed.words.iter_mut() {
                if !train_words.contains(w) {
                    touched += 1;
                    for s in senses.iter_mut() {
                        s.vector.insert("leak", 1e6);
                        s.vector.insert("z0", 123.0);
                    }
                }
            }
            let m1 = fit_fold(&cfg, &ppmi, &pairs, &train, 9).map_err(|e| e.to_string())?;
            let m2 = fit_fold(&cfg, &perturbed, &pairs, &train, 9).map_err(|e| e.to_string())?;
            check(
                m1 == m2,
                format!(
                    "{} fold {f}: model moved after perturbing {touched} test-only words",
                    scorer.name()
                ),
            )?;
            if scorer == Scorer::Convecs {
                // the same perturbation on a training word must show up
                let w = train_words.iter().next().unwrap();
                let mut seen = ppmi.clone();
                for s in seen.words.get_mut(w).unwrap() {
                    s.vector.insert("leak", 1e6);
                }
                let m3 = fit_fold(&cfg, &seen, &pairs, &train, 9).map_err(|e| e.to_string())?;
                check(
                    m1 != m3,
                    format!("fold {f}: perturbing training word {w} changed nothing"),
                )?;
            }
        }
    }

    let big = polysemy_benchmark(&PolysemyConfig::default());
    for k in [5, 10] {
        let plan = make_folds(&big.pairs, k, 11).map_err(|e| e.to_string())?;
        let global = big.pairs.iter().filter(|p| p.label).count() as f64 / big.pairs.len() as f64;
        for fold in &plan.folds {
            let ratio = fold.iter().filter(|&&i| big.pairs[i].label).count() as f64 / fold.len() as f64;
            check(
                (ratio - global).abs() <= 1.0 / fold.len() as f64,
                format!("k={k}: fold ratio {ratio} vs {global}"),
            )?;
        }
    }

    // end-to-end, file in and file out
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let occ = dir.path().join("occ.tsv");
    save_occurrences(&occ, b.occurrences.values()).map_err(|e| e.to_string())?;
    let data = dir.path().join("pairs.tsv");
    let text: String = pairs
        .iter()
        .map(|p| format!("{}\t{}\t{}\n", p.u, p.v, u8::from(p.label)))
        .collect();
    std::fs::write(&data, text).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let mut cfg = ExperimentConfig {
            dataset: data.clone(),
            occurrences: Some(occ.clone()),
            clustering: Clustering::Tiered,
            scorer: Scorer::Convecs,
            strategy: "MaxScore".into(),
            latent_dim: 20,
            folds: 5,
            seed: 4,
            report: Some(dir.path().join(format!("report{run}.csv"))),
            scores: Some(dir.path().join(format!("scores{run}.tsv"))),
            ..Default::default()
        };
        cfg.tiered.iterations = 100;
        run_experiment(&cfg).map_err(|e| e.to_string())?;
        outputs.push((
            std::fs::read(cfg.report.as_ref().unwrap()).unwrap(),
            std::fs::read(cfg.scores.as_ref().unwrap()).unwrap(),
        ));
    }
    check(outputs[0] == outputs[1], "reruns wrote different files")?;
    Ok("no leakage in 2x5 folds, stratified, reruns byte-identical".into())
}

// 8
fn convecs_contracts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for t in 0..200 {
        let n = rng.random_range(1..=30);
        let k = rng.random_range(1..=8);
        let mut v = || (0..k).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        let xs: Vec<Vec<f64>> = (0..n).map(|_| concat_features(&v(), &v())).collect();
        let km = kernel_matrix(&xs, 2);
        let m = DMatrix::from_fn(n, n, |i, j| km[i][j]);
        check(m == m.transpose(), format!("set {t}: kernel not symmetric"))?;
        let min = SymmetricEigen::new(m).eigenvalues.min();
        worst = worst.min(min);
        check(min >= -1e-8, format!("set {t}: eigenvalue {min}"))?;
    }

    let mut examples = Vec::new();
    for i in 0..20 {
        let t = i as f64 / 20.0;
        examples.push(PairExample {
            u: vec![1.0, t],
            v: vec![t, 1.0],
            label: true,
        });
        examples.push(PairExample {
            u: vec![t, 1.0],
            v: vec![1.0, t],
            label: false,
        });
    }
    let model = train_convecs(&examples, 2, 1.0, 0).map_err(|e| e.to_string())?;
    let mut correct = 0;
    for e in &examples {
        let p = score_pair(&model, &e.u, &e.v).map_err(|e| e.to_string())?;
        correct += usize::from((p > 0.5) == e.label);
    }
    check(
        correct == examples.len(),
        format!("training accuracy {correct}/{}", examples.len()),
    )?;

    for _ in 0..2000 {
        let scale = 10f64.powi(rng.random_range(-6..6));
        let u: Vec<f64> = (0..2).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..2).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let p = score_pair(&model, &u, &v).map_err(|e| e.to_string())?;
        check((0.0..=1.0).contains(&p), format!("probability {p}"))?;
    }
    Ok(format!(
        "min eigenvalue {worst:.2e}, toy accuracy 1.0, probabilities in range"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 balapinc identities", balapinc_identities, Duration::from_secs(1)),
        ("2 oracle equivalence", oracles, Duration::from_secs(10)),
        ("3 planted partition", planted_partition, Duration::from_secs(5)),
        ("4 tiered sampler", tiered_sampler, Duration::from_secs(120)),
        ("5 baseline equivalence", baseline_equivalence, Duration::from_secs(120)),
        ("6 polysemy benchmark", polysemy, Duration::from_secs(600)),
        ("7 harness hygiene", harness_hygiene, Duration::from_secs(120)),
        ("8 convecs contracts", convecs_contracts, Duration::from_secs(60)),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f, budget) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let mut res = f();
        let took = t.elapsed();
        if res.is_ok() && took > budget {
            res = Err(format!("took {took:.1?}, budget {budget:?}"));
        }
        match res {
            Ok(msg) => println!("criterion {name}: PASS ({took:.2?}) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({took:.2?}) {msg}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
