//! Ten-fold comparison of single-prototype and tiered senses on the synthetic
//! polysemy benchmark, for both scorers.
//!
//! `cargo run --release --example cross_validation -- [seed]`

use std::collections::BTreeSet;

use sense_entail::harness::{format_report, induce_senses, run_experiment_with, Clustering, ExperimentConfig, Scorer};
use sense_entail::synth::{polysemy_benchmark, PolysemyConfig};

fn main() -> sense_entail::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    let bench = polysemy_benchmark(&PolysemyConfig {
        seed,
        ..Default::default()
    });
    let words: BTreeSet<String> = bench.occurrences.keys().cloned().collect();

    let mut rows = Vec::new();
    for clustering in [Clustering::None, Clustering::Tiered] {
        let mut cfg = ExperimentConfig {
            name: Some("polysemy".into()),
            clustering,
            seed,
            ..Default::default()
        };
        cfg.tiered.iterations = 300;
        let raw = induce_senses(&bench.occurrences, &words, &cfg)?;
        for (scorer, strategy) in [
            (Scorer::Balapinc, "AvgScore"),
            (Scorer::Balapinc, "MaxScore"),
            (Scorer::Convecs, "AvgVector"),
            (Scorer::Convecs, "AvgScore"),
            (Scorer::Convecs, "MaxScore"),
        ] {
            let cfg = ExperimentConfig {
                scorer,
                strategy: strategy.into(),
                ..cfg.clone()
            };
            rows.push(run_experiment_with(&cfg, &bench.pairs, &raw)?.row);
        }
    }
    print!("{}", format_report(&rows));
    Ok(())
}
