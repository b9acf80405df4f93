//! Tiered clustering on a corpus with two planted topics and shared background words.
//!
//! `cargo run --release --example tiered -- [seed] [iterations]`

use sense_entail::senses::{tiered_cluster_traced, TieredConfig};
use sense_entail::synth::planted_topic_corpus;

fn main() -> sense_entail::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let iterations: usize = args.next().map_or(2000, |s| s.parse().expect("iterations"));

    let planted = planted_topic_corpus(100, 10, 0.2, seed);
    let cfg = TieredConfig {
        iterations,
        seed,
        ..Default::default()
    };
    let (cs, trace) = tiered_cluster_traced(&planted.occurrences, &cfg)?;
    println!("clusters: {} (sizes {:?})", cs.clusters.len(), cs.sizes());
    println!(
        "best log joint {:.2} at sweep {}",
        cs.log_joint.unwrap_or(f64::NAN),
        trace.best_iteration
    );

    let labels = cs.labels();
    let (mut agree, mut total) = (0usize, 0usize);
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            total += 1;
            agree += usize::from((labels[i] == labels[j]) == (planted.labels[i] == planted.labels[j]));
        }
    }
    println!(
        "pairwise agreement with planted topics: {:.3}",
        agree as f64 / total as f64
    );

    let roots = cs.root_features.as_ref().expect("tiered keeps root assignments");
    let (mut bg, mut bg_root) = (0usize, 0usize);
    for (o, root) in planted.occurrences.occurrences.iter().zip(roots) {
        for (pos, tok) in o.tokens().enumerate() {
            if planted.background.contains(tok) {
                bg += 1;
                bg_root += usize::from(root.contains(&pos));
            }
        }
    }
    println!("background tokens at the root: {:.3}", bg_root as f64 / bg as f64);
    Ok(())
}
