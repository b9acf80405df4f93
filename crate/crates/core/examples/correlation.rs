//! Greedy pivot clustering of one word's contexts.

use sense_entail::corpus::{Occurrence, OccurrenceSet};
use sense_entail::lexsim::llm_similarity;
use sense_entail::senses::{correlation_cluster, filter_clusters, CorrelationConfig};
use sense_entail::synth::toy_taxonomy;

fn occ(i: usize, ctx: &[&str]) -> Occurrence {
    Occurrence {
        target: "bank".into(),
        source_id: format!("s{i}"),
        left: ctx[..ctx.len() / 2].iter().map(|s| s.to_string()).collect(),
        right: ctx[ctx.len() / 2..].iter().map(|s| s.to_string()).collect(),
    }
}

fn main() -> sense_entail::Result<()> {
    let contexts: [&[&str]; 6] = [
        &["car", "bus", "vehicle"],
        &["bus", "car"],
        &["tree", "plant", "shore"],
        &["vehicle", "car", "bus"],
        &["plant", "tree"],
        &["dog", "bird"],
    ];
    let occs = OccurrenceSet::from_occurrences("bank", contexts.iter().enumerate().map(|(i, c)| occ(i, c)).collect());
    let t = toy_taxonomy();
    let wup = t.cached();
    let cfg = CorrelationConfig {
        sigma: 0.6,
        ..Default::default()
    };
    let cs = correlation_cluster(&occs, &cfg, |a, b| llm_similarity(a, b, |x, y| wup.similarity(x, y)))?;
    println!("clusters: {:?}", cs.clusters);
    println!("after the size filter: {:?}", filter_clusters(&cs, 0.2)?.clusters);
    Ok(())
}
