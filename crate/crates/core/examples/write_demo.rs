//! Write a plain-text corpus, a pair dataset and an experiment config for
//! trying the command-line tool.
//!
//! ```text
//! cargo run --example write_demo -- demo
//! sense-entail ingest --corpus demo/corpus.txt --targets demo/pairs.tsv -o demo/occ.tsv
//! sense-entail cluster --occurrences demo/occ.tsv --backend tiered --iters 200 -o demo/clusters.tsv
//! sense-entail prototypes --clusters demo/clusters.tsv --occurrences demo/occ.tsv -o demo/senses.tsv
//! sense-entail eval demo/experiment.cfg
//! ```

use std::fs;
use std::path::PathBuf;

use sense_entail::synth::{polysemy_benchmark, PolysemyConfig};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "demo".into()));
    fs::create_dir_all(&dir)?;
    let bench = polysemy_benchmark(&PolysemyConfig::default());

    let mut corpus = String::new();
    for set in bench.occurrences.values() {
        for o in &set.occurrences {
            let line: Vec<&str> = o
                .left
                .iter()
                .map(String::as_str)
                .chain([o.target.as_str()])
                .chain(o.right.iter().map(String::as_str))
                .collect();
            corpus.push_str(&line.join(" "));
            corpus.push('\n');
        }
    }
    fs::write(dir.join("corpus.txt"), corpus)?;

    let mut pairs = String::from("# u\tv\tlabel\n");
    for p in &bench.pairs {
        pairs.push_str(&format!("{}\t{}\t{}\n", p.u, p.v, u8::from(p.label)));
    }
    fs::write(dir.join("pairs.tsv"), pairs)?;

    fs::write(
        dir.join("experiment.cfg"),
        "dataset = pairs.tsv\n\
         inventory = senses.tsv\n\
         scorer = convecs\n\
         strategy = AvgVector\n\
         clustering = tiered\n\
         report = report.csv\n\
         scores = scores.tsv\n",
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}
