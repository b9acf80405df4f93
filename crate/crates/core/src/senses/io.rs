//! Cluster set and sense inventory files.
//!
//! Cluster sets: per word a header
//! `#cluster_set<TAB>target<TAB>n_occurrences<TAB>log_joint|-`, then one
//! `target<TAB>cluster_index<TAB>source_id` line per membership. Occurrences
//! left unassigned are listed with cluster index `-` so indices survive a
//! round trip.
//!
//! Inventories are a sparse matrix with `word#index` rows plus a priors sidecar.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{ClusterSet, SenseInventory};
use crate::error::{Error, Result};
use crate::vsm::{load_priors, load_sparse_matrix, save_priors, save_sparse_matrix, SparseMatrix};

const HEADER: &str = "#cluster_set";

pub fn save_cluster_sets<'a>(path: impl AsRef<Path>, sets: impl IntoIterator<Item = &'a ClusterSet>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for cs in sets {
        let lj = cs.log_joint.map_or_else(|| "-".to_owned(), |v| v.to_string());
        writeln!(w, "{HEADER}\t{}\t{}\t{lj}", cs.target, cs.n_occurrences())?;
        let labels = cs.labels();
        for (c, members) in cs.clusters.iter().enumerate() {
            for &m in members {
                writeln!(w, "{}\t{c}\t{}", cs.target, cs.source_ids[m])?;
            }
        }
        for (m, l) in labels.iter().enumerate() {
            if l.is_none() {
                writeln!(w, "{}\t-\t{}", cs.target, cs.source_ids[m])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Pending {
    set: ClusterSet,
    expected: usize,
}

fn finish(p: Pending, path: &Path, line: usize) -> Result<ClusterSet> {
    if p.set.source_ids.len() != p.expected {
        return Err(Error::parse(
            path,
            line,
            format!(
                "cluster set for {} lists {} occurrences, header says {}",
                p.set.target,
                p.set.source_ids.len(),
                p.expected
            ),
        ));
    }
    Ok(p.set)
}

/// Read cluster sets. Occurrence indices follow first appearance in the file.
pub fn load_cluster_sets(path: impl AsRef<Path>) -> Result<Vec<ClusterSet>> {
    let path = path.as_ref();
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    let mut current: Option<Pending> = None;
    let mut lineno = 0;
    for (i, line) in reader.lines().enumerate() {
        lineno = i + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[0] == HEADER {
            if fields.len() != 4 {
                return Err(Error::parse(path, lineno, "malformed cluster set header"));
            }
            if let Some(p) = current.take() {
                out.push(finish(p, path, lineno)?);
            }
            let expected = fields[2]
                .parse()
                .map_err(|_| Error::parse(path, lineno, "bad occurrence count"))?;
            let log_joint = match fields[3] {
                "-" => None,
                v => Some(
                    v.parse::<f64>()
                        .map_err(|_| Error::parse(path, lineno, "bad log_joint"))?,
                ),
            };
            current = Some(Pending {
                set: ClusterSet {
                    target: fields[1].to_owned(),
                    source_ids: Vec::new(),
                    clusters: Vec::new(),
                    root_features: None,
                    log_joint,
                },
                expected,
            });
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected target<TAB>cluster<TAB>source_id"));
        }
        let p = current
            .as_mut()
            .ok_or_else(|| Error::parse(path, lineno, "membership line before any header"))?;
        if fields[0] != p.set.target {
            return Err(Error::parse(path, lineno, "target does not match its header"));
        }
        let m = match p.set.source_ids.iter().position(|s| s == fields[2]) {
            Some(m) => m,
            None => {
                p.set.source_ids.push(fields[2].to_owned());
                p.set.source_ids.len() - 1
            }
        };
        if fields[1] != "-" {
            let c: usize = fields[1]
                .parse()
                .map_err(|_| Error::parse(path, lineno, "bad cluster index"))?;
            if p.set.clusters.len() <= c {
                p.set.clusters.resize(c + 1, Vec::new());
            }
            p.set.clusters[c].push(m);
        }
    }
    if let Some(p) = current.take() {
        out.push(finish(p, path, lineno)?);
    }
    for cs in &mut out {
        for c in &mut cs.clusters {
            c.sort_unstable();
        }
    }
    Ok(out)
}

/// Write the raw prototype matrix and its priors sidecar.
pub fn save_inventory(
    matrix_path: impl AsRef<Path>,
    priors_path: impl AsRef<Path>,
    inv: &SenseInventory,
) -> Result<()> {
    let labelled = inv.labelled_vectors();
    let m = SparseMatrix {
        labels: labelled.keys().cloned().collect(),
        rows: labelled.into_values().collect(),
    };
    save_sparse_matrix(matrix_path, &m)?;
    save_priors(priors_path, &inv.priors())
}

pub fn load_inventory(matrix_path: impl AsRef<Path>, priors_path: impl AsRef<Path>) -> Result<SenseInventory> {
    let m = load_sparse_matrix(matrix_path)?;
    let priors = load_priors(priors_path)?;
    SenseInventory::from_matrix(&m, &priors)
}
