//! Text formats for sparse matrices, latent matrices and sense priors.
//!
//! Sparse matrix: a `#labels: l1,l2,...` header followed by
//! `row<TAB>feature<TAB>value` triplets. Labels must not contain commas.
//!
//! Latent matrix: a `#singular_values: s1,s2,...` header followed by
//! `label<TAB>v1,v2,...,vk` lines.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{LatentMatrix, SparseMatrix, SparseVector};
use crate::error::{Error, Result};

const LABELS_HEADER: &str = "#labels: ";
const SINGULAR_HEADER: &str = "#singular_values: ";

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(path, line, format!("not a number: {s:?}")))
}

pub fn save_sparse_matrix(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{LABELS_HEADER}{}", m.labels.join(","))?;
    for (label, row) in m.iter() {
        for (f, v) in row.iter() {
            writeln!(w, "{label}\t{f}\t{v}")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_sparse_matrix(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let mut lines = BufReader::new(fs::File::open(path)?).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(path, 1, "missing #labels header"))?;
    let labels: Vec<String> = header
        .strip_prefix(LABELS_HEADER)
        .ok_or_else(|| Error::parse(path, 1, "missing #labels header"))?
        .split(',')
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut rows = vec![SparseVector::new(); labels.len()];
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected row<TAB>feature<TAB>value"));
        }
        let &r = index
            .get(fields[0])
            .ok_or_else(|| Error::parse(path, lineno, format!("unknown row {:?}", fields[0])))?;
        let v = parse_f64(path, lineno, fields[2])?;
        rows[r].add(fields[1], v);
    }
    Ok(SparseMatrix { labels, rows })
}

pub fn save_latent(path: impl AsRef<Path>, m: &LatentMatrix) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let sv: Vec<String> = m.singular_values.iter().map(f64::to_string).collect();
    writeln!(w, "{SINGULAR_HEADER}{}", sv.join(","))?;
    for (label, v) in m.labels.iter().zip(&m.vectors) {
        let vals: Vec<String> = v.iter().map(f64::to_string).collect();
        writeln!(w, "{label}\t{}", vals.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Load a latent matrix. The result has no projection basis.
pub fn load_latent(path: impl AsRef<Path>) -> Result<LatentMatrix> {
    let path = path.as_ref();
    let mut lines = BufReader::new(fs::File::open(path)?).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(path, 1, "missing #singular_values header"))?;
    let singular_values = header
        .strip_prefix(SINGULAR_HEADER)
        .ok_or_else(|| Error::parse(path, 1, "missing #singular_values header"))?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(path, 1, s))
        .collect::<Result<Vec<_>>>()?;
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let (label, vals) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno, "expected label<TAB>values"))?;
        let v = vals
            .split(',')
            .map(|s| parse_f64(path, lineno, s))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != singular_values.len() {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} values, found {}", singular_values.len(), v.len()),
            ));
        }
        labels.push(label.to_owned());
        vectors.push(v);
    }
    Ok(LatentMatrix::from_parts(labels, vectors, singular_values))
}

/// Sidecar `label<TAB>prior` lines.
pub fn save_priors(path: impl AsRef<Path>, priors: &BTreeMap<String, f64>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for (label, p) in priors {
        writeln!(w, "{label}\t{p}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_priors(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    let path = path.as_ref();
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (label, p) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected label<TAB>prior"))?;
        out.insert(label.to_owned(), parse_f64(path, i + 1, p)?);
    }
    Ok(out)
}
