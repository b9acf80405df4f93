//! Report tables: `dataset,scorer,clustering,strategy,accuracy,fold1..foldK`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::PairScore;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub scorer: String,
    pub clustering: String,
    pub strategy: String,
    /// Mean of `folds`.
    pub accuracy: f64,
    pub folds: Vec<f64>,
}

impl ReportRow {
    fn key(&self) -> (&str, &str, &str, &str) {
        (&self.dataset, &self.scorer, &self.clustering, &self.strategy)
    }
}

fn header(k: usize) -> String {
    let mut h = "dataset,scorer,clustering,strategy,accuracy".to_owned();
    for i in 1..=k {
        h.push_str(&format!(",fold{i}"));
    }
    h
}

/// Render rows under one header sized for the longest fold list. Shorter
/// rows leave trailing cells empty.
pub fn format_report(rows: &[ReportRow]) -> String {
    let k = rows.iter().map(|r| r.folds.len()).max().unwrap_or(0);
    let mut out = header(k);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6}",
            r.dataset, r.scorer, r.clustering, r.strategy, r.accuracy
        ));
        for i in 0..k {
            out.push(',');
            if let Some(a) = r.folds.get(i) {
                out.push_str(&format!("{a:.6}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_report(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<()> {
    fs::write(path, format_report(rows))?;
    Ok(())
}

pub fn load_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("dataset,scorer,clustering,strategy,accuracy") => {}
        Some(_) => return Err(Error::parse(path, 1, "missing report header")),
        None => return Ok(Vec::new()),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 5 {
            return Err(Error::parse(path, i + 1, "row needs at least five cells"));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(path, i + 1, format!("bad number {s:?}")))
        };
        rows.push(ReportRow {
            dataset: cells[0].to_owned(),
            scorer: cells[1].to_owned(),
            clustering: cells[2].to_owned(),
            strategy: cells[3].to_owned(),
            accuracy: num(cells[4])?,
            folds: cells[5..]
                .iter()
                .filter(|c| !c.is_empty())
                .map(|c| num(c))
                .collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

/// Concatenate reports; a later row replaces an earlier one with the same
/// dataset, scorer, clustering and strategy.
pub fn merge_reports(reports: &[Vec<ReportRow>]) -> Vec<ReportRow> {
    let mut out: Vec<ReportRow> = Vec::new();
    for r in reports.iter().flatten() {
        match out.iter_mut().find(|o| o.key() == r.key()) {
            Some(o) => *o = r.clone(),
            None => out.push(r.clone()),
        }
    }
    out
}

/// Add a row to a report file, creating it if needed.
pub(crate) fn append_report(path: &Path, row: &ReportRow) -> Result<()> {
    let mut rows = if path.exists() { load_report(path)? } else { Vec::new() };
    rows = merge_reports(&[rows, vec![row.clone()]]);
    save_report(path, &rows)
}

/// `u<TAB>v<TAB>label<TAB>fold<TAB>score<TAB>prediction` per pair.
pub fn write_scores<W: Write>(mut w: W, scores: &[PairScore]) -> Result<()> {
    writeln!(w, "#u\tv\tlabel\tfold\tscore\tprediction")?;
    for s in scores {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            s.pair.u,
            s.pair.v,
            u8::from(s.pair.label),
            s.fold + 1,
            s.score,
            u8::from(s.prediction)
        )?;
    }
    Ok(())
}

pub(crate) fn save_scores(path: &Path, scores: &[PairScore]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_scores(&mut w, scores)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str, folds: Vec<f64>) -> ReportRow {
        ReportRow {
            dataset: "bbds".into(),
            scorer: "balapinc".into(),
            clustering: "none".into(),
            strategy: strategy.into(),
            accuracy: folds.iter().sum::<f64>() / folds.len() as f64,
            folds,
        }
    }

    #[test]
    fn format_pads_short_rows() {
        let text = format_report(&[row("AvgScore", vec![0.5, 1.0]), row("MaxScore", vec![0.25])]);
        assert_eq!(
            text,
            "dataset,scorer,clustering,strategy,accuracy,fold1,fold2\n\
             bbds,balapinc,none,AvgScore,0.750000,0.500000,1.000000\n\
             bbds,balapinc,none,MaxScore,0.250000,0.250000,\n"
        );
    }

    #[test]
    fn round_trip_and_merge() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        save_report(&a, &[row("AvgScore", vec![0.5, 1.0]), row("MaxScore", vec![0.25, 0.5])]).unwrap();
        let back = load_report(&a).unwrap();
        assert_eq!(back[0], row("AvgScore", vec![0.5, 1.0]));
        let merged = merge_reports(&[back, vec![row("AvgScore", vec![1.0, 1.0])]]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].accuracy, 1.0);
    }

    #[test]
    fn append_creates_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        append_report(&p, &row("AvgScore", vec![0.5])).unwrap();
        append_report(&p, &row("AvgScore", vec![0.75])).unwrap();
        let rows = load_report(&p).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].folds, vec![0.75]);
    }

    #[test]
    fn missing_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\n").unwrap();
        assert!(load_report(&p).is_err());
    }
}
