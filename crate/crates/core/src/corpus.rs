//! Occurrence extraction, sampling and feature pruning.
//!
//! A corpus is read as one sentence per line. Each appearance of a target
//! word becomes an [`Occurrence`] holding up to `window` tokens on either
//! side, truncated at the sentence boundary.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::vsm::{SparseVector, LEFT_TAG, RIGHT_TAG};

pub const DEFAULT_WINDOW: usize = 4;
pub const DEFAULT_SAMPLE: usize = 1000;
pub const DEFAULT_TOP_FEATURES: usize = 500;

/// Placeholder for an empty context side in the occurrence file.
const EMPTY_SIDE: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub target: String,
    pub source_id: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl Occurrence {
    /// Number of context tokens on both sides.
    pub fn context_len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.left.iter().chain(self.right.iter()).map(String::as_str)
    }

    /// Context counts with sides merged.
    pub fn bag(&self) -> SparseVector {
        let mut v = SparseVector::new();
        for t in self.tokens() {
            v.add(t, 1.0);
        }
        v
    }

    /// Context counts with each token prefixed by the side it came from.
    /// `vsm::build_count_matrix` strips or keeps the prefix.
    pub fn tagged_bag(&self) -> SparseVector {
        let mut v = SparseVector::new();
        for t in &self.left {
            v.add(&format!("{LEFT_TAG}{t}"), 1.0);
        }
        for t in &self.right {
            v.add(&format!("{RIGHT_TAG}{t}"), 1.0);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceSet {
    pub target: String,
    pub occurrences: Vec<Occurrence>,
    /// Admissible context features. Before pruning this is every token seen.
    pub feature_alphabet: BTreeSet<String>,
}

impl OccurrenceSet {
    pub fn new(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            occurrences: Vec::new(),
            feature_alphabet: BTreeSet::new(),
        }
    }

    pub fn from_occurrences(target: impl Into<String>, occurrences: Vec<Occurrence>) -> Self {
        let feature_alphabet = occurrences.iter().flat_map(|o| o.tokens().map(str::to_owned)).collect();
        Self {
            target: target.into(),
            occurrences,
            feature_alphabet,
        }
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Unpruned context vectors keyed by source id, used to rebuild full
    /// prototypes after clustering on pruned features.
    pub fn full_bags(&self) -> BTreeMap<String, SparseVector> {
        self.occurrences
            .iter()
            .map(|o| (o.source_id.clone(), o.tagged_bag()))
            .collect()
    }
}

/// Lowercase, split on whitespace and drop every non-alphanumeric character.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| c.is_alphanumeric())
                .flat_map(char::to_lowercase)
                .collect::<String>()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// 64-bit FNV-1a over the space-joined sentence.
fn sentence_hash(sentence: &[String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (i, tok) in sentence.iter().enumerate() {
        if i > 0 {
            h ^= u64::from(b' ');
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        for b in tok.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Collect windowed occurrences of every target in tokenized sentences.
///
/// Every target gets an entry, possibly with no occurrences. The source id
/// is the sentence hash followed by the target's token position, so two
/// appearances in the same sentence stay distinguishable.
pub fn extract_occurrences<S>(
    sentences: &[S],
    targets: &BTreeSet<String>,
    window: usize,
) -> Result<BTreeMap<String, OccurrenceSet>>
where
    S: AsRef<[String]>,
{
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let mut out: BTreeMap<String, Vec<Occurrence>> = targets.iter().map(|t| (t.clone(), Vec::new())).collect();

    for sentence in sentences {
        let sentence = sentence.as_ref();
        let mut hash = None;
        for (pos, tok) in sentence.iter().enumerate() {
            let Some(list) = out.get_mut(tok) else {
                continue;
            };
            let h = *hash.get_or_insert_with(|| sentence_hash(sentence));
            let lo = pos.saturating_sub(window);
            let hi = (pos + 1 + window).min(sentence.len());
            list.push(Occurrence {
                target: tok.clone(),
                source_id: format!("{h:016x}:{pos}"),
                left: sentence[lo..pos].to_vec(),
                right: sentence[pos + 1..hi].to_vec(),
            });
        }
    }
    Ok(out
        .into_iter()
        .map(|(t, occs)| {
            let set = OccurrenceSet::from_occurrences(t.clone(), occs);
            (t, set)
        })
        .collect())
}

/// Tokenize `text` line by line and extract occurrences.
pub fn extract_from_text(
    text: &str,
    targets: &BTreeSet<String>,
    window: usize,
) -> Result<BTreeMap<String, OccurrenceSet>> {
    let sentences: Vec<Vec<String>> = text.lines().map(tokenize).collect();
    extract_occurrences(&sentences, targets, window)
}

/// Deduplicate, then keep the `n` occurrences with the most context tokens.
///
/// Richness is counted on the unpruned context. Ties go to the smaller
/// source id; among duplicates the smallest source id survives.
pub fn sample_occurrences(occs: &OccurrenceSet, n: usize) -> Result<OccurrenceSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let mut sorted: Vec<&Occurrence> = occs.occurrences.iter().collect();
    sorted.sort_by(|a, b| a.source_id.cmp(&b.source_id));

    let mut seen: HashSet<(&[String], &[String])> = HashSet::new();
    let mut unique: Vec<&Occurrence> = sorted
        .into_iter()
        .filter(|o| seen.insert((o.left.as_slice(), o.right.as_slice())))
        .collect();

    unique.sort_by(|a, b| {
        b.context_len()
            .cmp(&a.context_len())
            .then_with(|| a.source_id.cmp(&b.source_id))
    });
    unique.truncate(n);

    Ok(OccurrenceSet::from_occurrences(
        occs.target.clone(),
        unique.into_iter().cloned().collect(),
    ))
}

/// Merge sides and restrict every occurrence to the `top` most frequent tokens.
///
/// Merged occurrences carry their whole bag in `left`; `right` is empty.
/// Occurrences that lose every token are kept.
pub fn prune_features(occs: &OccurrenceSet, top: usize) -> Result<OccurrenceSet> {
    if top == 0 {
        return Err(Error::InvalidArgument("top must be at least 1".into()));
    }
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for o in &occs.occurrences {
        for t in o.tokens() {
            *freq.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
    // BTreeMap order makes the stable sort break ties lexicographically.
    ranked.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
    let alphabet: BTreeSet<String> = ranked.into_iter().take(top).map(|(t, _)| t.to_owned()).collect();

    let occurrences = occs
        .occurrences
        .iter()
        .map(|o| Occurrence {
            target: o.target.clone(),
            source_id: o.source_id.clone(),
            left: o
                .tokens()
                .filter(|t| alphabet.contains(*t))
                .map(str::to_owned)
                .collect(),
            right: Vec::new(),
        })
        .collect();

    Ok(OccurrenceSet {
        target: occs.target.clone(),
        occurrences,
        feature_alphabet: alphabet,
    })
}

fn side_field(tokens: &[String]) -> String {
    if tokens.is_empty() {
        EMPTY_SIDE.to_owned()
    } else {
        tokens.join(" ")
    }
}

fn parse_side(field: &str) -> Vec<String> {
    if field == EMPTY_SIDE {
        Vec::new()
    } else {
        field.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect()
    }
}

pub fn format_occurrence(o: &Occurrence) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{}\t{}\t{}\t{}",
        o.target,
        o.source_id,
        side_field(&o.left),
        side_field(&o.right)
    );
    s
}

pub fn write_occurrences<'a, W: Write>(mut w: W, sets: impl IntoIterator<Item = &'a OccurrenceSet>) -> Result<()> {
    for set in sets {
        for o in &set.occurrences {
            writeln!(w, "{}", format_occurrence(o))?;
        }
    }
    Ok(())
}

pub fn save_occurrences<'a>(path: impl AsRef<Path>, sets: impl IntoIterator<Item = &'a OccurrenceSet>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_occurrences(&mut w, sets)?;
    w.flush()?;
    Ok(())
}

/// Read an occurrence file, grouping lines by target in file order.
pub fn load_occurrences(path: impl AsRef<Path>) -> Result<BTreeMap<String, OccurrenceSet>> {
    let path = path.as_ref();
    let reader = BufReader::new(fs::File::open(path)?);
    let mut grouped: BTreeMap<String, Vec<Occurrence>> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                i + 1,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        grouped.entry(fields[0].to_owned()).or_default().push(Occurrence {
            target: fields[0].to_owned(),
            source_id: fields[1].to_owned(),
            left: parse_side(fields[2]),
            right: parse_side(fields[3]),
        });
    }
    Ok(grouped
        .into_iter()
        .map(|(t, occs)| {
            let set = OccurrenceSet::from_occurrences(t.clone(), occs);
            (t, set)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn targets(ts: &[&str]) -> BTreeSet<String> {
        ts.iter().map(|s| s.to_string()).collect()
    }

    fn occ(id: &str, left: &[&str], right: &[&str]) -> Occurrence {
        Occurrence {
            target: "w".into(),
            source_id: id.into(),
            left: left.iter().map(|s| s.to_string()).collect(),
            right: right.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn window_of_four() {
        let sets = extract_from_text("the quick brown fox jumps over the lazy dog", &targets(&["jumps"]), 4).unwrap();
        let o = &sets["jumps"].occurrences[0];
        assert_eq!(o.left, ["the", "quick", "brown", "fox"]);
        assert_eq!(o.right, ["over", "the", "lazy", "dog"]);
    }

    #[test]
    fn truncates_at_sentence_start() {
        let sets = extract_from_text("jumps over it\nunrelated line", &targets(&["jumps"]), 4).unwrap();
        let o = &sets["jumps"].occurrences[0];
        assert!(o.left.is_empty());
        assert_eq!(o.right, ["over", "it"]);
    }

    #[test]
    fn absent_target_yields_empty_set() {
        let sets = extract_from_text("a b c", &targets(&["zebra"]), 4).unwrap();
        assert!(sets["zebra"].is_empty());
    }

    #[test]
    fn no_targets_is_an_error() {
        let err = extract_from_text("a b c", &BTreeSet::new(), 4).unwrap_err();
        assert_eq!(err.to_string(), "no targets");
    }

    #[test]
    fn sentences_do_not_bleed() {
        let sets = extract_from_text("a b\nc target d", &targets(&["target"]), 4).unwrap();
        let o = &sets["target"].occurrences[0];
        assert_eq!(o.left, ["c"]);
        assert_eq!(o.right, ["d"]);
    }

    #[test]
    fn repeated_target_in_one_sentence_has_distinct_ids() {
        let sets = extract_from_text("x y x", &targets(&["x"]), 4).unwrap();
        let occs = &sets["x"].occurrences;
        assert_eq!(occs.len(), 2);
        assert_ne!(occs[0].source_id, occs[1].source_id);
        // Only the tokens at distance >= 1 are context.
        assert_eq!(occs[0].right, ["y", "x"]);
    }

    #[test]
    fn tokenizer_strips_punctuation_and_case() {
        assert_eq!(
            tokenize("The DOG, barked!  --  loudly."),
            ["the", "dog", "barked", "loudly"]
        );
    }

    #[test]
    fn sampling_keeps_all_when_undersupplied() {
        let set = OccurrenceSet::from_occurrences(
            "w",
            vec![occ("a", &["x"], &[]), occ("b", &["y"], &[]), occ("c", &["z"], &[])],
        );
        assert_eq!(sample_occurrences(&set, 1000).unwrap().len(), 3);
    }

    #[test]
    fn sampling_dedups_identical_contexts() {
        let set =
            OccurrenceSet::from_occurrences("w", vec![occ("b", &["x", "y"], &["z"]), occ("a", &["x", "y"], &["z"])]);
        let s = sample_occurrences(&set, 10).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.occurrences[0].source_id, "a");
    }

    #[test]
    fn sampling_prefers_rich_contexts() {
        let eight = occ("r8", &["a", "b", "c", "d"], &["e", "f", "g", "h"]);
        let three = occ("r3", &["a", "b"], &["c"]);
        let five = occ("r5", &["a", "b", "c"], &["d", "e"]);
        let set = OccurrenceSet::from_occurrences("w", vec![three, eight, five]);
        let s = sample_occurrences(&set, 2).unwrap();
        let ids: Vec<_> = s.occurrences.iter().map(|o| o.source_id.as_str()).collect();
        assert_eq!(ids, ["r8", "r5"]);
    }

    #[test]
    fn prune_under_cap_only_merges() {
        let set = OccurrenceSet::from_occurrences("w", vec![occ("1", &["a", "b"], &["c"]), occ("2", &["d"], &[])]);
        let p = prune_features(&set, 500).unwrap();
        assert_eq!(p.feature_alphabet.len(), 4);
        assert_eq!(p.occurrences[0].left, ["a", "b", "c"]);
        assert!(p.occurrences[0].right.is_empty());
    }

    #[test]
    fn prune_cuts_by_frequency() {
        let mut left = vec!["a"; 10];
        left.extend(vec!["b"; 5]);
        left.push("c");
        let set = OccurrenceSet::from_occurrences("w", vec![occ("1", &left, &["c"]), occ("2", &["c"], &[])]);
        // c now has frequency 3, still below b.
        let p = prune_features(&set, 2).unwrap();
        assert_eq!(p.feature_alphabet, targets(&["a", "b"]));
        assert!(p.occurrences.iter().all(|o| o.tokens().all(|t| t != "c")));
        // degenerate occurrence kept as empty
        assert_eq!(p.occurrences.len(), 2);
        assert!(p.occurrences[1].left.is_empty());
    }

    #[test]
    fn prune_ties_are_lexicographic() {
        let set = OccurrenceSet::from_occurrences("w", vec![occ("1", &["b", "a", "c"], &[])]);
        let p = prune_features(&set, 2).unwrap();
        assert_eq!(p.feature_alphabet, targets(&["a", "b"]));
    }

    #[test]
    fn occurrence_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("occ.tsv");
        let set = OccurrenceSet::from_occurrences("w", vec![occ("1", &[], &["x", "y"]), occ("2", &["p"], &[])]);
        save_occurrences(&path, [&set]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "w\t1\t_\tx y\nw\t2\tp\t_\n");
        let back = load_occurrences(&path).unwrap();
        assert_eq!(back["w"], set);
    }

    #[test]
    fn malformed_occurrence_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("occ.tsv");
        std::fs::write(&path, "w\t1\t_\t_\nbroken line\n").unwrap();
        let err = load_occurrences(&path).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }
}
