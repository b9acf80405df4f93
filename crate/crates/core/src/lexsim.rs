//! Taxonomy-based relatedness: Wu-Palmer over a hypernym DAG and the
//! averaged best-match bag similarity used to compare occurrences.
//!
//! Taxonomy file, one synset per line:
//!
//! ```text
//! synset_id<TAB>parent_id_or_-<TAB>comma,separated,words
//! ```
//!
//! A synset with several hypernyms lists them comma-separated in the parent
//! field. Exactly one line has parent `-`; that synset is the root.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A similarity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    /// Set when at least one of the compared words is missing from the lexicon.
    pub out_of_vocabulary: bool,
}

impl SimilarityScore {
    fn known(value: f64) -> Self {
        Self {
            value,
            out_of_vocabulary: false,
        }
    }

    fn oov() -> Self {
        Self {
            value: 0.0,
            out_of_vocabulary: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    lexicon: HashMap<String, Vec<usize>>,
    root: usize,
    /// Shortest path from the root, root at 1.
    depth: Vec<u32>,
    /// Every ancestor of a node (itself included) with its upward distance.
    ancestors: Vec<HashMap<usize, u32>>,
}

impl Taxonomy {
    /// Build from `(synset, parents, words)` entries. Entries repeating a
    /// synset id merge their parents and words.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut ids: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut raw_parents: Vec<Vec<String>> = Vec::new();
        let mut lexicon: HashMap<String, Vec<usize>> = HashMap::new();
        let mut roots = Vec::new();

        for (id, parents, words) in entries {
            let id = id.as_ref();
            let i = *index.entry(id.to_owned()).or_insert_with(|| {
                ids.push(id.to_owned());
                raw_parents.push(Vec::new());
                ids.len() - 1
            });
            if parents.is_empty() {
                roots.push(i);
            }
            raw_parents[i].extend(parents.iter().map(|p| p.as_ref().to_owned()));
            for w in words {
                let senses = lexicon.entry(w.as_ref().to_owned()).or_default();
                if !senses.contains(&i) {
                    senses.push(i);
                }
            }
        }
        roots.dedup();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(Error::Taxonomy("no root synset".into())),
            _ => return Err(Error::Taxonomy(format!("{} root synsets, expected one", roots.len()))),
        };
        if !raw_parents[root].is_empty() {
            return Err(Error::Taxonomy(format!("root {} also has parents", ids[root])));
        }

        let mut parents = Vec::with_capacity(ids.len());
        for (i, ps) in raw_parents.iter().enumerate() {
            let mut resolved = Vec::with_capacity(ps.len());
            for p in ps {
                let &j = index
                    .get(p)
                    .ok_or_else(|| Error::Taxonomy(format!("synset {} has unknown parent {p}", ids[i])))?;
                if !resolved.contains(&j) {
                    resolved.push(j);
                }
            }
            parents.push(resolved);
        }

        check_acyclic(&parents)?;

        let n = ids.len();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut depth = vec![0u32; n];
        depth[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &c in &children[x] {
                if depth[c] == 0 {
                    depth[c] = depth[x] + 1;
                    queue.push_back(c);
                }
            }
        }
        // Acyclic and single-rooted means every chain of parents ends at the root.
        debug_assert!(depth.iter().all(|&d| d > 0));

        let ancestors = (0..n)
            .map(|s| {
                let mut dist = HashMap::from([(s, 0u32)]);
                let mut queue = VecDeque::from([s]);
                while let Some(x) = queue.pop_front() {
                    let d = dist[&x];
                    for &p in &parents[x] {
                        dist.entry(p).or_insert_with(|| {
                            queue.push_back(p);
                            d + 1
                        });
                    }
                }
                dist
            })
            .collect();

        Ok(Self {
            ids,
            index,
            parents,
            lexicon,
            root,
            depth,
            ancestors,
        })
    }

    pub fn root(&self) -> &str {
        &self.ids[self.root]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn depth(&self, synset: &str) -> Option<u32> {
        self.index.get(synset).map(|&i| self.depth[i])
    }

    pub fn parents(&self, synset: &str) -> Option<Vec<&str>> {
        self.index
            .get(synset)
            .map(|&i| self.parents[i].iter().map(|&p| self.ids[p].as_str()).collect())
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.lexicon.contains_key(word)
    }

    pub fn synsets(&self, word: &str) -> Vec<&str> {
        self.lexicon
            .get(word)
            .map(|ss| ss.iter().map(|&s| self.ids[s].as_str()).collect())
            .unwrap_or_default()
    }

    /// Wu-Palmer between two synsets. Both are measured through the common
    /// subsumer: `2·d(lcs) / ((d(lcs) + dist(s1,lcs)) + (d(lcs) + dist(s2,lcs)))`,
    /// maximised over common ancestors. On a tree this is exactly
    /// `2·d(lcs) / (d(s1) + d(s2))`; on a DAG it stays below 1 for distinct synsets.
    fn synset_similarity(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 1.0;
        }
        let (small, large) = if self.ancestors[a].len() <= self.ancestors[b].len() {
            (&self.ancestors[a], &self.ancestors[b])
        } else {
            (&self.ancestors[b], &self.ancestors[a])
        };
        let mut best: f64 = 0.0;
        for (&anc, &d1) in small {
            if let Some(&d2) = large.get(&anc) {
                let d = f64::from(self.depth[anc]);
                let sim = 2.0 * d / (2.0 * d + f64::from(d1) + f64::from(d2));
                best = best.max(sim);
            }
        }
        best
    }

    pub fn wu_palmer(&self, w1: &str, w2: &str) -> SimilarityScore {
        let (Some(s1), Some(s2)) = (self.lexicon.get(w1), self.lexicon.get(w2)) else {
            return SimilarityScore::oov();
        };
        let mut best: f64 = 0.0;
        for &a in s1 {
            for &b in s2 {
                best = best.max(self.synset_similarity(a, b));
                if best == 1.0 {
                    return SimilarityScore::known(1.0);
                }
            }
        }
        SimilarityScore::known(best)
    }

    /// A word-pair cache over [`Taxonomy::wu_palmer`] for one worker.
    pub fn cached(&self) -> CachedWuPalmer<'_> {
        CachedWuPalmer {
            taxonomy: self,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

fn check_acyclic(parents: &[Vec<usize>]) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; parents.len()];
    for start in 0..parents.len() {
        if mark[start] != Mark::New {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        mark[start] = Mark::Active;
        while let Some((node, next)) = stack.pop() {
            if let Some(&p) = parents[node].get(next) {
                stack.push((node, next + 1));
                match mark[p] {
                    Mark::Active => return Err(Error::CyclicTaxonomy),
                    Mark::New => {
                        mark[p] = Mark::Active;
                        stack.push((p, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
            }
        }
    }
    Ok(())
}

pub fn parse_taxonomy(text: &str, path: &Path) -> Result<Taxonomy> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, i + 1, "expected synset<TAB>parent<TAB>words"));
        }
        let parents: Vec<&str> = if fields[1] == "-" {
            Vec::new()
        } else {
            fields[1].split(',').filter(|p| !p.is_empty()).collect()
        };
        let words: Vec<&str> = fields[2].split(',').filter(|w| !w.is_empty()).collect();
        entries.push((fields[0], parents, words));
    }
    Taxonomy::from_entries(entries)
}

pub fn load_taxonomy(path: impl AsRef<Path>) -> Result<Taxonomy> {
    let path = path.as_ref();
    parse_taxonomy(&fs::read_to_string(path)?, path)
}

/// Memoised Wu-Palmer lookups. Not shared between threads.
pub struct CachedWuPalmer<'a> {
    taxonomy: &'a Taxonomy,
    cache: RefCell<HashMap<(String, String), f64>>,
}

impl CachedWuPalmer<'_> {
    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        let key = if a <= b {
            (a.to_owned(), b.to_owned())
        } else {
            (b.to_owned(), a.to_owned())
        };
        if let Some(&v) = self.cache.borrow().get(&key) {
            return v;
        }
        let v = self.taxonomy.wu_palmer(a, b).value;
        self.cache.borrow_mut().insert(key, v);
        v
    }
}

/// Averaged best-match similarity between two bags of words.
///
/// The smaller bag drives the average: every token of it is matched to its
/// most similar token in the other bag. Multiplicity counts. Returns 0 when
/// either bag is empty.
pub fn llm_similarity<S, F>(s1: &[S], s2: &[S], sim: F) -> f64
where
    S: AsRef<str>,
    F: Fn(&str, &str) -> f64,
{
    let (big, small) = if s1.len() < s2.len() { (s2, s1) } else { (s1, s2) };
    if small.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for v in small {
        let best = big.iter().map(|u| sim(u.as_ref(), v.as_ref())).fold(0.0f64, f64::max);
        total += best;
    }
    total / small.len() as f64
}
