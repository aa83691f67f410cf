//! Per-word confusion sets `C(w)` (one-edit typos and homophones restricted to
//! common words) and per-address confusion sets.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::codec::WordTriple;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lexicon::{CommonSet, PhoneticIndex, WordList};

const ALPHABET: &[u8; 26] = b"abcdefghijklmnopqrstuvwxyz";

/// How many words of an address may be confused at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfusionMode {
    /// Any combination of words (`C(u) x C(v) x C(w) - s`).
    Pi,
    /// Exactly one word.
    Sigma,
}

impl std::fmt::Display for ConfusionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConfusionMode::Pi => "pi",
            ConfusionMode::Sigma => "sigma",
        })
    }
}

/// Calls `f` on every string one typing error away from `word`: adjacent
/// transposition, deletion, substitution and insertion over a-z. The same
/// string can be produced more than once and `word` itself can appear.
pub(crate) fn for_each_edit(word: &[u8], buf: &mut Vec<u8>, mut f: impl FnMut(&[u8])) {
    let n = word.len();
    for i in 0..n.saturating_sub(1) {
        buf.clear();
        buf.extend_from_slice(word);
        buf.swap(i, i + 1);
        f(buf);
    }
    for i in 0..n {
        buf.clear();
        buf.extend_from_slice(&word[..i]);
        buf.extend_from_slice(&word[i + 1..]);
        f(buf);
    }
    for i in 0..n {
        buf.clear();
        buf.extend_from_slice(word);
        for &c in ALPHABET {
            if c != word[i] {
                buf[i] = c;
                f(buf);
            }
        }
    }
    for i in 0..=n {
        for &c in ALPHABET {
            buf.clear();
            buf.extend_from_slice(&word[..i]);
            buf.push(c);
            buf.extend_from_slice(&word[i..]);
            f(buf);
        }
    }
}

/// All distinct strings one typing error away from `word`, excluding `word`.
pub fn typo_candidates(word: &str) -> Result<BTreeSet<String>> {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return Err(Error::Validation(format!("`{word}` is not a lowercase a-z word")));
    }
    let mut out = BTreeSet::new();
    let mut buf = Vec::with_capacity(word.len() + 1);
    for_each_edit(word.as_bytes(), &mut buf, |s| {
        if s != word.as_bytes() {
            // Edits of ASCII stay ASCII.
            out.insert(String::from_utf8(s.to_vec()).expect("ascii"));
        }
    });
    Ok(out)
}

/// Confusion sets for every word of a word list, keyed by word id. `C(w)`
/// always contains `w`; the stored neighbor lists exclude it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionIndex {
    neighbors: Vec<Vec<u32>>,
}

impl ConfusionIndex {
    /// Builds an index from explicit neighbor lists.
    pub fn from_neighbors(mut neighbors: Vec<Vec<u32>>) -> Self {
        for (id, v) in neighbors.iter_mut().enumerate() {
            v.retain(|&o| o as usize != id);
            v.sort_unstable();
            v.dedup();
        }
        ConfusionIndex { neighbors }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// `c(w) = |C(w)| - 1`.
    pub fn count(&self, id: u32) -> usize {
        self.neighbors[id as usize].len()
    }

    pub fn counts(&self) -> Vec<u32> {
        self.neighbors.iter().map(|v| v.len() as u32).collect()
    }

    /// `C(w) \ {w}`, sorted by id.
    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.neighbors[id as usize]
    }

    /// Whether `to` is in `C(from)` (including `to == from`).
    pub fn confusable(&self, from: u32, to: u32) -> bool {
        from == to || self.neighbors[from as usize].binary_search(&to).is_ok()
    }

    /// `C(w)` as words, `w` first.
    pub fn members<'a>(&self, wl: &'a WordList, word: &str) -> Result<Vec<&'a str>> {
        let id = wl.id_of(word).ok_or_else(|| Error::UnknownWord { word: word.to_owned() })?;
        let mut out = vec![wl.word(id)];
        out.extend(self.neighbors(id).iter().map(|&o| wl.word(o)));
        Ok(out)
    }

    /// Restricts every set to a smaller common set. For `D(v') ⊆ D(v)` this
    /// equals building the index against `D(v')` directly.
    pub fn restrict(&self, common: &CommonSet) -> ConfusionIndex {
        ConfusionIndex {
            neighbors: self
                .neighbors
                .iter()
                .map(|v| v.iter().copied().filter(|&o| common.contains_id(o)).collect())
                .collect(),
        }
    }

    /// Writes `word<TAB>member,member,...` lines, members including the word.
    pub fn export<W: Write>(&self, wl: &WordList, mut out: W) -> Result<()> {
        let io = |e| Error::io("<confusion index>", e);
        for id in 0..self.len() as u32 {
            write!(out, "{}\t{}", wl.word(id), wl.word(id)).map_err(io)?;
            for &o in self.neighbors(id) {
                write!(out, ",{}", wl.word(o)).map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
        Ok(())
    }

    /// Reads an index written by [`ConfusionIndex::export`] for the same word
    /// list.
    pub fn import<R: BufRead>(wl: &WordList, input: R) -> Result<ConfusionIndex> {
        let mut neighbors: Vec<Option<Vec<u32>>> = vec![None; wl.len()];
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<confusion index>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad =
                |message: String| Error::Ingestion { path: "<confusion index>".into(), line: lineno + 1, message };
            let (word, members) = line.split_once('\t').ok_or_else(|| bad("expected `word<TAB>members`".into()))?;
            let id = wl.id_of(word).ok_or_else(|| bad(format!("`{word}` is not in the word list")))?;
            let mut ids = Vec::new();
            let mut has_self = false;
            for m in members.split(',') {
                let mid = wl.id_of(m).ok_or_else(|| bad(format!("member `{m}` is not in the word list")))?;
                if mid == id {
                    has_self = true;
                } else {
                    ids.push(mid);
                }
            }
            if !has_self {
                return Err(bad(format!("confusion set of `{word}` must contain the word")));
            }
            neighbors[id as usize] = Some(ids);
        }
        let neighbors = neighbors
            .into_iter()
            .enumerate()
            .map(|(id, v)| v.ok_or_else(|| Error::Config(format!("confusion index lacks `{}`", wl.word(id as u32)))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConfusionIndex::from_neighbors(neighbors))
    }
}

pub fn build_confusion_index(wl: &WordList, common: &CommonSet, ph: &PhoneticIndex) -> ConfusionIndex {
    build_confusion_index_with(wl, common, ph, Exec::default())
}

/// `C(w) = ({w} ∪ C_t(w) ∪ C_h(w)) ∩ (D(v) ∪ {w})` for every word of `wl`.
pub fn build_confusion_index_with(wl: &WordList, common: &CommonSet, ph: &PhoneticIndex, exec: Exec) -> ConfusionIndex {
    let homophones = ph.homophone_ids(wl);
    let neighbors = exec.map_chunks(wl.len(), 512, |range| {
        let mut buf = Vec::with_capacity(32);
        range
            .map(|id| {
                let word = wl.word(id as u32);
                let mut out: Vec<u32> = homophones[id].iter().copied().filter(|&o| common.contains_id(o)).collect();
                for_each_edit(word.as_bytes(), &mut buf, |s| {
                    // Words of a list are ASCII, so non-UTF-8 cannot match.
                    if let Some(o) = std::str::from_utf8(s).ok().and_then(|s| wl.id_of(s)) {
                        if o as usize != id && common.contains_id(o) {
                            out.push(o);
                        }
                    }
                });
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect::<Vec<_>>()
    });
    ConfusionIndex { neighbors: neighbors.into_iter().flatten().collect() }
}

/// The confusion set of one address.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AddressConfusionSet {
    pub source: WordTriple,
    pub mode: ConfusionMode,
    pub members: Vec<WordTriple>,
}

/// Size of an address confusion set from the per-word counts alone.
pub fn address_confusion_count(counts: [u32; 3], mode: ConfusionMode) -> u64 {
    let [a, b, c] = counts.map(u64::from);
    match mode {
        ConfusionMode::Pi => (a + 1) * (b + 1) * (c + 1) - 1,
        ConfusionMode::Sigma => a + b + c,
    }
}

/// Enumerates the confusion set of `s`. Members are word triples; whether they
/// exist as addresses is not checked.
pub fn address_confusions(
    s: &WordTriple,
    idx: &ConfusionIndex,
    wl: &WordList,
    mode: ConfusionMode,
) -> Result<AddressConfusionSet> {
    let mut sets: Vec<Vec<&str>> = Vec::with_capacity(3);
    for w in s.words() {
        sets.push(idx.members(wl, w)?);
    }
    let mut members = Vec::new();
    match mode {
        ConfusionMode::Pi => {
            for &u in &sets[0] {
                for &v in &sets[1] {
                    for &w in &sets[2] {
                        let t = WordTriple::new(u, v, w);
                        if &t != s {
                            members.push(t);
                        }
                    }
                }
            }
        }
        ConfusionMode::Sigma => {
            for (slot, set) in sets.iter().enumerate() {
                for &alt in &set[1..] {
                    let mut t = s.clone();
                    t.0[slot] = alt.to_owned();
                    members.push(t);
                }
            }
        }
    }
    // Distinct by construction unless a word repeats across slots with equal
    // alternatives; dedup keeps the set semantics either way.
    let mut seen = HashSet::new();
    members.retain(|t| seen.insert(t.clone()));
    Ok(AddressConfusionSet { source: s.clone(), mode, members })
}
