//! Word list ingestion, common-word sets and the pronunciation index.
//!
//! Corpus files hold one `word<TAB>count` (or `word,count`) record per line;
//! an optional header line and `#` comments are skipped. Phonetic dictionaries
//! hold `word<TAB>/ipa/, /ipa/, ...` records. Variant files hold one pair of
//! alternative spellings per line.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Shortest word kept in a word list.
pub const MIN_WORD_LEN: usize = 4;
/// Lowest corpus count kept in a word list.
pub const MIN_FREQUENCY: u64 = 3;

/// Frequency-ranked word list. Word ids are ranks: id 0 is the most frequent
/// word, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    words: Vec<String>,
    frequency: Vec<u64>,
    ids: HashMap<String, u32>,
}

fn is_plain_word(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_lowercase())
}

impl WordList {
    /// Applies the word-list filters in order: plain lowercase a-z only,
    /// length at least 4, count at least 3, then variant pruning (the more
    /// frequent spelling of each pair survives). Repeated corpus entries for
    /// the same word are summed.
    pub fn from_counts<I, S>(counts: I, variants: &[(String, String)]) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (word, count) in counts {
            let word = word.as_ref();
            if is_plain_word(word) && word.len() >= MIN_WORD_LEN {
                *merged.entry(word.to_owned()).or_default() += count;
            }
        }
        merged.retain(|_, c| *c >= MIN_FREQUENCY);

        for (a, b) in variants {
            let (Some(&fa), Some(&fb)) = (merged.get(a), merged.get(b)) else {
                continue;
            };
            if a == b {
                continue;
            }
            let drop = if (fa, std::cmp::Reverse(a)) >= (fb, std::cmp::Reverse(b)) { b } else { a };
            merged.remove(drop);
        }

        if merged.is_empty() {
            return Err(Error::Config("word list is empty after filtering".into()));
        }
        let mut ranked: Vec<(String, u64)> = merged.into_iter().collect();
        ranked.sort_unstable_by(|(wa, fa), (wb, fb)| fb.cmp(fa).then_with(|| wa.cmp(wb)));
        Ok(Self::from_ranked(ranked))
    }

    fn from_ranked(ranked: Vec<(String, u64)>) -> Self {
        let (words, frequency): (Vec<String>, Vec<u64>) = ranked.into_iter().unzip();
        let ids = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        WordList { words, frequency, ids }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.frequency[id as usize]
    }

    pub fn id_of(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ids.contains_key(word)
    }

    pub fn max_frequency(&self) -> u64 {
        self.frequency.first().copied().unwrap_or(0)
    }

    /// `(word, count)` pairs in rank order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.words.iter().map(String::as_str).zip(self.frequency.iter().copied())
    }

    /// Vocabulary of band `band`: the rank slice `[band*k, (band+1)*k)`.
    pub fn band(&self, band: u32, k: u32) -> Result<&[String]> {
        let start = band as usize * k as usize;
        let end = start + k as usize;
        if k == 0 || end > self.words.len() {
            return Err(Error::Config(format!(
                "band {band} needs {k} words at ranks {start}..{end} but the word list has {}",
                self.words.len()
            )));
        }
        Ok(&self.words[start..end])
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn split_record(line: &str) -> Option<(&str, &str)> {
    line.split_once('\t').or_else(|| line.split_once(','))
}

/// Reads raw `(word, count)` records from a corpus file.
pub fn read_corpus(path: &Path) -> Result<Vec<(String, u64)>> {
    parse_corpus(&read_text(path)?, path)
}

pub(crate) fn parse_corpus(text: &str, path: &Path) -> Result<Vec<(String, u64)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Ingestion { path: path.to_path_buf(), line: lineno + 1, message };
        let (word, count) = split_record(line).ok_or_else(|| bad("expected `word<TAB>count`".into()))?;
        let count = count.trim();
        match count.parse::<u64>() {
            Ok(c) => out.push((word.trim().to_owned(), c)),
            Err(_) if out.is_empty() && lineno == 0 => continue, // header
            Err(_) => return Err(bad(format!("invalid count `{count}`"))),
        }
    }
    Ok(out)
}

/// Reads spelling-variant pairs, one tab- or comma-separated pair per line.
pub fn read_variants(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = split_record(line).ok_or_else(|| Error::Ingestion {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: "expected two spellings".into(),
        })?;
        out.push((a.trim().to_owned(), b.trim().to_owned()));
    }
    Ok(out)
}

/// Loads and filters a corpus, pruning spelling variants when a variant file
/// is given.
pub fn load_wordlist(corpus: &Path, variants: Option<&Path>) -> Result<WordList> {
    let counts = read_corpus(corpus)?;
    let variants = match variants {
        Some(p) => read_variants(p)?,
        None => Vec::new(),
    };
    WordList::from_counts(counts, &variants)
}

/// The common-word set `D(v)`: words of the list with count at least `v`.
#[derive(Debug, Clone)]
pub struct CommonSet {
    threshold: u64,
    member: Vec<bool>,
    size: usize,
}

impl CommonSet {
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains_id(&self, id: u32) -> bool {
        self.member.get(id as usize).copied().unwrap_or(false)
    }

    pub fn contains(&self, wl: &WordList, word: &str) -> bool {
        wl.id_of(word).is_some_and(|id| self.contains_id(id))
    }
}

pub fn common_set(wl: &WordList, threshold: u64) -> CommonSet {
    let member: Vec<bool> = wl.frequency.iter().map(|&f| f >= threshold).collect();
    let size = member.iter().filter(|&&m| m).count();
    CommonSet { threshold, member, size }
}

/// Normalizes an IPA transcription into a comparison key: strips the
/// enclosing slashes, stress marks, joiners and combining diacritics.
pub fn normalize_pronunciation(raw: &str) -> String {
    let s = raw.trim().trim_matches('/');
    s.nfd()
        .filter(|&c| {
            !matches!(c, '\u{02C8}' | '\u{02CC}' | '\'' | '\u{200B}'..='\u{200D}' | '\u{2060}' | '\u{FEFF}')
                && !is_combining_mark(c)
                && !c.is_whitespace()
        })
        .collect()
}

/// Word to pronunciation keys and back, merged over every loaded dictionary.
#[derive(Debug, Clone, Default)]
pub struct PhoneticIndex {
    word_keys: HashMap<String, Vec<u32>>,
    key_words: Vec<Vec<String>>,
    key_strings: Vec<String>,
    keys: HashMap<String, u32>,
    skipped: usize,
}

impl PhoneticIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one transcription; returns false if it normalizes to nothing.
    pub fn insert(&mut self, word: &str, transcription: &str) -> bool {
        let key = normalize_pronunciation(transcription);
        if key.is_empty() {
            return false;
        }
        let next = self.key_words.len() as u32;
        let key_id = *self.keys.entry(key.clone()).or_insert(next);
        if key_id == next {
            self.key_words.push(Vec::new());
            self.key_strings.push(key);
        }
        let word = word.to_lowercase();
        let entry = self.word_keys.entry(word.clone()).or_default();
        if !entry.contains(&key_id) {
            entry.push(key_id);
            self.key_words[key_id as usize].push(word);
        }
        true
    }

    /// Merges a dictionary file into the index. Malformed lines are skipped
    /// and counted.
    pub fn add_file(&mut self, path: &Path) -> Result<()> {
        let text = read_text(path)?;
        self.add_text(&text);
        Ok(())
    }

    pub fn add_text(&mut self, text: &str) {
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((word, prons)) = line.split_once('\t') else {
                self.skipped += 1;
                continue;
            };
            let mut any = false;
            for p in prons.split(',') {
                let p = p.trim();
                if p.len() > 2 && p.starts_with('/') && p.ends_with('/') {
                    any |= self.insert(word.trim(), p);
                }
            }
            if !any {
                self.skipped += 1;
            }
        }
    }

    /// Number of dictionary lines skipped as malformed.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn word_count(&self) -> usize {
        self.word_keys.len()
    }

    /// Normalized pronunciation keys of `word`.
    pub fn pronunciations(&self, word: &str) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .word_keys
            .get(word)
            .map(|ids| ids.iter().map(|&k| self.key_strings[k as usize].as_str()).collect())
            .unwrap_or_default();
        out.sort_unstable();
        out
    }

    /// For every word id of `wl`, the sorted ids of its homophones in `wl`.
    /// Computed by grouping on pronunciation keys.
    pub fn homophone_ids(&self, wl: &WordList) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); wl.len()];
        for group in &self.key_words {
            let ids: Vec<u32> = group.iter().filter_map(|w| wl.id_of(w)).collect();
            if ids.len() < 2 {
                continue;
            }
            for &a in &ids {
                out[a as usize].extend(ids.iter().copied().filter(|&b| b != a));
            }
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        out
    }
}

/// Loads and merges several phonetic dictionaries.
pub fn load_phonetic<P: AsRef<Path>>(paths: &[P]) -> Result<PhoneticIndex> {
    let mut idx = PhoneticIndex::new();
    for p in paths {
        idx.add_file(p.as_ref())?;
    }
    if idx.skipped > 0 {
        log::warn!("skipped {} malformed phonetic entries", idx.skipped);
    }
    Ok(idx)
}

/// Homophones `C_h(w)`: words of `wl` other than `word` sharing at least one
/// normalized pronunciation with it. Unknown words have none.
pub fn homophones(word: &str, idx: &PhoneticIndex, wl: &WordList) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if let Some(keys) = idx.word_keys.get(word) {
        for &k in keys {
            for other in &idx.key_words[k as usize] {
                if other != word && wl.contains(other) {
                    out.insert(other.clone());
                }
            }
        }
    }
    out
}

/// Reference data paths relative to a data directory.
#[derive(Debug, Clone)]
pub struct DataPaths {
    pub corpus: PathBuf,
    pub variants: Option<PathBuf>,
    pub phonetic: Vec<PathBuf>,
}

impl DataPaths {
    /// Layout of the bundled `data/` directory.
    pub fn bundled(data_dir: &Path) -> Self {
        DataPaths {
            corpus: data_dir.join("subtlex_us.tsv"),
            variants: Some(data_dir.join("variants.tsv")),
            phonetic: vec![data_dir.join("ipa/en_US.txt"), data_dir.join("ipa/en_UK.txt")],
        }
    }

    pub fn load_wordlist(&self) -> Result<WordList> {
        load_wordlist(&self.corpus, self.variants.as_deref())
    }

    pub fn load_phonetic(&self) -> Result<PhoneticIndex> {
        load_phonetic(&self.phonetic)
    }
}
