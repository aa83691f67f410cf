//! Exhaustive address simulation over a few cells and detection of
//! confusable address pairs that actually exist on the ground.

use serde::Serialize;

use crate::codec::{congruence_forward, factor_m, CellEntry, Codec, IndexTriple, WordTriple};
use crate::confusion::{ConfusionIndex, ConfusionMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{self, BoxAddress, BOX_ROWS};
use crate::lexicon::WordList;

/// One simulated address, packed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    /// `band * K^3 + (i K + j) K + k`.
    code: u64,
    cell: u32,
    x: u16,
    y: u16,
}

/// Every address of the simulated cells, searchable by word-index triple.
#[derive(Debug, Clone)]
pub struct AddressIndex {
    k: u32,
    cells: Vec<CellEntry>,
    entries: Vec<Entry>,
    overflow: u64,
    duplicates: u64,
}

impl AddressIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words_per_band(&self) -> u32 {
        self.k
    }

    /// Boxes skipped because `m >= K^3` has no word triple.
    pub fn overflow_count(&self) -> u64 {
        self.overflow
    }

    /// Entries whose word triple already belongs to another box.
    pub fn duplicate_count(&self) -> u64 {
        self.duplicates
    }

    fn code(&self, band: u32, t: IndexTriple) -> u64 {
        let k = self.k as u64;
        band as u64 * k * k * k + (t.i as u64 * k + t.j as u64) * k + t.k as u64
    }

    fn decode(&self, code: u64) -> (u32, IndexTriple) {
        let k = self.k as u64;
        let band = code / (k * k * k);
        let r = code % (k * k * k);
        (band as u32, IndexTriple::new((r / (k * k)) as u32, (r / k % k) as u32, (r % k) as u32))
    }

    fn box_of(&self, e: &Entry) -> BoxAddress {
        let c = &self.cells[e.cell as usize];
        BoxAddress { cell_x: c.cell_x, cell_y: c.cell_y, x: e.x as u32, y: e.y as u32 }
    }

    fn range_of(&self, code: u64) -> std::ops::Range<usize> {
        let lo = self.entries.partition_point(|e| e.code < code);
        let hi = lo + self.entries[lo..].partition_point(|e| e.code == code);
        lo..hi
    }

    /// Boxes carrying the index triple `t` in band `band`.
    pub fn lookup(&self, band: u32, t: IndexTriple) -> Vec<BoxAddress> {
        self.range_of(self.code(band, t)).map(|i| self.box_of(&self.entries[i])).collect()
    }

    /// Every `(box, band, triple)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (BoxAddress, u32, IndexTriple)> + '_ {
        self.entries.iter().map(|e| {
            let (band, t) = self.decode(e.code);
            (self.box_of(e), band, t)
        })
    }
}

pub fn simulate_cells(codec: &Codec) -> Result<AddressIndex> {
    simulate_cells_with(codec, Exec::default())
}

/// Runs the forward pipeline for every box of every cell in the layout.
/// Boxes whose `m` exceeds `K^3` are tallied, not indexed.
pub fn simulate_cells_with(codec: &Codec, exec: Exec) -> Result<AddressIndex> {
    let k = codec.words_per_band() as u64;
    let cells: Vec<CellEntry> = codec.layout().cells().to_vec();
    if (codec.bands().len() as u64).checked_mul(k * k * k).is_none() {
        return Err(Error::Config("band count times K^3 overflows".into()));
    }
    // One work item per (cell, column).
    let mut columns = Vec::new();
    for (ci, c) in cells.iter().enumerate() {
        for x in 0..grid::band_width_unchecked(c.cell_y) {
            columns.push((ci as u32, x));
        }
    }
    let chunks = exec.map_slice(&columns, |&(ci, x)| -> Result<(Vec<Entry>, u64)> {
        let cell = &cells[ci as usize];
        let cfg = codec.band(cell.band)?;
        let triples = cfg.triple_count();
        let band_base = cell.band as u64 * k * k * k;
        let mut out = Vec::with_capacity(BOX_ROWS as usize);
        let mut overflow = 0;
        for y in 0..BOX_ROWS {
            let n = cell.q + BOX_ROWS as u64 * x as u64 + y as u64;
            let m = congruence_forward(n, cfg);
            if m >= triples {
                overflow += 1;
                continue;
            }
            let t = factor_m(m);
            out.push(Entry {
                code: band_base + (t.i as u64 * k + t.j as u64) * k + t.k as u64,
                cell: ci,
                x: x as u16,
                y: y as u16,
            });
        }
        Ok((out, overflow))
    });
    let mut entries = Vec::with_capacity(codec.layout().box_count() as usize);
    let mut overflow = 0;
    for chunk in chunks {
        let (e, o) = chunk?;
        entries.extend(e);
        overflow += o;
    }
    exec.sort_unstable(&mut entries);
    let duplicates = entries.windows(2).filter(|w| w[0].code == w[1].code).count() as u64;
    if duplicates > 0 {
        log::warn!("{duplicates} simulated boxes repeat an existing word triple");
    }
    Ok(AddressIndex { k: codec.words_per_band(), cells, entries, overflow, duplicates })
}

/// Which way the confusion relation holds within a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AToB,
    BToA,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEnd {
    pub words: WordTriple,
    pub box_address: BoxAddress,
}

/// Two existing addresses, at least one in the other's confusion set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub a: PairEnd,
    pub b: PairEnd,
    pub distance_m: f64,
    /// Slot-aligned identical words, 0..=2.
    pub shared_words: u8,
    pub direction: Direction,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub mode: ConfusionMode,
    pub addresses: usize,
    pub overflow: u64,
    pub duplicate_triples: u64,
    /// Sorted by `(a.box_address, b.box_address)`, `a` the smaller box.
    pub pairs: Vec<PairRecord>,
}

/// Global word ids of a triple in band `band`.
fn global_ids(band: u32, k: u32, t: IndexTriple) -> [u32; 3] {
    t.as_array().map(|i| band * k + i)
}

/// Whether `to` is in the mode-`mode` confusion set of `from` (global ids).
pub(crate) fn relates(conf: &ConfusionIndex, from: [u32; 3], to: [u32; 3], mode: ConfusionMode) -> bool {
    let differing = (0..3).filter(|&s| from[s] != to[s]).count();
    let ok = (0..3).all(|s| conf.confusable(from[s], to[s]));
    ok && match mode {
        ConfusionMode::Pi => differing >= 1,
        ConfusionMode::Sigma => differing == 1,
    }
}

pub fn find_confusable_pairs(
    addr: &AddressIndex,
    conf: &ConfusionIndex,
    wl: &WordList,
    mode: ConfusionMode,
) -> Result<PairReport> {
    find_confusable_pairs_with(addr, conf, wl, mode, Exec::default())
}

/// Probes the address index with the confusion set of every address and
/// keeps each unordered pair found once.
pub fn find_confusable_pairs_with(
    addr: &AddressIndex,
    conf: &ConfusionIndex,
    wl: &WordList,
    mode: ConfusionMode,
    exec: Exec,
) -> Result<PairReport> {
    let k = addr.k;
    let band_count = addr.cells.iter().map(|c| c.band + 1).max().unwrap_or(0);
    if (band_count as usize) * (k as usize) > conf.len() || conf.len() != wl.len() {
        return Err(Error::Config(format!(
            "confusion index covers {} words but {} bands of {k} are simulated",
            conf.len(),
            band_count
        )));
    }
    let n = addr.entries.len();
    let found = exec.map_chunks(n, 1 << 14, |range| {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for ei in range {
            let e = &addr.entries[ei];
            let (band, t) = addr.decode(e.code);
            let src = global_ids(band, k, t);
            let mut probe = |cand: [u32; 3]| {
                if cand == src {
                    return;
                }
                let cb = cand[0] / k;
                if cand[1] / k != cb || cand[2] / k != cb {
                    return;
                }
                let code = addr.code(cb, IndexTriple::new(cand[0] % k, cand[1] % k, cand[2] % k));
                for oi in addr.range_of(code) {
                    let (lo, hi) = if oi < ei { (oi, ei) } else { (ei, oi) };
                    pairs.push((lo as u32, hi as u32));
                }
            };
            let options = src.map(|w| std::iter::once(w).chain(conf.neighbors(w).iter().copied()));
            match mode {
                ConfusionMode::Pi => {
                    for u in options[0].clone() {
                        for v in options[1].clone() {
                            for w in options[2].clone() {
                                probe([u, v, w]);
                            }
                        }
                    }
                }
                ConfusionMode::Sigma => {
                    for slot in 0..3 {
                        for &alt in conf.neighbors(src[slot]) {
                            let mut cand = src;
                            cand[slot] = alt;
                            probe(cand);
                        }
                    }
                }
            }
        }
        pairs
    });
    let mut pairs: Vec<(u32, u32)> = found.into_iter().flatten().collect();
    exec.sort_unstable(&mut pairs);
    pairs.dedup();

    let mut records = exec.map_slice(&pairs, |&(ia, ib)| {
        let (ea, eb) = (&addr.entries[ia as usize], &addr.entries[ib as usize]);
        let (band_a, ta) = addr.decode(ea.code);
        let (band_b, tb) = addr.decode(eb.code);
        let (ga, gb) = (global_ids(band_a, k, ta), global_ids(band_b, k, tb));
        let direction = match (relates(conf, ga, gb, mode), relates(conf, gb, ga, mode)) {
            (true, true) => Direction::Both,
            (true, false) => Direction::AToB,
            (false, true) => Direction::BToA,
            (false, false) => unreachable!("probe found a pair without a relation"),
        };
        let words = |g: [u32; 3]| WordTriple(g.map(|id| wl.word(id).to_owned()));
        let mut rec = PairRecord {
            a: PairEnd { words: words(ga), box_address: addr.box_of(ea) },
            b: PairEnd { words: words(gb), box_address: addr.box_of(eb) },
            distance_m: 0.0,
            shared_words: (0..3).filter(|&s| ga[s] == gb[s]).count() as u8,
            direction,
        };
        if rec.b.box_address < rec.a.box_address {
            std::mem::swap(&mut rec.a, &mut rec.b);
            rec.direction = match rec.direction {
                Direction::AToB => Direction::BToA,
                Direction::BToA => Direction::AToB,
                Direction::Both => Direction::Both,
            };
        }
        rec.distance_m = grid::haversine_m(grid::box_center(rec.a.box_address), grid::box_center(rec.b.box_address));
        rec
    });
    records.sort_by_key(|r| (r.a.box_address, r.b.box_address));
    Ok(PairReport { mode, addresses: n, overflow: addr.overflow, duplicate_triples: addr.duplicates, pairs: records })
}

/// Pair counts per distance bin, split by shared-word count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceHistogram {
    pub bin_m: f64,
    /// `counts[bin][shared_words]`.
    pub counts: Vec<[u64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub bin_low_m: f64,
    pub bin_high_m: f64,
    pub count: u64,
    pub shared_words: u8,
}

impl DistanceHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Lower edge of the bin with the most pairs (first on ties).
    pub fn modal_bin_low_m(&self) -> Option<f64> {
        let mut best: Option<(usize, u64)> = None;
        for (i, c) in self.counts.iter().enumerate() {
            let t: u64 = c.iter().sum();
            if t > 0 && best.is_none_or(|(_, b)| t > b) {
                best = Some((i, t));
            }
        }
        best.map(|(i, _)| i as f64 * self.bin_m)
    }

    /// One row per bin and shared-word count, zeros included.
    pub fn rows(&self) -> Vec<HistogramRow> {
        let mut out = Vec::with_capacity(self.counts.len() * 3);
        for (i, c) in self.counts.iter().enumerate() {
            for (ne, &count) in c.iter().enumerate() {
                out.push(HistogramRow {
                    bin_low_m: i as f64 * self.bin_m,
                    bin_high_m: (i + 1) as f64 * self.bin_m,
                    count,
                    shared_words: ne as u8,
                });
            }
        }
        out
    }
}

pub fn pair_histograms(pairs: &[PairRecord], bin_m: f64) -> Result<DistanceHistogram> {
    if bin_m.is_nan() || bin_m <= 0.0 || bin_m.is_infinite() {
        return Err(Error::Validation(format!("bin width must be positive, got {bin_m}")));
    }
    let mut counts: Vec<[u64; 3]> = Vec::new();
    for p in pairs {
        let bin = (p.distance_m / bin_m).floor() as usize;
        if counts.len() <= bin {
            counts.resize(bin + 1, [0; 3]);
        }
        counts[bin][p.shared_words.min(2) as usize] += 1;
    }
    Ok(DistanceHistogram { bin_m, counts })
}

/// Fraction of pairs with `shared` slot-aligned words.
pub fn shared_fraction<'a>(pairs: impl IntoIterator<Item = &'a PairRecord>, shared: u8) -> f64 {
    let (mut hit, mut total) = (0u64, 0u64);
    for p in pairs {
        total += 1;
        hit += (p.shared_words == shared) as u64;
    }
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}
