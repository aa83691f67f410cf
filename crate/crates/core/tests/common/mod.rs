//! A miniature world small enough to check pair detection against an
//! all-pairs scan: 200 four-letter words over `abcd`, K = 15, and two polar
//! cells of 1546 boxes each.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use w3w_core::analysis::{Direction, PairRecord};
use w3w_core::{
    build_confusion_index, common_set, BandConfig, BoxAddress, CellEntry, CellLayout, Codec, ConfusionIndex,
    ConfusionMode, PhoneticIndex, WordList,
};

pub const WORDS: usize = 200;
pub const K: u32 = 15;
pub const THRESHOLD: u64 = 1000;
pub const POLAR_ROW: u32 = 4319;
const BAND_COUNT: u32 = 8;
const MULTIPLIERS: [u64; 8] = [1024, 1031, 1037, 1043, 1049, 1051, 1061, 1063];

pub struct MiniWorld {
    pub words: Vec<String>,
    pub wl: WordList,
    pub ph: PhoneticIndex,
    pub conf: ConfusionIndex,
    /// Oracle relation on ranks: `related[a][b]` iff `b` is a confusion of `a`.
    pub related: Vec<Vec<bool>>,
}

/// Word of rank `r` has count `2000 - 9 r`; words of even rank share a
/// pronunciation with the next even rank inside blocks of three.
pub fn mini_world() -> MiniWorld {
    let mut all: Vec<String> =
        (0..256u32).map(|v| (0..4).map(|d| (b'a' + ((v >> (2 * d)) & 3) as u8) as char).collect()).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(11));
    let words: Vec<String> = all.into_iter().take(WORDS).collect();
    let wl =
        WordList::from_counts(words.iter().enumerate().map(|(r, w)| (w.clone(), 2000 - 9 * r as u64)), &[]).unwrap();
    for (r, w) in words.iter().enumerate() {
        assert_eq!(wl.word(r as u32), w);
    }
    let pron = |r: usize| if r.is_multiple_of(2) { format!("p{}", r / 3) } else { format!("u{r}") };
    let mut ph = PhoneticIndex::new();
    ph.add_text(&words.iter().enumerate().map(|(r, w)| format!("{w}\t/{}/\n", pron(r))).collect::<String>());
    let conf = build_confusion_index(&wl, &common_set(&wl, THRESHOLD), &ph);

    let common = |r: usize| 2000 - 9 * r as u64 >= THRESHOLD;
    let related = (0..WORDS)
        .map(|a| {
            (0..WORDS)
                .map(|b| a != b && common(b) && (osa_distance(&words[a], &words[b]) == 1 || pron(a) == pron(b)))
                .collect()
        })
        .collect();
    MiniWorld { words, wl, ph, conf, related }
}

/// Optimal-string-alignment edit distance.
pub fn osa_distance(a: &str, b: &str) -> usize {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = (a[i - 1] != b[j - 1]) as usize;
            let mut v = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[a.len()][b.len()]
}

pub enum Layout {
    /// Cell 0 in band 0, cell 1 in band 7.
    SplitBands,
    /// Both cells in band 0, packed back to back.
    SharedBand,
    /// Both cells in band 0 with a modulus above K^3.
    Overflowing,
}

pub fn codec(layout: Layout) -> Codec {
    let constants = |b: u32| match layout {
        Layout::Overflowing if b == 0 => (1031, 4000),
        _ => (MULTIPLIERS[b as usize], (K as u64).pow(3)),
    };
    let bands: Vec<BandConfig> = (0..BAND_COUNT)
        .map(|b| BandConfig::new(b, constants(b).0, 101 * b as u64, constants(b).1, K).unwrap())
        .collect();
    let cell = |x, q, band| CellEntry { cell_x: x, cell_y: POLAR_ROW, q, band };
    let cells = match layout {
        Layout::SplitBands => vec![cell(0, 0, 0), cell(1, 0, 7)],
        Layout::SharedBand | Layout::Overflowing => vec![cell(0, 0, 0), cell(1, 1546, 0)],
    };
    Codec::new(K, bands, CellLayout::new(cells).unwrap()).unwrap()
}

/// `m -> (i, j, k)` by walking the shells face by face.
pub fn shell_table(limit: u64) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    let mut l = 0u32;
    while (out.len() as u64) < limit {
        for j in 0..=l {
            for k in 0..=l {
                out.push([l, j, k]);
            }
        }
        for i in 0..l {
            for k in 0..=l {
                out.push([i, l, k]);
            }
        }
        for i in 0..l {
            for j in 0..l {
                out.push([i, j, l]);
            }
        }
        l += 1;
    }
    out
}

/// Every addressed box with its word ranks, computed without the codec.
pub fn oracle_addresses(codec: &Codec) -> Vec<(BoxAddress, [usize; 3])> {
    let table = shell_table((K as u64).pow(3));
    let mut out = Vec::new();
    for c in codec.layout().cells() {
        let band = &codec.bands()[c.band as usize];
        for y in 0..1546u32 {
            let n = c.q + y as u64;
            let m = ((band.offset as u128 + band.multiplier as u128 * n as u128) % band.modulus as u128) as u64;
            if m >= table.len() as u64 {
                continue;
            }
            let t = table[m as usize].map(|i| (c.band * K + i) as usize);
            out.push((BoxAddress { cell_x: c.cell_x, cell_y: c.cell_y, x: 0, y }, t));
        }
    }
    out
}

fn relates(w: &MiniWorld, from: [usize; 3], to: [usize; 3], mode: ConfusionMode) -> bool {
    let diff = (0..3).filter(|&s| from[s] != to[s]).count();
    let ok = (0..3).all(|s| from[s] == to[s] || w.related[from[s]][to[s]]);
    ok && match mode {
        ConfusionMode::Pi => diff >= 1,
        ConfusionMode::Sigma => diff == 1,
    }
}

pub type PairKey = (BoxAddress, BoxAddress, u8, &'static str);

fn dir_name(d: Direction) -> &'static str {
    match d {
        Direction::AToB => "a->b",
        Direction::BToA => "b->a",
        Direction::Both => "both",
    }
}

/// All-pairs scan over the oracle addresses.
pub fn brute_force_pairs(w: &MiniWorld, addrs: &[(BoxAddress, [usize; 3])], mode: ConfusionMode) -> BTreeSet<PairKey> {
    let mut out = BTreeSet::new();
    for (p, &(ba, ta)) in addrs.iter().enumerate() {
        for &(bb, tb) in &addrs[p + 1..] {
            let (fwd, back) = (relates(w, ta, tb, mode), relates(w, tb, ta, mode));
            if !fwd && !back {
                continue;
            }
            let shared = (0..3).filter(|&s| ta[s] == tb[s]).count() as u8;
            let (lo, hi, d) = if ba <= bb { (ba, bb, (fwd, back)) } else { (bb, ba, (back, fwd)) };
            let dir = match d {
                (true, true) => "both",
                (true, false) => "a->b",
                _ => "b->a",
            };
            out.insert((lo, hi, shared, dir));
        }
    }
    out
}

pub fn pair_keys(pairs: &[PairRecord]) -> BTreeSet<PairKey> {
    pairs.iter().map(|p| (p.a.box_address, p.b.box_address, p.shared_words, dir_name(p.direction))).collect()
}

pub fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let h = ((p2 - p1) / 2.0).sin().powi(2) + p1.cos() * p2.cos() * ((b.1 - a.1).to_radians() / 2.0).sin().powi(2);
    2.0 * 6_371_000.0 * h.sqrt().asin()
}

/// Box center from the grid definition, independent of the library.
pub fn center(b: BoxAddress) -> (f64, f64) {
    let lat = b.cell_y as f64 / 24.0 - 90.0 + (b.y as f64 + 0.5) / (1546.0 * 24.0);
    let w = (1546.0 * ((b.cell_y as f64 + 0.5) / 24.0 - 90.0).to_radians().cos()).floor().max(1.0);
    let lon = b.cell_x as f64 / 24.0 - 180.0 + (b.x as f64 + 0.5) / (w * 24.0);
    (lat, lon)
}
