//! The index pipeline between boxes and word triples:
//!
//! ```text
//! box (X, Y, x, y) -> n = q + 1546 x + y -> m = (c + a n) mod M -> (i, j, k) -> words
//! ```
//!
//! and its exact inverse. All arithmetic is integer; products are formed in
//! 128 bits.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, BoxAddress, GeoPoint, BOX_ROWS};
use crate::lexicon::WordList;

/// Congruence constants of one band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandConfig {
    pub band: u32,
    pub multiplier: u64,
    pub offset: u64,
    pub modulus: u64,
    pub words_per_band: u32,
    inverse: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

impl BandConfig {
    pub fn new(band: u32, multiplier: u64, offset: u64, modulus: u64, words_per_band: u32) -> Result<Self> {
        if words_per_band == 0 {
            return Err(Error::Config("words per band must be positive".into()));
        }
        if multiplier == 0 || modulus == 0 {
            return Err(Error::Config(format!("band {band}: multiplier and modulus must be positive")));
        }
        if offset >= modulus {
            return Err(Error::Config(format!("band {band}: offset {offset} must be below modulus {modulus}")));
        }
        if band == 0 && offset != 0 {
            return Err(Error::Config("band 0 must have offset 0".into()));
        }
        if gcd(multiplier, modulus) != 1 {
            return Err(Error::Config(format!(
                "band {band}: multiplier {multiplier} is not invertible modulo {modulus}"
            )));
        }
        let inverse = mod_inverse(multiplier, modulus).expect("coprime");
        Ok(BandConfig { band, multiplier, offset, modulus, words_per_band, inverse })
    }

    /// Band with the default modulus `K^3`.
    pub fn with_cube_modulus(band: u32, multiplier: u64, offset: u64, words_per_band: u32) -> Result<Self> {
        Self::new(band, multiplier, offset, cube(words_per_band as u64), words_per_band)
    }

    /// `K^3`, the number of index triples the band vocabulary can spell.
    pub fn triple_count(&self) -> u64 {
        cube(self.words_per_band as u64)
    }

    pub fn multiplier_inverse(&self) -> u64 {
        self.inverse
    }
}

fn cube(k: u64) -> u64 {
    k.checked_pow(3).expect("K^3 overflows u64")
}

/// `m = (c + a n) mod M`.
pub fn congruence_forward(n: u64, cfg: &BandConfig) -> u64 {
    let m = cfg.modulus as u128;
    ((cfg.offset as u128 + (cfg.multiplier as u128 % m) * (n as u128 % m)) % m) as u64
}

/// The least non-negative `n` with `congruence_forward(n) == m`.
pub fn congruence_inverse(m: u64, cfg: &BandConfig) -> Result<u64> {
    if m >= cfg.modulus {
        return Err(Error::range("congruence value m", m));
    }
    let modulus = cfg.modulus as u128;
    let shifted = (m as u128 + modulus - cfg.offset as u128) % modulus;
    Ok((shifted * cfg.inverse as u128 % modulus) as u64)
}

/// `floor(m^(1/3))` by integer Newton iteration with a final correction.
pub fn integer_cube_root(m: u64) -> u64 {
    if m < 8 {
        return (m > 0) as u64;
    }
    let bits = 64 - m.leading_zeros();
    // 2^ceil(bits/3) is at least the cube root, so the iteration descends.
    let mut x: u64 = 1 << bits.div_ceil(3);
    loop {
        let next = (2 * x + m / (x * x)) / 3;
        if next >= x {
            break;
        }
        x = next;
    }
    let c = |v: u64| (v as u128).pow(3);
    while c(x) > m as u128 {
        x -= 1;
    }
    while c(x + 1) <= m as u128 {
        x += 1;
    }
    x
}

/// Word indices of one address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexTriple {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl IndexTriple {
    pub fn new(i: u32, j: u32, k: u32) -> Self {
        IndexTriple { i, j, k }
    }

    /// `max(i, j, k)`, the cube shell holding the triple.
    pub fn shell(&self) -> u32 {
        self.i.max(self.j).max(self.k)
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.i, self.j, self.k]
    }
}

/// Cube-shell factorization. With `l = floor(m^(1/3))` and `t = m - l^3`,
/// shell `l` is walked face by face: first the `(l+1)^2` triples with `i = l`,
/// then the `l(l+1)` with `j = l, i < l`, then the `l^2` with `k = l, i, j < l`.
pub fn factor_m(m: u64) -> IndexTriple {
    let l = integer_cube_root(m);
    let t = m - l * l * l;
    let side = l + 1;
    let (i, j, k) = if t < side * side {
        (l, t / side, t % side)
    } else {
        let t = t - side * side;
        if t < l * side {
            (t / side, l, t % side)
        } else {
            let t = t - l * side;
            (t / l, t % l, l)
        }
    };
    IndexTriple::new(i as u32, j as u32, k as u32)
}

/// Inverse of [`factor_m`].
pub fn unfactor(t: IndexTriple) -> u64 {
    let (i, j, k) = (t.i as u64, t.j as u64, t.k as u64);
    let l = i.max(j).max(k);
    let side = l + 1;
    let base = l * l * l;
    if i == l {
        base + side * j + k
    } else if j == l {
        base + side * side + side * i + k
    } else {
        base + side * side + l * side + l * i + j
    }
}

/// Three words `u.v.w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordTriple(pub [String; 3]);

impl WordTriple {
    pub fn new(u: impl Into<String>, v: impl Into<String>, w: impl Into<String>) -> Self {
        WordTriple([u.into(), v.into(), w.into()])
    }

    pub fn words(&self) -> &[String; 3] {
        &self.0
    }
}

impl fmt::Display for WordTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for WordTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("///");
        let parts: Vec<&str> = s.split('.').collect();
        match parts.as_slice() {
            [u, v, w] if !u.is_empty() && !v.is_empty() && !w.is_empty() => Ok(WordTriple::new(*u, *v, *w)),
            _ => Err(Error::Validation(format!("`{s}` is not a three-word address u.v.w"))),
        }
    }
}

/// Looks up the band vocabulary for each index.
pub fn indices_to_words(t: IndexTriple, band: u32, k: u32, wl: &WordList) -> Result<WordTriple> {
    let vocab = wl.band(band, k)?;
    let pick = |idx: u32| {
        vocab.get(idx as usize).cloned().ok_or_else(|| Error::Codec(format!("word index {idx} exceeds band size {k}")))
    };
    Ok(WordTriple([pick(t.i)?, pick(t.j)?, pick(t.k)?]))
}

/// Positions of each word in the band vocabulary.
pub fn words_to_indices(s: &WordTriple, band: u32, k: u32, wl: &WordList) -> Result<IndexTriple> {
    wl.band(band, k)?;
    let start = band as u64 * k as u64;
    let mut idx = [0u32; 3];
    for (slot, word) in s.0.iter().enumerate() {
        let id = wl.id_of(word).ok_or_else(|| Error::UnknownWord { word: word.clone() })? as u64;
        if id < start || id >= start + k as u64 {
            return Err(Error::AddressNotFound(format!("word `{word}` is not in band {band}")));
        }
        idx[slot] = (id - start) as u32;
    }
    Ok(IndexTriple::new(idx[0], idx[1], idx[2]))
}

/// One cell of a layout: its offset `q` and band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub cell_x: u32,
    pub cell_y: u32,
    pub q: u64,
    pub band: u32,
}

impl CellEntry {
    /// Number of boxes, `1546 * W(Y)`.
    pub fn size(&self) -> u64 {
        BOX_ROWS as u64 * grid::band_width_unchecked(self.cell_y) as u64
    }
}

/// Assignment of offsets and bands to cells, in listing order.
#[derive(Debug, Clone, Default)]
pub struct CellLayout {
    cells: Vec<CellEntry>,
    by_coord: HashMap<(u32, u32), usize>,
}

impl CellLayout {
    pub fn new(cells: Vec<CellEntry>) -> Result<Self> {
        let mut by_coord = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            BoxAddress::new(c.cell_x, c.cell_y, 0, 0)?;
            if by_coord.insert((c.cell_x, c.cell_y), i).is_some() {
                return Err(Error::Config(format!("cell ({}, {}) listed twice", c.cell_x, c.cell_y)));
            }
        }
        Ok(CellLayout { cells, by_coord })
    }

    /// `count` adjacent cells along row `cell_y` starting at column `first_x`,
    /// with `q = ordinal * 1546 * W(Y)`.
    pub fn row_run(cell_y: u32, first_x: u32, count: u32, band: u32) -> Result<Self> {
        let size = grid::cell_box_count(cell_y)?;
        let cells = (0..count).map(|i| CellEntry { cell_x: first_x + i, cell_y, q: i as u64 * size, band }).collect();
        Self::new(cells)
    }

    pub fn cells(&self) -> &[CellEntry] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, cell_x: u32, cell_y: u32) -> Option<&CellEntry> {
        self.by_coord.get(&(cell_x, cell_y)).map(|&i| &self.cells[i])
    }

    /// Total number of boxes over all cells.
    pub fn box_count(&self) -> u64 {
        self.cells.iter().map(CellEntry::size).sum()
    }
}

/// `n = q + 1546 x + y`.
pub fn box_to_n(b: BoxAddress, layout: &CellLayout) -> Result<u64> {
    b.validate()?;
    let cell = layout
        .get(b.cell_x, b.cell_y)
        .ok_or_else(|| Error::Config(format!("cell ({}, {}) is not in the layout", b.cell_x, b.cell_y)))?;
    Ok(cell.q + BOX_ROWS as u64 * b.x as u64 + b.y as u64)
}

/// Band constants plus cell layout: everything needed to run the pipeline
/// except the word list.
#[derive(Debug, Clone)]
pub struct Codec {
    words_per_band: u32,
    bands: Vec<BandConfig>,
    layout: CellLayout,
}

impl Codec {
    pub fn new(words_per_band: u32, bands: Vec<BandConfig>, layout: CellLayout) -> Result<Self> {
        let mut sorted = bands;
        sorted.sort_by_key(|b| b.band);
        for (i, b) in sorted.iter().enumerate() {
            if b.band as usize != i {
                return Err(Error::Config(format!("bands must be numbered 0..{} without gaps", sorted.len())));
            }
            if b.words_per_band != words_per_band {
                return Err(Error::Config(format!(
                    "band {} has K={} but the codec uses K={words_per_band}",
                    b.band, b.words_per_band
                )));
            }
        }
        for c in layout.cells() {
            if c.band as usize >= sorted.len() {
                return Err(Error::Config(format!(
                    "cell ({}, {}) refers to undefined band {}",
                    c.cell_x, c.cell_y, c.band
                )));
            }
        }
        Ok(Codec { words_per_band, bands: sorted, layout })
    }

    pub fn words_per_band(&self) -> u32 {
        self.words_per_band
    }

    pub fn bands(&self) -> &[BandConfig] {
        &self.bands
    }

    pub fn band(&self, band: u32) -> Result<&BandConfig> {
        self.bands.get(band as usize).ok_or_else(|| Error::Config(format!("undefined band {band}")))
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    /// Checks that, within each band, cell index ranges `[q, q + size)` are
    /// disjoint and below the modulus, so every box has a distinct `m`.
    pub fn check_invertible(&self) -> Result<()> {
        for band in &self.bands {
            let mut ranges: Vec<(u64, u64, &CellEntry)> =
                self.layout.cells().iter().filter(|c| c.band == band.band).map(|c| (c.q, c.q + c.size(), c)).collect();
            ranges.sort_unstable_by_key(|r| r.0);
            for w in ranges.windows(2) {
                if w[1].0 < w[0].1 {
                    return Err(Error::Config(format!(
                        "cells ({}, {}) and ({}, {}) overlap in index space",
                        w[0].2.cell_x, w[0].2.cell_y, w[1].2.cell_x, w[1].2.cell_y
                    )));
                }
            }
            if let Some(last) = ranges.last() {
                if last.1 > band.modulus {
                    return Err(Error::Config(format!(
                        "band {} index space ends at {} beyond modulus {}",
                        band.band, last.1, band.modulus
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Intermediate values of one encoding, for diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct EncodeTrace {
    pub box_address: BoxAddress,
    pub band: u32,
    pub n: u64,
    pub m: u64,
    pub indices: IndexTriple,
    pub words: WordTriple,
}

/// End-to-end geocoder over a validated codec and a word list.
#[derive(Debug, Clone)]
pub struct Geocoder<'w> {
    codec: Codec,
    words: &'w WordList,
    /// Per band: `(q, cell index)` sorted by `q`.
    by_offset: Vec<Vec<(u64, usize)>>,
}

impl<'w> Geocoder<'w> {
    pub fn new(codec: Codec, words: &'w WordList) -> Result<Self> {
        codec.check_invertible()?;
        for b in codec.bands() {
            words.band(b.band, codec.words_per_band)?;
        }
        let mut by_offset = vec![Vec::new(); codec.bands.len()];
        for (i, c) in codec.layout.cells().iter().enumerate() {
            by_offset[c.band as usize].push((c.q, i));
        }
        for v in &mut by_offset {
            v.sort_unstable();
        }
        Ok(Geocoder { codec, words, by_offset })
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn encode_trace(&self, p: GeoPoint) -> Result<EncodeTrace> {
        let b = grid::latlon_to_box(p)?;
        let cell = self.codec.layout.get(b.cell_x, b.cell_y).ok_or_else(|| {
            Error::AddressNotFound(format!("cell ({}, {}) is not in the configured layout", b.cell_x, b.cell_y))
        })?;
        let cfg = self.codec.band(cell.band)?;
        let n = box_to_n(b, &self.codec.layout)?;
        let m = congruence_forward(n, cfg);
        if m >= cfg.triple_count() {
            return Err(Error::Codec(format!(
                "m = {m} is beyond the K^3 = {} triples of band {}",
                cfg.triple_count(),
                cfg.band
            )));
        }
        let indices = factor_m(m);
        let words = indices_to_words(indices, cell.band, self.codec.words_per_band, self.words)?;
        Ok(EncodeTrace { box_address: b, band: cell.band, n, m, indices, words })
    }

    pub fn reverse_geocode(&self, p: GeoPoint) -> Result<WordTriple> {
        Ok(self.encode_trace(p)?.words)
    }

    /// Resolves a word triple to its box.
    pub fn locate(&self, s: &WordTriple) -> Result<BoxAddress> {
        let k = self.codec.words_per_band;
        let first = self.words.id_of(&s.0[0]).ok_or_else(|| Error::UnknownWord { word: s.0[0].clone() })?;
        let band = first / k;
        let cfg = self
            .codec
            .band(band)
            .map_err(|_| Error::AddressNotFound(format!("`{}` is not in any configured band", s.0[0])))?;
        let indices = words_to_indices(s, band, k, self.words)?;
        let m = unfactor(indices);
        if m >= cfg.modulus {
            return Err(Error::AddressNotFound(format!("{s} is not assigned to any box")));
        }
        let n = congruence_inverse(m, cfg)?;
        let cells = &self.by_offset[band as usize];
        let pos = cells.partition_point(|&(q, _)| q <= n);
        let not_found = || Error::AddressNotFound(format!("{s} (n = {n}) is outside the configured cells"));
        let (q, ci) = *cells.get(pos.wrapping_sub(1)).ok_or_else(not_found)?;
        let cell = &self.codec.layout.cells()[ci];
        let local = n - q;
        if local >= cell.size() {
            return Err(not_found());
        }
        Ok(BoxAddress {
            cell_x: cell.cell_x,
            cell_y: cell.cell_y,
            x: (local / BOX_ROWS as u64) as u32,
            y: (local % BOX_ROWS as u64) as u32,
        })
    }

    /// Word triple to box-center coordinates.
    pub fn geocode(&self, s: &WordTriple) -> Result<GeoPoint> {
        grid::box_to_latlon(self.locate(s)?)
    }
}
