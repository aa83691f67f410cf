//! Codec configuration file.
//!
//! ```toml
//! words_per_band = 2715          # K
//! band_count = 1                 # N_b, optional; checked against [[band]]
//!
//! [[band]]
//! id = 0
//! multiplier = 3639313           # a_b
//! offset = 0                     # c_b
//! modulus = 20000000000          # optional, defaults to K^3
//!
//! [[cell]]                       # explicit cell; q optional
//! x = 4316
//! y = 3396
//! q = 0
//! band = 0
//!
//! [[block]]                      # inclusive rectangle of cells, row-major
//! x = [4310, 4321]
//! y = [3393, 3399]
//! band = 0
//! ```
//!
//! Cells without an explicit `q` are packed after the highest index range
//! already used in their band, in listing order (explicit cells first, then
//! blocks). Unknown top-level tables are ignored so the same file can carry
//! other settings.

use std::path::Path;

use serde::Deserialize;

use crate::codec::{BandConfig, CellEntry, CellLayout, Codec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
pub struct CodecFile {
    pub words_per_band: u32,
    pub band_count: Option<u32>,
    #[serde(rename = "band", default)]
    pub bands: Vec<BandEntry>,
    #[serde(rename = "cell", default)]
    pub cells: Vec<CellSpec>,
    #[serde(rename = "block", default)]
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BandEntry {
    pub id: u32,
    pub multiplier: u64,
    #[serde(default)]
    pub offset: u64,
    pub modulus: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CellSpec {
    pub x: u32,
    pub y: u32,
    pub q: Option<u64>,
    #[serde(default)]
    pub band: u32,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BlockSpec {
    pub x: [u32; 2],
    pub y: [u32; 2],
    #[serde(default)]
    pub band: u32,
}

impl CodecFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn band_configs(&self) -> Result<Vec<BandConfig>> {
        if let Some(nb) = self.band_count {
            if nb as usize != self.bands.len() {
                return Err(Error::Config(format!("band_count = {nb} but {} bands are defined", self.bands.len())));
            }
        }
        self.bands
            .iter()
            .map(|b| match b.modulus {
                Some(m) => BandConfig::new(b.id, b.multiplier, b.offset, m, self.words_per_band),
                None => BandConfig::with_cube_modulus(b.id, b.multiplier, b.offset, self.words_per_band),
            })
            .collect()
    }

    pub fn layout(&self) -> Result<CellLayout> {
        let mut specs: Vec<CellSpec> = self.cells.clone();
        for b in &self.blocks {
            if b.x[0] > b.x[1] || b.y[0] > b.y[1] {
                return Err(Error::Config(format!("empty block x={:?} y={:?}", b.x, b.y)));
            }
            for y in b.y[0]..=b.y[1] {
                for x in b.x[0]..=b.x[1] {
                    specs.push(CellSpec { x, y, q: None, band: b.band });
                }
            }
        }
        let mut next_free: std::collections::HashMap<u32, u64> = Default::default();
        let mut entries = Vec::with_capacity(specs.len());
        // First pass reserves explicit ranges so auto-placed cells go after them.
        for s in &specs {
            if let Some(q) = s.q {
                let size = crate::grid::cell_box_count(s.y)?;
                let end = next_free.entry(s.band).or_default();
                *end = (*end).max(q + size);
            }
        }
        for s in specs {
            let size = crate::grid::cell_box_count(s.y)?;
            let q = match s.q {
                Some(q) => q,
                None => {
                    let end = next_free.entry(s.band).or_default();
                    let q = *end;
                    *end += size;
                    q
                }
            };
            entries.push(CellEntry { cell_x: s.x, cell_y: s.y, q, band: s.band });
        }
        CellLayout::new(entries)
    }

    pub fn codec(&self) -> Result<Codec> {
        Codec::new(self.words_per_band, self.band_configs()?, self.layout()?)
    }
}
