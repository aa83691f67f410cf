//! Quantitative studies of address confusability, plus CSV/JSON writers for
//! their results.

pub mod birthday;
pub mod delta;
pub mod global;
pub mod local;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use birthday::{birthday_probability, BirthdayParams, Method};
pub use delta::{delta_m_scan, delta_m_scan_with, DeltaRow};
pub use global::{
    global_confusion_stats, global_confusion_stats_with, poisson_pmf, poisson_prediction, sensitivity_sweep,
    sensitivity_sweep_with, GlobalStats, SensitivityRow, MIN_SAMPLES,
};
pub use local::{
    find_confusable_pairs, find_confusable_pairs_with, pair_histograms, shared_fraction, simulate_cells,
    simulate_cells_with, AddressIndex, Direction, DistanceHistogram, HistogramRow, PairEnd, PairRecord, PairReport,
};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Serialize)]
struct ProbabilityRow {
    c: usize,
    probability: f64,
}

/// `(c, probability)` rows of a normalized histogram.
pub fn write_distribution(path: &Path, hist: &[f64]) -> Result<()> {
    write_csv(path, hist.iter().enumerate().map(|(c, &probability)| ProbabilityRow { c, probability }))
}

#[derive(Debug, Serialize)]
struct PoissonRow {
    c: usize,
    empirical: f64,
    poisson: f64,
}

/// Empirical per-word distribution next to the Poisson curve with the same mean.
pub fn write_poisson_fit(path: &Path, hist: &[f64], lambda1: f64) -> Result<()> {
    write_csv(
        path,
        hist.iter().enumerate().map(|(c, &empirical)| PoissonRow {
            c,
            empirical,
            poisson: poisson_pmf(lambda1, c as u32),
        }),
    )
}

pub fn write_distance_histogram(path: &Path, hist: &DistanceHistogram) -> Result<()> {
    write_csv(path, hist.rows())
}

#[derive(Debug, Serialize)]
struct PairCsvRow<'a> {
    address_a: String,
    cell_x_a: u32,
    cell_y_a: u32,
    x_a: u32,
    y_a: u32,
    address_b: String,
    cell_x_b: u32,
    cell_y_b: u32,
    x_b: u32,
    y_b: u32,
    distance_m: f64,
    shared_words: u8,
    direction: &'a Direction,
}

pub fn write_pairs(path: &Path, pairs: &[PairRecord]) -> Result<()> {
    write_csv(
        path,
        pairs.iter().map(|p| PairCsvRow {
            address_a: p.a.words.to_string(),
            cell_x_a: p.a.box_address.cell_x,
            cell_y_a: p.a.box_address.cell_y,
            x_a: p.a.box_address.x,
            y_a: p.a.box_address.y,
            address_b: p.b.words.to_string(),
            cell_x_b: p.b.box_address.cell_x,
            cell_y_b: p.b.box_address.cell_y,
            x_b: p.b.box_address.x,
            y_b: p.b.box_address.y,
            distance_m: p.distance_m,
            shared_words: p.shared_words,
            direction: &p.direction,
        }),
    )
}
