//! Two-level lat/lon grid: 4320 x 8640 cells of 1/24 degree, each split into
//! 1546 latitude rows and a latitude-dependent number of longitude columns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of cell rows (latitude).
pub const CELL_ROWS: u32 = 4320;
/// Number of cell columns (longitude).
pub const CELL_COLS: u32 = 8640;
/// Cells per degree in both directions.
pub const CELLS_PER_DEGREE: f64 = 24.0;
/// Latitude rows of boxes inside every cell; also the widest box row count.
pub const BOX_ROWS: u32 = 1546;
/// Spherical earth radius used for distances.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A geodesic coordinate in degrees, `lat` in [-90, 90) and `lon` in [-180, 180).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        // Negated comparisons so NaN is rejected too.
        if !(-90.0..90.0).contains(&lat) {
            return Err(Error::range("latitude", lat));
        }
        if !(-180.0..180.0).contains(&lon) {
            return Err(Error::range("longitude", lon));
        }
        Ok(GeoPoint { lat, lon })
    }
}

/// Integer grid coordinates of one box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoxAddress {
    /// Cell column `X` in [0, 8640).
    pub cell_x: u32,
    /// Cell row `Y` in [0, 4320).
    pub cell_y: u32,
    /// Box column in [0, W(Y)).
    pub x: u32,
    /// Box row in [0, 1546).
    pub y: u32,
}

impl BoxAddress {
    pub fn new(cell_x: u32, cell_y: u32, x: u32, y: u32) -> Result<Self> {
        let b = BoxAddress { cell_x, cell_y, x, y };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cell_x >= CELL_COLS {
            return Err(Error::range("cell column X", self.cell_x));
        }
        let width = band_width(self.cell_y)?;
        if self.y >= BOX_ROWS {
            return Err(Error::range("box row y", self.y));
        }
        if self.x >= width {
            return Err(Error::range("box column x", self.x));
        }
        Ok(())
    }
}

/// Number of longitude boxes `W(Y)` in every cell of row `Y`.
pub fn band_width(cell_y: u32) -> Result<u32> {
    if cell_y >= CELL_ROWS {
        return Err(Error::range("cell row Y", cell_y));
    }
    Ok(band_width_unchecked(cell_y))
}

pub(crate) fn band_width_unchecked(cell_y: u32) -> u32 {
    let lat = (cell_y as f64 + 0.5) / CELLS_PER_DEGREE - 90.0;
    let w = (BOX_ROWS as f64 * lat.to_radians().cos()).floor();
    (w as u32).max(1)
}

/// Number of boxes in one cell of row `Y`.
pub fn cell_box_count(cell_y: u32) -> Result<u64> {
    Ok(BOX_ROWS as u64 * band_width(cell_y)? as u64)
}

fn floor_frac(z: f64) -> (f64, f64) {
    let f = z.floor();
    (f, z - f)
}

/// Forward grid mapping. A point on a cell or box edge belongs to the higher
/// index.
pub fn latlon_to_box(p: GeoPoint) -> Result<BoxAddress> {
    let p = GeoPoint::new(p.lat, p.lon)?;
    let (yf, lat_frac) = floor_frac((p.lat + 90.0) * CELLS_PER_DEGREE);
    let (xf, lon_frac) = floor_frac((p.lon + 180.0) * CELLS_PER_DEGREE);
    // lon/lat within an ulp of the open upper bound can round onto it; such
    // points belong to the last box.
    let (cell_y, lat_frac) = if yf as u32 >= CELL_ROWS { (CELL_ROWS - 1, 1.0) } else { (yf as u32, lat_frac) };
    let (cell_x, lon_frac) = if xf as u32 >= CELL_COLS { (CELL_COLS - 1, 1.0) } else { (xf as u32, lon_frac) };
    let width = band_width_unchecked(cell_y);
    let x = ((width as f64 * lon_frac).floor() as u32).min(width - 1);
    let y = ((BOX_ROWS as f64 * lat_frac).floor() as u32).min(BOX_ROWS - 1);
    Ok(BoxAddress { cell_x, cell_y, x, y })
}

/// Inverse grid mapping; returns the box center.
pub fn box_to_latlon(b: BoxAddress) -> Result<GeoPoint> {
    b.validate()?;
    Ok(box_center(b))
}

pub(crate) fn box_center(b: BoxAddress) -> GeoPoint {
    let width = band_width_unchecked(b.cell_y) as f64;
    let lat = (b.cell_y as f64 + (b.y as f64 + 0.5) / BOX_ROWS as f64) / CELLS_PER_DEGREE - 90.0;
    let lon = (b.cell_x as f64 + (b.x as f64 + 0.5) / width) / CELLS_PER_DEGREE - 180.0;
    GeoPoint { lat, lon }
}

/// Haversine distance between two points on the spherical earth.
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Distance between the centers of two boxes in meters.
pub fn box_distance_m(a: BoxAddress, b: BoxAddress) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    if a == b {
        return Ok(0.0);
    }
    Ok(haversine_m(box_center(a), box_center(b)))
}
