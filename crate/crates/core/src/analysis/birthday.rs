//! Probability that a disc of addresses contains at least one confusable
//! pair, treated as a birthday problem.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box edge used to turn a radius into an address count.
pub const DEFAULT_GRID_M: f64 = 3.0;
/// Largest address count the exact product will iterate over.
pub const MAX_EXACT_ADDRESSES: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthdayParams {
    /// Mean confusions per address.
    pub c: f64,
    /// Total address count.
    pub total: f64,
    /// Disc radius in meters.
    pub radius_m: f64,
    /// Grid size in meters.
    pub grid_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Approx,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
        })
    }
}

impl BirthdayParams {
    pub fn new(c: f64, total: f64, radius_m: f64) -> Result<Self> {
        Self::with_grid(c, total, radius_m, DEFAULT_GRID_M)
    }

    pub fn with_grid(c: f64, total: f64, radius_m: f64, grid_m: f64) -> Result<Self> {
        let p = BirthdayParams { c, total, radius_m, grid_m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("T", self.total), ("r", self.radius_m), ("d", self.grid_m)] {
            if v.is_nan() || v <= 0.0 || v.is_infinite() {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `a(r) = pi (r/d)^2`.
    pub fn addresses(&self) -> f64 {
        PI * (self.radius_m / self.grid_m).powi(2)
    }
}

pub fn birthday_probability(p: &BirthdayParams, method: Method) -> Result<f64> {
    p.validate()?;
    match method {
        Method::Approx => {
            let a = p.addresses();
            if a <= 1.0 {
                return Ok(0.0);
            }
            Ok(-(-p.c * a * a / (2.0 * p.total)).exp_m1())
        }
        Method::Exact => {
            // The product runs over whole addresses.
            let a = p.addresses().floor();
            if a <= 1.0 {
                return Ok(0.0);
            }
            if a > MAX_EXACT_ADDRESSES as f64 {
                return Err(Error::Domain(format!("a(r) = {a:.3e} exceeds the exact-product limit")));
            }
            if p.c * (a - 1.0) >= p.total {
                return Err(Error::Domain(format!(
                    "c (a(r) - 1) = {:.3e} must stay below T = {:.3e}",
                    p.c * (a - 1.0),
                    p.total
                )));
            }
            let step = p.c / p.total;
            let log_none: f64 = (1..a as u64).map(|k| (-(k as f64) * step).ln_1p()).sum();
            Ok(-log_none.exp_m1())
        }
    }
}
