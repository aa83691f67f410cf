//! Index shifts that land close to the original congruence value.
//!
//! Moving `n` by `dn` moves `m` by `a dn mod M`. When that is small, the two
//! boxes share most of their word triple.

use serde::Serialize;

use crate::codec::BandConfig;
use crate::exec::Exec;

const SCAN_CHUNK: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DeltaRow {
    /// `min(dm, M - dm)`.
    pub distance: u64,
    pub delta_n: u64,
    /// `a dn mod M`.
    pub delta_m: u64,
}

pub fn delta_m_scan(cfg: &BandConfig, max_dn: u64, threshold: u64) -> Vec<DeltaRow> {
    delta_m_scan_with(cfg, max_dn, threshold, Exec::default())
}

/// Every `dn` in `0..=max_dn` with `min(dm, M - dm) < threshold`, sorted by
/// that distance and then by `dn`.
pub fn delta_m_scan_with(cfg: &BandConfig, max_dn: u64, threshold: u64, exec: Exec) -> Vec<DeltaRow> {
    let (a, modulus) = (cfg.multiplier % cfg.modulus, cfg.modulus);
    let total = usize::try_from(max_dn).expect("scan range fits in memory") + 1;
    let parts = exec.map_chunks(total, SCAN_CHUNK, |range| {
        let mut out = Vec::new();
        let mut dm = ((a as u128 * range.start as u128) % modulus as u128) as u64;
        for dn in range {
            let distance = dm.min(modulus - dm);
            if distance < threshold {
                out.push(DeltaRow { distance, delta_n: dn as u64, delta_m: dm });
            }
            // dm + a without overflowing: both are below M.
            dm = if dm >= modulus - a { dm - (modulus - a) } else { dm + a };
        }
        out
    });
    let mut rows: Vec<DeltaRow> = parts.into_iter().flatten().collect();
    rows.sort_unstable();
    rows
}
