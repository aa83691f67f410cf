//! Global confusion statistics over randomly drawn word triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::confusion::{address_confusion_count, build_confusion_index_with, ConfusionIndex, ConfusionMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lexicon::{common_set, PhoneticIndex, WordList, MIN_FREQUENCY};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;
const SAMPLE_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalStats {
    /// `p(c)`: fraction of words with `c` confusions.
    pub word_histogram: Vec<f64>,
    /// Mean of `c(w)` over the word list.
    pub lambda1: f64,
    /// `p_3(c)` for `c_Pi` over the sampled triples.
    pub triple_histogram_pi: Vec<f64>,
    /// `p_3(c)` for `c_Sigma` over the sampled triples.
    pub triple_histogram_sigma: Vec<f64>,
    pub mean_pi: f64,
    pub mean_sigma: f64,
    /// Fraction of triples without any confusion (both modes agree on zero).
    pub p3_zero: f64,
    pub p3_pi_gt3: f64,
    pub p3_sigma_gt3: f64,
    pub sample_count: usize,
    pub seed: u64,
}

fn normalize(counts: &[u64], total: u64) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

fn add_at(hist: &mut Vec<u64>, at: usize) {
    if hist.len() <= at {
        hist.resize(at + 1, 0);
    }
    hist[at] += 1;
}

fn merge(into: &mut Vec<u64>, from: &[u64]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
}

/// Per-chunk RNG stream; independent of how chunks are scheduled.
pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

pub fn global_confusion_stats(idx: &ConfusionIndex, samples: usize, seed: u64) -> Result<GlobalStats> {
    global_confusion_stats_with(idx, samples, seed, Exec::default())
}

/// Samples `samples` word triples uniformly with replacement and tallies
/// their confusion counts from the size laws.
pub fn global_confusion_stats_with(idx: &ConfusionIndex, samples: usize, seed: u64, exec: Exec) -> Result<GlobalStats> {
    if samples < MIN_SAMPLES {
        return Err(Error::Validation(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if idx.is_empty() {
        return Err(Error::Validation("confusion index is empty".into()));
    }
    let counts = idx.counts();
    let mut word_hist = Vec::new();
    for &c in &counts {
        add_at(&mut word_hist, c as usize);
    }
    let lambda1 = counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64;

    let n_words = counts.len();
    let parts = exec.map_chunks(samples, SAMPLE_CHUNK, |range| {
        let mut rng = chunk_rng(seed, range.start / SAMPLE_CHUNK);
        let (mut pi, mut sigma) = (Vec::new(), Vec::new());
        for _ in range {
            let triple = [0; 3].map(|_: u32| counts[rng.random_range(0..n_words)]);
            add_at(&mut pi, address_confusion_count(triple, ConfusionMode::Pi) as usize);
            add_at(&mut sigma, address_confusion_count(triple, ConfusionMode::Sigma) as usize);
        }
        (pi, sigma)
    });
    let (mut pi, mut sigma) = (Vec::new(), Vec::new());
    for (p, s) in &parts {
        merge(&mut pi, p);
        merge(&mut sigma, s);
    }

    let total = samples as u64;
    let tail = |h: &[u64]| h.iter().skip(4).sum::<u64>() as f64 / total as f64;
    let mean = |h: &[u64]| h.iter().enumerate().map(|(c, &n)| c as f64 * n as f64).sum::<f64>() / total as f64;
    Ok(GlobalStats {
        word_histogram: normalize(&word_hist, n_words as u64),
        lambda1,
        p3_zero: pi[0] as f64 / total as f64,
        p3_pi_gt3: tail(&pi),
        p3_sigma_gt3: tail(&sigma),
        mean_pi: mean(&pi),
        mean_sigma: mean(&sigma),
        triple_histogram_pi: normalize(&pi, total),
        triple_histogram_sigma: normalize(&sigma, total),
        sample_count: samples,
        seed,
    })
}

/// Probability that an `n`-word address has at least one confusion when
/// per-word confusion counts are Poisson with mean `lambda1`.
pub fn poisson_prediction(lambda1: f64, n: u32) -> Result<f64> {
    if lambda1.is_nan() || lambda1 < 0.0 || lambda1.is_infinite() {
        return Err(Error::Domain(format!("rate must be finite and non-negative, got {lambda1}")));
    }
    if n == 0 {
        return Err(Error::Domain("address needs at least one word".into()));
    }
    Ok(-(-(n as f64) * lambda1).exp_m1())
}

/// Poisson probability mass `lambda^c e^-lambda / c!`.
pub fn poisson_pmf(lambda: f64, c: u32) -> f64 {
    if lambda == 0.0 {
        return if c == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=c).map(|k| (k as f64).ln()).sum();
    (c as f64 * lambda.ln() - lambda - ln_fact).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub threshold: u64,
    pub common_size: usize,
    pub p3_pi_gt3: f64,
}

pub fn sensitivity_sweep(
    wl: &WordList,
    ph: &PhoneticIndex,
    thresholds: &[u64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SensitivityRow>> {
    sensitivity_sweep_with(wl, ph, thresholds, samples, seed, Exec::default())
}

/// Recomputes `p_3(c_Pi > 3)` for each common-set threshold. The index is built
/// once against the whole list and restricted per threshold, and every
/// threshold sees the same sampled triples.
pub fn sensitivity_sweep_with(
    wl: &WordList,
    ph: &PhoneticIndex,
    thresholds: &[u64],
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Vec<SensitivityRow>> {
    if let Some(&v) = thresholds.iter().find(|&&v| v < MIN_FREQUENCY) {
        return Err(Error::Validation(format!("threshold {v} is below the word-list minimum {MIN_FREQUENCY}")));
    }
    let full = build_confusion_index_with(wl, &common_set(wl, MIN_FREQUENCY), ph, exec);
    thresholds
        .iter()
        .map(|&v| {
            let common = common_set(wl, v);
            let stats = global_confusion_stats_with(&full.restrict(&common), samples, seed, exec)?;
            Ok(SensitivityRow { threshold: v, common_size: common.len(), p3_pi_gt3: stats.p3_pi_gt3 })
        })
        .collect()
}
