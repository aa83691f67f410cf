use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use w3w_core::analysis::{
    self, birthday_probability, delta_m_scan_with, find_confusable_pairs_with, global_confusion_stats_with,
    pair_histograms, poisson_prediction, sensitivity_sweep_with, shared_fraction, simulate_cells_with, BirthdayParams,
    Method, PairReport,
};
use w3w_core::{
    build_confusion_index_with, common_set, CellLayout, Codec, ConfusionIndex, ConfusionMode, Error, Exec, GeoPoint,
    Geocoder, PhoneticIndex, Result, WordList, WordTriple,
};

use crate::run_config::{resolve_path, RunConfig};
use crate::{Cli, Command, ModeArg, OutDir, Sampling};

/// Distance window around the unit congruence shift.
const WINDOW_M: (f64, f64) = (9_000.0, 11_000.0);

struct Ctx {
    cfg: RunConfig,
    exec: Exec,
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = setup_threads(cli.threads, cli.sequential)?;
    let cfg = RunConfig::load(&resolve_path(cli.config))?;
    log::info!("config {}", cfg.path.display());
    let ctx = Ctx { cfg, exec };
    match cli.command {
        Command::Encode { lat, lon, verbose } => encode(&ctx, lat, lon, verbose),
        Command::Decode { words, verbose } => decode(&ctx, &words, verbose),
        Command::Global { sampling, threshold, out } => global(&ctx, &sampling, threshold, &out),
        Command::Local { y, x0, cells, band, mode, bin, threshold, out } => {
            local(&ctx, LocalArgs { y, x0, cells, band, mode, bin, threshold }, &out)
        }
        Command::Birthday { c, total, r, d, out } => birthday(&ctx, c, total, r, d, &out),
        Command::Sensitivity { thresholds, sampling, out } => sensitivity(&ctx, &thresholds, &sampling, &out),
        Command::DeltaScan { max_dn, threshold, band, csv } => delta_scan(&ctx, max_dn, threshold, band, csv),
    }
}

fn setup_threads(threads: usize, sequential: bool) -> Result<Exec> {
    if sequential {
        return Ok(Exec::Sequential);
    }
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if threads > 1 {
        log::warn!("built without the parallel feature; --threads ignored");
    }
    Ok(Exec::Parallel)
}

impl Ctx {
    fn wordlist(&self) -> Result<WordList> {
        self.cfg.validate(false)?;
        let t = Instant::now();
        let wl = self.cfg.data.load_wordlist()?;
        log::info!("word list: {} words in {:.2?}", wl.len(), t.elapsed());
        Ok(wl)
    }

    fn lexicon(&self) -> Result<(WordList, PhoneticIndex)> {
        self.cfg.validate(true)?;
        let wl = self.wordlist()?;
        let ph = self.cfg.data.load_phonetic()?;
        if ph.skipped() > 0 {
            log::warn!("{} malformed phonetic lines skipped", ph.skipped());
        }
        Ok((wl, ph))
    }

    fn confusion(&self, wl: &WordList, ph: &PhoneticIndex, threshold: u64) -> ConfusionIndex {
        let t = Instant::now();
        let idx = build_confusion_index_with(wl, &common_set(wl, threshold), ph, self.exec);
        log::info!("confusion index in {:.2?}", t.elapsed());
        idx
    }

    fn out_dir(&self, o: &OutDir) -> PathBuf {
        o.out.clone().unwrap_or_else(|| self.cfg.out_dir.clone())
    }

    fn sampling(&self, s: &Sampling) -> (usize, u64) {
        (s.samples.unwrap_or(self.cfg.samples), s.seed.unwrap_or(self.cfg.seed))
    }
}

fn encode(ctx: &Ctx, lat: f64, lon: f64, verbose: bool) -> Result<()> {
    let p = GeoPoint::new(lat, lon)?;
    let wl = ctx.wordlist()?;
    let geo = Geocoder::new(ctx.cfg.codec.codec()?, &wl)?;
    let t = geo.encode_trace(p)?;
    println!("{}", t.words);
    if verbose {
        let b = t.box_address;
        println!("box     X={} Y={} x={} y={}", b.cell_x, b.cell_y, b.x, b.y);
        println!("band    {}", t.band);
        println!("n       {}", t.n);
        println!("m       {}", t.m);
        println!("(i,j,k) ({}, {}, {})", t.indices.i, t.indices.j, t.indices.k);
    }
    Ok(())
}

fn decode(ctx: &Ctx, words: &[String], verbose: bool) -> Result<()> {
    let triple: WordTriple = match words {
        [one] => one.parse()?,
        [u, v, w] => WordTriple::new(u.as_str(), v.as_str(), w.as_str()),
        _ => return Err(Error::Validation("give either u.v.w or three separate words".into())),
    };
    let wl = ctx.wordlist()?;
    let geo = Geocoder::new(ctx.cfg.codec.codec()?, &wl)?;
    let p = geo.geocode(&triple)?;
    println!("{:.7} {:.7}", p.lat, p.lon);
    if verbose {
        let t = geo.encode_trace(p)?;
        let b = t.box_address;
        println!("box     X={} Y={} x={} y={}", b.cell_x, b.cell_y, b.x, b.y);
        println!("band    {}", t.band);
        println!("n       {}", t.n);
        println!("m       {}", t.m);
        println!("(i,j,k) ({}, {}, {})", t.indices.i, t.indices.j, t.indices.k);
    }
    Ok(())
}

fn global(ctx: &Ctx, sampling: &Sampling, threshold: Option<u64>, out: &OutDir) -> Result<()> {
    let (samples, seed) = ctx.sampling(sampling);
    if samples < analysis::MIN_SAMPLES {
        return Err(Error::Validation(format!("--samples must be at least {}, got {samples}", analysis::MIN_SAMPLES)));
    }
    let threshold = threshold.unwrap_or(ctx.cfg.common_threshold);
    let (wl, ph) = ctx.lexicon()?;
    let common = common_set(&wl, threshold);
    let idx = ctx.confusion(&wl, &ph, threshold);
    let stats = global_confusion_stats_with(&idx, samples, seed, ctx.exec)?;
    let dir = ctx.out_dir(out);
    analysis::write_distribution(&dir.join("word_confusions.csv"), &stats.word_histogram)?;
    analysis::write_poisson_fit(&dir.join("poisson_fit.csv"), &stats.word_histogram, stats.lambda1)?;
    analysis::write_distribution(&dir.join("triple_confusions_pi.csv"), &stats.triple_histogram_pi)?;
    analysis::write_distribution(&dir.join("triple_confusions_sigma.csv"), &stats.triple_histogram_sigma)?;
    let poisson_p3 = poisson_prediction(stats.lambda1, 3)?;
    let summary = json!({
        "word_count": wl.len(),
        "common_threshold": threshold,
        "common_size": common.len(),
        "lambda1": stats.lambda1,
        "poisson_p3_any": poisson_p3,
        "p3_zero": stats.p3_zero,
        "p3_pi_gt3": stats.p3_pi_gt3,
        "p3_sigma_gt3": stats.p3_sigma_gt3,
        "mean_pi": stats.mean_pi,
        "mean_sigma": stats.mean_sigma,
        "samples": stats.sample_count,
        "seed": stats.seed,
    });
    analysis::write_json(&dir.join("global_summary.json"), &summary)?;
    println!("words            {}", wl.len());
    println!("common (v={threshold:<4}) {}", common.len());
    println!("lambda1          {:.4}", stats.lambda1);
    println!("p3(0)            {:.4}  (Poisson: {:.4})", stats.p3_zero, 1.0 - poisson_p3);
    println!("p3(c_pi > 3)     {:.4}", stats.p3_pi_gt3);
    println!("p3(c_sigma > 3)  {:.4}", stats.p3_sigma_gt3);
    println!("wrote {}", dir.display());
    Ok(())
}

struct LocalArgs {
    y: u32,
    x0: u32,
    cells: u32,
    band: u32,
    mode: ModeArg,
    bin: f64,
    threshold: Option<u64>,
}

#[derive(Serialize)]
struct LocalSummary {
    mode: ConfusionMode,
    pairs: usize,
    modal_bin_low_m: Option<f64>,
    shared_fraction: [f64; 3],
    window_pairs: usize,
    window_shared2_fraction: f64,
}

fn local(ctx: &Ctx, a: LocalArgs, out: &OutDir) -> Result<()> {
    if a.cells == 0 {
        return Err(Error::Validation("--cells must be positive".into()));
    }
    if a.bin.is_nan() || a.bin <= 0.0 {
        return Err(Error::Validation(format!("--bin must be positive, got {}", a.bin)));
    }
    let threshold = a.threshold.unwrap_or(ctx.cfg.common_threshold);
    let bands = ctx.cfg.codec.band_configs()?;
    let k = ctx.cfg.codec.words_per_band;
    let layout = CellLayout::row_run(a.y, a.x0, a.cells, a.band)?;
    let codec = Codec::new(k, bands, layout)?;
    let (wl, ph) = ctx.lexicon()?;
    wl.band(a.band, k)?;
    let idx = ctx.confusion(&wl, &ph, threshold);

    let t = Instant::now();
    let addr = simulate_cells_with(&codec, ctx.exec)?;
    log::info!("{} addresses in {:.2?}", addr.len(), t.elapsed());
    println!("addresses        {}", addr.len());
    if addr.overflow_count() > 0 {
        println!("overflow (m>=K^3) {}", addr.overflow_count());
    }
    if addr.duplicate_count() > 0 {
        println!("duplicate triples {}", addr.duplicate_count());
    }

    let modes: &[ConfusionMode] = match a.mode {
        ModeArg::Pi => &[ConfusionMode::Pi],
        ModeArg::Sigma => &[ConfusionMode::Sigma],
        ModeArg::Both => &[ConfusionMode::Pi, ConfusionMode::Sigma],
    };
    let dir = ctx.out_dir(out);
    let mut summaries = Vec::new();
    for &mode in modes {
        let report = find_confusable_pairs_with(&addr, &idx, &wl, mode, ctx.exec)?;
        let s = summarize(&report, a.bin)?;
        analysis::write_pairs(&dir.join(format!("local_pairs_{mode}.csv")), &report.pairs)?;
        analysis::write_distance_histogram(
            &dir.join(format!("local_distances_{mode}.csv")),
            &pair_histograms(&report.pairs, a.bin)?,
        )?;
        println!(
            "[{mode}] pairs {}  modal bin {}  N_e=0/1/2 {:.3}/{:.3}/{:.3}  N_e=2 in 9-11 km {:.3} of {}",
            s.pairs,
            s.modal_bin_low_m.map_or("-".into(), |m| format!("{:.1} km", m / 1000.0)),
            s.shared_fraction[0],
            s.shared_fraction[1],
            s.shared_fraction[2],
            s.window_shared2_fraction,
            s.window_pairs,
        );
        summaries.push(s);
    }
    let summary = json!({
        "cell_y": a.y,
        "first_cell_x": a.x0,
        "cells": a.cells,
        "band": a.band,
        "words_per_band": k,
        "common_threshold": threshold,
        "bin_m": a.bin,
        "addresses": addr.len(),
        "overflow": addr.overflow_count(),
        "duplicate_triples": addr.duplicate_count(),
        "modes": summaries,
    });
    analysis::write_json(&dir.join("local_summary.json"), &summary)?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn summarize(report: &PairReport, bin: f64) -> Result<LocalSummary> {
    let pairs = &report.pairs;
    let hist = pair_histograms(pairs, bin)?;
    let window: Vec<_> = pairs.iter().filter(|p| p.distance_m >= WINDOW_M.0 && p.distance_m < WINDOW_M.1).collect();
    Ok(LocalSummary {
        mode: report.mode,
        pairs: pairs.len(),
        modal_bin_low_m: hist.modal_bin_low_m(),
        shared_fraction: [0, 1, 2].map(|n| shared_fraction(pairs, n)),
        window_pairs: window.len(),
        window_shared2_fraction: shared_fraction(window.iter().copied(), 2),
    })
}

fn birthday(ctx: &Ctx, c: f64, total: f64, r: f64, d: f64, out: &OutDir) -> Result<()> {
    let p = BirthdayParams::with_grid(c, total, r, d)?;
    let approx = birthday_probability(&p, Method::Approx)?;
    let exact = birthday_probability(&p, Method::Exact)?;
    println!("a(r)    {:.1}", p.addresses());
    println!("approx  {approx:.4}");
    println!("exact   {exact:.4}");
    let dir = ctx.out_dir(out);
    analysis::write_json(
        &dir.join("birthday.json"),
        &json!({ "params": p, "addresses": p.addresses(), "approx": approx, "exact": exact }),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SensitivityCsvRow {
    v: u64,
    common_size: usize,
    p3_pi_gt3: f64,
}

fn sensitivity(ctx: &Ctx, thresholds: &[u64], sampling: &Sampling, out: &OutDir) -> Result<()> {
    let (samples, seed) = ctx.sampling(sampling);
    if samples < analysis::MIN_SAMPLES {
        return Err(Error::Validation(format!("--samples must be at least {}, got {samples}", analysis::MIN_SAMPLES)));
    }
    let (wl, ph) = ctx.lexicon()?;
    let rows = sensitivity_sweep_with(&wl, &ph, thresholds, samples, seed, ctx.exec)?;
    println!("{:>8} {:>8} {:>10}", "v", "|D(v)|", "p3(pi>3)");
    for r in &rows {
        println!("{:>8} {:>8} {:>10.4}", r.threshold, r.common_size, r.p3_pi_gt3);
    }
    let path = ctx.out_dir(out).join("sensitivity.csv");
    analysis::write_csv(
        &path,
        rows.iter().map(|r| SensitivityCsvRow { v: r.threshold, common_size: r.common_size, p3_pi_gt3: r.p3_pi_gt3 }),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn delta_scan(ctx: &Ctx, max_dn: u64, threshold: u64, band: u32, csv: Option<PathBuf>) -> Result<()> {
    let bands = ctx.cfg.codec.band_configs()?;
    let cfg = bands
        .iter()
        .find(|b| b.band == band)
        .ok_or_else(|| Error::Validation(format!("band {band} is not configured")))?;
    let rows = delta_m_scan_with(cfg, max_dn, threshold, ctx.exec);
    match csv {
        Some(path) => {
            analysis::write_csv(Path::new(&path), &rows)?;
            println!("{} rows -> {}", rows.len(), path.display());
        }
        None => {
            println!("{:>12} {:>14} {:>10}", "dn", "dm", "|dm|");
            for r in &rows {
                println!("{:>12} {:>14} {:>10}", r.delta_n, r.delta_m, r.distance);
            }
        }
    }
    Ok(())
}
