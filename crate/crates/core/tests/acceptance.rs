//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use w3w_core::analysis::{
    birthday_probability, find_confusable_pairs, global_confusion_stats, pair_histograms, sensitivity_sweep,
    shared_fraction, simulate_cells, BirthdayParams, Method,
};
use w3w_core::grid::BOX_ROWS;
use w3w_core::{
    band_width, box_to_latlon, build_confusion_index, cell_box_count, common_set, congruence_forward,
    congruence_inverse, factor_m, latlon_to_box, unfactor, BandConfig, CellLayout, Codec, CodecFile, ConfusionIndex,
    ConfusionMode, DataPaths, GeoPoint, Geocoder, IndexTriple, PhoneticIndex, WordList,
};

const A: u64 = 3_639_313;
const M: u64 = 20_000_000_000;
const K: u32 = 2715;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn reference_band() -> BandConfig {
    BandConfig::new(0, A, 0, M, K).unwrap()
}

fn factorization() -> Check {
    for m in 0..1_000_000u64 {
        ensure(unfactor(factor_m(m)) == m, format!("round trip fails at m = {m}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100_000 {
        let m = rng.random_range(0..M);
        ensure(unfactor(factor_m(m)) == m, format!("round trip fails at m = {m}"))?;
    }
    let t = factor_m(19_999_997_500);
    ensure(t == IndexTriple::new(683, 2714, 1586), format!("factor_m(19,999,997,500) = {t:?}"))?;
    let table = common::shell_table(51u64.pow(3));
    for (m, t) in table.iter().enumerate().take(51usize.pow(3)) {
        ensure(factor_m(m as u64).as_array() == *t, format!("shell oracle disagrees at m = {m}"))?;
    }
    Ok("10^6 exhaustive + 10^5 random round trips, worked example, shells l <= 50".into())
}

fn congruence() -> Check {
    let product = A as u128 * 5_083_377u128;
    ensure(product % M as u128 == 1, format!("a * 5,083,377 mod M = {}", product % M as u128))?;
    let cfg = reference_band();
    ensure(congruence_forward(5_083_377, &cfg) == 1, "forward(5,083,377) != 1")?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1_000_000 {
        let n = rng.random_range(0..M);
        let m = congruence_forward(n, &cfg);
        ensure(congruence_inverse(m, &cfg).ok() == Some(n), format!("inverse fails at n = {n}"))?;
    }
    Ok(format!("a^-1 = {}, 10^6 random round trips", cfg.multiplier_inverse()))
}

fn grid() -> Check {
    ensure(band_width(3396).ok() == Some(961), "W(3396) != 961")?;
    ensure(cell_box_count(3396).ok() == Some(1_485_706), "cell count != 1,485,706")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let p = GeoPoint::new(rng.random_range(-90.0..90.0), rng.random_range(-180.0..180.0)).unwrap();
        let b = latlon_to_box(p).unwrap();
        let c = box_to_latlon(b).unwrap();
        let half_lat = 0.5 / (BOX_ROWS as f64 * 24.0);
        let half_lon = 0.5 / (band_width(b.cell_y).unwrap() as f64 * 24.0);
        let (dlat, dlon) = ((p.lat - c.lat).abs(), (p.lon - c.lon).abs());
        ensure(
            dlat <= half_lat * (1.0 + 1e-9) && dlon <= half_lon * (1.0 + 1e-9),
            format!("{p:?} maps to a box centered at {c:?}"),
        )?;
        ensure(latlon_to_box(c).unwrap() == b, format!("center of {b:?} re-encodes elsewhere"))?;
        worst = worst.max(dlat / half_lat).max(dlon / half_lon);
    }
    // Word-level round trip on the configured cells.
    let lex = lexicon();
    let codec = default_codec();
    let geo = Geocoder::new(codec, &lex.wl).map_err(|e| e.to_string())?;
    for _ in 0..100_000 {
        let p = GeoPoint::new(rng.random_range(51.375..51.666), rng.random_range(-0.416..0.083)).unwrap();
        let words = geo.reverse_geocode(p).map_err(|e| e.to_string())?;
        let back = geo.geocode(&words).map_err(|e| e.to_string())?;
        ensure(latlon_to_box(back).unwrap() == latlon_to_box(p).unwrap(), format!("{words} decodes elsewhere"))?;
    }
    Ok(format!("10^5 grid + 10^5 word round trips, worst offset {worst:.3} half-box"))
}

fn birthday() -> Check {
    let mut notes = Vec::new();
    for (total, r) in [(40_000f64.powi(3), 4000.0), (2500f64.powi(3), 500.0)] {
        let p = BirthdayParams::new(3.0, total, r).unwrap();
        let approx = birthday_probability(&p, Method::Approx).map_err(|e| e.to_string())?;
        let exact = birthday_probability(&p, Method::Exact).map_err(|e| e.to_string())?;
        ensure((approx - 0.52).abs() <= 0.01, format!("approx {approx:.4} at r = {r}"))?;
        ensure((approx - exact).abs() <= 0.01, format!("exact {exact:.4} vs approx {approx:.4}"))?;
        notes.push(format!("r={r}: approx {approx:.4} exact {exact:.4}"));
    }
    Ok(notes.join("; "))
}

struct Lexicon {
    wl: WordList,
    ph: PhoneticIndex,
    conf: ConfusionIndex,
}

fn lexicon() -> &'static Lexicon {
    static CELL: std::sync::OnceLock<Lexicon> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let paths = DataPaths::bundled(&repo().join("data"));
        let wl = paths.load_wordlist().unwrap();
        let ph = paths.load_phonetic().unwrap();
        let conf = build_confusion_index(&wl, &common_set(&wl, 150), &ph);
        Lexicon { wl, ph, conf }
    })
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn default_codec() -> Codec {
    CodecFile::load(&repo().join("config/w3w.toml")).unwrap().codec().unwrap()
}

fn global() -> Check {
    let lex = lexicon();
    let l = lex.wl.len() as f64;
    let d150 = common_set(&lex.wl, 150).len() as f64;
    ensure((l - 43_320.0).abs() <= 0.02 * 43_320.0, format!("L = {l}"))?;
    ensure((d150 - 7_445.0).abs() <= 0.05 * 7_445.0, format!("|D(150)| = {d150}"))?;
    let s = global_confusion_stats(&lex.conf, 1_000_000, 1).map_err(|e| e.to_string())?;
    ensure((s.p3_zero - 0.33).abs() <= 0.07, format!("p3(0) = {:.4}", s.p3_zero))?;
    ensure((s.p3_pi_gt3 - 0.26).abs() <= 0.07, format!("p3(pi>3) = {:.4}", s.p3_pi_gt3))?;
    ensure((s.p3_sigma_gt3 - 0.21).abs() <= 0.07, format!("p3(sigma>3) = {:.4}", s.p3_sigma_gt3))?;
    Ok(format!(
        "L={l} |D(150)|={d150} lambda1={:.3} p3(0)={:.3} p3(pi>3)={:.3} p3(sigma>3)={:.3}",
        s.lambda1, s.p3_zero, s.p3_pi_gt3, s.p3_sigma_gt3
    ))
}

fn local() -> Check {
    let lex = lexicon();
    let run = |cells: u32, mode: ConfusionMode| {
        let codec = Codec::new(K, vec![reference_band()], CellLayout::row_run(3396, 4316, cells, 0).unwrap()).unwrap();
        let addr = simulate_cells(&codec).unwrap();
        assert_eq!(addr.len() as u64, cells as u64 * 1_485_706);
        find_confusable_pairs(&addr, &lex.conf, &lex.wl, mode).unwrap().pairs
    };
    let mut notes = Vec::new();
    let mut verdict = Ok(());
    for mode in [ConfusionMode::Pi, ConfusionMode::Sigma] {
        let (one, four) = (run(1, mode), run(4, mode));
        let ratio = four.len() as f64 / one.len() as f64;
        let hist = pair_histograms(&four, 100.0).unwrap();
        let modal = hist.modal_bin_low_m().unwrap_or(f64::NAN);
        let window: Vec<_> = four.iter().filter(|p| (9_000.0..11_000.0).contains(&p.distance_m)).collect();
        let (global2, window2) = (shared_fraction(&four, 2), shared_fraction(window.iter().copied(), 2));
        notes.push(format!(
            "[{mode}] {} -> {} pairs (x{ratio:.1}), modal {:.1} km, N_e=2 {:.3} in window vs {:.3} overall",
            one.len(),
            four.len(),
            modal / 1000.0,
            window2,
            global2
        ));
        // The criterion is judged on the product mode; in the single-swap mode
        // every pair shares two words, so the over-representation test is void.
        if mode == ConfusionMode::Pi {
            verdict = ensure(ratio >= 10.0, format!("ratio {ratio:.1}"))
                .and(ensure((9_500.0..=10_500.0).contains(&modal), format!("modal bin {modal}")))
                .and(ensure(window2 > global2, format!("N_e=2 {window2:.3} <= {global2:.3}")));
        }
    }
    verdict.map(|_| notes.join("; ")).map_err(|e| format!("{e}; {}", notes.join("; ")))
}

fn oracle() -> Check {
    let w = common::mini_world();
    let mut counts = Vec::new();
    for layout in [common::Layout::SplitBands, common::Layout::SharedBand, common::Layout::Overflowing] {
        let codec = common::codec(layout);
        let addrs = common::oracle_addresses(&codec);
        let index = simulate_cells(&codec).map_err(|e| e.to_string())?;
        for mode in [ConfusionMode::Pi, ConfusionMode::Sigma] {
            let expected = common::brute_force_pairs(&w, &addrs, mode);
            let got = find_confusable_pairs(&index, &w.conf, &w.wl, mode).map_err(|e| e.to_string())?;
            ensure(common::pair_keys(&got.pairs) == expected, format!("{mode} pairs differ"))?;
            ensure(got.pairs.len() == expected.len(), "duplicate pair records")?;
            counts.push(expected.len().to_string());
        }
    }
    Ok(format!("pair counts {} over 3 layouts x (pi, sigma)", counts.join("/")))
}

fn sensitivity() -> Check {
    let lex = lexicon();
    let thresholds = [3, 50, 150, 300, 600, 1200, 2400, 5000];
    let rows = sensitivity_sweep(&lex.wl, &lex.ph, &thresholds, 1_000_000, 1).map_err(|e| e.to_string())?;
    let mut by_size = rows.clone();
    by_size.sort_by_key(|r| r.common_size);
    for w in by_size.windows(2) {
        ensure(
            w[0].p3_pi_gt3 <= w[1].p3_pi_gt3,
            format!("p3 drops from {} to {} as |D| grows", w[0].p3_pi_gt3, w[1].p3_pi_gt3),
        )?;
    }
    let near = rows.iter().min_by_key(|r| (r.common_size as i64 - 3000).abs()).unwrap();
    ensure(near.p3_pi_gt3 > 0.10, format!("p3(pi>3) = {} at |D| = {}", near.p3_pi_gt3, near.common_size))?;
    Ok(rows
        .iter()
        .map(|r| format!("v={}:{}/{:.3}", r.threshold, r.common_size, r.p3_pi_gt3))
        .collect::<Vec<_>>()
        .join(" "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("factorization bijection", Duration::from_secs(10), factorization),
        ("congruence", Duration::from_secs(5), congruence),
        ("grid", Duration::from_secs(10), grid),
        ("birthday model", Duration::from_secs(60), birthday),
        ("global statistics", Duration::from_secs(300), global),
        ("local simulation", Duration::from_secs(600), local),
        ("oracle equivalence", Duration::from_secs(60), oracle),
        ("sensitivity sweep", Duration::from_secs(300), sensitivity),
    ];
    // Reference data loads are shared; charge them to nobody.
    let t = Instant::now();
    lexicon();
    println!("reference data loaded in {:.1?}", t.elapsed());

    let mut failed = 0;
    for (name, limit, check) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = t.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.1?}, limit {limit:?}; {msg}"))
            }
        });
        match result {
            Ok(msg) => println!("PASS  {name:<24} {elapsed:>9.2?}  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name:<24} {elapsed:>9.2?}  {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", 8 - failed, 8);
    if failed > 0 {
        std::process::exit(1);
    }
}
