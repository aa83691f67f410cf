//! Run configuration: reference data paths, seed, output directory and the
//! codec, all from one TOML file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use w3w_core::{CodecFile, DataPaths, Error, Result};

pub const CONFIG_ENV: &str = "W3W_CONFIG";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_THRESHOLD: u64 = 150;

#[derive(Debug, Deserialize)]
struct RunFile {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    data: DataSection,
    #[serde(default)]
    analysis: AnalysisSection,
}

#[derive(Debug, Deserialize)]
struct DataSection {
    corpus: PathBuf,
    variants: Option<PathBuf>,
    #[serde(default)]
    phonetic: Vec<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
struct AnalysisSection {
    common_threshold: Option<u64>,
    samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub path: PathBuf,
    pub data: DataPaths,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub common_threshold: u64,
    pub samples: usize,
    pub codec: CodecFile,
}

/// Config path from the flag, then the environment, then the repository default.
pub fn resolve_path(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/w3w.toml"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: RunFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let codec = CodecFile::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let at = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        Ok(RunConfig {
            path: path.to_owned(),
            data: DataPaths {
                corpus: at(file.data.corpus),
                variants: file.data.variants.map(at),
                phonetic: file.data.phonetic.into_iter().map(at).collect(),
            },
            seed: file.seed.unwrap_or(DEFAULT_SEED),
            out_dir: at(file.out_dir.unwrap_or_else(|| "out".into())),
            common_threshold: file.analysis.common_threshold.unwrap_or(DEFAULT_THRESHOLD),
            samples: file.analysis.samples.unwrap_or(DEFAULT_SAMPLES),
            codec,
        })
    }

    /// Checks that the word-list inputs exist, and the phonetic ones when asked.
    pub fn validate(&self, phonetic: bool) -> Result<()> {
        let mut paths = vec![&self.data.corpus];
        paths.extend(self.data.variants.iter());
        if phonetic {
            if self.data.phonetic.is_empty() {
                return Err(Error::Config("no phonetic dictionaries configured".into()));
            }
            paths.extend(self.data.phonetic.iter());
        }
        match paths.into_iter().find(|p| !p.is_file()) {
            Some(p) => Err(Error::Config(format!("{}: data file not found", p.display()))),
            None => Ok(()),
        }
    }
}
