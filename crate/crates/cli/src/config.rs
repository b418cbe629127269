//! `key = value` configuration files and flag overrides.

use std::path::Path;

use clap::{Args, ValueEnum};
use lineage_core::cluster::DEFAULT_WINDOW_DAYS;
use lineage_core::SimilarityConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Engine {
    /// Message and diff similarity (the default).
    #[default]
    Rate,
    /// Fraction of identical changed lines.
    Plusminus,
    /// Shared per-hunk checksums.
    Checksum,
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Engine as ValueEnum>::from_str(s, true)
    }
}

pub const DEFAULT_PLUSMINUS_THRESHOLD: f64 = 0.5;

/// Flags shared by every command that runs an analysis.
#[derive(Debug, Clone, Default, Args)]
pub struct AnalysisFlags {
    /// Config file with `key = value` lines (tf, th, dlr, w, ta, window_days, engine, threshold).
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub th: Option<f64>,
    #[arg(long)]
    pub dlr: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub ta: Option<f64>,
    #[arg(long)]
    pub window_days: Option<u32>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    /// Similarity threshold for the plus-minus engine.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub cfg: SimilarityConfig,
    pub window_days: u32,
    pub engine: Engine,
    pub threshold: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            cfg: SimilarityConfig::default(),
            window_days: DEFAULT_WINDOW_DAYS,
            engine: Engine::Rate,
            threshold: DEFAULT_PLUSMINUS_THRESHOLD,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, String> {
    value.parse().map_err(|_| format!("config line {line}: {key} = {value:?} is not a number"))
}

/// Applies `key = value` lines on top of `base`.
pub fn parse_config(text: &str, mut base: Settings) -> Result<Settings, String> {
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let (key, value) = (key.trim().replace('-', "_"), value.trim().trim_matches('"'));
        match key.as_str() {
            "tf" => base.cfg.tf = parse_num(&key, value, n + 1)?,
            "th" => base.cfg.th = parse_num(&key, value, n + 1)?,
            "dlr" => base.cfg.dlr = parse_num(&key, value, n + 1)?,
            "w" => base.cfg.w = parse_num(&key, value, n + 1)?,
            "ta" => base.cfg.ta = parse_num(&key, value, n + 1)?,
            "window_days" => base.window_days = parse_num(&key, value, n + 1)?,
            "threshold" => base.threshold = parse_num(&key, value, n + 1)?,
            "engine" => base.engine = value.parse().map_err(|e| format!("config line {}: {e}", n + 1))?,
            other => return Err(format!("config line {}: unknown key {other:?}", n + 1)),
        }
    }
    Ok(base)
}

impl AnalysisFlags {
    /// Defaults, then the config file, then individual flags.
    pub fn resolve(&self) -> Result<Settings, String> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s = parse_config(&read(path)?, s)?;
        }
        let c = &mut s.cfg;
        for (slot, flag) in [
            (&mut c.tf, self.tf),
            (&mut c.th, self.th),
            (&mut c.dlr, self.dlr),
            (&mut c.w, self.w),
            (&mut c.ta, self.ta),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(v) = self.window_days {
            s.window_days = v;
        }
        if let Some(v) = self.engine {
            s.engine = v;
        }
        if let Some(v) = self.threshold {
            s.threshold = v;
        }
        s.cfg.validate().map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&s.threshold) {
            return Err(format!("threshold {} outside [0,1]", s.threshold));
        }
        Ok(s)
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}
