//! Plain-text `key = value` configuration with strict key checking.
//!
//! Values come from three layers, later ones winning: the config file,
//! `--set KEY=VALUE` pairs, and the dedicated flags (`--seed`, `--out`, ...).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use semiclass_core::billiard_quantum::MAX_KH;
use semiclass_core::classical::{CatMap, StadiumDomain};
use semiclass_core::entropy::MIN_CLOUD;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("key `{key}`: cannot read `{value}` as {expected}")]
    Type { key: String, value: String, expected: &'static str },
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

/// Recognized keys with their documented defaults.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("experiment", "", "suite name, or `all`"),
    ("N", "512", "Hilbert-space dimension for single-N suites"),
    ("N_list", "", "comma-separated dimensions; empty means the suite default"),
    ("M", "[[2,1],[3,2]]", "cat map matrix"),
    ("h", "0.01", "finite-difference grid spacing"),
    ("seed", "0", "random seed"),
    ("a", "1", "stadium half-length"),
    ("r", "1", "stadium radius"),
    ("windows", "15,39", "billiard window centres in k"),
    ("window_halfwidth", "1", "billiard window half-width in k"),
    ("t_max", "5", "largest Egorov time"),
    ("cutoff", "3", "Wigner frequency cutoff K"),
    ("eps", "0.1", "ball radius for Husimi masses and Bowen balls"),
    ("T", "8", "Bowen window length"),
    ("samples", "1000000", "sample-cloud size"),
    ("centers", "400", "Brin-Katok centres per estimate"),
    ("bounces", "1000000", "billiard bounces for time averages"),
    ("tube_w", "0.1", "scar tube half-width"),
    ("out", "out", "output directory"),
    ("dump_state", "false", "write binary state containers"),
];

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub n: usize,
    pub n_list: Option<Vec<usize>>,
    pub map: [[i64; 2]; 2],
    pub h: f64,
    pub seed: u64,
    pub stadium_a: f64,
    pub stadium_r: f64,
    pub windows: Vec<f64>,
    pub window_halfwidth: f64,
    pub t_max: u32,
    pub cutoff: usize,
    pub eps: f64,
    pub bowen_t: u32,
    pub samples: usize,
    pub centers: usize,
    pub bounces: usize,
    pub tube_w: f64,
    pub out: PathBuf,
    pub dump_state: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::from_pairs(&BTreeMap::new()).expect("defaults are valid")
    }
}

/// Splits config text into key/value pairs. `#` starts a comment.
pub fn parse_pairs(text: &str) -> ConfigResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed { line: i + 1, text: raw.to_string() })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Malformed { line: i + 1, text: raw.to_string() });
        }
        check_key(k)?;
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses one `KEY=VALUE` override.
pub fn parse_override(s: &str) -> ConfigResult<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| ConfigError::Malformed { line: 0, text: s.to_string() })?;
    let k = k.trim();
    check_key(k)?;
    Ok((k.to_string(), v.trim().to_string()))
}

fn check_key(k: &str) -> ConfigResult<()> {
    if KEYS.iter().any(|(name, _, _)| *name == k) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey { key: k.to_string() })
    }
}

fn get<'a>(pairs: &'a BTreeMap<String, String>, key: &str) -> &'a str {
    pairs
        .get(key)
        .map(String::as_str)
        .unwrap_or_else(|| KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, d, _)| *d).unwrap_or(""))
}

fn typed<T: std::str::FromStr>(key: &str, value: &str, expected: &'static str) -> ConfigResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::Type { key: key.into(), value: value.into(), expected })
}

fn list<T: std::str::FromStr>(key: &str, value: &str, expected: &'static str) -> ConfigResult<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| typed(key, s, expected))
        .collect()
}

fn matrix(value: &str) -> ConfigResult<[[i64; 2]; 2]> {
    let cleaned: String = value.chars().filter(|c| !matches!(c, '[' | ']' | ' ')).collect();
    let v: Vec<i64> = list("M", &cleaned, "a 2x2 integer matrix")?;
    if v.len() != 4 {
        return Err(ConfigError::Type { key: "M".into(), value: value.into(), expected: "a 2x2 integer matrix" });
    }
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

fn boolean(key: &str, value: &str) -> ConfigResult<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" | "" => Ok(false),
        _ => Err(ConfigError::Type { key: key.into(), value: value.into(), expected: "a boolean" }),
    }
}

impl ExperimentConfig {
    /// Typed config from raw pairs, with defaults for missing keys.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> ConfigResult<Self> {
        for k in pairs.keys() {
            check_key(k)?;
        }
        let experiment = Some(get(pairs, "experiment").trim().to_string()).filter(|s| !s.is_empty());
        let n_list: Vec<usize> = list("N_list", get(pairs, "N_list"), "a list of integers")?;
        Ok(ExperimentConfig {
            experiment,
            n: typed("N", get(pairs, "N"), "an integer")?,
            n_list: (!n_list.is_empty()).then_some(n_list),
            map: matrix(get(pairs, "M"))?,
            h: typed("h", get(pairs, "h"), "a number")?,
            seed: typed("seed", get(pairs, "seed"), "an unsigned integer")?,
            stadium_a: typed("a", get(pairs, "a"), "a number")?,
            stadium_r: typed("r", get(pairs, "r"), "a number")?,
            windows: list("windows", get(pairs, "windows"), "a list of numbers")?,
            window_halfwidth: typed("window_halfwidth", get(pairs, "window_halfwidth"), "a number")?,
            t_max: typed("t_max", get(pairs, "t_max"), "an integer")?,
            cutoff: typed("cutoff", get(pairs, "cutoff"), "an integer")?,
            eps: typed("eps", get(pairs, "eps"), "a number")?,
            bowen_t: typed("T", get(pairs, "T"), "an integer")?,
            samples: typed("samples", get(pairs, "samples"), "an integer")?,
            centers: typed("centers", get(pairs, "centers"), "an integer")?,
            bounces: typed("bounces", get(pairs, "bounces"), "an integer")?,
            tube_w: typed("tube_w", get(pairs, "tube_w"), "a number")?,
            out: PathBuf::from(get(pairs, "out")),
            dump_state: boolean("dump_state", get(pairs, "dump_state"))?,
        })
    }

    /// File (if any), then overrides, then validation.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> ConfigResult<Self> {
        let mut pairs = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.to_path_buf(), source })?;
                parse_pairs(&text)?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in overrides {
            check_key(k)?;
            pairs.insert(k.clone(), v.clone());
        }
        let cfg = Self::from_pairs(&pairs)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cat_map(&self) -> ConfigResult<CatMap> {
        let [[a, b], [c, d]] = self.map;
        CatMap::new(a, b, c, d).map_err(|e| ConfigError::Invalid { key: "M".into(), reason: e.to_string() })
    }

    pub fn stadium(&self) -> ConfigResult<StadiumDomain> {
        StadiumDomain::new(self.stadium_a, self.stadium_r)
            .map_err(|e| ConfigError::Invalid { key: "a/r".into(), reason: e.to_string() })
    }

    /// Checks every parameter against the preconditions of the modules that
    /// consume it. Nothing is computed before this passes.
    pub fn validate(&self) -> ConfigResult<()> {
        let bad = |key: &str, reason: String| Err(ConfigError::Invalid { key: key.into(), reason });
        if self.n == 0 {
            return bad("N", "N must be at least 1 (the Hilbert space is C^N)".into());
        }
        if let Some(ns) = &self.n_list {
            if ns.contains(&0) {
                return bad("N_list", "every N must be at least 1".into());
            }
        }
        self.cat_map()?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("h", format!("grid spacing must be positive, got {}", self.h));
        }
        self.stadium()?;
        if !(self.window_halfwidth > 0.0) {
            return bad("window_halfwidth", "must be positive".into());
        }
        for &k in &self.windows {
            if !(k > self.window_halfwidth) {
                return bad("windows", format!("window centre {k} must exceed the half-width"));
            }
        }
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return bad("eps", format!("must lie in (0, 0.25), got {}", self.eps));
        }
        if self.bowen_t < 2 {
            return bad("T", "Bowen window must be at least 2".into());
        }
        if self.samples < MIN_CLOUD {
            return bad("samples", format!("need at least {MIN_CLOUD}"));
        }
        if self.centers < 10 {
            return bad("centers", "need at least 10".into());
        }
        if self.t_max == 0 {
            return bad("t_max", "must be at least 1".into());
        }
        if self.cutoff == 0 {
            return bad("cutoff", "must be at least 1".into());
        }
        if !(self.tube_w > 0.0 && self.tube_w < 0.5 * self.stadium_r) {
            return bad("tube_w", format!("must lie in (0, r/2), got {}", self.tube_w));
        }
        if self.bounces == 0 {
            return bad("bounces", "must be positive".into());
        }
        Ok(())
    }

    /// Suite-specific preconditions on top of [`validate`](Self::validate).
    pub fn validate_for(&self, suite: &str) -> ConfigResult<()> {
        if matches!(suite, "egorov" | "qe-catmap" | "scar-construction" | "entropy-sweep") && !self.cat_map()?.is_quantizable() {
            return Err(ConfigError::Invalid {
                key: "M".into(),
                reason: "map violates the checkerboard condition (a*b and c*d must be even)".into(),
            });
        }
        if suite == "billiard-stadium" {
            self.check_windows(self.h)?;
        }
        if suite == "scar-construction" {
            for &n in self.n_list.iter().flatten() {
                if 2 * self.cutoff >= n {
                    return Err(ConfigError::Invalid {
                        key: "cutoff".into(),
                        reason: format!("2K = {} must stay below N = {n}", 2 * self.cutoff),
                    });
                }
            }
        }
        Ok(())
    }

    /// Stadium windows must be resolved by the grid.
    pub fn check_windows(&self, h: f64) -> ConfigResult<()> {
        for &k in &self.windows {
            let kh = (k + self.window_halfwidth) * h;
            if !(kh < MAX_KH) {
                return Err(ConfigError::Invalid {
                    key: "windows".into(),
                    reason: format!("k·h = {kh:.3} at k = {} exceeds {MAX_KH}", k + self.window_halfwidth),
                });
            }
        }
        Ok(())
    }
}
