//! Run configuration: key=value config files with command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use soda_core::eval::Metric;
use soda_core::{Error, Result};

/// Everything a command run can be parameterized with. Flags override config
/// file entries; unset values fall back to per-command defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sketch_size: Option<usize>,
    pub reduced_dim: Option<usize>,
    pub n_components: Option<usize>,
    pub ridge: Option<f64>,
    pub metric: Metric,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub query: Option<PathBuf>,
    pub gallery: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sketch_size: None,
            reduced_dim: None,
            n_components: None,
            ridge: None,
            metric: Metric::Euclidean,
            seed: 0,
            input: None,
            model: None,
            query: None,
            gallery: None,
            out: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies one key=value entry. Keys mirror the long command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "sketch_size" => self.sketch_size = Some(parse_value(key, value)?),
            "reduced_dim" => self.reduced_dim = Some(parse_value(key, value)?),
            "components" => self.n_components = Some(parse_value(key, value)?),
            "ridge" => self.ridge = Some(parse_value(key, value)?),
            "metric" => self.metric = value.parse()?,
            "seed" => self.seed = parse_value(key, value)?,
            "input" => self.input = Some(PathBuf::from(value)),
            "model" => self.model = Some(PathBuf::from(value)),
            "query" => self.query = Some(PathBuf::from(value)),
            "gallery" => self.gallery = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            other => {
                return Err(Error::Config(format!("unknown configuration key {other:?}")));
            }
        }
        Ok(())
    }

    /// Reads a config file: one key=value per line, `#` comments and blank
    /// lines ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected key=value", i + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Enforces the cross-field invariants: 1 ≤ k ≤ ℓ, r ≥ 1, ε ≥ 0.
    pub fn validate(&self) -> Result<()> {
        if self.sketch_size == Some(0) {
            return Err(Error::Config("sketch_size must be at least 1".into()));
        }
        if let Some(k) = self.reduced_dim {
            if k == 0 {
                return Err(Error::Config("reduced_dim must be at least 1".into()));
            }
            if let Some(ell) = self.sketch_size
                && k > ell
            {
                return Err(Error::Config(format!(
                    "reduced_dim {k} must not exceed sketch_size {ell}"
                )));
            }
        }
        if self.n_components == Some(0) {
            return Err(Error::Config("components must be at least 1".into()));
        }
        if let Some(e) = self.ridge
            && (!e.is_finite() || e < 0.0)
        {
            return Err(Error::Config("ridge must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn require_sketch_size(&self) -> Result<usize> {
        self.sketch_size
            .ok_or_else(|| Error::Config("sketch_size is required (--sketch-size)".into()))
    }

    pub fn require_path(value: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
        value
            .clone()
            .ok_or_else(|| Error::Config(format!("{flag} is required")))
    }
}
