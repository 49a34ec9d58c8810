use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::wedge_dim;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "OSCILLATOR_COMPLEX_CONFIG";

pub const DEFAULT_N: usize = 6;
pub const DEFAULT_GRID: usize = 8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MEMORY_GUARD: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    #[default]
    Identity,
    Random,
}

impl std::str::FromStr for GaugeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "random" => Ok(Self::Random),
            other => Err(Error::Config(format!(
                "unknown gauge '{other}' (expected identity or random)"
            ))),
        }
    }
}

impl std::fmt::Display for GaugeChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Identity => write!(f, "identity"),
            Self::Random => write!(f, "random"),
        }
    }
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub gauge: Option<GaugeChoice>,
    pub out: Option<PathBuf>,
    pub memory_guard: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values; `Some` wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub gauge: Option<GaugeChoice>,
    pub out: Option<PathBuf>,
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub grid: usize,
    pub seed: u64,
    pub gauge: GaugeChoice,
    pub out: Option<PathBuf>,
    pub memory_guard: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            grid: DEFAULT_GRID,
            seed: DEFAULT_SEED,
            gauge: GaugeChoice::Identity,
            out: None,
            memory_guard: DEFAULT_MEMORY_GUARD,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn resolve(file: Option<ConfigFile>, flags: Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let mut tolerances = file.tolerances;
        tolerances.extend(flags.tolerances);
        let cfg = Self {
            n: flags.n.or(file.n).unwrap_or(DEFAULT_N),
            grid: flags.grid.or(file.grid).unwrap_or(DEFAULT_GRID),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            gauge: flags.gauge.or(file.gauge).unwrap_or_default(),
            out: flags.out.or(file.out),
            memory_guard: file.memory_guard.unwrap_or(DEFAULT_MEMORY_GUARD),
            tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "truncation n = {} is below the minimum of 2",
                self.n
            )));
        }
        if self.grid < 2 {
            return Err(Error::Config(format!(
                "grid = {} is below the minimum of 2",
                self.grid
            )));
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance for '{name}' must be positive, got {tol}"
                )));
            }
        }
        let coefficients = self.coefficient_count();
        if coefficients > self.memory_guard {
            return Err(Error::Config(format!(
                "N·G²·dim Λ• = {coefficients} coefficients exceeds the memory guard of {}",
                self.memory_guard
            )));
        }
        Ok(())
    }

    /// `N · G² · dim Λ•`.
    pub fn coefficient_count(&self) -> usize {
        let total_wedge: usize = (0..=2).map(wedge_dim).sum();
        self.n
            .saturating_mul(self.grid.saturating_mul(self.grid))
            .saturating_mul(total_wedge)
    }

    /// Threshold for a check: an exact-name override, then the `*` override,
    /// then the built-in default.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances
            .get(name)
            .or_else(|| self.tolerances.get("*"))
            .copied()
            .unwrap_or(default)
    }
}

/// Parses `name=value`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (name, value) = s.split_once('=').ok_or_else(|| {
        Error::Config(format!(
            "tolerance override '{s}' is not of the form name=value"
        ))
    })?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("tolerance override '{s}' has a non-numeric value")))?;
    Ok((name.trim().to_string(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(None, Overrides::default()).unwrap();
        assert_eq!((cfg.n, cfg.grid, cfg.seed), (6, 8, 42));
        assert_eq!(cfg.gauge, GaugeChoice::Identity);
    }

    #[test]
    fn flags_win_over_file() {
        let file = ConfigFile::parse(
            "n = 4\ngrid = 5\nseed = 7\ngauge = \"random\"\n[tolerances]\n\"a.b\" = 1e-3\n",
        )
        .unwrap();
        let flags = Overrides {
            n: Some(3),
            tolerances: vec![("a.b".into(), 2e-3)],
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(file), flags).unwrap();
        assert_eq!((cfg.n, cfg.grid, cfg.seed), (3, 5, 7));
        assert_eq!(cfg.gauge, GaugeChoice::Random);
        assert_eq!(cfg.tolerance("a.b", 1.0), 2e-3);
    }

    #[test]
    fn rejects_invalid_values() {
        let bad_n = Overrides {
            n: Some(1),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, bad_n).is_err());
        let bad_tol = Overrides {
            tolerances: vec![("x".into(), 0.0)],
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, bad_tol).is_err());
        let huge = Overrides {
            n: Some(1000),
            grid: Some(100),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, huge).is_err());
        assert!(ConfigFile::parse("unknown = 1").is_err());
        assert!(ConfigFile::parse("n = \"six\"").is_err());
    }

    #[test]
    fn tolerance_syntax() {
        assert_eq!(
            parse_tolerance("module.x=1e-30").unwrap(),
            ("module.x".to_string(), 1e-30)
        );
        assert!(parse_tolerance("module.x").is_err());
        assert!(parse_tolerance("module.x=abc").is_err());
    }
}
