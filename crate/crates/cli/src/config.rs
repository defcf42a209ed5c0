//! Run configuration: the scenario file plus experiment keys, with command
//! line overrides applied on top.
//!
//! Experiment keys may sit in the same file as the scenario:
//!
//! ```text
//! algo = all            # sre | benchmark | no-ris | all
//! sweep = gamma0        # gamma0 | ris-size | none
//! grid = 0, 3, 6, 9     # dB for gamma0, element counts for ris-size
//! trials = 100
//! out = results/run1
//! jobs = 4
//! ```
//!
//! `seed` is a scenario key and doubles as the base seed.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use risac_core::scenario::parse_pairs;
use risac_core::{AoParams, Scenario, Scheme, SreParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] risac_core::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoSelector {
    One(Scheme),
    All,
}

impl AlgoSelector {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            AlgoSelector::One(s) => vec![s],
            AlgoSelector::All => Scheme::ALL.to_vec(),
        }
    }
}

impl FromStr for AlgoSelector {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        if s == "all" {
            return Ok(AlgoSelector::All);
        }
        s.parse::<Scheme>()
            .map(AlgoSelector::One)
            .or_else(|_| invalid(format!("unknown algorithm `{s}`")))
    }
}

impl fmt::Display for AlgoSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoSelector::One(s) => write!(f, "{s}"),
            AlgoSelector::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Threshold in dB.
    Gamma0,
    /// Number of RIS elements.
    RisSize,
    None,
}

impl Sweep {
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Sweep::Gamma0 => (0..8).map(|k| 3.0 * k as f64).collect(),
            Sweep::RisSize => vec![16.0, 32.0, 64.0, 128.0, 256.0],
            Sweep::None => Vec::new(),
        }
    }

    /// Scenario with the swept parameter set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut sc = base.clone();
        match self {
            Sweep::Gamma0 => sc.gamma0 = risac_core::scenario::db_to_linear(value),
            Sweep::RisSize => sc.m_ris = value as usize,
            Sweep::None => {}
        }
        sc
    }
}

impl FromStr for Sweep {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "gamma0" => Ok(Sweep::Gamma0),
            "ris-size" | "m_ris" => Ok(Sweep::RisSize),
            "none" => Ok(Sweep::None),
            _ => invalid(format!("unknown sweep `{s}`")),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::Gamma0 => "gamma0",
            Sweep::RisSize => "ris-size",
            Sweep::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario_path: Option<PathBuf>,
    pub scenario: Scenario,
    pub algo: AlgoSelector,
    pub sweep: Sweep,
    /// `None` means the sweep's default grid.
    pub grid: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses all cores. Output does not depend on it.
    pub jobs: usize,
    pub sre: SreParams,
    pub ao: AoParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario_path: None,
            scenario: Scenario::default(),
            algo: AlgoSelector::All,
            sweep: Sweep::None,
            grid: None,
            trials: 1,
            seed: 0,
            out_dir: PathBuf::from("out"),
            jobs: 0,
            sre: SreParams::default(),
            ao: AoParams::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algo: Option<AlgoSelector>,
    pub sweep: Option<Sweep>,
    pub grid: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    text.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().or_else(|_| invalid(format!("bad grid value `{s}`"))))
        .collect()
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .or_else(|_| invalid(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn from_str_with(text: &str, ov: &Overrides) -> Result<RunConfig, ConfigError> {
        let pairs = parse_pairs(text)?;
        let (scenario, rest) = Scenario::from_pairs(&pairs)?;
        let mut cfg = RunConfig {
            seed: scenario.seed,
            scenario,
            ..RunConfig::default()
        };
        for (key, value) in &rest {
            match key.as_str() {
                "algo" => cfg.algo = value.parse()?,
                "sweep" => cfg.sweep = value.parse()?,
                "grid" => cfg.grid = Some(parse_grid(value)?),
                "trials" => cfg.trials = parse_count(key, value)?,
                "out" => cfg.out_dir = PathBuf::from(value),
                "jobs" => cfg.jobs = parse_count(key, value)?,
                _ => return invalid(format!("unknown key `{key}`")),
            }
        }
        cfg.apply(ov);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, ov: &Overrides) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = RunConfig::from_str_with(&text, ov)?;
        cfg.scenario_path = Some(path.to_path_buf());
        Ok(cfg)
    }

    fn apply(&mut self, ov: &Overrides) {
        if let Some(a) = ov.algo {
            self.algo = a;
        }
        if let Some(s) = ov.sweep {
            self.sweep = s;
        }
        if let Some(g) = &ov.grid {
            self.grid = Some(g.clone());
        }
        if let Some(t) = ov.trials {
            self.trials = t;
        }
        if let Some(s) = ov.seed {
            self.seed = s;
        }
        if let Some(o) = &ov.out_dir {
            self.out_dir = o.clone();
        }
        if let Some(j) = ov.jobs {
            self.jobs = j;
        }
        self.scenario.seed = self.seed;
    }

    /// Sweep values to run; a single `0` when there is no sweep.
    pub fn sweep_values(&self) -> Vec<f64> {
        match (self.sweep, &self.grid) {
            (Sweep::None, _) => vec![0.0],
            (_, Some(g)) => g.clone(),
            (s, None) => s.default_grid(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.sweep != Sweep::None && self.grid.as_ref().is_some_and(Vec::is_empty) {
            return invalid("sweep grid is empty");
        }
        for &g in self.grid.iter().flatten() {
            if !g.is_finite() {
                return invalid(format!("grid value {g} is not finite"));
            }
            // dB thresholds may be zero or negative; sizes may not
            if self.sweep == Sweep::RisSize && (g < 1.0 || g.fract() != 0.0) {
                return invalid(format!("RIS size {g} must be a positive integer"));
            }
        }
        for v in self.sweep_values() {
            self.sweep.apply(&self.scenario, v).validate()?;
        }
        self.sre.validate()?;
        self.ao.validate()?;
        Ok(())
    }

    /// Canonical text that reloads to the same configuration.
    pub fn echo(&self) -> String {
        let grid: Vec<String> = self.sweep_values().iter().map(|v| format!("{v:?}")).collect();
        let mut s = self.scenario.to_config_string();
        s.push_str(&format!("algo = {}\n", self.algo));
        s.push_str(&format!("sweep = {}\n", self.sweep));
        if self.sweep != Sweep::None {
            s.push_str(&format!("grid = {}\n", grid.join(", ")));
        }
        s.push_str(&format!("trials = {}\n", self.trials));
        s.push_str(&format!("out = {}\n", self.out_dir.display()));
        s
    }
}
