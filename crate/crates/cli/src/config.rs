//! Flat `key = value` run configuration.
//!
//! A config file holds one `key = value` pair per line; `#` starts a comment
//! (full-line or trailing) and blank lines are ignored. Every key has a
//! documented default, and command-line flags override file values, so a
//! file and its equivalent flags produce identical runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Failures split by exit code: invalid configuration (2) versus a failure
/// inside a computation stage (3), tagged with the stage for diagnosis.
#[derive(Debug)]
pub enum CliError {
    /// The request itself is invalid: bad flag value, bad config file,
    /// impossible geometry.
    Config(String),
    /// A stage of the computation failed (numerical or I/O).
    Stage {
        /// Pipeline stage that failed (`orbit`, `prc`, `response`, `map`,
        /// `analysis`, `population`, `io`).
        stage: &'static str,
        /// Underlying failure.
        message: String,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Stage { .. } => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Stage { stage, message } => {
                write!(f, "failure in stage `{stage}`: {message}")
            }
        }
    }
}

/// Tag a core error with the pipeline stage it came from.
pub fn stage<E: fmt::Display>(name: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Stage {
        stage: name,
        message: e.to_string(),
    }
}

/// Every key a config file may set, with its meaning documented in the
/// README. Unknown keys are rejected so typos cannot silently fall back to
/// defaults.
pub const KNOWN_KEYS: &[&str] = &[
    "model",        // hh | thalamic
    "out",          // output directory
    "order",        // Fourier order of the stored sensitivity curve
    "points",       // dense-curve sample count
    "grid",         // fixed-point scan grid size
    "u_max",        // primary pulse amplitude, uA/cm^2
    "p_ms",         // positive pulse phase width, ms
    "lambda",       // rebound stretch factor (rebound amplitude -u_max/lambda)
    "u2_max",       // secondary pulse amplitude, uA/cm^2
    "alt",          // use the two-pulse (alternating) train
    "tau2_frac",    // secondary pulse offset as a fraction of the period
    "freq_hz",      // single-run stimulation frequency, Hz
    "freqs",        // explicit comma-separated sweep frequencies, Hz
    "freq_start",   // sweep grid start, Hz
    "freq_stop",    // sweep grid stop (inclusive), Hz
    "freq_step",    // sweep grid step, Hz
    "n",            // map iterate to analyse
    "periods",      // stimulation cycles to apply
    "count",        // neurons in the population
    "distribution", // uniform | von_mises
    "kappa",        // von Mises concentration
    "center",       // von Mises center, rad
    "epsilon",      // cluster chain tolerance, rad
    "dt",           // population ODE step, ms
    "record_stride",// trace rows: one per this many steps
    "by_map",       // simulate by map iteration instead of the phase ODE
    "tau2_lo",      // split-timing scan range start, fraction of the period
    "tau2_hi",      // split-timing scan range end, fraction of the period
    "jobs",         // sweep parallelism bound
];

/// Parsed config file: raw string values by key.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    /// An empty configuration (no file given): every lookup falls through to
    /// flag or default.
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {}: expected `key = value`, got `{}`",
                    lineno + 1,
                    line
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::config(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::config(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(FileConfig { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "lookup of undocumented key {key}");
        self.values.get(key).map(String::as_str)
    }

    /// Resolve with precedence: explicit flag, then file value, then default.
    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::config(format!("key `{key}`: `{s}` is not a number"))),
            None => Ok(default),
        }
    }

    pub fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(s) => s.parse().map_err(|_| {
                CliError::config(format!("key `{key}`: `{s}` is not a non-negative integer"))
            }),
            None => Ok(default),
        }
    }

    pub fn usize_opt(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(s) => s.parse().map(Some).map_err(|_| {
                CliError::config(format!("key `{key}`: `{s}` is not a non-negative integer"))
            }),
            None => Ok(None),
        }
    }

    pub fn u32(&self, flag: Option<u32>, key: &str, default: u32) -> Result<u32, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(s) => s.parse().map_err(|_| {
                CliError::config(format!("key `{key}`: `{s}` is not a non-negative integer"))
            }),
            None => Ok(default),
        }
    }

    pub fn string(&self, flag: Option<String>, key: &str, default: &str) -> Result<String, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key).unwrap_or(default).to_string())
    }

    pub fn string_opt(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.get(key).map(str::to_string))
    }

    /// A boolean flag can only assert true on the command line; the file may
    /// set `true`/`false` (also `1`/`0`, `yes`/`no`).
    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.get(key) {
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(CliError::config(format!(
                    "key `{key}`: `{other}` is not a boolean"
                ))),
            },
            None => Ok(false),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str, default: &str) -> Result<PathBuf, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self
            .get(key)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(default)))
    }
}
