//! Run configuration: tolerances, degrees, sampling densities, output paths.

use std::path::PathBuf;

use crate::error::{Error, Result};

/// How strictly the final curve degree is controlled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityPolicy {
    /// Keep every harmonic.
    All,
    /// Drop odd harmonics (useful when the target is known to be even).
    EvenOnly,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Residual tolerance for Legendrian / tangency verification.
    pub tolerance: f64,
    /// Periodicity tolerance for the area integral of the assembled curve.
    pub periodicity_tol: f64,
    /// Starting Fourier truncation degree for curve projection.
    pub initial_degree: usize,
    /// Hard cap for the degree-escalation loop.
    pub degree_cap: usize,
    /// Oversampling factor for Fourier projection.
    pub oversample: usize,
    /// Uniform sample count for crossing detection.
    pub crossing_samples: usize,
    pub parity: ParityPolicy,
    /// Times at which field-line evolution frames are produced.
    pub times: Vec<f64>,
    /// Sample count along evolved curves.
    pub evolve_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerance: 1e-9,
            periodicity_tol: 1e-10,
            initial_degree: 64,
            degree_cap: 1024,
            oversample: 8,
            crossing_samples: 16384,
            parity: ParityPolicy::All,
            times: vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 100.0, 1e6],
            evolve_samples: 512,
            seed: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Parse `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {}", lineno + 1, e)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("bad value `{v}`"))
        }
        match key {
            "tolerance" => self.tolerance = num(value)?,
            "periodicity_tol" => self.periodicity_tol = num(value)?,
            "initial_degree" => self.initial_degree = num(value)?,
            "degree_cap" => self.degree_cap = num(value)?,
            "oversample" => self.oversample = num(value)?,
            "crossing_samples" => self.crossing_samples = num(value)?,
            "evolve_samples" => self.evolve_samples = num(value)?,
            "seed" => self.seed = num(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "parity" => {
                self.parity = match value {
                    "all" => ParityPolicy::All,
                    "even" => ParityPolicy::EvenOnly,
                    _ => return Err(format!("parity must be `all` or `even`, got `{value}`")),
                }
            }
            "times" => {
                self.times = value
                    .split(',')
                    .map(|s| num(s.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerance <= 0.0 || self.periodicity_tol <= 0.0 {
            return Err(Error::Parse("tolerances must be positive".into()));
        }
        if self.initial_degree == 0 || self.degree_cap < self.initial_degree {
            return Err(Error::Parse(
                "need 0 < initial_degree <= degree_cap".into(),
            ));
        }
        if self.oversample < 2 {
            return Err(Error::Parse("oversample must be at least 2".into()));
        }
        if self.crossing_samples < 64 {
            return Err(Error::Parse("crossing_samples too small".into()));
        }
        Ok(())
    }
}
