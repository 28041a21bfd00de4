//! Run configuration: a single UTF-8 JSON file with exactly these keys;
//! unknown keys are rejected, missing keys fall back to the defaults below.
//! Angles in the config are degrees; everything internal is radians.

use std::path::{Path, PathBuf};

use cheshire_core::{Measured, ScanMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigMode {
    Analytic,
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Absorber transmissivity T.
    pub transmissivity: f64,
    /// 1σ uncertainty on T.
    pub transmissivity_sigma: f64,
    /// Larmor rotation angle in degrees.
    pub alpha_deg: f64,
    /// Incident flux in counts/s. The default makes the reference O-rate
    /// 11.25 counts/s.
    pub flux: f64,
    /// Dwell time per phase point in seconds.
    pub dwell: f64,
    /// Number of phase points (≥ 4).
    pub chi_points: usize,
    /// Total scanned phase range in radians, centered on zero.
    pub chi_span: f64,
    pub mode: ConfigMode,
    pub seed: u64,
    /// Independent pipeline repetitions to aggregate in `table1`.
    pub repetitions: u32,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            transmissivity: 0.79,
            transmissivity_sigma: 0.01,
            alpha_deg: 20.0,
            flux: 45.0,
            dwell: 180.0,
            chi_points: 25,
            chi_span: 2.0 * std::f64::consts::PI,
            mode: ConfigMode::Analytic,
            seed: 42,
            repetitions: 1,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Load from a JSON file, or the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let config = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !(self.transmissivity > 0.0 && self.transmissivity <= 1.0) {
            return fail(format!(
                "transmissivity must lie in (0, 1], got {}",
                self.transmissivity
            ));
        }
        if !(self.transmissivity_sigma >= 0.0 && self.transmissivity_sigma.is_finite()) {
            return fail(format!(
                "transmissivity_sigma must be finite and >= 0, got {}",
                self.transmissivity_sigma
            ));
        }
        if !self.alpha_deg.is_finite() {
            return fail(format!("alpha_deg must be finite, got {}", self.alpha_deg));
        }
        if !(self.flux > 0.0 && self.flux.is_finite()) {
            return fail(format!("flux must be positive, got {}", self.flux));
        }
        if !(self.dwell > 0.0 && self.dwell.is_finite()) {
            return fail(format!("dwell must be positive, got {}", self.dwell));
        }
        if self.chi_points < 4 {
            return fail(format!("chi_points must be >= 4, got {}", self.chi_points));
        }
        if !(self.chi_span > 0.0 && self.chi_span.is_finite()) {
            return fail(format!("chi_span must be positive, got {}", self.chi_span));
        }
        if self.repetitions < 1 {
            return fail("repetitions must be >= 1".to_string());
        }
        Ok(())
    }

    pub fn alpha_rad(&self) -> f64 {
        self.alpha_deg.to_radians()
    }

    pub fn transmissivity_measured(&self) -> Measured {
        Measured::new(self.transmissivity, self.transmissivity_sigma)
    }

    /// Evenly spaced phase grid over `[-chi_span/2, +chi_span/2]`, endpoints
    /// included.
    pub fn chi_grid(&self) -> Vec<f64> {
        let n = self.chi_points;
        let start = -self.chi_span / 2.0;
        let step = self.chi_span / (n - 1) as f64;
        (0..n).map(|k| start + step * k as f64).collect()
    }

    /// Scan mode with an optional seed override from the command line.
    pub fn scan_mode(&self, seed_override: Option<u64>) -> ScanMode {
        match self.mode {
            ConfigMode::Analytic => ScanMode::Analytic,
            ConfigMode::Stochastic => ScanMode::Stochastic {
                seed: seed_override.unwrap_or(self.seed),
            },
        }
    }
}
