//! JSON output schemas and atomic file writing (temp file + rename, same
//! directory). Every JSON document carries a `schema_version` field.

use std::io::Write;
use std::path::Path;

use cheshire_core::{FitResult, Measured, Method, Path as BeamPath, ScenarioLabel};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{ConfigMode, RunConfig};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Write `bytes` to `path` atomically: staged in a temp file in the target
/// directory, then renamed over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Pipeline(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct WeakValueRecord {
    pub observable: String,
    pub pre: String,
    pub post: String,
    pub value: JsonComplex,
}

#[derive(Debug, Serialize)]
pub struct PredictedRow {
    pub observable: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct ProductRuleGap {
    pub observable_a: String,
    pub observable_b: String,
    pub value: JsonComplex,
}

/// `weak_values.json`
#[derive(Debug, Serialize)]
pub struct WeakValuesDoc {
    pub schema_version: u32,
    pub post_chi_rad: f64,
    pub weak_values: Vec<WeakValueRecord>,
    pub predicted_table: Vec<PredictedRow>,
    pub product_rule_gap: ProductRuleGap,
}

#[derive(Debug, Serialize)]
pub struct FitDoc {
    pub mean: f64,
    pub mean_sigma: f64,
    pub contrast: f64,
    pub contrast_sigma: f64,
    pub phase_rad: f64,
    pub phase_sigma: f64,
    pub intensity_at_zero: f64,
    pub intensity_at_zero_sigma: f64,
}

impl From<&FitResult> for FitDoc {
    fn from(f: &FitResult) -> Self {
        Self {
            mean: f.mean,
            mean_sigma: f.sigma_mean,
            contrast: f.contrast,
            contrast_sigma: f.sigma_contrast,
            phase_rad: f.phase,
            phase_sigma: f.sigma_phase,
            intensity_at_zero: f.intensity_at_zero,
            intensity_at_zero_sigma: f.sigma_intensity_at_zero,
        }
    }
}

/// `fit_<label>.json`
#[derive(Debug, Serialize)]
pub struct ScanFitDoc {
    pub schema_version: u32,
    pub scenario: ScenarioLabel,
    pub o: FitDoc,
    pub h: FitDoc,
}

/// Config echo embedded in `table1.json` so results are self-describing.
#[derive(Debug, Serialize)]
pub struct ParamsEcho {
    pub transmissivity: f64,
    pub transmissivity_sigma: f64,
    pub alpha_deg: f64,
    pub flux: f64,
    pub dwell: f64,
    pub chi_points: usize,
    pub chi_span: f64,
    pub mode: ConfigMode,
    pub seed: u64,
    pub repetitions: u32,
}

impl ParamsEcho {
    pub fn new(config: &RunConfig, seed: u64) -> Self {
        Self {
            transmissivity: config.transmissivity,
            transmissivity_sigma: config.transmissivity_sigma,
            alpha_deg: config.alpha_deg,
            flux: config.flux,
            dwell: config.dwell,
            chi_points: config.chi_points,
            chi_span: config.chi_span,
            mode: config.mode,
            seed,
            repetitions: config.repetitions,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateRow {
    pub observable: String,
    pub method: Method,
    pub path: BeamPath,
    pub value: f64,
    pub sigma: f64,
    pub theory: f64,
    /// Bias of the linearized extraction on exact analytic data at these
    /// parameters: estimate − theory.
    pub truncation_residue: f64,
}

#[derive(Debug, Serialize)]
pub struct IntensityRow {
    pub scenario: ScenarioLabel,
    pub intensity_at_zero: f64,
    pub sigma: f64,
}

/// `table1.json`
#[derive(Debug, Serialize)]
pub struct Table1Doc {
    pub schema_version: u32,
    pub parameters: ParamsEcho,
    pub intensities_at_zero: Vec<IntensityRow>,
    pub estimates: Vec<EstimateRow>,
}

/// `analysis.json`
#[derive(Debug, Serialize)]
pub struct AnalysisDoc {
    pub schema_version: u32,
    pub scenario: ScenarioLabel,
    pub method: Method,
    pub path: BeamPath,
    pub reference_fit: FitDoc,
    pub target_fit: FitDoc,
    pub value: f64,
    pub sigma: f64,
    pub theory: f64,
    pub truncation_residue: f64,
}

pub fn measured_row(scenario: ScenarioLabel, m: Measured) -> IntensityRow {
    IntensityRow {
        scenario,
        intensity_at_zero: m.value,
        sigma: m.sigma,
    }
}
