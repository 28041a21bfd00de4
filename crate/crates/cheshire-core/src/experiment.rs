//! The five measurement configurations, exact detector intensities,
//! interferogram scans, fringe fitting, and weak-value extraction.
//!
//! Extraction deliberately uses the linearized weak-absorption and
//! weak-rotation formulas even though the simulated intensities are exact;
//! the difference is surfaced as a labeled truncation residue, never hidden.

pub mod fringe;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamline::{
    compose, postselected_state, preselected_state, BeamlineError, ElementSpec, Path,
};
use crate::hilbert::{apply, inner, SpinPathState};
use crate::stochastics::{draw_poisson, propagate, CountingStream, Measured};

pub use fringe::{fit_interferogram, FitError, FitResult, Port};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Beamline(#[from] BeamlineError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("flux must be positive, got {0}")]
    InvalidFlux(f64),
    #[error("dwell must be positive, got {0}")]
    InvalidDwell(f64),
    #[error("chi grid must be non-empty")]
    EmptyChiGrid,
    #[error("chi values must be finite and strictly increasing (sample {index})")]
    NonMonotoneChi { index: usize },
    #[error("counts must be finite and non-negative (sample {index})")]
    InvalidCounts { index: usize },
    #[error("sample dwell must be positive (sample {index})")]
    InvalidSampleDwell { index: usize },
    #[error("reference intensity must be positive, got {0}")]
    InvalidReference(f64),
    #[error(
        "transmissivity must lie in (0, 1) for extraction; T = 1 carries no information (got {0})"
    )]
    UninformativeAbsorber(f64),
    #[error("spin extraction requires a finite, non-zero rotation angle (got {0})")]
    ZeroCoupling(f64),
}

/// The five measured configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioLabel {
    #[serde(rename = "REF")]
    Ref,
    #[serde(rename = "ABS_I")]
    AbsI,
    #[serde(rename = "ABS_II")]
    AbsII,
    #[serde(rename = "MAG_I")]
    MagI,
    #[serde(rename = "MAG_II")]
    MagII,
}

impl ScenarioLabel {
    pub const ALL: [ScenarioLabel; 5] = [
        ScenarioLabel::Ref,
        ScenarioLabel::AbsI,
        ScenarioLabel::AbsII,
        ScenarioLabel::MagI,
        ScenarioLabel::MagII,
    ];

    /// Extraction method this scenario feeds, if any.
    pub fn method(self) -> Option<Method> {
        match self {
            ScenarioLabel::Ref => None,
            ScenarioLabel::AbsI | ScenarioLabel::AbsII => Some(Method::Abs),
            ScenarioLabel::MagI | ScenarioLabel::MagII => Some(Method::Mag),
        }
    }

    /// Probed path, if any.
    pub fn path(self) -> Option<Path> {
        match self {
            ScenarioLabel::Ref => None,
            ScenarioLabel::AbsI | ScenarioLabel::MagI => Some(Path::I),
            ScenarioLabel::AbsII | ScenarioLabel::MagII => Some(Path::II),
        }
    }
}

// Display and FromStr share the serde names so CSV/JSON/CLI all agree.
impl std::fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioLabel::Ref => "REF",
            ScenarioLabel::AbsI => "ABS_I",
            ScenarioLabel::AbsII => "ABS_II",
            ScenarioLabel::MagI => "MAG_I",
            ScenarioLabel::MagII => "MAG_II",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ScenarioLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "REF" => Ok(ScenarioLabel::Ref),
            "ABS_I" => Ok(ScenarioLabel::AbsI),
            "ABS_II" => Ok(ScenarioLabel::AbsII),
            "MAG_I" => Ok(ScenarioLabel::MagI),
            "MAG_II" => Ok(ScenarioLabel::MagII),
            other => Err(format!(
                "unknown scenario '{other}' (expected REF, ABS_I, ABS_II, MAG_I or MAG_II)"
            )),
        }
    }
}

/// A labeled beamline configuration. Constructors keep the label consistent
/// with the element list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    label: ScenarioLabel,
    elements: Vec<ElementSpec>,
}

impl Scenario {
    /// Empty interferometer.
    pub fn reference() -> Self {
        Self {
            label: ScenarioLabel::Ref,
            elements: Vec::new(),
        }
    }

    /// One absorber of transmissivity `t` in `path`.
    pub fn with_absorber(path: Path, transmissivity: f64) -> Result<Self, ExperimentError> {
        let element = ElementSpec::Absorber {
            transmissivity,
            path,
        };
        element.validate()?;
        Ok(Self {
            label: match path {
                Path::I => ScenarioLabel::AbsI,
                Path::II => ScenarioLabel::AbsII,
            },
            elements: vec![element],
        })
    }

    /// One Larmor rotation of angle `alpha` in `path`.
    pub fn with_larmor_probe(path: Path, alpha: f64) -> Result<Self, ExperimentError> {
        let element = ElementSpec::Larmor { alpha, path };
        element.validate()?;
        Ok(Self {
            label: match path {
                Path::I => ScenarioLabel::MagI,
                Path::II => ScenarioLabel::MagII,
            },
            elements: vec![element],
        })
    }

    /// The standard five-scenario set, in `ScenarioLabel::ALL` order.
    pub fn standard_set(transmissivity: f64, alpha: f64) -> Result<Vec<Self>, ExperimentError> {
        Ok(vec![
            Self::reference(),
            Self::with_absorber(Path::I, transmissivity)?,
            Self::with_absorber(Path::II, transmissivity)?,
            Self::with_larmor_probe(Path::I, alpha)?,
            Self::with_larmor_probe(Path::II, alpha)?,
        ])
    }

    pub fn label(&self) -> ScenarioLabel {
        self.label
    }

    pub fn elements(&self) -> &[ElementSpec] {
        &self.elements
    }

    /// Evolve the preselected state through this beamline.
    fn evolved_state(&self) -> SpinPathState {
        let op = compose(&self.elements).expect("scenario elements are validated at construction");
        apply(&op, &preselected_state())
    }
}

/// Exit-port rates at one phase-shifter setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortIntensity {
    pub chi: f64,
    /// Forward port, spin-analyzed and path-postselected (counts/s).
    pub o: f64,
    /// Reflected monitor port, no spin analysis (counts/s).
    pub h: f64,
}

/// Spin-analyzed O-detector rate:
/// `flux · |⟨ψ_f(χ)| U |ψ_i⟩|²` with U the scenario beamline.
pub fn o_port_rate(scenario: &Scenario, chi: f64, flux: f64) -> f64 {
    assert!(flux > 0.0, "flux must be positive");
    let evolved = scenario.evolved_state();
    flux * inner(&postselected_state(chi), &evolved).norm_sqr()
}

/// H-detector rate: spin traced out, path state `(|I⟩ − e^{−iχ}|II⟩)/√2`
/// (the orthogonal complement of the O-port path state).
pub fn h_port_rate(scenario: &Scenario, chi: f64, flux: f64) -> f64 {
    assert!(flux > 0.0, "flux must be positive");
    let amp = scenario.evolved_state().amplitudes();
    let phase = Complex64::from_polar(1.0, chi);
    let up = amp[0] - phase * amp[2];
    let down = amp[1] - phase * amp[3];
    flux * (up.norm_sqr() + down.norm_sqr()) / 2.0
}

/// O-port rate before the spin analyzer (spin traced out). Together with the
/// H rate this accounts for the full transmitted flux.
pub fn o_port_rate_unanalyzed(scenario: &Scenario, chi: f64, flux: f64) -> f64 {
    assert!(flux > 0.0, "flux must be positive");
    let amp = scenario.evolved_state().amplitudes();
    let phase = Complex64::from_polar(1.0, chi);
    let up = amp[0] + phase * amp[2];
    let down = amp[1] + phase * amp[3];
    flux * (up.norm_sqr() + down.norm_sqr()) / 2.0
}

/// Both detector rates at one phase setting.
pub fn port_rates(scenario: &Scenario, chi: f64, flux: f64) -> PortIntensity {
    PortIntensity {
        chi,
        o: o_port_rate(scenario, chi, flux),
        h: h_port_rate(scenario, chi, flux),
    }
}

/// How a scan produces counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanMode {
    /// Store expected counts `rate · dwell` exactly.
    Analytic,
    /// Draw Poisson counts with mean `rate · dwell`, one independent stream
    /// per scan derived from (seed, scenario label).
    Stochastic { seed: u64 },
}

/// One interferogram point: counts at a phase setting over a dwell time.
/// Counts are integers in stochastic mode and non-negative reals in
/// analytic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub chi: f64,
    pub o_counts: f64,
    pub h_counts: f64,
    pub dwell: f64,
}

/// A recorded phase-shifter scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    samples: Vec<SamplePoint>,
    flux_calibration: Option<f64>,
}

impl Interferogram {
    /// Validate and wrap samples: chi strictly increasing and finite, counts
    /// finite and non-negative, dwell positive. `flux_calibration` is `None`
    /// for externally supplied data with unknown incident flux.
    pub fn from_samples(
        samples: Vec<SamplePoint>,
        flux_calibration: Option<f64>,
    ) -> Result<Self, ExperimentError> {
        if samples.is_empty() {
            return Err(ExperimentError::EmptyChiGrid);
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.chi.is_finite() || (i > 0 && s.chi <= samples[i - 1].chi) {
                return Err(ExperimentError::NonMonotoneChi { index: i });
            }
            if !(s.o_counts.is_finite() && s.o_counts >= 0.0)
                || !(s.h_counts.is_finite() && s.h_counts >= 0.0)
            {
                return Err(ExperimentError::InvalidCounts { index: i });
            }
            if !(s.dwell > 0.0 && s.dwell.is_finite()) {
                return Err(ExperimentError::InvalidSampleDwell { index: i });
            }
        }
        Ok(Self {
            samples,
            flux_calibration,
        })
    }

    pub fn samples(&self) -> &[SamplePoint] {
        &self.samples
    }

    pub fn flux_calibration(&self) -> Option<f64> {
        self.flux_calibration
    }
}

/// Record an interferogram over `chi_grid`.
pub fn scan(
    scenario: &Scenario,
    chi_grid: &[f64],
    flux: f64,
    dwell: f64,
    mode: ScanMode,
) -> Result<Interferogram, ExperimentError> {
    if chi_grid.is_empty() {
        return Err(ExperimentError::EmptyChiGrid);
    }
    if !(flux > 0.0 && flux.is_finite()) {
        return Err(ExperimentError::InvalidFlux(flux));
    }
    if !(dwell > 0.0 && dwell.is_finite()) {
        return Err(ExperimentError::InvalidDwell(dwell));
    }
    let mut stream = match mode {
        ScanMode::Analytic => None,
        ScanMode::Stochastic { seed } => {
            Some(CountingStream::new(seed, &scenario.label().to_string()))
        }
    };
    let mut samples = Vec::with_capacity(chi_grid.len());
    for &chi in chi_grid {
        if !chi.is_finite() {
            return Err(ExperimentError::NonMonotoneChi {
                index: samples.len(),
            });
        }
        let rates = port_rates(scenario, chi, flux);
        let (o_counts, h_counts) = match stream.as_mut() {
            None => (rates.o * dwell, rates.h * dwell),
            Some(s) => (
                draw_poisson(rates.o * dwell, s) as f64,
                draw_poisson(rates.h * dwell, s) as f64,
            ),
        };
        samples.push(SamplePoint {
            chi,
            o_counts,
            h_counts,
            dwell,
        });
    }
    Interferogram::from_samples(samples, Some(flux))
}

/// Which linearized formula produced a weak-value estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ABS")]
    Abs,
    #[serde(rename = "MAG")]
    Mag,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Abs => write!(f, "ABS"),
            Method::Mag => write!(f, "MAG"),
        }
    }
}

/// An extracted weak value: `⟨Π_path⟩_w` for ABS, `|⟨σ_z Π_path⟩_w|²` for MAG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValueEstimate {
    pub value: f64,
    pub sigma: f64,
    pub method: Method,
    pub path: Path,
}

/// Population extraction from absorber data:
/// `⟨Π⟩_w ≈ (1 − I_abs/I_ref) / (2(1 − √T))`, uncertainty by first-order
/// propagation over the three independent inputs.
pub fn extract_population(
    i_ref: Measured,
    i_abs: Measured,
    transmissivity: Measured,
    path: Path,
) -> Result<WeakValueEstimate, ExperimentError> {
    if !(i_ref.value > 0.0) {
        return Err(ExperimentError::InvalidReference(i_ref.value));
    }
    let t = transmissivity.value;
    if !(t > 0.0 && t < 1.0) {
        return Err(ExperimentError::UninformativeAbsorber(t));
    }
    let m = propagate(
        |x| (1.0 - x[1] / x[0]) / (2.0 * (1.0 - x[2].sqrt())),
        &[i_ref, i_abs, transmissivity],
    );
    Ok(WeakValueEstimate {
        value: m.value,
        sigma: m.sigma,
        method: Method::Abs,
        path,
    })
}

/// Spin-presence extraction from Larmor data, estimating `|⟨σ_z Π_path⟩_w|²`:
/// path I uses `(I_mag/I_ref − 1)·4/α²`, path II adds the `α²/4` population
/// term before rescaling.
pub fn extract_spin(
    i_ref: Measured,
    i_mag: Measured,
    alpha: f64,
    path: Path,
) -> Result<WeakValueEstimate, ExperimentError> {
    if !(i_ref.value > 0.0) {
        return Err(ExperimentError::InvalidReference(i_ref.value));
    }
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(ExperimentError::ZeroCoupling(alpha));
    }
    let scale = 4.0 / (alpha * alpha);
    let offset = match path {
        Path::I => 0.0,
        Path::II => alpha * alpha / 4.0,
    };
    let m = propagate(|x| (x[1] / x[0] - 1.0 + offset) * scale, &[i_ref, i_mag]);
    Ok(WeakValueEstimate {
        value: m.value,
        sigma: m.sigma,
        method: Method::Mag,
        path,
    })
}

/// The documented bias of the linearized extraction on exact analytic data:
/// analytic-mode estimate minus theory value, in closed form.
pub fn truncation_residue(method: Method, path: Path, transmissivity: f64, alpha: f64) -> f64 {
    match (method, path) {
        // Path I sees no absorption at all, so the linearized formula is exact.
        (Method::Abs, Path::I) => 0.0,
        (Method::Abs, Path::II) => {
            (1.0 - transmissivity) / (2.0 * (1.0 - transmissivity.sqrt())) - 1.0
        }
        (Method::Mag, Path::I) => {
            let s = (alpha / 2.0).sin();
            4.0 * s * s / (alpha * alpha) - 1.0
        }
        (Method::Mag, Path::II) => {
            let c = (alpha / 2.0).cos();
            (c * c - 1.0 + alpha * alpha / 4.0) * 4.0 / (alpha * alpha)
        }
    }
}

/// Inputs for one full five-scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub transmissivity: Measured,
    pub alpha: f64,
    pub flux: f64,
    pub dwell: f64,
    pub chi_grid: Vec<f64>,
    pub mode: ScanMode,
}

/// Scan plus fits for one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub label: ScenarioLabel,
    pub interferogram: Interferogram,
    pub o_fit: FitResult,
    pub h_fit: FitResult,
}

/// Everything one run produces: the five fitted scans, the four extracted
/// weak values, the theory values, and the truncation residues of the
/// linearized extraction.
#[derive(Debug, Clone)]
pub struct CheshireRun {
    pub scenarios: Vec<ScenarioResult>,
    /// Order: ⟨Π_I⟩_w, ⟨Π_II⟩_w, |⟨σ_zΠ_I⟩_w|², |⟨σ_zΠ_II⟩_w|².
    pub estimates: [WeakValueEstimate; 4],
    pub theory: [f64; 4],
    pub truncation_residues: [f64; 4],
}

/// Scan all five scenarios, fit each interferogram, and extract the four
/// weak values from the fitted χ = 0 intensities.
pub fn run_cheshire_experiment(params: &RunParams) -> Result<CheshireRun, ExperimentError> {
    let t = params.transmissivity.value;
    if !(t > 0.0 && t < 1.0) {
        return Err(ExperimentError::UninformativeAbsorber(t));
    }
    if params.alpha == 0.0 || !params.alpha.is_finite() {
        return Err(ExperimentError::ZeroCoupling(params.alpha));
    }

    let mut scenarios = Vec::with_capacity(5);
    for scenario in Scenario::standard_set(t, params.alpha)? {
        let interferogram = scan(
            &scenario,
            &params.chi_grid,
            params.flux,
            params.dwell,
            params.mode,
        )?;
        let o_fit = fit_interferogram(&interferogram, Port::O)?;
        let h_fit = fit_interferogram(&interferogram, Port::H)?;
        scenarios.push(ScenarioResult {
            label: scenario.label(),
            interferogram,
            o_fit,
            h_fit,
        });
    }

    let i0 = |label: ScenarioLabel| -> Measured {
        let r = scenarios
            .iter()
            .find(|r| r.label == label)
            .expect("standard set covers all labels");
        Measured::new(r.o_fit.intensity_at_zero, r.o_fit.sigma_intensity_at_zero)
    };
    let i_ref = i0(ScenarioLabel::Ref);

    let estimates = [
        extract_population(
            i_ref,
            i0(ScenarioLabel::AbsI),
            params.transmissivity,
            Path::I,
        )?,
        extract_population(
            i_ref,
            i0(ScenarioLabel::AbsII),
            params.transmissivity,
            Path::II,
        )?,
        extract_spin(i_ref, i0(ScenarioLabel::MagI), params.alpha, Path::I)?,
        extract_spin(i_ref, i0(ScenarioLabel::MagII), params.alpha, Path::II)?,
    ];
    let theory = [0.0, 1.0, 1.0, 0.0];
    let truncation_residues = [
        truncation_residue(Method::Abs, Path::I, t, params.alpha),
        truncation_residue(Method::Abs, Path::II, t, params.alpha),
        truncation_residue(Method::Mag, Path::I, t, params.alpha),
        truncation_residue(Method::Mag, Path::II, t, params.alpha),
    ];

    Ok(CheshireRun {
        scenarios,
        estimates,
        theory,
        truncation_residues,
    })
}
