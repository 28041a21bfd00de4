//! Simulator and analysis pipeline for spin–path weak measurements in a
//! two-path interferometer.
//!
//! The crate evolves spin ⊗ path states through configurable beamlines,
//! computes weak values under pre/postselection, simulates Poisson counting
//! statistics, fits interference fringes, and extracts weak values from
//! interferograms via the linearized weak-absorption (ABS) and weak-rotation
//! (MAG) formulas.
//!
//! Layering, bottom up:
//! - [`hilbert`]: exact 4-dimensional complex algebra and basis conventions;
//! - [`beamline`]: pre/postselected states and beamline elements;
//! - [`weakvalue`]: weak values and the product-rule gap;
//! - [`stochastics`]: Poisson draws, error propagation, run aggregation;
//! - [`experiment`]: scenarios, detector rates, scans, fringe fits, extraction.
//!
//! The headline separation in six lines: for the standard selection the
//! particle's path weak value vanishes in path I while its spin's does not.
//!
//! ```
//! use cheshire_core::{
//!     path_projector_observable, postselected_state, preselected_state,
//!     spin_path_observable, weak_value, Path,
//! };
//!
//! let (pre, post) = (preselected_state(), postselected_state(0.0));
//! let population = weak_value(&pre, &post, &path_projector_observable(Path::I)).unwrap();
//! let spin = weak_value(&pre, &post, &spin_path_observable(Path::I)).unwrap();
//! assert!(population.norm() <= 1e-12); // no particle in path I...
//! assert!((spin.re - 1.0).abs() <= 1e-12); // ...but its spin is there
//! ```

pub mod beamline;
pub mod experiment;
pub mod hilbert;
pub mod stochastics;
pub mod weakvalue;

pub use beamline::{
    absorber_operator, compose, larmor_operator, phase_shifter_operator, postselected_state,
    preselected_state, BeamlineError, ElementSpec, Path,
};
pub use experiment::{
    extract_population, extract_spin, fit_interferogram, h_port_rate, o_port_rate,
    o_port_rate_unanalyzed, port_rates, run_cheshire_experiment, scan, truncation_residue,
    CheshireRun, ExperimentError, FitError, FitResult, Interferogram, Method, Port, PortIntensity,
    RunParams, SamplePoint, ScanMode, Scenario, ScenarioLabel, ScenarioResult, WeakValueEstimate,
};
pub use hilbert::{
    apply, identity2, inner, sigma_z, spin_state, tensor, Basis, BeamOperator, Mat2, SpinDirection,
    SpinPathState, ALGEBRA_TOL,
};
pub use stochastics::{
    aggregate, draw_poisson, propagate, CountSample, CountingStream, Measured, StochasticsError,
};
pub use weakvalue::{
    cheshire_weak_values, path_projector_observable, predicted_table, product_rule_gap,
    spin_path_observable, weak_value, weak_value_with_threshold, WeakValue, WeakValueError,
    DEFAULT_OVERLAP_THRESHOLD,
};
