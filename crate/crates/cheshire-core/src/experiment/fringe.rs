//! Weighted least-squares fitting of single-harmonic interference fringes.
//!
//! The model is `rate(χ) = mean · (1 + contrast · cos(χ + phase))`, fitted in
//! the linear parameterization `mean + a·cosχ + b·sinχ` with Poisson weights
//! (σ² = counts, floored at one count), then transformed back. Contrast is
//! kept non-negative by folding its sign into the phase.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Interferogram;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("fringe fit needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("chi span {0:.6} rad covers less than half a fringe period")]
    SpanTooNarrow(f64),
    #[error("normal equations are singular: unusable data")]
    Singular,
    #[error("fitted mean rate {0} is not positive: unusable data")]
    NonPositiveMean(f64),
}

/// Which detector column of an interferogram to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Port {
    O,
    H,
}

/// Fitted fringe parameters, all rates in counts/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub mean: f64,
    /// Fringe visibility, ≥ 0.
    pub contrast: f64,
    /// Phase offset in radians: the fitted fringe is `cos(χ + phase)`.
    pub phase: f64,
    /// The fitted rate at χ = 0: `mean · (1 + contrast·cos(phase))`.
    pub intensity_at_zero: f64,
    pub sigma_mean: f64,
    pub sigma_contrast: f64,
    pub sigma_phase: f64,
    pub sigma_intensity_at_zero: f64,
    /// Covariance matrix over (mean, contrast, phase).
    pub covariance: [[f64; 3]; 3],
}

/// Fit one detector column of an interferogram.
pub fn fit_interferogram(g: &Interferogram, port: Port) -> Result<FitResult, FitError> {
    let samples = g.samples();
    if samples.len() < 4 {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    let span = samples.last().unwrap().chi - samples.first().unwrap().chi;
    if span + 1e-9 < std::f64::consts::PI {
        return Err(FitError::SpanTooNarrow(span));
    }

    // Weighted normal equations for theta = (m, a, b) over basis (1, cos, sin).
    let mut g3 = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for s in samples {
        let counts = match port {
            Port::O => s.o_counts,
            Port::H => s.h_counts,
        };
        let y = counts / s.dwell;
        let sigma = counts.max(1.0).sqrt() / s.dwell;
        let w = 1.0 / (sigma * sigma);
        let row = [1.0, s.chi.cos(), s.chi.sin()];
        for r in 0..3 {
            for c in 0..3 {
                g3[r][c] += w * row[r] * row[c];
            }
            rhs[r] += w * row[r] * y;
        }
    }

    let cov_lin = invert3(&g3).ok_or(FitError::Singular)?;
    let theta = mat_vec3(&cov_lin, &rhs);
    let (m, a, b) = (theta[0], theta[1], theta[2]);
    if !(m > 0.0) {
        return Err(FitError::NonPositiveMean(m));
    }

    let r = a.hypot(b);
    let (contrast, phase, jac) = if r == 0.0 {
        // Exactly zero modulation: phase is unconstrained. Report zero
        // contrast with a symmetric amplitude bound and maximal phase sigma.
        let j = [[1.0, 0.0, 0.0], [0.0, 1.0 / m, 1.0 / m], [0.0, 0.0, 0.0]];
        (0.0, 0.0, j)
    } else {
        // contrast = r/m, phase = -atan2(b, a).
        let j = [
            [1.0, 0.0, 0.0],
            [-r / (m * m), a / (r * m), b / (r * m)],
            [0.0, b / (r * r), -a / (r * r)],
        ];
        (r / m, -b.atan2(a), j)
    };

    // Delta method: C_out = J C J^T over (mean, contrast, phase).
    let mut covariance = [[0.0_f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    acc += jac[i][p] * cov_lin[p][q] * jac[j][q];
                }
            }
            covariance[i][j] = acc;
        }
    }

    let intensity_at_zero = m + a;
    let var_i0 = cov_lin[0][0] + cov_lin[1][1] + 2.0 * cov_lin[0][1];
    // Beyond pi the phase uncertainty carries no information.
    let sigma_phase = if r == 0.0 {
        std::f64::consts::PI
    } else {
        covariance[2][2].max(0.0).sqrt().min(std::f64::consts::PI)
    };

    Ok(FitResult {
        mean: m,
        contrast,
        phase,
        intensity_at_zero,
        sigma_mean: covariance[0][0].max(0.0).sqrt(),
        sigma_contrast: covariance[1][1].max(0.0).sqrt(),
        sigma_phase,
        sigma_intensity_at_zero: var_i0.max(0.0).sqrt(),
        covariance,
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale: f64 = m
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .product();
    if !det.is_finite() || det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0_f64; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            // Cofactor expansion, transposed.
            let r1 = (r + 1) % 3;
            let r2 = (r + 2) % 3;
            let c1 = (c + 1) % 3;
            let c2 = (c + 2) % 3;
            out[c][r] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) * inv_det;
        }
    }
    Some(out)
}

fn mat_vec3(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0_f64; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r] += m[r][c] * v[c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamline::Path;
    use crate::experiment::{scan, SamplePoint, ScanMode, Scenario};

    fn grid25() -> Vec<f64> {
        (0..25)
            .map(|k| -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 12.0)
            .collect()
    }

    #[test]
    fn flat_reference_fit() {
        let g = scan(
            &Scenario::reference(),
            &grid25(),
            45.0,
            180.0,
            ScanMode::Analytic,
        )
        .unwrap();
        let fit = fit_interferogram(&g, Port::O).unwrap();
        assert!(fit.contrast <= 1e-10);
        assert!((fit.intensity_at_zero - 45.0 / 4.0).abs() <= 1e-9);
        assert!((fit.mean - 45.0 / 4.0).abs() <= 1e-9);
    }

    #[test]
    fn larmor_path_i_fringe_parameters() {
        // O-port fringe proportional to +sin(chi): contrast 2s/(1+s^2),
        // phase -pi/2, chi=0 intensity ratio 1 + s^2.
        let alpha = 20.0_f64.to_radians();
        let s = (alpha / 2.0).sin();
        let sc = Scenario::with_larmor_probe(Path::I, alpha).unwrap();
        let g = scan(&sc, &grid25(), 45.0, 180.0, ScanMode::Analytic).unwrap();
        let fit = fit_interferogram(&g, Port::O).unwrap();

        let expected_contrast = 2.0 * s / (1.0 + s * s);
        assert!((fit.contrast - expected_contrast).abs() <= 1e-9);
        assert!((fit.contrast - 0.3371306231658866).abs() <= 1e-9);
        assert!((fit.phase + std::f64::consts::FRAC_PI_2).abs() <= 1e-9);

        let reference = 45.0 / 4.0;
        assert!((fit.intensity_at_zero / reference - (1.0 + s * s)).abs() <= 1e-9);
        assert!((fit.intensity_at_zero / reference - 1.0301536896070458).abs() <= 1e-9);
    }

    #[test]
    fn fit_consistency_on_analytic_data() {
        // Fitted chi=0 intensity equals the direct chi=0 rate to 1e-9 relative
        // for every scenario and port.
        let alpha = 20.0_f64.to_radians();
        for sc in Scenario::standard_set(0.79, alpha).unwrap() {
            let g = scan(&sc, &grid25(), 45.0, 180.0, ScanMode::Analytic).unwrap();
            for (port, direct) in [
                (Port::O, crate::experiment::o_port_rate(&sc, 0.0, 45.0)),
                (Port::H, crate::experiment::h_port_rate(&sc, 0.0, 45.0)),
            ] {
                let fit = fit_interferogram(&g, port).unwrap();
                assert!(
                    ((fit.intensity_at_zero - direct) / direct).abs() <= 1e-9,
                    "{}: {:?}",
                    sc.label(),
                    port
                );
            }
        }
    }

    #[test]
    fn stochastic_reference_contrast_stays_small() {
        // Total counts >= 1e6: fitted empty-interferometer contrast <= 0.01.
        let flux = 45.0;
        let dwell = 4.2e4 / (flux / 4.0); // ~4.2e4 O counts per point, 25 points
        let g = scan(
            &Scenario::reference(),
            &grid25(),
            flux,
            dwell,
            ScanMode::Stochastic { seed: 20_26 },
        )
        .unwrap();
        let total: f64 = g.samples().iter().map(|p| p.o_counts).sum();
        assert!(total >= 1.0e6);
        let fit = fit_interferogram(&g, Port::O).unwrap();
        assert!(fit.contrast <= 0.01, "contrast={}", fit.contrast);
    }

    #[test]
    fn intensity_at_zero_identity_holds() {
        let alpha = 0.7;
        let sc = Scenario::with_larmor_probe(Path::II, alpha).unwrap();
        let g = scan(
            &sc,
            &grid25(),
            45.0,
            300.0,
            ScanMode::Stochastic { seed: 5 },
        )
        .unwrap();
        for port in [Port::O, Port::H] {
            let fit = fit_interferogram(&g, port).unwrap();
            let reconstructed = fit.mean * (1.0 + fit.contrast * fit.phase.cos());
            assert!((fit.intensity_at_zero - reconstructed).abs() <= 1e-9 * fit.mean);
            assert!(fit.contrast >= 0.0);
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let three: Vec<SamplePoint> = (0..3)
            .map(|k| SamplePoint {
                chi: k as f64,
                o_counts: 5.0,
                h_counts: 5.0,
                dwell: 1.0,
            })
            .collect();
        let g = Interferogram::from_samples(three, None).unwrap();
        assert_eq!(
            fit_interferogram(&g, Port::O).unwrap_err(),
            FitError::TooFewSamples(3)
        );

        let narrow: Vec<SamplePoint> = (0..5)
            .map(|k| SamplePoint {
                chi: 0.2 * k as f64,
                o_counts: 5.0,
                h_counts: 5.0,
                dwell: 1.0,
            })
            .collect();
        let g = Interferogram::from_samples(narrow, None).unwrap();
        assert!(matches!(
            fit_interferogram(&g, Port::O).unwrap_err(),
            FitError::SpanTooNarrow(_)
        ));

        // All-zero counts: the fitted mean collapses to zero, unusable.
        let zeros: Vec<SamplePoint> = (0..8)
            .map(|k| SamplePoint {
                chi: k as f64,
                o_counts: 0.0,
                h_counts: 0.0,
                dwell: 1.0,
            })
            .collect();
        let g = Interferogram::from_samples(zeros, None).unwrap();
        assert!(matches!(
            fit_interferogram(&g, Port::O).unwrap_err(),
            FitError::NonPositiveMean(_)
        ));
    }

    #[test]
    fn invert3_rejects_singular_matrix() {
        let singular = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(invert3(&singular).is_none());
        let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let inv = invert3(&identity).unwrap();
        assert_eq!(inv, identity);
    }
}
