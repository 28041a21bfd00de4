//! Weak values under pre- and postselection, and the product-rule violation
//! that separates the particle's path from its spin's path.

use num_complex::Complex64;
use thiserror::Error;

use crate::beamline::{postselected_state, preselected_state, Path};
use crate::hilbert::{apply, identity2, inner, sigma_z, tensor, BeamOperator, SpinPathState};

/// Default lower bound on |⟨post|pre⟩| below which a weak value is treated as
/// undefined (the postselection never succeeds and the quotient diverges).
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum WeakValueError {
    #[error("pre/post overlap magnitude {overlap:.3e} is at or below the threshold {threshold:.3e}: weak value undefined")]
    OrthogonalSelection { overlap: f64, threshold: f64 },
}

/// A computed weak value together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue {
    pub value: Complex64,
    pub observable_label: String,
    pub pre_label: String,
    pub post_label: String,
}

/// The weak value `⟨post|obs|pre⟩ / ⟨post|pre⟩` with the default overlap threshold.
pub fn weak_value(
    pre: &SpinPathState,
    post: &SpinPathState,
    obs: &BeamOperator,
) -> Result<Complex64, WeakValueError> {
    weak_value_with_threshold(pre, post, obs, DEFAULT_OVERLAP_THRESHOLD)
}

/// The weak value with an explicit overlap threshold.
pub fn weak_value_with_threshold(
    pre: &SpinPathState,
    post: &SpinPathState,
    obs: &BeamOperator,
    overlap_threshold: f64,
) -> Result<Complex64, WeakValueError> {
    let denom = inner(post, pre);
    if denom.norm() <= overlap_threshold {
        return Err(WeakValueError::OrthogonalSelection {
            overlap: denom.norm(),
            threshold: overlap_threshold,
        });
    }
    Ok(inner(post, &apply(obs, pre)) / denom)
}

/// `⟨A·B⟩_w − ⟨A⟩_w · ⟨B⟩_w`: zero would mean the product rule held.
pub fn product_rule_gap(
    pre: &SpinPathState,
    post: &SpinPathState,
    obs_a: &BeamOperator,
    obs_b: &BeamOperator,
) -> Result<Complex64, WeakValueError> {
    let wa = weak_value(pre, post, obs_a)?;
    let wb = weak_value(pre, post, obs_b)?;
    let wab = weak_value(pre, post, &obs_a.matmul(obs_b))?;
    Ok(wab - wa * wb)
}

/// Observables of the four headline measurements.
pub fn path_projector_observable(path: Path) -> BeamOperator {
    tensor(identity2(), path.projector())
}

/// `σ_z Π_path`: spin presence in one path.
pub fn spin_path_observable(path: Path) -> BeamOperator {
    tensor(sigma_z(), path.projector())
}

/// Theory predictions for the standard selection, in reporting form:
/// plain weak values for the path populations, squared magnitudes for the
/// spin-path observables.
pub fn predicted_table() -> Vec<(String, f64)> {
    vec![
        ("<Pi_I>_w".to_string(), 0.0),
        ("<Pi_II>_w".to_string(), 1.0),
        ("|<sigma_z Pi_I>_w|^2".to_string(), 1.0),
        ("|<sigma_z Pi_II>_w|^2".to_string(), 0.0),
    ]
}

/// The four headline weak values for the standard preselection and the
/// postselection at relative phase `chi`, as labeled records.
pub fn cheshire_weak_values(chi: f64) -> Vec<WeakValue> {
    let pre = preselected_state();
    let post = postselected_state(chi);
    let post_label = format!("postselected(chi={chi})");
    let observables = [
        ("<Pi_I>_w", path_projector_observable(Path::I)),
        ("<Pi_II>_w", path_projector_observable(Path::II)),
        ("<sigma_z Pi_I>_w", spin_path_observable(Path::I)),
        ("<sigma_z Pi_II>_w", spin_path_observable(Path::II)),
    ];
    observables
        .into_iter()
        .map(|(label, obs)| WeakValue {
            value: weak_value(&pre, &post, &obs)
                .expect("standard selection has overlap 1/2 for every chi"),
            observable_label: label.to_string(),
            pre_label: "preselected".to_string(),
            post_label: post_label.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ALGEBRA_TOL;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn selection() -> (SpinPathState, SpinPathState) {
        (preselected_state(), postselected_state(0.0))
    }

    #[test]
    fn headline_weak_values() {
        let (pre, post) = selection();
        let cases = [
            (path_projector_observable(Path::I), c(0.0, 0.0)),
            (path_projector_observable(Path::II), c(1.0, 0.0)),
            (spin_path_observable(Path::I), c(1.0, 0.0)),
            (spin_path_observable(Path::II), c(0.0, 0.0)),
            (BeamOperator::identity(), c(1.0, 0.0)),
        ];
        for (obs, expected) in cases {
            let w = weak_value(&pre, &post, &obs).unwrap();
            assert!((w - expected).norm() <= ALGEBRA_TOL, "{w} != {expected}");
        }
    }

    #[test]
    fn imaginary_parts_vanish_for_standard_selection() {
        let (pre, post) = selection();
        for obs in [
            path_projector_observable(Path::I),
            path_projector_observable(Path::II),
            spin_path_observable(Path::I),
            spin_path_observable(Path::II),
        ] {
            assert!(weak_value(&pre, &post, &obs).unwrap().im.abs() <= ALGEBRA_TOL);
        }
    }

    #[test]
    fn orthogonal_selection_is_rejected() {
        let up_i = SpinPathState::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let down_i = SpinPathState::new([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let err = weak_value(&up_i, &down_i, &BeamOperator::identity()).unwrap_err();
        assert!(matches!(err, WeakValueError::OrthogonalSelection { .. }));
    }

    #[test]
    fn threshold_is_configurable() {
        // Overlap 0.5 passes the default threshold but not an absurdly large one.
        let (pre, post) = selection();
        let obs = BeamOperator::identity();
        assert!(weak_value_with_threshold(&pre, &post, &obs, 0.6).is_err());
        assert!(weak_value_with_threshold(&pre, &post, &obs, 0.4).is_ok());
    }

    #[test]
    fn product_rule_gap_for_spin_on_path_ii() {
        // <sigma_z>_w = 1 (sum of the two spin-path weak values), <Pi_II>_w = 1,
        // but <sigma_z Pi_II>_w = 0, so the gap is 0 - 1*1 = -1.
        let (pre, post) = selection();
        let a = tensor(sigma_z(), identity2());
        let b = path_projector_observable(Path::II);
        let gap = product_rule_gap(&pre, &post, &a, &b).unwrap();
        assert!((gap - c(-1.0, 0.0)).norm() <= ALGEBRA_TOL);
    }

    #[test]
    fn product_rule_gap_trivial_cases() {
        let (pre, post) = selection();
        let id = BeamOperator::identity();
        let gap = product_rule_gap(&pre, &post, &id, &id).unwrap();
        assert!(gap.norm() <= ALGEBRA_TOL);

        // Idempotent projector on the same path: both terms vanish here.
        let p = path_projector_observable(Path::I);
        let gap = product_rule_gap(&pre, &post, &p, &p).unwrap();
        assert!(gap.norm() <= ALGEBRA_TOL);
    }

    #[test]
    fn predicted_table_matches_computed_values() {
        let table = predicted_table();
        assert_eq!(table.len(), 4);
        let (pre, post) = selection();
        let computed = [
            weak_value(&pre, &post, &path_projector_observable(Path::I))
                .unwrap()
                .re,
            weak_value(&pre, &post, &path_projector_observable(Path::II))
                .unwrap()
                .re,
            weak_value(&pre, &post, &spin_path_observable(Path::I))
                .unwrap()
                .norm_sqr(),
            weak_value(&pre, &post, &spin_path_observable(Path::II))
                .unwrap()
                .norm_sqr(),
        ];
        for ((_, predicted), got) in table.iter().zip(computed) {
            assert!((predicted - got).abs() <= ALGEBRA_TOL);
        }
        assert!((table[2].1 - 1.0).abs() <= ALGEBRA_TOL);
    }

    #[test]
    fn labeled_records_carry_provenance() {
        let records = cheshire_weak_values(0.0);
        assert_eq!(records.len(), 4);
        assert_eq!(records[0].observable_label, "<Pi_I>_w");
        assert_eq!(records[0].pre_label, "preselected");
        assert!((records[1].value - c(1.0, 0.0)).norm() <= ALGEBRA_TOL);
    }

    fn random_state(xs: &[f64]) -> SpinPathState {
        SpinPathState::new([
            c(xs[0], xs[1]),
            c(xs[2], xs[3]),
            c(xs[4], xs[5]),
            c(xs[6], xs[7]),
        ])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Path-projector completeness: <Pi_I>_w + <Pi_II>_w = 1 whenever the
        /// overlap is healthy.
        #[test]
        fn path_sum_rule(xs in proptest::array::uniform16(-1.0f64..1.0)) {
            let pre = random_state(&xs[..8]);
            let post = random_state(&xs[8..]);
            prop_assume!(inner(&post, &pre).norm() > 1e-3);
            let a = weak_value(&pre, &post, &path_projector_observable(Path::I)).unwrap();
            let b = weak_value(&pre, &post, &path_projector_observable(Path::II)).unwrap();
            prop_assert!((a + b - c(1.0, 0.0)).norm() <= 1e-9);
        }

        /// Spin-path sum rule: the two spin-path weak values add to <sigma_z x id>_w.
        #[test]
        fn spin_path_sum_rule(xs in proptest::array::uniform16(-1.0f64..1.0)) {
            let pre = random_state(&xs[..8]);
            let post = random_state(&xs[8..]);
            prop_assume!(inner(&post, &pre).norm() > 1e-3);
            let a = weak_value(&pre, &post, &spin_path_observable(Path::I)).unwrap();
            let b = weak_value(&pre, &post, &spin_path_observable(Path::II)).unwrap();
            let total = weak_value(&pre, &post, &tensor(sigma_z(), identity2())).unwrap();
            prop_assert!((a + b - total).norm() <= 1e-9);
        }

        /// Linearity in the observable.
        #[test]
        fn linearity(
            xs in proptest::array::uniform16(-1.0f64..1.0),
            coeffs in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let pre = random_state(&xs[..8]);
            let post = random_state(&xs[8..]);
            prop_assume!(inner(&post, &pre).norm() > 1e-3);
            let a = c(coeffs[0], coeffs[1]);
            let b = c(coeffs[2], coeffs[3]);
            let oa = spin_path_observable(Path::I);
            let ob = path_projector_observable(Path::II);
            let combined = oa.linear_combination(a, &ob, b);
            let lhs = weak_value(&pre, &post, &combined).unwrap();
            let rhs = a * weak_value(&pre, &post, &oa).unwrap()
                + b * weak_value(&pre, &post, &ob).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9);
        }
    }
}
