mod common;

use common::convex_quad;
use common::properties::*;
use proptest::prelude::*;

fn check(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plate_stiffness_symmetric_with_rigid_nullity(c in convex_quad()) {
        check(plate_symmetry_and_nullity(&c))?;
    }

    #[test]
    fn hybrid_variants_share_stiffness(c in convex_quad()) {
        check(hybrid_stiffness_agreement(&c))?;
    }

    #[test]
    fn hybrid_h_matches_domain_integral(c in convex_quad()) {
        check(hybrid_h_identity(&c))?;
    }

    #[test]
    fn trial_functions_satisfy_field_equations(c in convex_quad()) {
        check(trefftz_residuals(&c))?;
    }

    #[test]
    fn shape_derivatives_match_finite_differences(c in convex_quad()) {
        check(shape_derivatives(&c))?;
    }

    #[test]
    fn plate_spectrum_is_rotation_invariant(c in convex_quad(), angle in 0.0f64..std::f64::consts::TAU) {
        check(plate_rotation_invariance(&c, angle))?;
    }

    #[test]
    fn plate_constant_curvature_is_reproduced(c in convex_quad(), k in prop::array::uniform3(-1.0f64..1.0)) {
        check(plate_constant_curvature(&c, k))?;
    }

    #[test]
    fn membrane_stiffness_symmetric_with_drilling_mode(c in convex_quad()) {
        check(membrane_symmetry_and_nullity(&c))?;
    }

    #[test]
    fn membrane_constant_stress_is_reproduced(c in convex_quad(), g in prop::array::uniform4(-1e-3f64..1e-3)) {
        check(membrane_constant_stress(&c, g))?;
    }
}
