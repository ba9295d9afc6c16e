//! Closed-form oracle agreement for the tripod model: the numeric pipeline
//! reproduces the analytic holonomy on random paths in both hemispheres,
//! and the Abelian/non-Abelian structure follows the hemisphere of the
//! endpoint.

use holonomy_core::tripod::{analytic_holonomy, dark_curve, SpherePath};
use holonomy_core::{commutator_defect, compute_holonomy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn random_path(rng: &mut ChaCha8Rng, southern: bool) -> SpherePath {
    // meridian-then-latitude with a random endpoint in the requested
    // hemisphere, kept away from the equator and from vanishing phi
    let theta1 = if southern {
        rng.random_range(FRAC_PI_2 + 0.2..PI - 0.05)
    } else {
        rng.random_range(0.1..FRAC_PI_2 - 0.2)
    };
    let phi1 = rng.random_range(0.3..1.9);
    SpherePath::meridian_then_latitude(theta1, phi1).unwrap()
}

#[test]
fn northern_paths_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..20 {
        let path = random_path(&mut rng, false);
        let n = path.aligned_steps(10_000);
        let result = compute_holonomy(&dark_curve(&path), n, 1e-8).unwrap();
        let expected = analytic_holonomy(&path).unwrap();
        let diff = (&result.u_g - &expected).norm();
        assert!(
            diff < 1e-5,
            "trial {trial} endpoint {:?}: |U_g - closed form| = {diff:.3e}",
            path.endpoint()
        );
        // northern endpoints commute with the path-ordered factor
        let defect = commutator_defect(&result);
        assert!(
            defect < 1e-8,
            "trial {trial}: commutator defect {defect:.3e}"
        );
    }
}

#[test]
fn southern_paths_match_closed_form_and_are_non_abelian() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for trial in 0..20 {
        let path = random_path(&mut rng, true);
        let n = path.aligned_steps(10_000);
        let result = compute_holonomy(&dark_curve(&path), n, 1e-8).unwrap();
        let expected = analytic_holonomy(&path).unwrap();
        let diff = (&result.u_g - &expected).norm();
        assert!(
            diff < 1e-5,
            "trial {trial} endpoint {:?}: |U_g - closed form| = {diff:.3e}",
            path.endpoint()
        );
        // the line integral is away from multiples of pi by construction,
        // so the reflection in U_M genuinely fails to commute with pexp
        let c = path.line_integral_cos_theta_dphi();
        if (c / PI - (c / PI).round()).abs() > 0.05 {
            let defect = commutator_defect(&result);
            assert!(
                defect > 0.01,
                "trial {trial}: expected non-Abelian structure, defect {defect:.3e}"
            );
        }
    }
}

#[test]
fn finite_difference_route_agrees_with_analytic_derivatives() {
    use holonomy_core::tripod::dark_curve_without_derivative;
    let path = SpherePath::meridian_then_latitude(1.0, 1.2).unwrap();
    let n = path.aligned_steps(4000);
    let exact = compute_holonomy(&dark_curve(&path), n, 1e-8).unwrap();
    let fd = compute_holonomy(&dark_curve_without_derivative(&path), n, 1e-8).unwrap();
    let diff = (&exact.u_g - &fd.u_g).norm();
    assert!(diff < 1e-8, "fd vs analytic derivative: {diff:.3e}");
}

#[test]
fn rotation_part_carries_the_solid_angle_phases() {
    use holonomy_core::{decompose_gamma, eigenvalues_by_phase};
    // wedge to (pi/3, pi/2): the rotation part of the transported operator,
    // restricted to the final plane, has eigenvalues exp(-+ i pi/4)
    let path = SpherePath::meridian_then_latitude(FRAC_PI_2 * 2.0 / 3.0, FRAC_PI_2).unwrap();
    let (_, phi1) = path.endpoint();
    let gamma = phi1 - path.line_integral_cos_theta_dphi();
    let result = compute_holonomy(&dark_curve(&path), path.aligned_steps(8000), 1e-8).unwrap();
    let (_, r_rot) = decompose_gamma(&result).unwrap();
    // spectrum of the 4x4 operator: the two rotation phases plus zeros from
    // the orthogonal complement
    let eigs = eigenvalues_by_phase(&r_rot).unwrap();
    let mut phases: Vec<f64> = eigs
        .iter()
        .filter(|z| z.norm() > 0.5)
        .map(|z| z.arg())
        .collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(phases.len(), 2);
    assert!((phases[0] + gamma).abs() < 1e-4, "{phases:?} vs -{gamma}");
    assert!((phases[1] - gamma).abs() < 1e-4, "{phases:?} vs {gamma}");
}
