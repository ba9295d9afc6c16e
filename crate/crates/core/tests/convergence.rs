//! Discretization-order checks: the midpoint path-ordered product is second
//! order, the projector product is first order, and continuation frames have
//! a discrete connection that vanishes linearly with the spacing.

use holonomy_core::random::{random_exp_curve, random_smooth_curve};
use holonomy_core::tripod::{dark_curve, SpherePath};
use holonomy_core::{
    compute_holonomy, connection_at, continuation_frames, discrete_gamma, pexp_connection,
    sample_curve, CMatrix, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

#[test]
fn pexp_on_constant_connection_is_exact() {
    // the one-parameter exponential curve has constant A(s), so even a very
    // coarse midpoint product reproduces the fine one to machine precision
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let curve = random_exp_curve(5, 2, 1.5, &mut rng);
    let coarse = pexp_connection(&curve, 8).unwrap();
    let fine = pexp_connection(&curve, 4096).unwrap();
    assert!((coarse - fine).norm() < 1e-10);
}

#[test]
fn pexp_midpoint_rule_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let curve = random_smooth_curve(5, 2, 1.5, &mut rng);
    // Richardson-style limit from the finest grid
    let reference = pexp_connection(&curve, 16_384).unwrap();
    let mut errors = Vec::new();
    for &n in &[128usize, 256, 512, 1024] {
        let p = pexp_connection(&curve, n).unwrap();
        errors.push((p - &reference).norm());
    }
    for pair in errors.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            (0.15..0.4).contains(&ratio),
            "halving ds should cut the error about 4x, got ratio {ratio:.3} ({errors:?})"
        );
    }
}

#[test]
fn discrete_gamma_converges_first_order_to_the_formula() {
    let path = SpherePath::meridian_then_latitude(FRAC_PI_3, FRAC_PI_2).unwrap();
    let curve = dark_curve(&path);
    let result = compute_holonomy(&curve, 20_000, 1e-8).unwrap();
    let mut errors = Vec::new();
    for &n in &[250usize, 500, 1000, 2000] {
        let frames = sample_curve(&curve, n).unwrap();
        let gamma = discrete_gamma(&frames).unwrap();
        errors.push((gamma - &result.gamma_operator).norm());
    }
    for pair in errors.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            (0.35..0.65).contains(&ratio),
            "halving ds should cut the error about 2x, got ratio {ratio:.3} ({errors:?})"
        );
    }
}

#[test]
fn continuation_connection_vanishes_linearly_with_spacing() {
    let path = SpherePath::meridian_then_latitude(FRAC_PI_3, 1.1).unwrap();
    let curve = dark_curve(&path);
    let mut maxima = Vec::new();
    for &n in &[200usize, 400, 800] {
        let frames = sample_curve(&curve, n).unwrap();
        let projectors: Vec<CMatrix> = frames.iter().map(|f| f.projector()).collect();
        let transported = continuation_frames(&projectors, &frames[0]).unwrap();
        let mut max_a = 0.0f64;
        for j in 0..n {
            let s = (j as f64 + 0.5) / n as f64;
            let a = connection_at(&transported, s, 1e-6).unwrap();
            max_a = max_a.max(a.a_matrix.norm());
        }
        maxima.push(max_a);
    }
    for pair in maxima.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            ratio < 0.65,
            "max ||A|| should about halve with the spacing, got ratio {ratio:.3} ({maxima:?})"
        );
    }
}

#[test]
fn continuation_holonomy_is_pure_overlap_factor() {
    // transport along the continuation curve has (nearly) zero connection,
    // so the holonomy collapses to the endpoint polar factor
    let path = SpherePath::meridian_then_latitude(FRAC_PI_3, 0.9).unwrap();
    let curve = dark_curve(&path);
    let n = 4000;
    let frames = sample_curve(&curve, n).unwrap();
    let projectors: Vec<CMatrix> = frames.iter().map(|f| f.projector()).collect();
    let transported = continuation_frames(&projectors, &frames[0]).unwrap();
    let result = compute_holonomy(&transported, n, 1e-8).unwrap();
    assert!(
        (&result.pexp - CMatrix::identity(2, 2)).norm() < 2e-3,
        "pexp should be close to the identity, defect {:.3e}",
        (&result.pexp - CMatrix::identity(2, 2)).norm()
    );
    let diff = (&result.u_g - &result.u_m).norm();
    assert!(diff < 2e-3, "U_g vs U_M: {diff:.3e}");
}

#[test]
fn continuation_matches_closed_form_on_fine_grids() {
    // equator-avoiding path: continuation holonomy converges to the
    // analytic solid-angle rotation
    let path = SpherePath::meridian_then_latitude(FRAC_PI_3, FRAC_PI_2).unwrap();
    let curve = dark_curve(&path);
    let n = 10_000;
    let frames = sample_curve(&curve, n).unwrap();
    let projectors: Vec<CMatrix> = frames.iter().map(|f| f.projector()).collect();
    let transported = continuation_frames(&projectors, &frames[0]).unwrap();
    let result = compute_holonomy(&transported, n, 1e-8).unwrap();
    let expected = holonomy_core::tripod::analytic_holonomy(&path).unwrap();
    let diff = (&result.u_g - &expected).norm();
    assert!(diff < 1e-4, "continuation vs closed form: {diff:.3e}");
}

#[test]
fn gauged_pipeline_preserves_eigenvalues_but_not_pexp() {
    use holonomy_core::random::random_gauge_field;
    use holonomy_core::{apply_gauge, eigenvalues_by_phase};
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let curve = random_exp_curve(4, 2, 1.0, &mut rng);
    let gauge = random_gauge_field(2, 0.9, &mut rng);
    let gauged = apply_gauge(&curve, &gauge).unwrap();
    let n = 20_000;
    let plain = compute_holonomy(&curve, n, 1e-8).unwrap();
    let transformed = compute_holonomy(&gauged, n, 1e-8).unwrap();

    let eig_a = eigenvalues_by_phase(&plain.u_g).unwrap();
    let eig_b = eigenvalues_by_phase(&transformed.u_g).unwrap();
    let worst = eig_multiset_distance(&eig_a, &eig_b);
    assert!(worst < 1e-8, "U_g eigenvalues moved by {worst:.3e}");

    // negative control: the bare path-ordered factor is not gauge invariant
    let pexp_a = eigenvalues_by_phase(&plain.pexp).unwrap();
    let pexp_b = eigenvalues_by_phase(&transformed.pexp).unwrap();
    let moved = eig_multiset_distance(&pexp_a, &pexp_b);
    assert!(
        moved > 1e-4,
        "pexp eigenvalues should move, got {moved:.3e}"
    );
}

fn eig_multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let k = a.len();
    let mut indices: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    permute(&mut indices, 0, &mut |perm| {
        let worst = a
            .iter()
            .zip(perm.iter().map(|&j| &b[j]))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        best = best.min(worst);
    });
    best
}

fn permute(indices: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == indices.len() {
        visit(indices);
        return;
    }
    for i in start..indices.len() {
        indices.swap(start, i);
        permute(indices, start + 1, visit);
        indices.swap(start, i);
    }
}
