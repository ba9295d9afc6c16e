//! The self-check suite behind `holonomy verify`: every closed-form,
//! gauge-covariance, convergence, and oracle-agreement property the pipeline
//! promises, with one named check per property and the tolerance pinned in
//! code.
//!
//! Two deliberate fault injections are available for testing the suite
//! itself: assembling the holonomy with its factors in the wrong order, and
//! running with an absurd rank tolerance. A healthy suite must go red under
//! either one.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::Instant;

use holonomy_core::adiabatic::{evolve, extract_gate};
use holonomy_core::linalg::{mp_inverse, DEFAULT_RANK_TOL};
use holonomy_core::random::{
    random_frame, random_gauge_field, random_matrix, random_smooth_curve, random_unitary,
};
use holonomy_core::tripod::{
    dark_curve, dark_curve_without_derivative, exp_i_sigma_y, pauli_y, pauli_z, SpherePath,
    TripodModel,
};
use holonomy_core::{
    apply_gauge, commutator_defect, compute_holonomy, connection_at, discrete_gamma,
    eigenvalues_by_phase, frame_distance, overlap, parallel_frame, sample_curve, CMatrix,
    FrameCurve, GaugeField, HolonomyResult, OverlapClass, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fault injections for exercising the suite (test hooks; a healthy binary
/// runs with `Mutation::None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Assemble the holonomy as `Pexp * U_M` instead of `U_M * Pexp`. For
    /// tripod curves the connection family commutes with itself, so only
    /// the order of the two factors is observable, and only where they fail
    /// to commute: the southern-hemisphere checks.
    OrderingFlip,
    /// Run the pipeline with rank_tol = 0.5, a misconfiguration that
    /// reclassifies honest overlaps as partial.
    RankTolMisconfig,
}

impl Mutation {
    pub fn parse(text: &str) -> Option<Mutation> {
        match text {
            "none" => Some(Mutation::None),
            "ordering-flip" => Some(Mutation::OrderingFlip),
            "rank-tol" => Some(Mutation::RankTolMisconfig),
            _ => None,
        }
    }

    fn rank_tol(self) -> f64 {
        match self {
            Mutation::RankTolMisconfig => 0.5,
            _ => DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    AtMost,
    AtLeast,
}

/// One named check with its measured value, pinned threshold, and verdict.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub requirement: Requirement,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let rel = match self.requirement {
            Requirement::AtMost => "<=",
            Requirement::AtLeast => ">=",
        };
        format!(
            "{verdict} {:<32} measured {:>12.4e} {rel} {:.1e}  [{:.2}s] {}",
            self.name, self.measured, self.threshold, self.seconds, self.detail
        )
    }
}

struct Outcome {
    measured: f64,
    threshold: f64,
    requirement: Requirement,
    detail: String,
    /// Optional wall-clock budget; the check fails if it runs longer.
    max_seconds: Option<f64>,
}

impl Outcome {
    fn at_most(measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Outcome {
            measured,
            threshold,
            requirement: Requirement::AtMost,
            detail: detail.into(),
            max_seconds: None,
        }
    }

    fn at_least(measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Outcome {
            measured,
            threshold,
            requirement: Requirement::AtLeast,
            detail: detail.into(),
            max_seconds: None,
        }
    }

    fn budget(mut self, seconds: f64) -> Self {
        self.max_seconds = Some(seconds);
        self
    }
}

fn run(name: &'static str, body: impl FnOnce() -> holonomy_core::Result<Outcome>) -> Check {
    let start = Instant::now();
    match body() {
        Ok(outcome) => {
            let seconds = start.elapsed().as_secs_f64();
            let value_ok = match outcome.requirement {
                Requirement::AtMost => outcome.measured <= outcome.threshold,
                Requirement::AtLeast => outcome.measured >= outcome.threshold,
            } && outcome.measured.is_finite();
            let time_ok = outcome.max_seconds.is_none_or(|cap| seconds <= cap);
            let mut detail = outcome.detail;
            if !time_ok {
                detail = format!(
                    "{detail} (exceeded {:.0}s budget)",
                    outcome.max_seconds.unwrap_or_default()
                );
            }
            Check {
                name,
                passed: value_ok && time_ok,
                measured: outcome.measured,
                threshold: outcome.threshold,
                requirement: outcome.requirement,
                detail,
                seconds,
            }
        }
        Err(error) => Check {
            name,
            passed: false,
            measured: f64::NAN,
            threshold: f64::NAN,
            requirement: Requirement::AtMost,
            detail: format!("error: {error}"),
            seconds: start.elapsed().as_secs_f64(),
        },
    }
}

/// The pipeline under test, with the fault-injection seams applied.
fn transported(
    curve: &FrameCurve,
    n_steps: usize,
    mutation: Mutation,
) -> holonomy_core::Result<HolonomyResult> {
    let mut result = compute_holonomy(curve, n_steps, mutation.rank_tol())?;
    if mutation == Mutation::OrderingFlip {
        result.u_g = &result.pexp * &result.u_m;
        result.gamma_operator =
            &result.parallel_final * &result.u_g * result.initial_frame.columns().adjoint();
    }
    Ok(result)
}

fn northern_path() -> SpherePath {
    SpherePath::meridian_then_latitude(FRAC_PI_3, FRAC_PI_2).expect("valid path")
}

fn southern_path() -> SpherePath {
    SpherePath::meridian_then_latitude(3.0 * FRAC_PI_4, FRAC_PI_2).expect("valid path")
}

fn equator_path() -> SpherePath {
    SpherePath::piecewise_linear(&[
        (0.0, 0.0),
        (FRAC_PI_3, 0.0),
        (FRAC_PI_3, FRAC_PI_3),
        (FRAC_PI_2, FRAC_PI_3),
    ])
    .expect("valid path")
}

/// Meridian-then-latitude to (pi/3, pi/2): the holonomy is the rotation by
/// the enclosed solid angle pi/4, to 1e-5 at 10^4 steps, in under 5 s.
pub fn northern_closed_form(mutation: Mutation) -> Check {
    run("tripod-northern-closed-form", || {
        let path = northern_path();
        let result = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        let expected = exp_i_sigma_y(-FRAC_PI_4);
        let deviation = (&result.u_g - &expected).norm();
        Ok(Outcome::at_most(
            deviation,
            1e-5,
            "|U_g - exp(-i pi/4 sigma_y)| at (theta1, phi1) = (pi/3, pi/2)",
        )
        .budget(5.0))
    })
}

/// Meridian-then-latitude to (3pi/4, pi/2): the southern closed form
/// exp(-i phi1 sigma_y) (-sigma_z) exp(i c sigma_y), c = cos(3pi/4) pi/2.
pub fn southern_closed_form(mutation: Mutation) -> Check {
    run("tripod-southern-closed-form", || {
        let path = southern_path();
        let result = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        let c = (3.0 * FRAC_PI_4).cos() * FRAC_PI_2;
        let expected =
            exp_i_sigma_y(-FRAC_PI_2) * (pauli_z() * C64::new(-1.0, 0.0)) * exp_i_sigma_y(c);
        let deviation = (&result.u_g - &expected).norm();
        Ok(Outcome::at_most(
            deviation,
            1e-5,
            "|U_g - closed form| at (theta1, phi1) = (3pi/4, pi/2)",
        ))
    })
}

/// The southern path's polar factor fails to commute with its path-ordered
/// factor: the holonomy there is truly non-Abelian.
pub fn southern_commutator(mutation: Mutation) -> Check {
    run("tripod-southern-commutator", || {
        let path = southern_path();
        let result = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        Ok(Outcome::at_least(
            commutator_defect(&result),
            0.01,
            "|[U_M, Pexp]| on the southern path",
        ))
    })
}

/// An endpoint on the equator drops the overlap rank to one; the positive
/// polar factor becomes a rank-one projector.
pub fn equator_classification(mutation: Mutation) -> Check {
    run("equator-partial-classification", || {
        let path = equator_path();
        let result = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        if result.classification != OverlapClass::PartiallyOverlapping(1) {
            return Ok(Outcome::at_most(
                f64::INFINITY,
                1e-8,
                format!(
                    "expected rank-1 partial overlap, got {}",
                    result.classification
                ),
            ));
        }
        let rep = overlap(
            &result.initial_frame,
            &result.final_frame,
            mutation.rank_tol(),
        )?;
        let r = &rep.positive_part;
        let projector_defect = (r * r - r).norm();
        Ok(Outcome::at_most(
            projector_defect,
            1e-8,
            "|R^2 - R| for the equator endpoint (R a rank-1 projector)",
        ))
    })
}

/// The partial holonomy at the equator in closed form:
/// exp(-i phi1 sigma_y) Q exp(i c sigma_y), Q = diag(0, 1).
pub fn equator_partial_holonomy(mutation: Mutation) -> Check {
    run("equator-partial-holonomy", || {
        let path = equator_path();
        let result = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        let c = FRAC_PI_3.cos() * FRAC_PI_3; // latitude leg at theta = pi/3
        let q = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let expected = exp_i_sigma_y(-FRAC_PI_3) * q * exp_i_sigma_y(c);
        let deviation = (&result.u_g - &expected).norm();
        Ok(Outcome::at_most(
            deviation,
            1e-5,
            "|U_g - partial closed form| at theta1 = pi/2",
        ))
    })
}

/// A closed latitude loop leaves the endpoint frames identical, so the
/// polar factor is the identity.
pub fn cyclic_polar_factor(mutation: Mutation) -> Check {
    run("cyclic-wilczek-zee-polar", || {
        let path = SpherePath::latitude_loop(FRAC_PI_4)?;
        let result = transported(&dark_curve(&path), 10_000, mutation)?;
        let deviation = (&result.u_m - CMatrix::identity(2, 2)).norm();
        Ok(Outcome::at_most(
            deviation,
            1e-8,
            "|U_M - 1| on the closed latitude loop",
        ))
    })
}

/// The cyclic holonomy is the rotation by the solid angle of the spherical
/// cap, 2 pi (1 - cos theta).
pub fn cyclic_holonomy(mutation: Mutation) -> Check {
    run("cyclic-wilczek-zee-holonomy", || {
        let path = SpherePath::latitude_loop(FRAC_PI_4)?;
        let result = transported(&dark_curve(&path), 10_000, mutation)?;
        let gamma = 2.0 * PI * (1.0 - FRAC_PI_4.cos());
        let deviation = (&result.u_g - exp_i_sigma_y(-gamma)).norm();
        Ok(Outcome::at_most(
            deviation,
            1e-5,
            "|U_g - cap rotation| on the closed latitude loop",
        ))
    })
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

const GAUGE_TRIALS: usize = 50;
// 1e4 steps puts the midpoint-rule discretization gap near 2e-10, a factor
// of 50 inside the 1e-8 eigenvalue-agreement tolerance
const GAUGE_STEPS: usize = 10_000;

/// Re-gauging a curve never moves the eigenvalues of the holonomy: 50
/// random curves (N <= 6, K <= 3) against random smooth gauge fields.
pub fn gauge_invariance(mutation: Mutation) -> Check {
    run("gauge-eigenvalue-invariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a5);
        let mut worst: f64 = 0.0;
        for trial in 0..GAUGE_TRIALS {
            let n_dim = 3 + trial % 4;
            let k = 1 + trial % 3.min(n_dim - 1);
            let curve = random_smooth_curve(n_dim, k, 0.8, &mut rng);
            let gauge = random_gauge_field(k, 0.7, &mut rng);
            let gauged = apply_gauge(&curve, &gauge)?;
            let plain = transported(&curve, GAUGE_STEPS, mutation)?;
            let moved = transported(&gauged, GAUGE_STEPS, mutation)?;
            let eig_a = eigenvalues_by_phase(&plain.u_g)?;
            let eig_b = eigenvalues_by_phase(&moved.u_g)?;
            worst = worst.max(eig_multiset_distance(&eig_a, &eig_b));
        }
        Ok(Outcome::at_most(
            worst,
            1e-8,
            format!("worst U_g eigenvalue displacement over {GAUGE_TRIALS} random gaugings"),
        ))
    })
}

/// Negative control: the eigenvalues of the bare path-ordered factor are
/// not gauge invariant; the random gauges above must move them.
pub fn gauge_negative_control(mutation: Mutation) -> Check {
    run("gauge-negative-control", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a5);
        let mut largest: f64 = 0.0;
        for trial in 0..GAUGE_TRIALS {
            let n_dim = 3 + trial % 4;
            let k = 1 + trial % 3.min(n_dim - 1);
            let curve = random_smooth_curve(n_dim, k, 0.8, &mut rng);
            let gauge = random_gauge_field(k, 0.7, &mut rng);
            let gauged = apply_gauge(&curve, &gauge)?;
            let plain = transported(&curve, GAUGE_STEPS, mutation)?;
            let moved = transported(&gauged, GAUGE_STEPS, mutation)?;
            let eig_a = eigenvalues_by_phase(&plain.pexp)?;
            let eig_b = eigenvalues_by_phase(&moved.pexp)?;
            largest = largest.max(eig_multiset_distance(&eig_a, &eig_b));
        }
        Ok(Outcome::at_least(
            largest,
            1e-4,
            "largest Pexp eigenvalue displacement (must move for some gauge)",
        ))
    })
}

/// The raw projector product converges to the assembled operator at first
/// order: doubling the step count halves the error.
pub fn discrete_gamma_first_order(mutation: Mutation) -> Check {
    run("discrete-gamma-first-order", || {
        let path = northern_path();
        let curve = dark_curve(&path);
        let reference = transported(&curve, path.aligned_steps(20_000), mutation)?;
        let mut errors = Vec::new();
        for &n in &[250usize, 500, 1000, 2000] {
            let frames = sample_curve(&curve, n)?;
            let gamma = discrete_gamma(&frames)?;
            errors.push((gamma - &reference.gamma_operator).norm());
        }
        let mut worst_ratio_gap: f64 = 0.0;
        for pair in errors.windows(2) {
            worst_ratio_gap = worst_ratio_gap.max((pair[1] / pair[0] - 0.5).abs());
        }
        Ok(Outcome::at_most(
            worst_ratio_gap,
            0.15,
            format!("deviation of error-halving ratios from 1/2; errors {errors:?}"),
        ))
    })
}

/// Slow Schrodinger evolution reproduces the holonomy: gate fidelity at
/// t_total = 500 with 10^5 RK4 steps.
pub fn adiabatic_gate_fidelity(mutation: Mutation) -> Check {
    run("adiabatic-gate-fidelity", || {
        let path = northern_path();
        let model = TripodModel::from_path(&path);
        let reference = transported(&dark_curve(&path), path.aligned_steps(10_000), mutation)?;
        let runs = (0..2)
            .map(|l| {
                let psi0 = reference.initial_frame.columns().column(l).into_owned();
                evolve(|s| model.hamiltonian(s), 500.0, 100_000, &psi0)
            })
            .collect::<holonomy_core::Result<Vec<_>>>()?;
        let (_, fidelity) = extract_gate(&runs, &reference, C64::new(1.0, 0.0))?;
        Ok(Outcome::at_least(
            fidelity,
            0.99,
            "|Tr(gate^H U_g)| / K at t_total = 500",
        ))
    })
}

/// The parallel frame maximizes Re Tr M over all re-gaugings of the final
/// frame: 20 random overlapping pairs against 1000 random unitaries each.
pub fn parallel_frame_minimization(_mutation: Mutation) -> Check {
    run("parallel-frame-minimization", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9b1);
        let mut worst_violation: f64 = f64::NEG_INFINITY;
        let mut tested = 0;
        while tested < 20 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            if overlap(&a, &b, DEFAULT_RANK_TOL)?.classification != OverlapClass::Overlapping {
                continue;
            }
            tested += 1;
            let best = parallel_frame(&a, &b, DEFAULT_RANK_TOL)?;
            let best_score = re_trace_overlap(&a, &best);
            for _ in 0..1000 {
                let v = random_unitary(2, &mut rng);
                let candidate = b.gauged(&v)?;
                worst_violation =
                    worst_violation.max(re_trace_overlap(&a, &candidate) - best_score);
            }
        }
        Ok(Outcome::at_most(
            worst_violation,
            1e-10,
            "best random Re Tr M minus the parallel frame's (never positive)",
        ))
    })
}

fn re_trace_overlap(a: &holonomy_core::Frame, b: &holonomy_core::Frame) -> f64 {
    (a.columns().adjoint() * b.columns())
        .diagonal()
        .iter()
        .map(|z| z.re)
        .sum()
}

/// D(A, B) = 2K - 2 Re Tr M(A, B), computed directly from column
/// differences on random frame pairs.
pub fn distance_identity(_mutation: Mutation) -> Check {
    run("frame-distance-identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9b2);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            let direct = frame_distance(&a, &b);
            let via_trace = 2.0 * 2.0 - 2.0 * re_trace_overlap(&a, &b);
            worst = worst.max((direct - via_trace).abs());
        }
        Ok(Outcome::at_most(
            worst,
            1e-9,
            "|D - (2K - 2 Re Tr M)| on random pairs",
        ))
    })
}

/// The infimum of D over re-gaugings is 2K - 2 Tr sqrt(M M^H), attained at
/// the parallel frame.
pub fn infimum_identity(_mutation: Mutation) -> Check {
    run("frame-distance-infimum", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9b3);
        let mut worst: f64 = 0.0;
        let mut tested = 0;
        while tested < 20 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            let rep = overlap(&a, &b, DEFAULT_RANK_TOL)?;
            if rep.classification != OverlapClass::Overlapping {
                continue;
            }
            tested += 1;
            let best = parallel_frame(&a, &b, DEFAULT_RANK_TOL)?;
            let direct = frame_distance(&a, &best);
            let trace_r: f64 = rep.singulars.iter().sum();
            worst = worst.max((direct - (4.0 - 2.0 * trace_r)).abs());
        }
        Ok(Outcome::at_most(
            worst,
            1e-9,
            "|inf D - (2K - 2 Tr sqrt(M M^H))| on random overlapping pairs",
        ))
    })
}

/// All four Penrose identities on 100 random matrices, rank-deficient ones
/// included.
pub fn penrose_identities(_mutation: Mutation) -> Check {
    run("penrose-identities", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x77);
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            let k = 2 + trial % 4;
            let m = if trial % 4 == 0 {
                let r = 1 + trial % 2;
                &random_matrix(k, r, &mut rng) * &random_matrix(r, k, &mut rng)
            } else {
                random_matrix(k, k, &mut rng)
            };
            let p = mp_inverse(&m, DEFAULT_RANK_TOL)?;
            worst = worst.max((&m * &p * &m - &m).norm());
            worst = worst.max((&p * &m * &p - &p).norm());
            let mp = &m * &p;
            worst = worst.max((&mp - &mp.adjoint()).norm());
            let pm = &p * &m;
            worst = worst.max((&pm - &pm.adjoint()).norm());
        }
        Ok(Outcome::at_most(
            worst,
            1e-10,
            "worst Penrose-identity residual over 100 random matrices",
        ))
    })
}

/// The pseudo-inverse of a unitary sandwich factors through:
/// (U X V)^+ = V^H X^+ U^H.
pub fn mp_unitary_transform(_mutation: Mutation) -> Check {
    run("mp-inverse-unitary-transform", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x78);
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            let k = 2 + trial % 3;
            let u = random_unitary(k, &mut rng);
            let v = random_unitary(k, &mut rng);
            let x = if trial % 5 == 0 {
                &random_matrix(k, 1, &mut rng) * &random_matrix(1, k, &mut rng)
            } else {
                random_matrix(k, k, &mut rng)
            };
            let lhs = mp_inverse(&(&u * &x * &v), DEFAULT_RANK_TOL)?;
            let rhs = v.adjoint() * mp_inverse(&x, DEFAULT_RANK_TOL)? * u.adjoint();
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(Outcome::at_most(
            worst,
            1e-10,
            "worst |(UXV)^+ - V^H X^+ U^H| over 100 random matrices",
        ))
    })
}

/// Gauging both endpoint frames transforms the partial polar factor exactly
/// as in the full-rank case: U_M -> U(0)^H U_M U(1), reproduced end to end
/// on the equator path.
pub fn partial_gauge_covariance(_mutation: Mutation) -> Check {
    run("partial-gauge-covariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x79);
        let path = equator_path();
        let curve = dark_curve(&path);
        let n = path.aligned_steps(600);
        let plain = compute_holonomy(&curve, n, DEFAULT_RANK_TOL)?;
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let y0 = holonomy_core::random::random_antihermitian_scaled(2, 0.9, &mut rng);
            let y1 = holonomy_core::random::random_antihermitian_scaled(2, 0.9, &mut rng);
            let (g0, g1) = (y0.clone(), y1.clone());
            let gauge = GaugeField::new(move |s| {
                Ok(holonomy_core::linalg::expm_antihermitian(&g0, 1.0 - s)?
                    * holonomy_core::linalg::expm_antihermitian(&g1, s)?)
            });
            let u0 = holonomy_core::linalg::expm_antihermitian(&y0, 1.0)?;
            let u1 = holonomy_core::linalg::expm_antihermitian(&y1, 1.0)?;
            let gauged = apply_gauge(&curve, &gauge)?;
            let moved = compute_holonomy(&gauged, n, DEFAULT_RANK_TOL)?;
            let expected = u0.adjoint() * &plain.u_m * &u1;
            worst = worst.max((&moved.u_m - &expected).norm());
        }
        Ok(Outcome::at_most(
            worst,
            1e-8,
            "worst |U_M' - U(0)^H R^+ M U(1)| over random endpoint gaugings",
        ))
    })
}

/// The finite-difference connection on dark-state curves reproduces
/// i cos(theta) phi_dot sigma_y pointwise at fd_step = 1e-6.
pub fn connection_closed_form(_mutation: Mutation) -> Check {
    run("connection-closed-form", || {
        // a smooth path exercising both angles at once
        let theta = |s: f64| FRAC_PI_3 * 0.5 * (1.0 - (PI * s).cos());
        let phi = |s: f64| 1.3 * s * s;
        let phi_dot = |s: f64| 2.6 * s;
        let path = SpherePath::from_functions(theta, phi);
        let curve = dark_curve_without_derivative(&path);
        let mut worst: f64 = 0.0;
        for j in 0..=20 {
            let s = j as f64 / 20.0;
            let sample = connection_at(&curve, s, 1e-6)?;
            let expected = pauli_y() * C64::new(0.0, theta(s).cos() * phi_dot(s));
            worst = worst.max((&sample.a_matrix - &expected).norm());
        }
        Ok(Outcome::at_most(
            worst,
            1e-6,
            "worst |A_fd(s) - i cos(theta) phi_dot sigma_y| at fd_step = 1e-6",
        ))
    })
}

/// Every check, in report order.
pub fn run_all(mutation: Mutation) -> Vec<Check> {
    vec![
        northern_closed_form(mutation),
        southern_closed_form(mutation),
        southern_commutator(mutation),
        equator_classification(mutation),
        equator_partial_holonomy(mutation),
        cyclic_polar_factor(mutation),
        cyclic_holonomy(mutation),
        gauge_invariance(mutation),
        gauge_negative_control(mutation),
        discrete_gamma_first_order(mutation),
        adiabatic_gate_fidelity(mutation),
        parallel_frame_minimization(mutation),
        distance_identity(mutation),
        infimum_identity(mutation),
        penrose_identities(mutation),
        mp_unitary_transform(mutation),
        partial_gauge_covariance(mutation),
        connection_closed_form(mutation),
    ]
}
