//! Open-path holonomy: overlap matrices and their classification, parallel
//! frames, the holonomy of a frame curve, partial holonomies for partially
//! overlapping endpoints, and the gauge-transformation laws.
//!
//! The holonomy of a curve whose endpoint subspaces overlap is
//! `U_g = U_M * Pexp`, where `Pexp` is the path-ordered exponential of the
//! connection (later s to the left, see [`crate::connection`]) and `U_M` is
//! the unitary polar factor of the overlap matrix between the initial and
//! final frames. When the endpoints only partially overlap, `U_M` becomes
//! the partial isometry `R^+ M` built with the Moore-Penrose inverse of the
//! positive polar factor, and `U_g` is a partial holonomy: a partial
//! isometry defined on the overlapping directions only. Orthogonal endpoints
//! leave the holonomy undefined and are an error, never a silent zero.

use crate::connection::pexp_connection;
use crate::curve::FrameCurve;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{self, CMatrix, C64};

/// How two equal-dimension subspaces sit relative to each other, read off
/// the singular values of their overlap matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapClass {
    /// All overlap singular values above the rank tolerance.
    Overlapping,
    /// Between 1 and K-1 singular values above the tolerance.
    PartiallyOverlapping(usize),
    /// No singular value above the tolerance.
    Orthogonal,
}

impl OverlapClass {
    pub fn rank(&self, dim_sub: usize) -> usize {
        match self {
            OverlapClass::Overlapping => dim_sub,
            OverlapClass::PartiallyOverlapping(r) => *r,
            OverlapClass::Orthogonal => 0,
        }
    }
}

impl std::fmt::Display for OverlapClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OverlapClass::Overlapping => write!(f, "overlapping"),
            OverlapClass::PartiallyOverlapping(r) => write!(f, "partially overlapping (rank {r})"),
            OverlapClass::Orthogonal => write!(f, "orthogonal"),
        }
    }
}

/// Overlap matrix between two frames together with its polar pieces and
/// classification.
#[derive(Debug, Clone)]
pub struct OverlapReport {
    /// `M_kl = <a_k | b_l>`.
    pub m_matrix: CMatrix,
    /// Hermitian positive semi-definite polar factor R.
    pub positive_part: CMatrix,
    /// Unitary (or partial-isometry) polar factor U_M.
    pub isometry_part: CMatrix,
    /// Singular values of M, descending.
    pub singulars: Vec<f64>,
    pub classification: OverlapClass,
    /// Set when some singular value sits within a factor of ten of the rank
    /// tolerance, on either side: the classification is then one
    /// perturbation away from changing, and the polar pieces from being
    /// discontinuous.
    pub near_singular: bool,
}

/// Overlap matrix `M(A, B)` of two frames of the same dimensions, classified
/// by its singular values at `rank_tol`.
pub fn overlap(frame_a: &Frame, frame_b: &Frame, rank_tol: f64) -> Result<OverlapReport> {
    if frame_a.dim_total() != frame_b.dim_total() || frame_a.dim_sub() != frame_b.dim_sub() {
        return Err(Error::DimensionMismatch(format!(
            "overlap needs equal dimensions, got {}x{} vs {}x{}",
            frame_a.dim_total(),
            frame_a.dim_sub(),
            frame_b.dim_total(),
            frame_b.dim_sub()
        )));
    }
    let m = frame_a.columns().adjoint() * frame_b.columns();
    let polar = linalg::polar_decompose(&m, rank_tol)?;
    let k = frame_a.dim_sub();
    let classification = if polar.rank == k {
        OverlapClass::Overlapping
    } else if polar.rank == 0 {
        OverlapClass::Orthogonal
    } else {
        OverlapClass::PartiallyOverlapping(polar.rank)
    };
    let near_singular = polar
        .singulars
        .iter()
        .any(|&s| s > rank_tol / 10.0 && s <= rank_tol * 10.0);
    Ok(OverlapReport {
        m_matrix: m,
        positive_part: polar.positive_part,
        isometry_part: polar.isometry_part,
        singulars: polar.singulars,
        classification,
        near_singular,
    })
}

/// The frame of `frame_b`'s subspace closest to `frame_a`: columns
/// `B U_M^H`, where `U_M` is the unitary polar factor of the overlap.
///
/// Defined only for overlapping subspaces; the overlap of `frame_a` with the
/// result is Hermitian positive definite, which characterizes parallelity.
pub fn parallel_frame(frame_a: &Frame, frame_b: &Frame, rank_tol: f64) -> Result<Frame> {
    let rep = overlap(frame_a, frame_b, rank_tol)?;
    match rep.classification {
        OverlapClass::Overlapping => {}
        OverlapClass::Orthogonal => return Err(Error::OrthogonalEndpoints),
        OverlapClass::PartiallyOverlapping(r) => {
            return Err(Error::PartialOverlap {
                rank: r,
                dim: frame_a.dim_sub(),
                hint: "no full parallel frame exists; compute a partial holonomy instead",
            })
        }
    }
    Frame::new(frame_b.columns() * rep.isometry_part.adjoint())
}

/// Squared distance between two frames, summed over columns:
/// `D(A, B) = sum_k ||a_k - b_k||^2 = 2K - 2 Re Tr M(A, B)`.
pub fn frame_distance(frame_a: &Frame, frame_b: &Frame) -> f64 {
    (frame_a.columns() - frame_b.columns()).norm_squared()
}

/// Everything the pipeline knows after transporting a curve: the holonomy,
/// its factors, the parallel final frame, and the full-space operator.
#[derive(Debug, Clone)]
pub struct HolonomyResult {
    /// The holonomy `U_M * Pexp`: unitary for overlapping endpoints, a
    /// partial isometry of the overlap rank otherwise.
    pub u_g: CMatrix,
    /// Path-ordered exponential of the connection; always unitary.
    pub pexp: CMatrix,
    /// Polar factor of the endpoint overlap matrix.
    pub u_m: CMatrix,
    /// Columns of the final frame rotated to be parallel to the initial one,
    /// `B U_M^H`. Orthonormal exactly when the endpoints fully overlap; in
    /// the partial case the columns span only the overlapping directions and
    /// their Gram matrix is a rank-r projector.
    pub parallel_final: CMatrix,
    /// `parallel_final * u_g * initial^H`: the N x N operator the curve
    /// implements on its initial subspace (restricted to the overlap support
    /// in the partial case).
    pub gamma_operator: CMatrix,
    pub classification: OverlapClass,
    pub near_singular: bool,
    /// Endpoint overlap singular values, descending.
    pub singular_values: Vec<f64>,
    /// Dynamical phase factor; unity unless an adiabatic context divides out
    /// a nonzero energy integral.
    pub dynamical_phase: C64,
    pub initial_frame: Frame,
    pub final_frame: Frame,
    /// Rank tolerance the classification was made with.
    pub rank_tol: f64,
    pub n_steps: usize,
}

impl HolonomyResult {
    /// The parallel final frame as a checked [`Frame`]; available only when
    /// the endpoints fully overlap.
    pub fn parallel_final_frame(&self) -> Result<Frame> {
        match self.classification {
            OverlapClass::Overlapping => Frame::new(self.parallel_final.clone()),
            OverlapClass::PartiallyOverlapping(r) => Err(Error::PartialOverlap {
                rank: r,
                dim: self.u_g.nrows(),
                hint: "the parallel frame is defined on the overlap support only",
            }),
            OverlapClass::Orthogonal => Err(Error::OrthogonalEndpoints),
        }
    }

    /// Eigenvalues of the holonomy, sorted by phase angle in (-pi, pi].
    pub fn eigenvalues_by_phase(&self) -> Result<Vec<C64>> {
        eigenvalues_by_phase(&self.u_g)
    }
}

/// Eigenvalues of a square complex matrix, sorted by phase angle in
/// (-pi, pi], ties broken by modulus.
pub fn eigenvalues_by_phase(m: &CMatrix) -> Result<Vec<C64>> {
    let eig = m
        .clone()
        .eigenvalues()
        .ok_or(Error::DecompositionFailed("eigenvalues"))?;
    let mut out: Vec<C64> = eig.iter().cloned().collect();
    out.sort_by(|a, b| {
        (a.arg(), a.norm())
            .partial_cmp(&(b.arg(), b.norm()))
            .expect("finite eigenvalues")
    });
    Ok(out)
}

/// Transport a curve and assemble its holonomy.
///
/// `n_steps` controls the path-ordered exponential (midpoint rule, error
/// O(1/n^2) for smooth curves); `rank_tol` classifies the endpoint overlap
/// and is shared with the Moore-Penrose inverse in the partial case so the
/// reported rank is consistent end to end.
pub fn compute_holonomy(
    curve: &FrameCurve,
    n_steps: usize,
    rank_tol: f64,
) -> Result<HolonomyResult> {
    let initial = curve.frame_at(0.0)?;
    let final_frame = curve.frame_at(1.0)?;
    let rep = overlap(&initial, &final_frame, rank_tol)?;
    if rep.classification == OverlapClass::Orthogonal {
        return Err(Error::OrthogonalEndpoints);
    }
    let pexp = pexp_connection(curve, n_steps)?;
    let u_m = rep.isometry_part.clone();
    let u_g = &u_m * &pexp;
    let parallel_final = final_frame.columns() * u_m.adjoint();
    let gamma_operator = &parallel_final * &u_g * initial.columns().adjoint();
    Ok(HolonomyResult {
        u_g,
        pexp,
        u_m,
        parallel_final,
        gamma_operator,
        classification: rep.classification,
        near_singular: rep.near_singular,
        singular_values: rep.singulars,
        dynamical_phase: C64::new(1.0, 0.0),
        initial_frame: initial,
        final_frame,
        rank_tol,
        n_steps,
    })
}

/// The holonomy after re-gauging the curve by a field with value `u0` at
/// both ends of the interval: `U(0)^H U_g U(0)`. A similarity transform, so
/// the eigenvalues are gauge invariant.
pub fn gauge_transform_holonomy(result: &HolonomyResult, u0: &CMatrix) -> Result<CMatrix> {
    let k = result.u_g.nrows();
    if u0.nrows() != k || u0.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "gauge must be {k}x{k}, got {}x{}",
            u0.nrows(),
            u0.ncols()
        )));
    }
    let defect = (u0.adjoint() * u0 - CMatrix::identity(k, k)).norm();
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    Ok(u0.adjoint() * &result.u_g * u0)
}

/// Split the transported operator into a rigid part and a rotation:
/// `t_iso` maps the initial frame onto the parallel final frame, and `r_rot`
/// acts unitarily on the final subspace by the holonomy. Their product
/// recovers `gamma_operator`. Defined for fully overlapping endpoints.
pub fn decompose_gamma(result: &HolonomyResult) -> Result<(CMatrix, CMatrix)> {
    match result.classification {
        OverlapClass::Overlapping => {}
        OverlapClass::PartiallyOverlapping(r) => {
            return Err(Error::PartialOverlap {
                rank: r,
                dim: result.u_g.nrows(),
                hint: "the rigid part is not defined on the full subspace",
            })
        }
        OverlapClass::Orthogonal => return Err(Error::OrthogonalEndpoints),
    }
    let t_iso = &result.parallel_final * result.initial_frame.columns().adjoint();
    let r_rot = &result.parallel_final * &result.u_g * result.parallel_final.adjoint();
    Ok((t_iso, r_rot))
}

/// Frobenius norm of `[U_M, Pexp]`. Zero means the two holonomy factors
/// commute and the result has an Abelian structure; a strictly positive
/// defect is what "truly non-Abelian" means for a single curve.
pub fn commutator_defect(result: &HolonomyResult) -> f64 {
    (&result.u_m * &result.pexp - &result.pexp * &result.u_m).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{apply_gauge, GaugeField};
    use crate::random::{random_exp_curve, random_frame, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_frame(n: usize, cols: &[usize]) -> Frame {
        let mut m = CMatrix::zeros(n, cols.len());
        for (j, &i) in cols.iter().enumerate() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Frame::new(m).unwrap()
    }

    #[test]
    fn overlap_with_itself_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(5, 2, &mut rng);
        let rep = overlap(&f, &f, 1e-8).unwrap();
        assert!((rep.m_matrix.clone() - CMatrix::identity(2, 2)).norm() < 1e-12);
        assert_eq!(rep.classification, OverlapClass::Overlapping);
        assert!(!rep.near_singular);
    }

    #[test]
    fn orthogonal_frames_classified() {
        let a = basis_frame(4, &[0, 1]);
        let b = basis_frame(4, &[2, 3]);
        let rep = overlap(&a, &b, 1e-8).unwrap();
        assert_eq!(rep.classification, OverlapClass::Orthogonal);
    }

    #[test]
    fn partial_overlap_classified_with_rank() {
        let a = basis_frame(4, &[0, 1]);
        let b = basis_frame(4, &[1, 2]);
        let rep = overlap(&a, &b, 1e-8).unwrap();
        assert_eq!(rep.classification, OverlapClass::PartiallyOverlapping(1));
    }

    #[test]
    fn near_singular_flag_trips_near_the_tolerance() {
        // overlap singular values {1, 5e-8}: above tol 1e-8 but within 10x
        let mut m = CMatrix::zeros(4, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        let c: f64 = 5e-8;
        m[(1, 1)] = C64::new((1.0 - c * c).sqrt(), 0.0);
        m[(2, 1)] = C64::new(c, 0.0);
        let b = Frame::new(m).unwrap();
        let a = basis_frame(4, &[0, 2]);
        let rep = overlap(&a, &b, 1e-8).unwrap();
        assert_eq!(rep.classification, OverlapClass::Overlapping);
        assert!(rep.near_singular);
    }

    #[test]
    fn parallel_frame_of_itself_is_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_frame(5, 3, &mut rng);
        let g = parallel_frame(&f, &f, 1e-8).unwrap();
        assert!((g.columns() - f.columns()).norm() < 1e-12);
    }

    #[test]
    fn parallel_frame_undoes_pure_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(5, 2, &mut rng);
        let v = random_unitary(2, &mut rng);
        let rotated = f.gauged(&v).unwrap();
        let g = parallel_frame(&f, &rotated, 1e-8).unwrap();
        assert!((g.columns() - f.columns()).norm() < 1e-10);
    }

    #[test]
    fn parallel_frame_maximizes_re_trace_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            let rep = overlap(&a, &b, 1e-8).unwrap();
            if rep.classification != OverlapClass::Overlapping {
                continue;
            }
            let best = parallel_frame(&a, &b, 1e-8).unwrap();
            let best_score = re_trace(&overlap(&a, &best, 1e-8).unwrap().m_matrix);
            for _ in 0..1000 {
                let v = random_unitary(2, &mut rng);
                let candidate = b.gauged(&v).unwrap();
                let score = re_trace(&overlap(&a, &candidate, 1e-8).unwrap().m_matrix);
                assert!(score <= best_score + 1e-10);
            }
            // parallelity characterization: overlap with the parallel frame
            // is Hermitian positive definite
            let m = overlap(&a, &best, 1e-8).unwrap().m_matrix;
            assert!((&m - &m.adjoint()).norm() < 1e-9);
            let eig = nalgebra::SymmetricEigen::new(m);
            assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
        }
    }

    fn re_trace(m: &CMatrix) -> f64 {
        m.diagonal().iter().map(|z| z.re).sum()
    }

    #[test]
    fn distance_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            let d = frame_distance(&a, &b);
            let m = a.columns().adjoint() * b.columns();
            let identity = 2.0 * 2.0 - 2.0 * re_trace(&m);
            assert!((d - identity).abs() < 1e-10, "{d} vs {identity}");
        }
    }

    #[test]
    fn infimum_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let a = random_frame(5, 2, &mut rng);
            let b = random_frame(5, 2, &mut rng);
            let rep = overlap(&a, &b, 1e-8).unwrap();
            if rep.classification != OverlapClass::Overlapping {
                continue;
            }
            let best = parallel_frame(&a, &b, 1e-8).unwrap();
            let d = frame_distance(&a, &best);
            let trace_r: f64 = rep.singulars.iter().sum();
            assert!((d - (4.0 - 2.0 * trace_r)).abs() < 1e-9);
        }
    }

    #[test]
    fn cyclic_curve_reduces_to_pure_pexp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // closed curve: F(s) = exp(sin(pi s) X) F0 returns to F0 at s = 1
        let x = crate::random::random_antihermitian_scaled(5, 1.0, &mut rng);
        let f0 = random_frame(5, 2, &mut rng);
        let (xc, f0c) = (x.clone(), f0.clone());
        let curve = FrameCurve::analytic(move |s| {
            let amp = (std::f64::consts::PI * s).sin();
            let u = linalg::expm_antihermitian(&xc, amp)?;
            Frame::new(u * f0c.columns())
        });
        let result = compute_holonomy(&curve, 3000, 1e-8).unwrap();
        assert!((&result.u_m - CMatrix::identity(2, 2)).norm() < 1e-8);
        assert!((&result.u_g - &result.pexp).norm() < 1e-8);
        assert!(commutator_defect(&result) < 1e-8);
    }

    #[test]
    fn one_dimensional_curve_reproduces_geometric_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let curve = random_exp_curve(4, 1, 1.1, &mut rng);
        let result = compute_holonomy(&curve, 4000, 1e-8).unwrap();
        // expected: exp(i arg<a(0)|a(1)> + integral of <a'|a>)
        let a0 = curve.frame_at(0.0).unwrap();
        let a1 = curve.frame_at(1.0).unwrap();
        let inner = a0.columns().column(0).dotc(&a1.columns().column(0));
        // connection integral by fine midpoint quadrature (independent of
        // the path-ordered machinery: scalars commute)
        let n = 20_000;
        let mut integral = C64::new(0.0, 0.0);
        for j in 0..n {
            let s = (j as f64 + 0.5) / n as f64;
            let d = curve.derivative_at(s).unwrap().unwrap();
            let f = curve.frame_at(s).unwrap();
            integral += (d.adjoint() * f.columns())[(0, 0)] / C64::new(n as f64, 0.0);
        }
        let expected = (C64::new(0.0, inner.arg()) + integral).exp();
        let got = result.u_g[(0, 0)];
        assert!((got - expected).norm() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn orthogonal_endpoints_are_an_error() {
        // rotates span{e0, e1} into the fully orthogonal span{e2, e3}
        let curve = FrameCurve::analytic(move |s| {
            let ang = s * std::f64::consts::FRAC_PI_2;
            let mut m = CMatrix::zeros(4, 2);
            m[(0, 0)] = C64::new(ang.cos(), 0.0);
            m[(2, 0)] = C64::new(ang.sin(), 0.0);
            m[(1, 1)] = C64::new(ang.cos(), 0.0);
            m[(3, 1)] = C64::new(ang.sin(), 0.0);
            Frame::new(m)
        });
        assert!(matches!(
            compute_holonomy(&curve, 64, 1e-8),
            Err(Error::OrthogonalEndpoints)
        ));
    }

    #[test]
    fn gauge_transform_is_a_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let curve = random_exp_curve(5, 2, 1.0, &mut rng);
        let result = compute_holonomy(&curve, 400, 1e-8).unwrap();
        let u0 = random_unitary(2, &mut rng);
        let transformed = gauge_transform_holonomy(&result, &u0).unwrap();
        let before = eigenvalues_by_phase(&result.u_g).unwrap();
        let after = eigenvalues_by_phase(&transformed).unwrap();
        for (x, y) in before.iter().zip(after.iter()) {
            assert!((x - y).norm() < 1e-10);
        }
        let id = CMatrix::identity(2, 2);
        let unchanged = gauge_transform_holonomy(&result, &id).unwrap();
        assert!((unchanged - &result.u_g).norm() < 1e-14);
    }

    #[test]
    fn full_pipeline_gauge_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let curve = random_exp_curve(4, 2, 0.8, &mut rng);
        // gauge field with U(0) = identity: recomputing on the gauged curve
        // must reproduce U_g exactly (up to discretization)
        let y = crate::random::random_antihermitian_scaled(2, 0.8, &mut rng);
        let yc = y.clone();
        let gauge = GaugeField::new(move |s| linalg::expm_antihermitian(&yc, s));
        let gauged = apply_gauge(&curve, &gauge).unwrap();
        let n = 20_000;
        let direct = compute_holonomy(&curve, n, 1e-8).unwrap();
        let transported = compute_holonomy(&gauged, n, 1e-8).unwrap();
        let diff = (&transported.u_g - &direct.u_g).norm();
        assert!(diff < 1e-8, "gauge covariance broke: {diff:.3e}");
    }

    #[test]
    fn decompose_gamma_of_trivial_loop_is_the_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = random_frame(4, 2, &mut rng);
        let p = f.projector();
        let frozen = f.clone();
        let curve = FrameCurve::analytic(move |_| Ok(frozen.clone()));
        let result = compute_holonomy(&curve, 64, 1e-8).unwrap();
        let (t_iso, r_rot) = decompose_gamma(&result).unwrap();
        assert!((&t_iso - &p).norm() < 1e-10);
        assert!((&r_rot - &p).norm() < 1e-10);
        assert!((&result.gamma_operator - &p).norm() < 1e-10);
    }

    #[test]
    fn decompose_gamma_recovers_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let curve = random_exp_curve(5, 2, 1.2, &mut rng);
        let result = compute_holonomy(&curve, 500, 1e-8).unwrap();
        let (t_iso, r_rot) = decompose_gamma(&result).unwrap();
        assert!((&r_rot * &t_iso - &result.gamma_operator).norm() < 1e-9);
        // t_iso is a partial isometry from the initial onto the final subspace
        let tt = t_iso.adjoint() * &t_iso;
        assert!((&tt - &result.initial_frame.projector()).norm() < 1e-9);
    }

    #[test]
    fn decompose_gamma_reduces_to_phase_times_projector_for_k_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let curve = random_exp_curve(4, 1, 1.0, &mut rng);
        let result = compute_holonomy(&curve, 400, 1e-8).unwrap();
        let (t_iso, r_rot) = decompose_gamma(&result).unwrap();
        let parallel = &result.parallel_final;
        let expected_t = parallel * result.initial_frame.columns().adjoint();
        assert!((&t_iso - &expected_t).norm() < 1e-12);
        let phase = result.u_g[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-9);
        let expected_r = parallel * parallel.adjoint() * phase;
        assert!((&r_rot - &expected_r).norm() < 1e-12);
    }

    #[test]
    fn partial_case_yields_partial_isometry() {
        // curve from span{e0, e1} to a subspace meeting it in one direction
        let curve = FrameCurve::analytic(move |s| {
            let ang = s * std::f64::consts::FRAC_PI_2;
            let mut m = CMatrix::zeros(4, 2);
            m[(0, 0)] = C64::new(ang.cos(), 0.0);
            m[(2, 0)] = C64::new(ang.sin(), 0.0);
            m[(1, 1)] = C64::new(1.0, 0.0);
            Frame::new(m)
        });
        let result = compute_holonomy(&curve, 2000, 1e-8).unwrap();
        assert_eq!(result.classification, OverlapClass::PartiallyOverlapping(1));
        let p = result.u_g.adjoint() * &result.u_g;
        let q = &result.u_g * result.u_g.adjoint();
        assert!((&p * &p - &p).norm() < 1e-9, "U_g^H U_g not a projector");
        assert!((&q * &q - &q).norm() < 1e-9, "U_g U_g^H not a projector");
        let rank_p: f64 = p.diagonal().iter().map(|z| z.re).sum();
        let rank_q: f64 = q.diagonal().iter().map(|z| z.re).sum();
        assert!((rank_p - 1.0).abs() < 1e-9 && (rank_q - 1.0).abs() < 1e-9);
        assert!(result.parallel_final_frame().is_err());
        assert!(decompose_gamma(&result).is_err());
    }
}
