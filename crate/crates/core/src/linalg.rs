//! Dense complex linear algebra kernel: SVD, polar decomposition,
//! Moore-Penrose pseudo-inverse, matrix exponential of anti-Hermitian
//! matrices, and tolerance-aware orthonormalization.
//!
//! Everything here is sized for small dense matrices: the pipeline works
//! with frame matrices of at most a few hundred entries, where double
//! precision is comfortable and no sparse or blocked algorithms are
//! warranted.
//!
//! The SVD is a one-sided Jacobi iteration rather than `nalgebra`'s
//! bidiagonalization: the latter miscomputes singular vectors of
//! rank-deficient complex 2x2 matrices (reconstruction errors of order one),
//! and rank-deficient overlap matrices are not an edge case here but the
//! whole point of partial holonomies. Jacobi is also the method of choice
//! for the high relative accuracy of small singular values, which the
//! overlap classification threshold depends on. Hermitian eigendecomposition
//! stays on `nalgebra::SymmetricEigen`, which checks out on degenerate
//! spectra.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Default absolute tolerance on singular values of overlap matrices.
///
/// Frames are orthonormal, so overlap singular values live in [0, 1]; 1e-8
/// separates genuine rank deficiency from double-precision noise.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const EIGEN_MAX_ITER: usize = 10_000;

pub fn entries_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if entries_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() && m.nrows() > 0 {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

fn complex_diagonal(values: impl Iterator<Item = C64>, n: usize) -> CMatrix {
    let mut d = CMatrix::zeros(n, n);
    for (i, v) in values.take(n).enumerate() {
        d[(i, i)] = v;
    }
    d
}

/// Singular value decomposition `m = left * diag(singulars) * right_h`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Unitary K x K factor of left singular vectors.
    pub left: CMatrix,
    /// Singular values, sorted descending, all nonnegative.
    pub singulars: Vec<f64>,
    /// Adjoint of the unitary K x K factor of right singular vectors.
    pub right_h: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.left.nrows();
        let d = complex_diagonal(self.singulars.iter().map(|&s| C64::new(s, 0.0)), k);
        &self.left * d * &self.right_h
    }
}

/// Unitary 2x2 matrix diagonalizing the Hermitian [[alpha, gamma],
/// [conj(gamma), beta]], `gamma` nonzero. Phase-reduces to the real
/// symmetric case and uses the stable tangent formula, so tiny off-diagonal
/// entries do not lose precision to cancellation.
fn hermitian_2x2_diagonalizer(alpha: f64, beta: f64, gamma: C64) -> [C64; 4] {
    let abs_g = gamma.norm();
    let omega_bar = gamma.conj() / abs_g;
    let tau = (beta - alpha) / (2.0 * abs_g);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Q = diag(1, conj(omega)) * [[c, s], [-s, c]]
    [
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        -omega_bar * s,
        omega_bar * c,
    ]
}

/// Rotate columns p and q of `m` from the right by the 2x2 matrix
/// [[r0, r1], [r2, r3]].
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, rot: &[C64; 4]) {
    for i in 0..m.nrows() {
        let (mp, mq) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = mp * rot[0] + mq * rot[2];
        m[(i, q)] = mp * rot[1] + mq * rot[3];
    }
}

/// One-sided Jacobi SVD of an n x k matrix with n >= k.
///
/// Returns `(u, s, v)` with `u` n x k carrying orthonormal columns, `s`
/// descending and nonnegative, `v` k x k unitary, and `m = u diag(s) v^H`.
/// Left singular vectors for (numerically) zero singular values are
/// completed from the standard basis.
fn jacobi_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (n, k) = m.shape();
    debug_assert!(n >= k && k >= 1);
    let mut a = m.clone();
    let mut v = CMatrix::identity(k, k);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                // relative orthogonality reached: nothing to rotate
                if gamma.norm_sqr() <= alpha * beta * (4.0 * f64::EPSILON * f64::EPSILON) {
                    continue;
                }
                rotated = true;
                let rot = hermitian_2x2_diagonalizer(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, &rot);
                rotate_columns(&mut v, p, q, &rot);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));
    let singulars: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = singulars.first().copied().unwrap_or(0.0);
    let mut u = CMatrix::zeros(n, k);
    let mut v_sorted = CMatrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        v_sorted.set_column(dst, &v.column(src));
        if norms[src] > sigma_max * 1e-13 && norms[src] > 0.0 {
            let scaled = a.column(src) / C64::new(norms[src], 0.0);
            u.set_column(dst, &scaled);
        }
        // zero columns are filled in below
    }
    for (dst, &src) in order.iter().enumerate() {
        if norms[src] > sigma_max * 1e-13 && norms[src] > 0.0 {
            continue;
        }
        // complete with the standard basis vector least represented so far
        let mut best: Option<(f64, CVector)> = None;
        for i in 0..n {
            let mut candidate = CVector::zeros(n);
            candidate[i] = C64::new(1.0, 0.0);
            for l in 0..k {
                if l == dst {
                    continue;
                }
                let col = u.column(l).into_owned();
                let overlap = col.dotc(&candidate);
                candidate.axpy(-overlap, &col, C64::new(1.0, 0.0));
            }
            let norm = candidate.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, candidate));
            }
            if norm > 0.9 {
                break;
            }
        }
        let (norm, candidate) = best.expect("n >= 1");
        let completed = candidate / C64::new(norm, 0.0);
        u.set_column(dst, &completed);
    }
    (u, singulars, v_sorted)
}

/// Singular values of a matrix of any shape, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    let (n, k) = m.shape();
    if n == 0 || k == 0 {
        return Err(Error::DimensionMismatch(
            "singular values of an empty matrix".to_string(),
        ));
    }
    let (_, s, _) = if n >= k {
        jacobi_svd(m)
    } else {
        jacobi_svd(&m.adjoint())
    };
    Ok(s)
}

/// SVD of a square complex matrix.
///
/// Overlap matrices between equal-dimension frames are always square, so
/// rectangular inputs are rejected rather than supported half-heartedly.
pub fn svd(m: &CMatrix) -> Result<SvdResult> {
    check_finite(m)?;
    check_square(m)?;
    let (u, s, v) = jacobi_svd(m);
    Ok(SvdResult {
        left: u,
        singulars: s,
        right_h: v.adjoint(),
    })
}

/// Polar decomposition `m = positive_part * isometry_part`.
#[derive(Debug, Clone)]
pub struct PolarResult {
    /// Hermitian positive semi-definite factor.
    pub positive_part: CMatrix,
    /// Unitary when `m` has full rank, otherwise the partial isometry keeping
    /// only singular directions above `rank_tol`.
    pub isometry_part: CMatrix,
    /// Number of singular values above `rank_tol`.
    pub rank: usize,
    /// Singular values of `m`, descending.
    pub singulars: Vec<f64>,
}

/// Polar-decompose a square matrix via its SVD.
///
/// With `m = W diag(s) V^H`, the positive part is `W diag(s) W^H` and the
/// isometry part is `W g V^H`, where `g` keeps a unit entry exactly for the
/// singular values above `rank_tol`. When all of them are above the
/// tolerance the isometry part is the unique unitary polar factor.
pub fn polar_decompose(m: &CMatrix, rank_tol: f64) -> Result<PolarResult> {
    let tol_valid = rank_tol.is_finite() && rank_tol > 0.0;
    if !tol_valid {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must be positive, got {rank_tol}"
        )));
    }
    let SvdResult {
        left,
        singulars,
        right_h,
    } = svd(m)?;
    let k = left.nrows();
    let sigma = complex_diagonal(singulars.iter().map(|&s| C64::new(s, 0.0)), k);
    let mut positive = &left * sigma * left.adjoint();
    positive = (&positive + &positive.adjoint()) * C64::new(0.5, 0.0);
    let gate = complex_diagonal(
        singulars
            .iter()
            .map(|&s| C64::new(if s > rank_tol { 1.0 } else { 0.0 }, 0.0)),
        k,
    );
    let isometry = &left * gate * &right_h;
    let rank = singulars.iter().filter(|&&s| s > rank_tol).count();
    Ok(PolarResult {
        positive_part: positive,
        isometry_part: isometry,
        rank,
        singulars,
    })
}

/// Moore-Penrose pseudo-inverse, inverting singular values above `rank_tol`.
///
/// For Hermitian positive semi-definite input this is exactly inversion of
/// the nonzero eigenvalues in the spectral decomposition.
pub fn mp_inverse(m: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let tol_valid = rank_tol.is_finite() && rank_tol > 0.0;
    if !tol_valid {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must be positive, got {rank_tol}"
        )));
    }
    check_finite(m)?;
    let (n, k) = m.shape();
    if n == 0 || k == 0 {
        return Err(Error::DimensionMismatch(
            "pseudo-inverse of an empty matrix".to_string(),
        ));
    }
    if n < k {
        return Ok(mp_inverse(&m.adjoint(), rank_tol)?.adjoint());
    }
    let (u, s, v) = jacobi_svd(m);
    let inv = complex_diagonal(
        s.iter()
            .map(|&s| C64::new(if s > rank_tol { 1.0 / s } else { 0.0 }, 0.0)),
        k,
    );
    Ok(v * inv * u.adjoint())
}

/// Exponential `exp(scale * a)` of an anti-Hermitian matrix.
///
/// Computed through the eigendecomposition of the Hermitian matrix `i a`, so
/// the result is unitary by construction. Inputs that fail the
/// anti-Hermiticity test signal a broken connection computation upstream and
/// are rejected.
pub fn expm_antihermitian(a: &CMatrix, scale: f64) -> Result<CMatrix> {
    check_finite(a)?;
    check_square(a)?;
    let defect = (a + &a.adjoint()).norm();
    if defect > 1e-8 * a.norm() {
        return Err(Error::NotAntiHermitian { defect });
    }
    let h = a * C64::i();
    let h = (&h + &h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::DecompositionFailed("hermitian eigendecomposition"))?;
    // exp(scale * a) = exp(-i * scale * h) = Q exp(-i * scale * lambda) Q^H
    let phases = eig.eigenvalues.map(|lam| {
        let ang = -scale * lam;
        C64::new(ang.cos(), ang.sin())
    });
    let d = CMatrix::from_diagonal(&phases);
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Orthonormalize the columns of an N x K matrix, preserving their span.
///
/// Two passes of modified Gram-Schmidt; already-orthonormal input passes
/// through unchanged to machine precision. Rank-deficient input (smallest
/// singular value at or below 1e-10) is rejected.
pub fn orthonormalize(m: &CMatrix) -> Result<CMatrix> {
    check_finite(m)?;
    let (n, k) = m.shape();
    if k == 0 || n < k {
        return Err(Error::DimensionMismatch(format!(
            "need at least as many rows as columns, got {n}x{k}"
        )));
    }
    let sv = singular_values(m)?;
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if sigma_min <= 1e-10 {
        return Err(Error::RankDeficient { sigma_min });
    }
    let mut q = m.clone();
    for _ in 0..2 {
        for j in 0..k {
            for i in 0..j {
                let proj = q.column(i).dotc(&q.column(j));
                let prev = q.column(i).into_owned();
                q.column_mut(j).axpy(-proj, &prev, C64::new(1.0, 0.0));
            }
            let norm = q.column(j).norm();
            q.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    Ok(q)
}
