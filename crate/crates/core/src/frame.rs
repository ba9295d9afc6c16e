//! Frames: ordered orthonormal bases of subspaces.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// An N x K complex matrix with orthonormal columns: an ordered basis of a
/// K-dimensional subspace of an N-dimensional Hilbert space.
///
/// A frame carries more than the subspace it spans; the column order and
/// phases are a gauge choice. The columns are kept private so every `Frame`
/// in circulation satisfies the orthonormality invariant.
#[derive(Debug, Clone)]
pub struct Frame {
    columns: CMatrix,
}

impl Frame {
    pub const ORTHONORMALITY_TOL: f64 = 1e-10;

    /// Wrap an N x K matrix whose columns are already orthonormal.
    pub fn new(columns: CMatrix) -> Result<Self> {
        if !linalg::entries_finite(&columns) {
            return Err(Error::NonFinite);
        }
        let (n, k) = columns.shape();
        if k == 0 || k > n {
            return Err(Error::DimensionMismatch(format!(
                "frame needs 1 <= K <= N, got N = {n}, K = {k}"
            )));
        }
        let gram = columns.adjoint() * &columns;
        let defect = (&gram - CMatrix::identity(k, k)).norm();
        if defect > Self::ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Frame { columns })
    }

    /// Build a frame spanning the column space of an arbitrary full-rank
    /// N x K matrix.
    pub fn from_span(m: &CMatrix) -> Result<Self> {
        Frame::new(linalg::orthonormalize(m)?)
    }

    /// Extract the rank-`dim_sub` eigenspace of an orthogonal projector.
    ///
    /// The input must satisfy `P = P^H` and `P^2 = P` within 1e-8 and have
    /// exactly `dim_sub` eigenvalues near one. `index` only labels error
    /// messages when loading projector lists.
    pub fn from_projector(p: &CMatrix, dim_sub: usize, index: usize) -> Result<Self> {
        if !linalg::entries_finite(p) {
            return Err(Error::NonFinite);
        }
        let n = p.nrows();
        if p.ncols() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: p.ncols(),
            });
        }
        let herm_defect = (p - &p.adjoint()).norm();
        let idem_defect = (p * p - p).norm();
        if herm_defect > 1e-8 || idem_defect > 1e-8 {
            return Err(Error::NotProjector {
                index,
                expected: dim_sub,
                detail: format!(
                    "Hermiticity defect {herm_defect:.3e}, idempotency defect {idem_defect:.3e}"
                ),
            });
        }
        let h = (p + &p.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let mut kept: Vec<usize> = Vec::new();
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if (lam - 1.0).abs() < 1e-6 {
                kept.push(i);
            } else if lam.abs() > 1e-6 {
                return Err(Error::NotProjector {
                    index,
                    expected: dim_sub,
                    detail: format!("eigenvalue {lam:.6} is neither 0 nor 1"),
                });
            }
        }
        if kept.len() != dim_sub {
            return Err(Error::NotProjector {
                index,
                expected: dim_sub,
                detail: format!("projector has rank {}", kept.len()),
            });
        }
        let mut columns = CMatrix::zeros(n, dim_sub);
        for (j, &i) in kept.iter().enumerate() {
            columns.set_column(j, &eig.eigenvectors.column(i));
        }
        Frame::new(columns)
    }

    /// Ambient dimension N.
    pub fn dim_total(&self) -> usize {
        self.columns.nrows()
    }

    /// Subspace dimension K.
    pub fn dim_sub(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_columns(self) -> CMatrix {
        self.columns
    }

    /// Orthogonal projector onto the spanned subspace, `F F^H`.
    pub fn projector(&self) -> CMatrix {
        &self.columns * self.columns.adjoint()
    }

    /// Change of basis within the subspace: columns become `F U`.
    pub fn gauged(&self, u: &CMatrix) -> Result<Frame> {
        let k = self.dim_sub();
        if u.nrows() != k || u.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "gauge must be {k}x{k}, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let defect = (u.adjoint() * u - CMatrix::identity(k, k)).norm();
        if defect > 1e-10 {
            return Err(Error::NotUnitary { defect });
        }
        Frame::new(&self.columns * u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_frame, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_orthonormal_columns() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(Frame::new(m), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn projector_is_idempotent_and_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(5, 2, &mut rng);
        let p = f.projector();
        assert!((&p * &p - &p).norm() < 1e-12);
        let u = random_unitary(2, &mut rng);
        let g = f.gauged(&u).unwrap();
        assert!((g.projector() - &p).norm() < 1e-12);
    }

    #[test]
    fn from_projector_recovers_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_frame(4, 2, &mut rng);
        let p = f.projector();
        let g = Frame::from_projector(&p, 2, 0).unwrap();
        assert!((g.projector() - &p).norm() < 1e-9);
    }

    #[test]
    fn from_projector_rejects_wrong_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_frame(4, 2, &mut rng);
        let p = f.projector();
        assert!(matches!(
            Frame::from_projector(&p, 3, 4),
            Err(Error::NotProjector {
                index: 4,
                expected: 3,
                ..
            })
        ));
    }

    #[test]
    fn gauged_rejects_non_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_frame(4, 2, &mut rng);
        let bad = CMatrix::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(matches!(f.gauged(&bad), Err(Error::NotUnitary { .. })));
    }
}
