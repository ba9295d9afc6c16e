//! Non-Abelian holonomies for open paths of subspaces in a finite
//! dimensional complex Hilbert space.
//!
//! A smooth curve of K-dimensional subspaces induces a transformation on the
//! subspace it starts from, determined purely by the geometry of the path.
//! For closed curves this is the familiar non-Abelian holonomy; this crate
//! computes the open-path generalization, where the final subspace differs
//! from the initial one and the two are compared through a parallel frame:
//!
//! * [`linalg`] - the small dense complex kernel (SVD, polar decomposition,
//!   Moore-Penrose inverse, anti-Hermitian exponential, orthonormalization).
//! * [`frame`] / [`curve`] - orthonormal frames, frame curves over s in
//!   [0, 1], gauge fields, and a continuation builder for projector-only
//!   input.
//! * [`connection`] - the connection A(s), its path-ordered exponential, and
//!   the discrete projector product.
//! * [`holonomy`] - overlap classification, parallel frames, the holonomy
//!   `U_g = U_M Pexp`, partial holonomies, and the gauge transformation
//!   laws.
//! * [`tripod`] - a four-level model whose dark-state plane has closed-form
//!   holonomies, used as the analytic oracle.
//! * [`adiabatic`] - a Schrodinger integrator, the independent dynamical
//!   oracle.
//!
//! ```
//! use holonomy_core::tripod::{dark_curve, SpherePath};
//! use holonomy_core::{compute_holonomy, OverlapClass};
//! use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
//!
//! // meridian down to theta = pi/3, then along the latitude to phi = pi/2
//! let path = SpherePath::meridian_then_latitude(FRAC_PI_3, FRAC_PI_2)?;
//! let result = compute_holonomy(&dark_curve(&path), 2000, 1e-8)?;
//! assert_eq!(result.classification, OverlapClass::Overlapping);
//!
//! // the rotation angle is the solid angle enclosed by the geodesic closure
//! let expected = FRAC_PI_2 * (1.0 - FRAC_PI_3.cos());
//! let angle = result.eigenvalues_by_phase()?[1].arg();
//! assert!((angle - expected).abs() < 1e-4);
//! # Ok::<(), holonomy_core::Error>(())
//! ```

pub mod adiabatic;
pub mod connection;
pub mod curve;
pub mod error;
pub mod frame;
pub mod holonomy;
pub mod linalg;
pub mod random;
pub mod tripod;

pub use connection::{
    connection_at, discrete_gamma, pexp_connection, ConnectionSample, DEFAULT_FD_STEP,
};
pub use curve::{apply_gauge, continuation_frames, sample_curve, FrameCurve, GaugeField};
pub use error::{Error, Result};
pub use frame::Frame;
pub use holonomy::{
    commutator_defect, compute_holonomy, decompose_gamma, eigenvalues_by_phase, frame_distance,
    gauge_transform_holonomy, overlap, parallel_frame, HolonomyResult, OverlapClass, OverlapReport,
};
pub use linalg::{singular_values, CMatrix, CVector, C64, DEFAULT_RANK_TOL};
