//! The connection along a frame curve, its path-ordered exponential, and the
//! discrete projector product.
//!
//! Ordering convention, fixed once for the whole crate: in every ordered
//! product, **later parameter values stand to the left**. The discrete
//! projector product is `P(1) ... P(0)` and the path-ordered exponential is
//! `exp(ds A(s_{n-1})) ... exp(ds A(s_0))`. The two conventions have to
//! match or the holonomy silently picks up an inverse.

use crate::curve::FrameCurve;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{self, CMatrix, C64};

/// Default finite-difference step for connection evaluation on analytic
/// curves without a stored derivative.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Largest tolerated anti-Hermiticity defect of a raw connection estimate.
pub const MAX_CONNECTION_DEFECT: f64 = 1e-4;

/// The connection A(s) of a frame curve at one parameter value:
/// `A_kl = <da_k/ds | a_l>`, anti-Hermitian for orthonormal frames.
#[derive(Debug, Clone)]
pub struct ConnectionSample {
    pub s: f64,
    /// Anti-Hermitian K x K connection matrix.
    pub a_matrix: CMatrix,
    /// Anti-Hermiticity defect of the raw estimate before symmetrization.
    /// Discretization noise shows up here; a large value means the curve is
    /// not smooth at the requested resolution.
    pub defect: f64,
}

/// Evaluate the connection at s.
///
/// Analytic curves use their stored derivative when present, otherwise
/// central finite differences with step `fd_step` (second-order one-sided at
/// the ends of the interval). Discrete curves difference the two stored
/// samples straddling s against the orthonormalized midpoint frame, so the
/// estimate is second-order in the stored spacing.
pub fn connection_at(curve: &FrameCurve, s: f64, fd_step: f64) -> Result<ConnectionSample> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "connection parameter must lie in [0, 1], got {s}"
        )));
    }
    let (raw, at) = match curve.discrete_samples() {
        Some(samples) => discrete_raw_connection(samples, s)?,
        None => analytic_raw_connection(curve, s, fd_step)?,
    };
    let defect = (&raw + &raw.adjoint()).norm();
    if defect > MAX_CONNECTION_DEFECT {
        return Err(Error::CurveNotSmooth {
            s: at,
            defect,
            limit: MAX_CONNECTION_DEFECT,
        });
    }
    let a_matrix = (&raw - &raw.adjoint()) * C64::new(0.5, 0.0);
    Ok(ConnectionSample {
        s: at,
        a_matrix,
        defect,
    })
}

fn analytic_raw_connection(curve: &FrameCurve, s: f64, fd_step: f64) -> Result<(CMatrix, f64)> {
    if let Some(deriv) = curve.derivative_at(s) {
        let d = deriv?;
        let f = curve.frame_at(s)?;
        if d.shape() != f.columns().shape() {
            return Err(Error::DimensionMismatch(format!(
                "derivative sampler returned {}x{}, frame is {}x{}",
                d.nrows(),
                d.ncols(),
                f.dim_total(),
                f.dim_sub()
            )));
        }
        return Ok((d.adjoint() * f.columns(), s));
    }
    if !(fd_step > 0.0 && fd_step < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "fd_step must lie in (0, 0.25), got {fd_step}"
        )));
    }
    let h = fd_step;
    let d = if s - h >= 0.0 && s + h <= 1.0 {
        let plus = curve.frame_at(s + h)?;
        let minus = curve.frame_at(s - h)?;
        (plus.columns() - minus.columns()) / C64::new(2.0 * h, 0.0)
    } else if s - h < 0.0 {
        // second-order one-sided difference at the left end
        let f0 = curve.frame_at(s)?;
        let f1 = curve.frame_at(s + h)?;
        let f2 = curve.frame_at(s + 2.0 * h)?;
        (f0.columns() * C64::new(-3.0, 0.0) + f1.columns() * C64::new(4.0, 0.0) - f2.columns())
            / C64::new(2.0 * h, 0.0)
    } else {
        let f0 = curve.frame_at(s)?;
        let f1 = curve.frame_at(s - h)?;
        let f2 = curve.frame_at(s - 2.0 * h)?;
        (f0.columns() * C64::new(3.0, 0.0) - f1.columns() * C64::new(4.0, 0.0) + f2.columns())
            / C64::new(2.0 * h, 0.0)
    };
    let f = curve.frame_at(s)?;
    Ok((d.adjoint() * f.columns(), s))
}

fn discrete_raw_connection(samples: &[Frame], s: f64) -> Result<(CMatrix, f64)> {
    let m = samples.len();
    let grid = 1.0 / (m - 1) as f64;
    let pos = s * (m - 1) as f64;
    let nearest = pos.round();
    let (left, right, mid_cols, h) = if (pos - nearest).abs() < 1e-9 {
        // on a stored node: central difference across the neighbors
        let node = nearest as usize;
        if node == 0 {
            (0, 1, mid_frame(samples, 0, 1)?, grid)
        } else if node == m - 1 {
            (m - 2, m - 1, mid_frame(samples, m - 2, m - 1)?, grid)
        } else {
            (
                node - 1,
                node + 1,
                samples[node].columns().clone(),
                2.0 * grid,
            )
        }
    } else {
        // inside a cell: difference across it against the midpoint frame
        let j = (pos.floor() as usize).min(m - 2);
        (j, j + 1, mid_frame(samples, j, j + 1)?, grid)
    };
    let d = (samples[right].columns() - samples[left].columns()) / C64::new(h, 0.0);
    let at = 0.5 * (left + right) as f64 * grid;
    Ok((d.adjoint() * mid_cols, at))
}

fn mid_frame(samples: &[Frame], a: usize, b: usize) -> Result<CMatrix> {
    let avg = (samples[a].columns() + samples[b].columns()) * C64::new(0.5, 0.0);
    linalg::orthonormalize(&avg)
}

/// Path-ordered exponential of the connection over [0, 1]:
/// the product `exp(ds A(s_{n-1})) ... exp(ds A(s_0))` with ds = 1/n and
/// midpoint sampling s_j = (j + 1/2)/n, accurate to second order in ds.
pub fn pexp_connection(curve: &FrameCurve, n_steps: usize) -> Result<CMatrix> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter(
            "n_steps must be at least 1".to_string(),
        ));
    }
    let ds = 1.0 / n_steps as f64;
    let mut acc: Option<CMatrix> = None;
    for j in 0..n_steps {
        let s = (j as f64 + 0.5) * ds;
        let sample = connection_at(curve, s, DEFAULT_FD_STEP)?;
        let step = linalg::expm_antihermitian(&sample.a_matrix, ds)?;
        // later s multiplies from the left
        acc = Some(match acc {
            None => step,
            Some(prev) => step * prev,
        });
    }
    Ok(acc.expect("n_steps >= 1"))
}

/// Discrete projector product `P(1) P(1 - ds) ... P(0)` over a frame list,
/// returned as an N x N operator. First-order in the sample spacing; this is
/// the raw geometric object the rest of the pipeline approximates, useful as
/// a cross-check rather than as the workhorse.
pub fn discrete_gamma(frames: &[Frame]) -> Result<CMatrix> {
    if frames.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "discrete product needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let n = frames[0].dim_total();
    let k = frames[0].dim_sub();
    for (j, f) in frames.iter().enumerate() {
        if f.dim_total() != n || f.dim_sub() != k {
            return Err(Error::DimensionMismatch(format!(
                "frame {j} is {}x{}, expected {n}x{k}",
                f.dim_total(),
                f.dim_sub()
            )));
        }
    }
    let mut gamma = frames[0].projector();
    for f in &frames[1..] {
        gamma = f.projector() * gamma;
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::sample_curve;
    use crate::random::{random_exp_curve, random_frame, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_curve_has_zero_connection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_frame(4, 2, &mut rng);
        let curve = FrameCurve::analytic(move |_| Ok(f.clone()));
        for &s in &[0.0, 0.25, 0.5, 1.0] {
            let c = connection_at(&curve, s, 1e-6).unwrap();
            assert!(
                c.a_matrix.norm() < 1e-9,
                "A({s}) = {:.3e}",
                c.a_matrix.norm()
            );
        }
    }

    #[test]
    fn finite_differences_match_analytic_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let curve = random_exp_curve(5, 2, 1.2, &mut rng);
        let FrameCurve::Analytic { sampler, .. } = curve.clone() else {
            unreachable!()
        };
        let fd_curve = FrameCurve::analytic(move |s| sampler(s));
        for &s in &[0.0, 0.3, 0.77, 1.0] {
            let exact = connection_at(&curve, s, 1e-6).unwrap();
            let fd = connection_at(&fd_curve, s, 1e-6).unwrap();
            let diff = (&exact.a_matrix - &fd.a_matrix).norm();
            assert!(diff < 1e-8, "s = {s}: |exact - fd| = {diff:.3e}");
            assert!(fd.defect < 1e-8);
        }
    }

    #[test]
    fn connection_transforms_covariantly_under_constant_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let curve = random_exp_curve(5, 2, 1.0, &mut rng);
        let u = random_unitary(2, &mut rng);
        let gauge = crate::curve::GaugeField::constant(u.clone()).unwrap();
        let gauged = crate::curve::apply_gauge(&curve, &gauge).unwrap();
        for &s in &[0.2, 0.6, 0.9] {
            let a = connection_at(&curve, s, 1e-6).unwrap().a_matrix;
            let b = connection_at(&gauged, s, 1e-6).unwrap().a_matrix;
            let expected = u.adjoint() * &a * &u;
            assert!((b - expected).norm() < 1e-8);
        }
    }

    #[test]
    fn discrete_connection_matches_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let curve = random_exp_curve(4, 2, 0.9, &mut rng);
        let frames = sample_curve(&curve, 400).unwrap();
        let discrete = FrameCurve::discrete(frames).unwrap();
        for &s in &[0.10125, 0.49875, 0.87625] {
            let a = connection_at(&curve, s, 1e-6).unwrap().a_matrix;
            let b = connection_at(&discrete, s, 1e-6).unwrap().a_matrix;
            let diff = (&a - &b).norm();
            assert!(diff < 1e-4, "s = {s}: {diff:.3e}");
        }
    }

    #[test]
    fn discrete_connection_at_stored_nodes() {
        // exercises all three node branches: left end, interior, right end
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let curve = random_exp_curve(4, 2, 0.8, &mut rng);
        let frames = sample_curve(&curve, 200).unwrap();
        let discrete = FrameCurve::discrete(frames).unwrap();
        for &s in &[0.0, 0.5, 1.0] {
            let exact = connection_at(&curve, s, 1e-6).unwrap();
            let node = connection_at(&discrete, s, 1e-6).unwrap();
            let diff = (&exact.a_matrix - &node.a_matrix).norm();
            assert!(diff < 1e-3, "s = {s}: {diff:.3e}");
        }
    }

    #[test]
    fn connection_rejects_out_of_range_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let curve = random_exp_curve(4, 2, 0.8, &mut rng);
        assert!(matches!(
            connection_at(&curve, 1.5, 1e-6),
            Err(Error::InvalidParameter(_))
        ));
        // fd_step is only consulted on the finite-difference route
        let FrameCurve::Analytic { sampler, .. } = curve else {
            unreachable!()
        };
        let fd_curve = FrameCurve::analytic(move |s| sampler(s));
        assert!(matches!(
            connection_at(&fd_curve, 0.5, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn sampler_failures_propagate() {
        let curve = FrameCurve::analytic(|s| {
            if s > 0.7 {
                Err(Error::InvalidParameter("sampler gave up".to_string()))
            } else {
                Frame::new(CMatrix::identity(3, 1))
            }
        });
        assert!(matches!(
            pexp_connection(&curve, 16),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            sample_curve(&curve, 4),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rough_sampler_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_frame(4, 2, &mut rng);
        let b = random_frame(4, 2, &mut rng);
        // discontinuous at s = 0.4: any difference window bracketing the
        // jump produces a wildly non-anti-Hermitian estimate
        let curve = FrameCurve::analytic(move |s| Ok(if s < 0.4 { a.clone() } else { b.clone() }));
        assert!(matches!(
            connection_at(&curve, 0.4, 1e-3),
            Err(Error::CurveNotSmooth { .. })
        ));
    }

    #[test]
    fn pexp_of_zero_connection_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_frame(4, 2, &mut rng);
        let curve = FrameCurve::analytic(move |_| Ok(f.clone()));
        let p = pexp_connection(&curve, 32).unwrap();
        assert!((p - CMatrix::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn pexp_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let curve = random_exp_curve(5, 3, 1.4, &mut rng);
        let p = pexp_connection(&curve, 500).unwrap();
        assert!((p.adjoint() * &p - CMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn gamma_of_repeated_frame_is_its_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_frame(4, 2, &mut rng);
        let gamma = discrete_gamma(&[f.clone(), f.clone()]).unwrap();
        assert!((gamma - f.projector()).norm() < 1e-13);
    }

    #[test]
    fn gamma_of_orthogonal_subspaces_vanishes() {
        let e0 = Frame::new(CMatrix::from_row_slice(
            3,
            1,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ))
        .unwrap();
        let e1 = Frame::new(CMatrix::from_row_slice(
            3,
            1,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ))
        .unwrap();
        let gamma = discrete_gamma(&[e0, e1]).unwrap();
        assert!(gamma.norm() < 1e-15);
    }
}
