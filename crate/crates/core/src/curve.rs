//! Curves of frames over s in [0, 1]: sampling, gauge transformations, and a
//! continuation-based frame builder for projector-only input.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{self, CMatrix, DEFAULT_RANK_TOL};

/// Smallest allowed singular value of the overlap between consecutive
/// samples of a discrete curve. Below this the first-order step expansion
/// behind the connection is no longer trustworthy and the pipeline refuses
/// to proceed rather than silently fabricating geometry.
pub const MIN_STEP_OVERLAP: f64 = 0.5;

type FrameSampler = Arc<dyn Fn(f64) -> Result<Frame> + Send + Sync>;
type DerivativeSampler = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;
type UnitarySampler = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;

/// A source of frames parameterized by s in [0, 1].
///
/// Analytic curves evaluate a closure (optionally with an analytic column
/// derivative); discrete curves hold a uniformly spaced sample list and
/// answer off-grid queries with the nearest stored sample. Resampling a
/// discrete curve on a grid finer than stored is an error, never an
/// interpolation.
#[derive(Clone)]
pub enum FrameCurve {
    Analytic {
        sampler: FrameSampler,
        derivative: Option<DerivativeSampler>,
    },
    Discrete {
        samples: Arc<Vec<Frame>>,
    },
}

impl std::fmt::Debug for FrameCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameCurve::Analytic { derivative, .. } => f
                .debug_struct("FrameCurve::Analytic")
                .field("derivative", &derivative.is_some())
                .finish_non_exhaustive(),
            FrameCurve::Discrete { samples } => f
                .debug_struct("FrameCurve::Discrete")
                .field("samples", &samples.len())
                .finish_non_exhaustive(),
        }
    }
}

impl FrameCurve {
    pub fn analytic<F>(sampler: F) -> Self
    where
        F: Fn(f64) -> Result<Frame> + Send + Sync + 'static,
    {
        FrameCurve::Analytic {
            sampler: Arc::new(sampler),
            derivative: None,
        }
    }

    pub fn analytic_with_derivative<F, D>(sampler: F, derivative: D) -> Self
    where
        F: Fn(f64) -> Result<Frame> + Send + Sync + 'static,
        D: Fn(f64) -> Result<CMatrix> + Send + Sync + 'static,
    {
        FrameCurve::Analytic {
            sampler: Arc::new(sampler),
            derivative: Some(Arc::new(derivative)),
        }
    }

    /// Wrap a uniformly spaced sample list (s_j = j / (len - 1)).
    ///
    /// Requires at least two samples with matching dimensions, and checks
    /// the consecutive-overlap smoothness rule ([`MIN_STEP_OVERLAP`]).
    pub fn discrete(samples: Vec<Frame>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "discrete curve needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let (n, k) = (samples[0].dim_total(), samples[0].dim_sub());
        for (j, f) in samples.iter().enumerate() {
            if f.dim_total() != n || f.dim_sub() != k {
                return Err(Error::DimensionMismatch(format!(
                    "sample {j} is {}x{}, expected {n}x{k}",
                    f.dim_total(),
                    f.dim_sub()
                )));
            }
        }
        for j in 0..samples.len() - 1 {
            check_step_overlap(&samples[j], &samples[j + 1], j + 1)?;
        }
        Ok(FrameCurve::Discrete {
            samples: Arc::new(samples),
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, FrameCurve::Discrete { .. })
    }

    /// Number of stored samples, for discrete curves.
    pub fn sample_count(&self) -> Option<usize> {
        match self {
            FrameCurve::Discrete { samples } => Some(samples.len()),
            FrameCurve::Analytic { .. } => None,
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        matches!(
            self,
            FrameCurve::Analytic {
                derivative: Some(_),
                ..
            }
        )
    }

    /// Frame at parameter s (clamped to [0, 1] against end-of-interval
    /// roundoff). Discrete curves snap to the nearest stored sample.
    pub fn frame_at(&self, s: f64) -> Result<Frame> {
        if !s.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "curve parameter must lie in [0, 1], got {s}"
            )));
        }
        let s = s.clamp(0.0, 1.0);
        match self {
            FrameCurve::Analytic { sampler, .. } => sampler(s),
            FrameCurve::Discrete { samples } => {
                let m = samples.len();
                let idx = (s * (m - 1) as f64).round() as usize;
                Ok(samples[idx.min(m - 1)].clone())
            }
        }
    }

    /// Analytic column derivative at s, when the curve carries one.
    pub fn derivative_at(&self, s: f64) -> Option<Result<CMatrix>> {
        match self {
            FrameCurve::Analytic {
                derivative: Some(d),
                ..
            } => Some(d(s.clamp(0.0, 1.0))),
            _ => None,
        }
    }

    pub(crate) fn discrete_samples(&self) -> Option<&[Frame]> {
        match self {
            FrameCurve::Discrete { samples } => Some(samples),
            FrameCurve::Analytic { .. } => None,
        }
    }
}

fn check_step_overlap(a: &Frame, b: &Frame, index: usize) -> Result<()> {
    let m = a.columns().adjoint() * b.columns();
    let sv = linalg::singular_values(&m)?;
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_min <= MIN_STEP_OVERLAP {
        let classification = if sigma_max <= DEFAULT_RANK_TOL {
            "orthogonal"
        } else if sigma_min <= DEFAULT_RANK_TOL {
            "partially overlapping"
        } else {
            "overlapping too weakly"
        };
        return Err(Error::CurveTooCoarse {
            index,
            classification: classification.to_string(),
            sigma_min,
        });
    }
    Ok(())
}

/// Frames at s = 0, 1/n, ..., 1 (n + 1 frames).
pub fn sample_curve(curve: &FrameCurve, n_steps: usize) -> Result<Vec<Frame>> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter(
            "n_steps must be at least 1".to_string(),
        ));
    }
    if let Some(stored) = curve.sample_count() {
        if n_steps > stored - 1 {
            return Err(Error::ResampleTooFine {
                stored,
                requested: n_steps,
            });
        }
    }
    (0..=n_steps)
        .map(|j| curve.frame_at(j as f64 / n_steps as f64))
        .collect()
}

/// A smooth family of K x K unitaries, used to re-gauge a frame curve.
#[derive(Clone)]
pub struct GaugeField {
    sampler: UnitarySampler,
}

impl GaugeField {
    pub fn new<F>(sampler: F) -> Self
    where
        F: Fn(f64) -> Result<CMatrix> + Send + Sync + 'static,
    {
        GaugeField {
            sampler: Arc::new(sampler),
        }
    }

    pub fn constant(u: CMatrix) -> Result<Self> {
        check_unitary(&u)?;
        Ok(GaugeField::new(move |_| Ok(u.clone())))
    }

    /// Evaluate the gauge at s, verifying unitarity.
    pub fn unitary_at(&self, s: f64) -> Result<CMatrix> {
        let u = (self.sampler)(s)?;
        check_unitary(&u)?;
        Ok(u)
    }
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let k = u.nrows();
    let defect = (u.adjoint() * u - CMatrix::identity(k, k)).norm();
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Re-gauge a curve: the frame at s becomes `F(s) U(s)`.
///
/// Every subspace (projector) along the curve is unchanged; only the basis
/// within each subspace rotates. Discrete curves stay discrete; analytic
/// curves stay analytic but lose their stored derivative (the gauge supplies
/// none), so downstream consumers fall back to finite differences.
pub fn apply_gauge(curve: &FrameCurve, gauge: &GaugeField) -> Result<FrameCurve> {
    // surface dimension or unitarity problems immediately
    let f0 = curve.frame_at(0.0)?;
    let u0 = gauge.unitary_at(0.0)?;
    f0.gauged(&u0)?;
    match curve {
        FrameCurve::Discrete { samples } => {
            let m = samples.len();
            let gauged = samples
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let s = j as f64 / (m - 1) as f64;
                    f.gauged(&gauge.unitary_at(s)?)
                })
                .collect::<Result<Vec<_>>>()?;
            FrameCurve::discrete(gauged)
        }
        FrameCurve::Analytic { .. } => {
            let inner = curve.clone();
            let gauge = gauge.clone();
            Ok(FrameCurve::analytic(move |s| {
                inner.frame_at(s)?.gauged(&gauge.unitary_at(s)?)
            }))
        }
    }
}

/// Build a discrete frame curve over a list of rank-K projectors by
/// continuation: each frame is the previous one projected into the next
/// subspace and reorthonormalized.
///
/// This realizes transport without local rotation: the discrete connection
/// of the produced curve vanishes linearly with the sample spacing, so its
/// holonomy is carried entirely by the endpoint overlap factor.
pub fn continuation_frames(projectors: &[CMatrix], initial: &Frame) -> Result<FrameCurve> {
    if projectors.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "continuation needs at least 2 projectors, got {}",
            projectors.len()
        )));
    }
    let n = initial.dim_total();
    let k = initial.dim_sub();
    for (j, p) in projectors.iter().enumerate() {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "projector {j} is {}x{}, expected {n}x{n}",
                p.nrows(),
                p.ncols()
            )));
        }
        // validates P^2 = P, P^H = P, rank K
        Frame::from_projector(p, k, j)?;
    }
    let residual = (&projectors[0] * initial.columns() - initial.columns()).norm();
    if residual > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "initial frame does not span the range of the first projector (residual {residual:.3e})"
        )));
    }

    let mut frames = Vec::with_capacity(projectors.len());
    frames.push(initial.clone());
    for (j, p) in projectors.iter().enumerate().skip(1) {
        let projected = p * frames[j - 1].columns();
        let sv = linalg::singular_values(&projected)?;
        let sigma_min = sv.last().copied().unwrap_or(0.0);
        let sigma_max = sv.first().copied().unwrap_or(0.0);
        if sigma_min <= MIN_STEP_OVERLAP {
            let classification = if sigma_max <= DEFAULT_RANK_TOL {
                "orthogonal"
            } else if sigma_min <= DEFAULT_RANK_TOL {
                "partially overlapping"
            } else {
                "overlapping too weakly"
            };
            return Err(Error::CurveTooCoarse {
                index: j,
                classification: classification.to_string(),
                sigma_min,
            });
        }
        frames.push(Frame::new(linalg::orthonormalize(&projected)?)?);
    }
    FrameCurve::discrete(frames)
}
