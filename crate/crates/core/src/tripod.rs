//! The four-level tripod system: one excited level coupled to three ground
//! levels by a unit-length real coupling vector, parameterized by polar
//! angles (theta, phi) on a 2-sphere.
//!
//! For every point on the sphere the Hamiltonian has a doubly degenerate
//! zero-energy eigenspace spanned by two "dark states" that carry no excited
//! component. Moving slowly on the sphere transports this dark plane, and
//! the transported plane picks up a holonomy with simple closed forms: the
//! expressions here serve as analytic oracles for the numeric pipeline.
//!
//! Basis ordering throughout: (|0>, |1>, |a>, |e>).

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::curve::FrameCurve;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::holonomy::OverlapClass;
use crate::linalg::{CMatrix, C64, DEFAULT_RANK_TOL};

type Angle = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Pauli y in the 2x2 dark basis.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
}

/// Pauli z in the 2x2 dark basis.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
}

/// `exp(i angle sigma_y)` = [[cos, sin], [-sin, cos]].
pub fn exp_i_sigma_y(angle: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(angle.cos(), 0.0),
            C64::new(angle.sin(), 0.0),
            C64::new(-angle.sin(), 0.0),
            C64::new(angle.cos(), 0.0),
        ],
    )
}

/// A path s -> (theta(s), phi(s)) on the coupling sphere, piecewise smooth
/// with optional analytic derivatives per segment.
#[derive(Clone)]
pub struct SpherePath {
    theta: Angle,
    phi: Angle,
    theta_dot: Option<Angle>,
    phi_dot: Option<Angle>,
    endpoint: (f64, f64),
    /// Interior segment boundaries, strictly inside (0, 1), sorted. The
    /// builders place them uniformly, so [`Self::aligned_steps`] can keep
    /// integration grids off the kinks.
    breakpoints: Vec<f64>,
    crosses_equator: bool,
}

impl SpherePath {
    /// Wrap raw angle closures. The endpoint is evaluated at s = 1 and the
    /// equator-crossing flag is detected by a sign scan of cos(theta).
    pub fn from_functions<F, G>(theta: F, phi: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let endpoint = (theta(1.0), phi(1.0));
        let theta: Angle = Arc::new(theta);
        let crosses = scan_equator_crossing(&theta);
        SpherePath {
            theta,
            phi: Arc::new(phi),
            theta_dot: None,
            phi_dot: None,
            endpoint,
            breakpoints: Vec::new(),
            crosses_equator: crosses,
        }
    }

    pub fn with_derivatives<F, G>(mut self, theta_dot: F, phi_dot: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.theta_dot = Some(Arc::new(theta_dot));
        self.phi_dot = Some(Arc::new(phi_dot));
        self
    }

    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.retain(|&b| b > 0.0 && b < 1.0);
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self.breakpoints = breakpoints;
        self
    }

    /// Meridian at phi = 0 down to theta1, then the latitude circle at
    /// theta1 out to phi1. The workhorse open path: its line integral is
    /// cos(theta1) * phi1.
    pub fn meridian_then_latitude(theta1: f64, phi1: f64) -> Result<Self> {
        check_polar_range(theta1)?;
        if !phi1.is_finite() {
            return Err(Error::InvalidParameter("phi1 must be finite".to_string()));
        }
        let theta = move |s: f64| theta1 * (2.0 * s).min(1.0);
        let phi = move |s: f64| phi1 * (2.0 * s - 1.0).clamp(0.0, 1.0);
        let theta_dot = move |s: f64| if s < 0.5 { 2.0 * theta1 } else { 0.0 };
        let phi_dot = move |s: f64| if s < 0.5 { 0.0 } else { 2.0 * phi1 };
        let mut path = SpherePath::from_functions(theta, phi)
            .with_derivatives(theta_dot, phi_dot)
            .with_breakpoints(vec![0.5]);
        path.crosses_equator = theta1 > FRAC_PI_2;
        Ok(path)
    }

    /// Closed loop around the latitude circle at fixed theta; the frame at
    /// s = 1 coincides with the frame at s = 0 (phi-period 2 pi), giving the
    /// cyclic special case.
    pub fn latitude_loop(theta: f64) -> Result<Self> {
        check_polar_range(theta)?;
        let phi = move |s: f64| 2.0 * PI * s;
        let mut path =
            SpherePath::from_functions(move |_| theta, phi).with_derivatives(|_| 0.0, |_| 2.0 * PI);
        path.crosses_equator = (theta - FRAC_PI_2).abs() <= DEFAULT_RANK_TOL;
        Ok(path)
    }

    /// Geodesic of the given arc length leaving the pole in the half-plane
    /// of constant azimuth. With a nonzero azimuth the frame at s = 0 is the
    /// phi-rotated dark basis rather than (|0>, |1>); everything downstream
    /// is computed relative to that frame.
    pub fn great_circle(azimuth: f64, arc: f64) -> Result<Self> {
        if !(0.0..=PI + 1e-12).contains(&arc) {
            return Err(Error::InvalidParameter(format!(
                "great-circle arc must lie in [0, pi], got {arc}"
            )));
        }
        if !azimuth.is_finite() {
            return Err(Error::InvalidParameter(
                "azimuth must be finite".to_string(),
            ));
        }
        let mut path = SpherePath::from_functions(move |s| arc * s, move |_| azimuth)
            .with_derivatives(move |_| arc, |_| 0.0);
        path.crosses_equator = arc > FRAC_PI_2;
        Ok(path)
    }

    /// Piecewise-linear path through the given (theta, phi) waypoints,
    /// starting at the pole (0, 0), with uniform parameter allocation per
    /// segment.
    pub fn piecewise_linear(waypoints: &[(f64, f64)]) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "piecewise path needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        let (t0, p0) = waypoints[0];
        if t0.abs() > 1e-12 || p0.abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "piecewise path must start at (0, 0), got ({t0}, {p0})"
            )));
        }
        for &(t, p) in waypoints {
            check_polar_range(t)?;
            if !p.is_finite() {
                return Err(Error::InvalidParameter("phi must be finite".to_string()));
            }
        }
        let pts: Arc<Vec<(f64, f64)>> = Arc::new(waypoints.to_vec());
        let segments = pts.len() - 1;
        let locate = move |s: f64| -> (usize, f64) {
            let scaled = (s * segments as f64).clamp(0.0, segments as f64);
            let seg = (scaled.floor() as usize).min(segments - 1);
            (seg, scaled - seg as f64)
        };
        let crosses = pts
            .windows(2)
            .any(|w| w[0].0.cos() * w[1].0.cos() < 0.0 || w[1].0.cos().abs() <= DEFAULT_RANK_TOL);
        let (pt, pp, pd1, pd2) = (pts.clone(), pts.clone(), pts.clone(), pts);
        let theta = move |s: f64| {
            let (seg, t) = locate(s);
            pt[seg].0 + t * (pt[seg + 1].0 - pt[seg].0)
        };
        let phi = move |s: f64| {
            let (seg, t) = locate(s);
            pp[seg].1 + t * (pp[seg + 1].1 - pp[seg].1)
        };
        let theta_dot = move |s: f64| {
            let (seg, _) = locate(s);
            segments as f64 * (pd1[seg + 1].0 - pd1[seg].0)
        };
        let phi_dot = move |s: f64| {
            let (seg, _) = locate(s);
            segments as f64 * (pd2[seg + 1].1 - pd2[seg].1)
        };
        let breakpoints = (1..segments).map(|i| i as f64 / segments as f64).collect();
        let mut path = SpherePath::from_functions(theta, phi)
            .with_derivatives(theta_dot, phi_dot)
            .with_breakpoints(breakpoints);
        path.crosses_equator = crosses;
        Ok(path)
    }

    pub fn theta(&self, s: f64) -> f64 {
        (self.theta)(s.clamp(0.0, 1.0))
    }

    pub fn phi(&self, s: f64) -> f64 {
        (self.phi)(s.clamp(0.0, 1.0))
    }

    pub fn has_derivatives(&self) -> bool {
        self.theta_dot.is_some() && self.phi_dot.is_some()
    }

    pub fn theta_dot(&self, s: f64) -> Option<f64> {
        self.theta_dot.as_ref().map(|f| f(s.clamp(0.0, 1.0)))
    }

    pub fn phi_dot(&self, s: f64) -> Option<f64> {
        self.phi_dot.as_ref().map(|f| f(s.clamp(0.0, 1.0)))
    }

    /// (theta1, phi1) at s = 1.
    pub fn endpoint(&self) -> (f64, f64) {
        self.endpoint
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Whether the path touches or crosses the equator theta = pi/2, the
    /// locus where the endpoint holonomy degenerates to a partial one.
    pub fn crosses_equator(&self) -> bool {
        self.crosses_equator
    }

    /// Round a step count up so the integration grid lands on every interior
    /// breakpoint (the builders space them uniformly). Midpoint quadrature
    /// across a kink would cost a first-order error otherwise.
    pub fn aligned_steps(&self, requested: usize) -> usize {
        let segments = self.breakpoints.len() + 1;
        requested.div_ceil(segments).max(1) * segments
    }

    /// The line integral of cos(theta) d phi along the path.
    ///
    /// With analytic derivatives: adaptive Simpson quadrature per smooth
    /// segment, to 1e-11. Without: trapezoid sums of cos(theta) against phi
    /// increments on a dense grid.
    pub fn line_integral_cos_theta_dphi(&self) -> f64 {
        if let Some(phi_dot) = &self.phi_dot {
            let theta = self.theta.clone();
            let phi_dot = phi_dot.clone();
            let integrand = move |s: f64| theta(s).cos() * phi_dot(s);
            let mut edges = vec![0.0];
            edges.extend_from_slice(&self.breakpoints);
            edges.push(1.0);
            edges
                .windows(2)
                .map(|w| adaptive_simpson(&integrand, w[0], w[1], 1e-11))
                .sum()
        } else {
            let n = 200_000;
            let mut sum = 0.0;
            let mut prev_phi = (self.phi)(0.0);
            let mut prev_cos = (self.theta)(0.0).cos();
            for j in 1..=n {
                let s = j as f64 / n as f64;
                let cur_phi = (self.phi)(s);
                let cur_cos = (self.theta)(s).cos();
                sum += 0.5 * (prev_cos + cur_cos) * (cur_phi - prev_phi);
                prev_phi = cur_phi;
                prev_cos = cur_cos;
            }
            sum
        }
    }
}

fn check_polar_range(theta: f64) -> Result<()> {
    if (0.0..=PI + 1e-12).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "polar angle must lie in [0, pi], got {theta}"
        )))
    }
}

fn scan_equator_crossing(theta: &Angle) -> bool {
    let mut prev = theta(0.0).cos();
    for j in 1..=1024 {
        let cur = theta(j as f64 / 1024.0).cos();
        if prev * cur < 0.0 || cur.abs() <= DEFAULT_RANK_TOL {
            return true;
        }
        prev = cur;
    }
    false
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// The tripod model: couplings s -> (omega_0, omega_1, omega_a) forming a
/// real unit vector.
#[derive(Clone)]
pub struct TripodModel {
    couplings: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
}

impl TripodModel {
    pub fn new<F>(couplings: F) -> Self
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        TripodModel {
            couplings: Arc::new(couplings),
        }
    }

    /// Couplings from sphere angles: `(sin t cos p, sin t sin p, cos t)`.
    /// This is the parameterization for which the dark states of
    /// [`dark_frame`] annihilate the Hamiltonian exactly.
    pub fn from_path(path: &SpherePath) -> Self {
        let path = path.clone();
        TripodModel::new(move |s| {
            let t = path.theta(s);
            let p = path.phi(s);
            [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
        })
    }

    pub fn couplings(&self, s: f64) -> [f64; 3] {
        (self.couplings)(s.clamp(0.0, 1.0))
    }

    /// The 4x4 Hamiltonian `w0 |e><0| + w1 |e><1| + wa |e><a| + h.c.`.
    pub fn hamiltonian(&self, s: f64) -> Result<CMatrix> {
        let [w0, w1, wa] = self.couplings(s);
        let norm2 = w0 * w0 + w1 * w1 + wa * wa;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "couplings must form a unit vector, |w|^2 = {norm2} at s = {s}"
            )));
        }
        let mut h = CMatrix::zeros(4, 4);
        for (i, w) in [w0, w1, wa].into_iter().enumerate() {
            h[(3, i)] = C64::new(w, 0.0);
            h[(i, 3)] = C64::new(w, 0.0);
        }
        Ok(h)
    }
}

/// The dark frame at parameter s: two zero-energy states with no excited
/// component,
/// `D1 = cos t cos p |0> + cos t sin p |1> - sin t |a>`,
/// `D2 = -sin p |0> + cos p |1>`.
pub fn dark_frame(path: &SpherePath, s: f64) -> Result<Frame> {
    let t = path.theta(s);
    let p = path.phi(s);
    if !t.is_finite() || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "path returned non-finite angles at s = {s}"
        )));
    }
    let mut m = CMatrix::zeros(4, 2);
    m[(0, 0)] = C64::new(t.cos() * p.cos(), 0.0);
    m[(1, 0)] = C64::new(t.cos() * p.sin(), 0.0);
    m[(2, 0)] = C64::new(-t.sin(), 0.0);
    m[(0, 1)] = C64::new(-p.sin(), 0.0);
    m[(1, 1)] = C64::new(p.cos(), 0.0);
    Frame::new(m)
}

fn dark_frame_derivative(path: &SpherePath, s: f64) -> Result<CMatrix> {
    let (Some(td), Some(pd)) = (path.theta_dot(s), path.phi_dot(s)) else {
        return Err(Error::InvalidParameter(
            "path carries no analytic derivatives".to_string(),
        ));
    };
    let t = path.theta(s);
    let p = path.phi(s);
    let mut m = CMatrix::zeros(4, 2);
    m[(0, 0)] = C64::new(-td * t.sin() * p.cos() - pd * t.cos() * p.sin(), 0.0);
    m[(1, 0)] = C64::new(-td * t.sin() * p.sin() + pd * t.cos() * p.cos(), 0.0);
    m[(2, 0)] = C64::new(-td * t.cos(), 0.0);
    m[(0, 1)] = C64::new(-pd * p.cos(), 0.0);
    m[(1, 1)] = C64::new(-pd * p.sin(), 0.0);
    Ok(m)
}

/// The dark plane as a frame curve, with analytic column derivatives when
/// the path carries angle derivatives.
pub fn dark_curve(path: &SpherePath) -> FrameCurve {
    if path.has_derivatives() {
        let p1 = path.clone();
        let p2 = path.clone();
        FrameCurve::analytic_with_derivative(
            move |s| dark_frame(&p1, s),
            move |s| dark_frame_derivative(&p2, s),
        )
    } else {
        dark_curve_without_derivative(path)
    }
}

/// The same curve with the derivative withheld, forcing downstream
/// consumers onto finite differences.
pub fn dark_curve_without_derivative(path: &SpherePath) -> FrameCurve {
    let p = path.clone();
    FrameCurve::analytic(move |s| dark_frame(&p, s))
}

/// Closed-form polar factor of the endpoint overlap.
#[derive(Debug, Clone)]
pub struct AnalyticOverlap {
    pub u_m: CMatrix,
    pub classification: OverlapClass,
    /// Set within the band rank_tol < |cos theta1| < 1e-4: the polar factor
    /// is about to jump branches and numerics deserve a warning.
    pub near_singular: bool,
}

/// The endpoint polar factor in closed form.
///
/// North of the equator it is `exp(-i phi1 sigma_y)`; south it picks up the
/// extra reflection `-sigma_z` (the two branches do not meet: the factor is
/// discontinuous across the equator). On the equator the overlap drops rank
/// and the factor is the partial isometry `exp(-i phi1 sigma_y) Q`,
/// Q = diag(0, 1).
pub fn analytic_u_m(theta1: f64, phi1: f64, rank_tol: f64) -> Result<AnalyticOverlap> {
    check_polar_range(theta1)?;
    let tol_valid = rank_tol.is_finite() && rank_tol > 0.0;
    if !tol_valid {
        return Err(Error::InvalidParameter(format!(
            "rank_tol must be positive, got {rank_tol}"
        )));
    }
    let ct = theta1.cos();
    if ct.abs() <= rank_tol {
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
        return Ok(AnalyticOverlap {
            u_m: exp_i_sigma_y(-phi1) * q,
            classification: OverlapClass::PartiallyOverlapping(1),
            near_singular: false,
        });
    }
    let u_m = if ct > 0.0 {
        exp_i_sigma_y(-phi1)
    } else {
        exp_i_sigma_y(-phi1) * (pauli_z() * C64::new(-1.0, 0.0))
    };
    Ok(AnalyticOverlap {
        u_m,
        classification: OverlapClass::Overlapping,
        near_singular: ct.abs() < 1e-4,
    })
}

/// Closed-form holonomy of a dark-plane path: `U_M(theta1, phi1)` times the
/// commuting path-ordered factor `exp(i c sigma_y)`, with
/// `c = integral of cos(theta) d phi`.
///
/// North of the equator this collapses to `exp(-i sigma_y (phi1 - c))`,
/// with `phi1 - c` the solid angle swept by the geodesic closure of the
/// path.
pub fn analytic_holonomy(path: &SpherePath) -> Result<CMatrix> {
    let (theta1, phi1) = path.endpoint();
    let c = path.line_integral_cos_theta_dphi();
    let u_m = analytic_u_m(theta1, phi1, DEFAULT_RANK_TOL)?.u_m;
    Ok(u_m * exp_i_sigma_y(c))
}
