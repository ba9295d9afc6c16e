//! Seeded samplers for matrices, frames, curves, and gauge fields.
//!
//! Used by the self-check suite and the test batteries; all draws go through
//! a caller-supplied [`rand::Rng`] so every consumer stays reproducible.

use nalgebra::SymmetricEigen;
use rand::Rng;

use crate::curve::{FrameCurve, GaugeField};
use crate::error::Result;
use crate::frame::Frame;
use crate::linalg::{orthonormalize, CMatrix, C64};

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Haar-like random unitary from orthonormalizing a complex Ginibre draw.
pub fn random_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMatrix {
    loop {
        if let Ok(q) = orthonormalize(&random_matrix(k, k, rng)) {
            return q;
        }
    }
}

pub fn random_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Frame {
    loop {
        if let Ok(q) = orthonormalize(&random_matrix(n, k, rng)) {
            if let Ok(f) = Frame::new(q) {
                return f;
            }
        }
    }
}

/// Random anti-Hermitian matrix with Frobenius norm `strength`.
pub fn random_antihermitian_scaled<R: Rng + ?Sized>(
    n: usize,
    strength: f64,
    rng: &mut R,
) -> CMatrix {
    let g = random_matrix(n, n, rng);
    let mut a = (&g - &g.adjoint()) * C64::new(0.5, 0.0);
    let norm = a.norm();
    if norm > 0.0 {
        a *= C64::new(strength / norm, 0.0);
    }
    a
}

pub fn random_antihermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(n, n, rng);
    (&g - &g.adjoint()) * C64::new(0.5, 0.0)
}

/// Precomputed one-parameter unitary group `s -> exp(s X)` for anti-Hermitian
/// `X`, evaluated through the eigensystem of `i X` so repeated calls are
/// cheap.
#[derive(Clone)]
struct UnitaryFlow {
    vectors: CMatrix,
    eigenvalues: Vec<f64>,
}

impl UnitaryFlow {
    fn new(generator: &CMatrix) -> Self {
        let h = generator * C64::i();
        let h = (&h + &h.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        UnitaryFlow {
            vectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues.iter().cloned().collect(),
        }
    }

    fn at(&self, s: f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut d = CMatrix::zeros(n, n);
        for (i, lam) in self.eigenvalues.iter().enumerate() {
            let ang = -s * lam;
            d[(i, i)] = C64::new(ang.cos(), ang.sin());
        }
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// Smooth random frame curve `F(s) = exp(s X) F(0)` with analytic derivative
/// `X F(s)`, for a random anti-Hermitian generator of norm `strength`.
pub fn random_exp_curve<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    strength: f64,
    rng: &mut R,
) -> FrameCurve {
    let generator = random_antihermitian_scaled(n, strength, rng);
    let flow = UnitaryFlow::new(&generator);
    let start = random_frame(n, k, rng);
    let sampler_flow = flow.clone();
    let sampler_start = start.clone();
    let deriv_flow = flow;
    let deriv_start = start;
    let deriv_generator = generator;
    FrameCurve::analytic_with_derivative(
        move |s| Frame::new(sampler_flow.at(s) * sampler_start.columns()),
        move |s| -> Result<CMatrix> {
            Ok(&deriv_generator * (deriv_flow.at(s) * deriv_start.columns()))
        },
    )
}

/// Smooth random curve `F(s) = exp(s X) exp(s^2 Y) F(0)` with analytic
/// derivative. Unlike [`random_exp_curve`], whose connection is constant in
/// s, this one has a genuinely path-ordered (noncommuting) connection.
pub fn random_smooth_curve<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    strength: f64,
    rng: &mut R,
) -> FrameCurve {
    let gen_x = random_antihermitian_scaled(n, strength, rng);
    let gen_y = random_antihermitian_scaled(n, strength, rng);
    let flow_x = UnitaryFlow::new(&gen_x);
    let flow_y = UnitaryFlow::new(&gen_y);
    let start = random_frame(n, k, rng);
    let (fx, fy, f0) = (flow_x.clone(), flow_y.clone(), start.clone());
    let sampler = move |s: f64| Frame::new(fx.at(s) * (fy.at(s * s) * f0.columns()));
    let deriv = move |s: f64| -> Result<CMatrix> {
        let inner = flow_y.at(s * s) * start.columns();
        let outer = flow_x.at(s);
        Ok(&gen_x * (&outer * &inner) + outer * (&gen_y * inner) * C64::new(2.0 * s, 0.0))
    };
    FrameCurve::analytic_with_derivative(sampler, deriv)
}

/// Smooth random gauge field `U(s) = exp(Y0) exp(s Y1)` with `U(0) != 1` and
/// `U(1) != U(0)` almost surely.
pub fn random_gauge_field<R: Rng + ?Sized>(k: usize, strength: f64, rng: &mut R) -> GaugeField {
    let head = UnitaryFlow::new(&random_antihermitian_scaled(k, strength, rng)).at(1.0);
    let flow = UnitaryFlow::new(&random_antihermitian_scaled(k, strength, rng));
    GaugeField::new(move |s| Ok(&head * flow.at(s)))
}
