//! Fixed-step Schrodinger integration as an independent dynamical oracle.
//!
//! The geometric pipeline predicts what slow evolution does to a state
//! prepared in the transported subspace: up to the dynamical phase, the
//! evolution operator restricted to the initial subspace converges to the
//! transported operator as the total time grows. Integrating
//! `i dpsi/dt = H(t/T) psi` directly and comparing is the one oracle that
//! shares no code path with the connection machinery.
//!
//! The integrator is plain fixed-step RK4 and deliberately does not
//! renormalize: the norm defect is the convergence signal, and a run whose
//! defect exceeds 1e-8 is rejected rather than patched.

use crate::error::{Error, Result};
use crate::holonomy::HolonomyResult;
use crate::linalg::{CMatrix, CVector, C64};

pub const UNITARITY_LIMIT: f64 = 1e-8;

/// One completed integration of the Schrodinger equation.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub t_total: f64,
    pub n_time_steps: usize,
    pub initial_state: CVector,
    pub final_state: CVector,
    /// | ||final_state|| - 1 |, the integrator's own quality certificate.
    pub norm_defect: f64,
}

/// A sampled point of an evolution, for CSV export and adiabaticity plots.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: f64,
    /// Component of the state outside the reference subspace at this time,
    /// `||(1 - P(s)) psi||`.
    pub leakage: f64,
    pub norm_defect: f64,
}

fn rk4_step<H>(
    hamiltonian_at: &H,
    s_of_t: f64,
    ds_of_dt: f64,
    dt: f64,
    psi: &CVector,
) -> Result<CVector>
where
    H: Fn(f64) -> Result<CMatrix>,
{
    let minus_i = C64::new(0.0, -1.0);
    let h1 = hamiltonian_at(s_of_t)?;
    let h2 = hamiltonian_at(s_of_t + 0.5 * dt * ds_of_dt)?;
    let h4 = hamiltonian_at(s_of_t + dt * ds_of_dt)?;
    let k1 = (&h1 * psi) * minus_i;
    let k2 = (&h2 * &(psi + &k1 * C64::new(0.5 * dt, 0.0))) * minus_i;
    let k3 = (&h2 * &(psi + &k2 * C64::new(0.5 * dt, 0.0))) * minus_i;
    let k4 = (&h4 * &(psi + &k3 * C64::new(dt, 0.0))) * minus_i;
    Ok(psi
        + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0))
}

/// Integrate `i dpsi/dt = H(t / t_total) psi` from t = 0 to t_total with
/// fixed-step RK4.
pub fn evolve<H>(
    hamiltonian_at: H,
    t_total: f64,
    n_time_steps: usize,
    initial_state: &CVector,
) -> Result<EvolutionRun>
where
    H: Fn(f64) -> Result<CMatrix>,
{
    let (run, _) = evolve_inner(
        hamiltonian_at,
        None,
        t_total,
        n_time_steps,
        initial_state,
        0,
    )?;
    Ok(run)
}

/// Like [`evolve`], also sampling leakage out of a reference subspace every
/// `sample_every` steps (plus the endpoints). `projector_at` maps s to the
/// N x N projector of the subspace to stay in.
pub fn evolve_traced<H, P>(
    hamiltonian_at: H,
    projector_at: P,
    t_total: f64,
    n_time_steps: usize,
    initial_state: &CVector,
    sample_every: usize,
) -> Result<(EvolutionRun, Vec<TraceRow>)>
where
    H: Fn(f64) -> Result<CMatrix>,
    P: Fn(f64) -> Result<CMatrix>,
{
    evolve_inner(
        hamiltonian_at,
        Some(&projector_at),
        t_total,
        n_time_steps,
        initial_state,
        sample_every.max(1),
    )
}

fn evolve_inner<H>(
    hamiltonian_at: H,
    projector_at: Option<&dyn Fn(f64) -> Result<CMatrix>>,
    t_total: f64,
    n_time_steps: usize,
    initial_state: &CVector,
    sample_every: usize,
) -> Result<(EvolutionRun, Vec<TraceRow>)>
where
    H: Fn(f64) -> Result<CMatrix>,
{
    if !(t_total > 0.0 && t_total.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_total must be positive and finite, got {t_total}"
        )));
    }
    if n_time_steps == 0 {
        return Err(Error::InvalidParameter(
            "n_time_steps must be at least 1".to_string(),
        ));
    }
    if (initial_state.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "initial state must be normalized, ||psi|| = {}",
            initial_state.norm()
        )));
    }
    let dt = t_total / n_time_steps as f64;
    let ds_of_dt = 1.0 / t_total;
    let mut psi = initial_state.clone();
    let mut trace = Vec::new();
    let mut record = |step: usize, psi: &CVector| -> Result<()> {
        if let Some(projector_at) = projector_at {
            if step.is_multiple_of(sample_every) || step == n_time_steps {
                let t = step as f64 * dt;
                let p = projector_at(t * ds_of_dt)?;
                let leakage = (psi - &(p * psi)).norm();
                trace.push(TraceRow {
                    t,
                    leakage,
                    norm_defect: (psi.norm() - 1.0).abs(),
                });
            }
        }
        Ok(())
    };
    record(0, &psi)?;
    for step in 0..n_time_steps {
        let s = (step as f64 * dt) * ds_of_dt;
        psi = rk4_step(&hamiltonian_at, s, ds_of_dt, dt, &psi)?;
        record(step + 1, &psi)?;
    }
    let norm_defect = (psi.norm() - 1.0).abs();
    if norm_defect > UNITARITY_LIMIT {
        return Err(Error::UnitarityLost {
            defect: norm_defect,
            limit: UNITARITY_LIMIT,
        });
    }
    Ok((
        EvolutionRun {
            t_total,
            n_time_steps,
            initial_state: initial_state.clone(),
            final_state: psi,
            norm_defect,
        },
        trace,
    ))
}

/// Read the effective gate out of K evolutions, one per initial-frame
/// column, against the parallel final frame of a transported reference:
/// `gate_kl = <b_k(1), psi_final^(l)>`, corrected by the supplied dynamical
/// phase. Returns the gate and its fidelity `|Tr(gate^H U_g)| / K` against
/// the reference holonomy.
pub fn extract_gate(
    runs: &[EvolutionRun],
    reference: &HolonomyResult,
    dynamical_phase: C64,
) -> Result<(CMatrix, f64)> {
    let k = reference.initial_frame.dim_sub();
    let n = reference.initial_frame.dim_total();
    if runs.len() != k {
        return Err(Error::MismatchedRuns(format!(
            "need {k} runs (one per initial frame column), got {}",
            runs.len()
        )));
    }
    if (dynamical_phase.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "dynamical phase must be a unit complex number, |z| = {}",
            dynamical_phase.norm()
        )));
    }
    let t0 = runs[0].t_total;
    let steps0 = runs[0].n_time_steps;
    let mut finals = CMatrix::zeros(n, k);
    for (l, run) in runs.iter().enumerate() {
        if (run.t_total - t0).abs() > 1e-12 || run.n_time_steps != steps0 {
            return Err(Error::MismatchedRuns(format!(
                "run {l} has t_total = {}, n_time_steps = {}; expected {t0}, {steps0}",
                run.t_total, run.n_time_steps
            )));
        }
        if run.initial_state.len() != n || run.final_state.len() != n {
            return Err(Error::MismatchedRuns(format!(
                "run {l} has state dimension {}, expected {n}",
                run.initial_state.len()
            )));
        }
        let column_gap =
            (&run.initial_state - &reference.initial_frame.columns().column(l).into_owned()).norm();
        if column_gap > 1e-6 {
            return Err(Error::MismatchedRuns(format!(
                "run {l} did not start on initial frame column {l} (gap {column_gap:.3e})"
            )));
        }
        finals.set_column(l, &run.final_state);
    }
    let mut gate = reference.parallel_final.adjoint() * finals;
    gate *= dynamical_phase.conj();
    let k_f = k as f64;
    let fidelity = (gate.adjoint() * &reference.u_g)
        .diagonal()
        .iter()
        .sum::<C64>()
        .norm()
        / k_f;
    Ok((gate, fidelity))
}
