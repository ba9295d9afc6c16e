//! The machine-readable result document: JSON with complex numbers as
//! two-element `[re, im]` arrays, every float in shortest round-trip form.
//! Parsing an emitted document and re-emitting it reproduces the bytes.

use holonomy_core::{CMatrix, HolonomyResult, OverlapClass, C64};
use serde::{Deserialize, Serialize};

pub type ComplexPair = [f64; 2];
pub type MatrixRows = Vec<Vec<ComplexPair>>;

pub fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Option<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first()?.len();
    if rows.iter().any(|r| r.len() != ncols) || ncols == 0 {
        return None;
    }
    let mut m = CMatrix::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        for (c, pair) in row.iter().enumerate() {
            m[(r, c)] = C64::new(pair[0], pair[1]);
        }
    }
    Some(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobEcho {
    pub source: String,
    pub n_steps: usize,
    pub rank_tol: f64,
    pub oracles: Vec<String>,
    pub t_total: Option<f64>,
    pub time_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: String,
    pub rank: usize,
}

impl Classification {
    pub fn from_class(class: OverlapClass, dim_sub: usize) -> Self {
        match class {
            OverlapClass::Overlapping => Classification {
                kind: "overlapping".to_string(),
                rank: dim_sub,
            },
            OverlapClass::PartiallyOverlapping(r) => Classification {
                kind: "partially-overlapping".to_string(),
                rank: r,
            },
            OverlapClass::Orthogonal => Classification {
                kind: "orthogonal".to_string(),
                rank: 0,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Frobenius distance between the numeric holonomy and the closed-form
    /// expectation (tripod sources only).
    pub analytic_deviation: Option<f64>,
    /// `|Tr(gate^H U_g)| / K` of the adiabatically extracted gate.
    pub adiabatic_fidelity: Option<f64>,
    /// Frobenius distance between the extracted gate and the holonomy.
    pub adiabatic_gate_deviation: Option<f64>,
    /// Frobenius distance between the projector product at the job's step
    /// count and the assembled operator (first order in 1/n by nature).
    pub discrete_gamma_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: String,
    pub job: JobEcho,
    pub dim_total: usize,
    pub dim_sub: usize,
    pub classification: Classification,
    pub near_singular: bool,
    pub singular_values: Vec<f64>,
    /// Eigenvalues of the holonomy, sorted by phase angle in (-pi, pi].
    pub eigenvalues_u_g: Vec<ComplexPair>,
    pub commutator_defect: f64,
    pub dynamical_phase: ComplexPair,
    pub u_g: MatrixRows,
    pub pexp: MatrixRows,
    pub u_m: MatrixRows,
    pub parallel_final_frame: MatrixRows,
    pub gamma_operator: MatrixRows,
    pub oracles: OracleReport,
}

pub const SCHEMA: &str = "holonomy-result/1";

impl ResultDocument {
    pub fn new(
        result: &HolonomyResult,
        job: JobEcho,
        oracles: OracleReport,
    ) -> holonomy_core::Result<Self> {
        let eigenvalues = result
            .eigenvalues_by_phase()?
            .iter()
            .map(|z| [z.re, z.im])
            .collect();
        Ok(ResultDocument {
            schema: SCHEMA.to_string(),
            job,
            dim_total: result.initial_frame.dim_total(),
            dim_sub: result.initial_frame.dim_sub(),
            classification: Classification::from_class(
                result.classification,
                result.initial_frame.dim_sub(),
            ),
            near_singular: result.near_singular,
            singular_values: result.singular_values.clone(),
            eigenvalues_u_g: eigenvalues,
            commutator_defect: holonomy_core::commutator_defect(result),
            dynamical_phase: [result.dynamical_phase.re, result.dynamical_phase.im],
            u_g: matrix_to_rows(&result.u_g),
            pexp: matrix_to_rows(&result.pexp),
            u_m: matrix_to_rows(&result.u_m),
            parallel_final_frame: matrix_to_rows(&result.parallel_final),
            gamma_operator: matrix_to_rows(&result.gamma_operator),
            oracles,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("document serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
