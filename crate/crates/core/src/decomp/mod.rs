//! Decomposability: `Choi(τ) = A + Γ₁(B)` with `A, B ⪰ 0`.
//!
//! A decomposition is searched by Dykstra's alternating projections; its
//! refutation is a PPT witness `W` (`W ⪰ 0`, `Γ₁(W) ⪰ 0`, `Tr W = 1`) with
//! `Tr(W·C) < 0`, searched by projected gradient. Both kinds of certificate
//! are checked from scratch by [`verify_decomposition`] and
//! [`verify_witness`] before they are returned.

mod pipeline;
mod primal;
mod witness;

pub use pipeline::{
    decide_decomposable, not_ccp_demo, piani_mora_check, Budgets, Consistency, NotCcpReport,
    PianiMoraReport,
};
pub use primal::{find_decomposition, PrimalDykstra};
pub use witness::{find_witness, repair_witness, WitnessSearch};

use crate::error::Result;
use crate::linalg::{eigh, partial_transpose, ComplexMatrix, Factor};
use crate::maps::MapDims;

/// Acceptance thresholds for certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertTolerances {
    /// Smallest eigenvalue allowed for `A`, `B`, `W`, `Γ₁(W)` is `-psd`.
    pub psd: f64,
    /// Largest accepted `‖A + Γ₁(B) − C‖_F`.
    pub residual: f64,
    /// Largest accepted `|Tr W − 1|`.
    pub trace: f64,
    /// A witness needs `Tr(W·C) ≤ -margin`.
    pub margin: f64,
}

impl Default for CertTolerances {
    fn default() -> Self {
        Self {
            psd: 1e-9,
            residual: 1e-7,
            trace: 1e-9,
            margin: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Decomposition,
    Witness,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Decomposition {
        a: ComplexMatrix,
        b: ComplexMatrix,
        residual: f64,
    },
    Witness {
        w: ComplexMatrix,
        value: f64,
        min_eig_w: f64,
        min_eig_pt_w: f64,
        trace: f64,
    },
    Undecided,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub primal_iterations: usize,
    pub witness_iterations: usize,
    pub initial_residual: Option<f64>,
    pub final_residual: Option<f64>,
    pub best_residual: Option<f64>,
    /// Lowest repaired witness value seen, valid or not.
    pub best_witness_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompCertificate {
    pub dims: MapDims,
    pub outcome: Outcome,
    pub tolerances: CertTolerances,
    pub diagnostics: Diagnostics,
}

impl DecompCertificate {
    pub fn kind(&self) -> CertificateKind {
        match self.outcome {
            Outcome::Decomposition { .. } => CertificateKind::Decomposition,
            Outcome::Witness { .. } => CertificateKind::Witness,
            Outcome::Undecided => CertificateKind::Undecided,
        }
    }

    /// Re-checks the certificate against `choi` with a fresh eigensolver pass.
    /// UNDECIDED certificates assert nothing and verify trivially.
    pub fn verify(&self, choi: &ComplexMatrix, tol: &CertTolerances) -> Result<bool> {
        Ok(match &self.outcome {
            Outcome::Decomposition { a, b, .. } => {
                verify_decomposition(choi, self.dims, a, b, tol)?.valid
            }
            Outcome::Witness { w, .. } => verify_witness(choi, self.dims, w, tol)?.valid,
            Outcome::Undecided => true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCheck {
    pub min_eig_a: f64,
    pub min_eig_b: f64,
    pub residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessCheck {
    pub min_eig_w: f64,
    pub min_eig_pt_w: f64,
    pub trace: f64,
    pub value: f64,
    pub valid: bool,
}

fn bipartite(dims: MapDims) -> (usize, usize) {
    (dims.dim_in, dims.dim_out)
}

pub(crate) fn gamma(m: &ComplexMatrix, dims: MapDims) -> ComplexMatrix {
    partial_transpose(m, bipartite(dims), Factor::First).expect("Choi-shaped matrix")
}

fn shape_check(choi: &ComplexMatrix, dims: MapDims, others: &[&ComplexMatrix]) -> Result<()> {
    let s = dims.choi_size();
    for m in std::iter::once(choi).chain(others.iter().copied()) {
        if m.shape() != (s, s) {
            return Err(crate::Error::DimensionMismatch(format!(
                "expected {s}x{s} matrices, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Checks `A ⪰ 0`, `B ⪰ 0` and `‖A + Γ₁(B) − C‖_F` against `tol`.
pub fn verify_decomposition(
    choi: &ComplexMatrix,
    dims: MapDims,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &CertTolerances,
) -> Result<DecompositionCheck> {
    shape_check(choi, dims, &[a, b])?;
    let min_eig_a = eigh(&a.symmetrized()?)?.min();
    let min_eig_b = eigh(&b.symmetrized()?)?.min();
    let residual = (&(a + &gamma(b, dims)) - choi).frobenius_norm();
    let valid = min_eig_a >= -tol.psd && min_eig_b >= -tol.psd && residual <= tol.residual;
    Ok(DecompositionCheck {
        min_eig_a,
        min_eig_b,
        residual,
        valid,
    })
}

/// Checks `W ⪰ 0`, `Γ₁(W) ⪰ 0`, `Tr W = 1` and `Tr(W·C) ≤ −margin`.
///
/// For any decomposition `C = A + Γ₁(B)`, `Tr(W·C) = Tr(W·A) + Tr(Γ₁(W)·B) ≥ 0`,
/// so a valid witness refutes decomposability regardless of how it was found.
pub fn verify_witness(
    choi: &ComplexMatrix,
    dims: MapDims,
    w: &ComplexMatrix,
    tol: &CertTolerances,
) -> Result<WitnessCheck> {
    shape_check(choi, dims, &[w])?;
    let w = w.symmetrized()?;
    let min_eig_w = eigh(&w)?.min();
    let min_eig_pt_w = eigh(&gamma(&w, dims))?.min();
    let trace = w.trace().re;
    let value = w.trace_product_re(choi);
    let valid = min_eig_w >= -tol.psd
        && min_eig_pt_w >= -tol.psd
        && (trace - 1.0).abs() <= tol.trace
        && value <= -tol.margin;
    Ok(WitnessCheck {
        min_eig_w,
        min_eig_pt_w,
        trace,
        value,
        valid,
    })
}
