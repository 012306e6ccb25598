use super::primal::PrimalDykstra;
use super::witness::{WitnessSearch, DEFAULT_INNER, DEFAULT_OUTER};
use super::{CertTolerances, CertificateKind, DecompCertificate, Diagnostics, Outcome};
use crate::cones::{check_cp, ConeVerdict, SPECTRAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix};
use crate::maps::{tensor_maps, zoo, LinearMapSpec};

/// Iteration budgets for [`decide_decomposable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets {
    pub primal_iterations: usize,
    /// Primal steps per round before the witness search gets its turn.
    pub primal_per_round: usize,
    pub witness_outer: usize,
    pub witness_inner: usize,
    /// `None` means `1/‖C‖_F`.
    pub witness_step: Option<f64>,
    pub tolerances: CertTolerances,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            primal_iterations: 5000,
            primal_per_round: 50,
            witness_outer: DEFAULT_OUTER,
            witness_inner: DEFAULT_INNER,
            witness_step: None,
            tolerances: CertTolerances::default(),
        }
    }
}

/// Alternates rounds of the primal and dual searches and returns the first
/// certified result. Within a round the primal block runs first; if both
/// certify in the same round the witness is returned.
pub fn decide_decomposable(map: &LinearMapSpec, budgets: &Budgets) -> Result<DecompCertificate> {
    let choi = map.hermitian_choi()?;
    let dims = map.dims();
    let tol = budgets.tolerances;
    let mut primal = PrimalDykstra::new(choi.clone(), dims);
    let mut dual = WitnessSearch::new(choi, dims, budgets.witness_step, budgets.witness_inner, tol);

    let mut found_primal = None;
    loop {
        let primal_left = found_primal.is_none() && primal.iterations() < budgets.primal_iterations;
        let dual_left = !dual.converged() && dual.iterations() < budgets.witness_outer;
        if !primal_left && !dual_left {
            break;
        }
        if primal_left {
            let stop =
                (primal.iterations() + budgets.primal_per_round).min(budgets.primal_iterations);
            while primal.iterations() < stop {
                primal.step()?;
                if let Some(found) = primal.certify(&tol)? {
                    found_primal = Some(found);
                    break;
                }
            }
        }
        if dual_left {
            dual.step()?;
        }
        if dual.certified().is_some() || found_primal.is_some() {
            break;
        }
    }

    let mut diagnostics = Diagnostics::default();
    primal.fill_diagnostics(&mut diagnostics);
    dual.fill_diagnostics(&mut diagnostics);
    let outcome = dual
        .certified()
        .cloned()
        .or(found_primal)
        .unwrap_or(Outcome::Undecided);
    Ok(DecompCertificate {
        dims,
        outcome,
        tolerances: tol,
        diagnostics,
    })
}

/// Agreement between a decomposability certificate for `τ ⊗ id_k` and the
/// CP test of `τ`: a decomposable `τ ⊗ id_k` (some `k ≥ 2`) forces `τ` to be CP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    /// DECOMPOSITION with `τ` CP, or WITNESS with `τ` not CP.
    Consistent,
    /// DECOMPOSITION with `τ` not CP, or WITNESS with `τ` CP (then `τ ⊗ id_k` is CP).
    Contradiction,
    /// No certificate within budget.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct PianiMoraReport {
    pub k: usize,
    pub cp: ConeVerdict,
    pub certificate: DecompCertificate,
    pub consistency: Consistency,
}

/// Decides decomposability of `τ ⊗ id_k` and checks it against `check_cp(τ)`.
pub fn piani_mora_check(
    tau: &LinearMapSpec,
    k: usize,
    budgets: &Budgets,
) -> Result<PianiMoraReport> {
    if k < 2 {
        return Err(Error::BadK {
            k,
            reason: "the tensor-identity test needs k ≥ 2".into(),
        });
    }
    let cp = check_cp(tau, SPECTRAL_TOL)?;
    let lifted = tensor_maps(tau, &zoo("identity", &[k as f64])?)?;
    let certificate = decide_decomposable(&lifted, budgets)?;
    let consistency = match (certificate.kind(), cp.holds()) {
        (CertificateKind::Undecided, _) => Consistency::Inconclusive,
        (CertificateKind::Decomposition, true) | (CertificateKind::Witness, false) => {
            Consistency::Consistent
        }
        _ => Consistency::Contradiction,
    };
    Ok(PianiMoraReport {
        k,
        cp,
        certificate,
        consistency,
    })
}

#[derive(Debug, Clone)]
pub struct NotCcpReport {
    pub k: usize,
    /// Block matrix `[(τ⊗id_k)(1 ⊗ e_ji)]_ij`.
    pub element: ComplexMatrix,
    pub min_eigenvalue: f64,
    /// `−λ_max(τ(1))`.
    pub expected: f64,
    /// `λ_min(τ(1))`; negative only if `τ` was not positive.
    pub unit_image_min: f64,
}

/// Shows that `τ ⊗ id_k` is not completely copositive for a nonzero positive `τ`.
///
/// `[1 ⊗ e_ij]_ij` is positive in `M_k(M_m ⊗ M_k)`, but applying
/// `τ ⊗ id_k` to its transpose pattern gives `[τ(1) ⊗ e_ji]_ij`, which is
/// `τ(1) ⊗ swap` up to a reordering and has smallest eigenvalue `−λ_max(τ(1))`.
pub fn not_ccp_demo(tau: &LinearMapSpec, k: usize) -> Result<NotCcpReport> {
    if k < 2 {
        return Err(Error::BadK {
            k,
            reason: "k must be at least 2".into(),
        });
    }
    let unit_image = eigh(&tau.apply_to_unit().symmetrized()?)?;
    if unit_image.max().abs().max(unit_image.min().abs()) <= 1e-12 {
        return Err(Error::ZeroMap);
    }
    let d = tau.dims();
    let lifted = tensor_maps(tau, &zoo("identity", &[k as f64])?)?;
    let block = d.dim_out * k;
    let mut element = ComplexMatrix::zeros(k * block, k * block);
    let one = ComplexMatrix::identity(d.dim_in);
    for i in 0..k {
        for j in 0..k {
            let x = crate::linalg::kron(&one, &ComplexMatrix::unit(k, j, i))?;
            let img = lifted.apply(&x)?;
            for r in 0..block {
                for c in 0..block {
                    element[(i * block + r, j * block + c)] = img[(r, c)];
                }
            }
        }
    }
    let min_eigenvalue = eigh(&element.symmetrized()?)?.min();
    Ok(NotCcpReport {
        k,
        element,
        min_eigenvalue,
        expected: -unit_image.max(),
        unit_image_min: unit_image.min(),
    })
}
