use super::{gamma, verify_decomposition, CertTolerances, DecompCertificate, Diagnostics, Outcome};
use crate::error::Result;
use crate::linalg::{psd_project, ComplexMatrix};
use crate::maps::{LinearMapSpec, MapDims};

/// Dykstra's alternating projections between `PSD x PSD` and the affine set
/// `{(A, B) : A + Γ₁(B) = C}`.
///
/// The affine projection adds `R/2` to `A` and `Γ₁(R)/2` to `B`, where `R` is
/// the residual; this is exact because `Γ₁` is a self-adjoint isometry. Only
/// the PSD step carries correction terms since the other set is affine.
#[derive(Debug, Clone)]
pub struct PrimalDykstra {
    choi: ComplexMatrix,
    dims: MapDims,
    a: ComplexMatrix,
    b: ComplexMatrix,
    p_a: ComplexMatrix,
    p_b: ComplexMatrix,
    /// Last PSD iterate and its residual.
    candidate: Option<(ComplexMatrix, ComplexMatrix, f64)>,
    history: Vec<f64>,
}

impl PrimalDykstra {
    /// Starts from `(A, B) = (C, 0)`.
    pub fn new(choi: ComplexMatrix, dims: MapDims) -> Self {
        let s = choi.rows();
        Self {
            a: choi.clone(),
            b: ComplexMatrix::zeros(s, s),
            p_a: ComplexMatrix::zeros(s, s),
            p_b: ComplexMatrix::zeros(s, s),
            choi,
            dims,
            candidate: None,
            history: Vec::new(),
        }
    }

    /// One PSD step then one affine step. Returns the residual of the PSD iterate.
    pub fn step(&mut self) -> Result<f64> {
        let ya = psd_project(&(&self.a + &self.p_a))?;
        let yb = psd_project(&(&self.b + &self.p_b))?;
        self.p_a = &(&self.a + &self.p_a) - &ya;
        self.p_b = &(&self.b + &self.p_b) - &yb;
        let r = &(&self.choi - &ya) - &gamma(&yb, self.dims);
        let residual = r.frobenius_norm();
        self.a = &ya + &r.scale(0.5);
        self.b = &yb + &gamma(&r, self.dims).scale(0.5);
        self.candidate = Some((ya, yb, residual));
        self.history.push(residual);
        Ok(residual)
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Residual after each step.
    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Latest PSD pair `(A, B)` with its residual.
    pub fn candidate(&self) -> Option<(&ComplexMatrix, &ComplexMatrix, f64)> {
        self.candidate.as_ref().map(|(a, b, r)| (a, b, *r))
    }

    /// The latest pair as an outcome, if it passes [`verify_decomposition`].
    pub fn certify(&self, tol: &CertTolerances) -> Result<Option<Outcome>> {
        let Some((a, b, residual)) = &self.candidate else {
            return Ok(None);
        };
        if *residual > tol.residual {
            return Ok(None);
        }
        let check = verify_decomposition(&self.choi, self.dims, a, b, tol)?;
        Ok(check.valid.then(|| Outcome::Decomposition {
            a: a.clone(),
            b: b.clone(),
            residual: check.residual,
        }))
    }

    pub(crate) fn fill_diagnostics(&self, d: &mut Diagnostics) {
        d.primal_iterations = self.history.len();
        d.initial_residual = self.history.first().copied();
        d.final_residual = self.history.last().copied();
        d.best_residual = self.history.iter().copied().reduce(f64::min);
    }
}

/// Runs [`PrimalDykstra`] until a verified decomposition with residual
/// `≤ tol_res` appears or `max_iter` steps are spent.
pub fn find_decomposition(
    map: &LinearMapSpec,
    tol_res: f64,
    max_iter: usize,
) -> Result<DecompCertificate> {
    let tol = CertTolerances {
        residual: tol_res,
        ..Default::default()
    };
    let mut solver = PrimalDykstra::new(map.hermitian_choi()?, map.dims());
    let mut outcome = Outcome::Undecided;
    for _ in 0..max_iter {
        solver.step()?;
        if let Some(found) = solver.certify(&tol)? {
            outcome = found;
            break;
        }
    }
    let mut diagnostics = Diagnostics::default();
    solver.fill_diagnostics(&mut diagnostics);
    Ok(DecompCertificate {
        dims: map.dims(),
        outcome,
        tolerances: tol,
        diagnostics,
    })
}
