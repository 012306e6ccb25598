use super::{gamma, verify_witness, CertTolerances, DecompCertificate, Diagnostics, Outcome};
use crate::error::Result;
use crate::linalg::{eigh, psd_project, ComplexMatrix};
use crate::maps::{LinearMapSpec, MapDims};

pub const DEFAULT_OUTER: usize = 2000;
pub const DEFAULT_INNER: usize = 200;
const INNER_TOL: f64 = 1e-12;
const FIXED_POINT_TOL: f64 = 1e-10;

/// Shifts `W` by the smallest multiple of `I` making `W` and `Γ₁(W)` PSD,
/// then rescales to unit trace. Both cones contain `I`, so the result is
/// feasible up to rounding.
pub fn repair_witness(w: &ComplexMatrix, dims: MapDims) -> Result<ComplexMatrix> {
    let w = w.hermitian_part();
    let delta = 0f64
        .max(-eigh(&w)?.min())
        .max(-eigh(&gamma(&w, dims))?.min());
    let d = w.rows();
    let shifted = &w + &ComplexMatrix::identity(d).scale(delta);
    let tr = shifted.trace().re;
    Ok(shifted.scale(1.0 / tr))
}

/// Projected gradient for `min Re Tr(W·C)` over `{W ⪰ 0, Γ₁(W) ⪰ 0, Tr W = 1}`.
///
/// The projection onto the feasible set is itself a Dykstra loop over the
/// three sets. After every outer step the iterate is repaired to exact
/// feasibility and verified; the best verified value is kept.
#[derive(Debug, Clone)]
pub struct WitnessSearch {
    choi: ComplexMatrix,
    dims: MapDims,
    w: ComplexMatrix,
    step: f64,
    inner: usize,
    tol: CertTolerances,
    iterations: usize,
    converged: bool,
    best: Option<(ComplexMatrix, f64)>,
    best_valid: Option<Outcome>,
}

impl WitnessSearch {
    /// Starts at the maximally mixed state. `step` defaults to `1/‖C‖_F`.
    pub fn new(
        choi: ComplexMatrix,
        dims: MapDims,
        step: Option<f64>,
        inner: usize,
        tol: CertTolerances,
    ) -> Self {
        let d = choi.rows();
        let norm = choi.frobenius_norm();
        let step = step.unwrap_or(if norm > 0.0 { 1.0 / norm } else { 1.0 });
        Self {
            w: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            choi,
            dims,
            step,
            inner,
            tol,
            iterations: 0,
            converged: false,
            best: None,
            best_valid: None,
        }
    }

    fn project(&self, x: ComplexMatrix) -> Result<ComplexMatrix> {
        let d = x.rows();
        let mut x = x;
        let mut p = [
            ComplexMatrix::zeros(d, d),
            ComplexMatrix::zeros(d, d),
            ComplexMatrix::zeros(d, d),
        ];
        for _ in 0..self.inner {
            let previous = x.clone();

            let z = &x + &p[0];
            let y = psd_project(&z)?;
            p[0] = &z - &y;
            x = y;

            let z = &x + &p[1];
            let y = gamma(&psd_project(&gamma(&z, self.dims))?, self.dims);
            p[1] = &z - &y;
            x = y;

            let z = &x + &p[2];
            let shift = (1.0 - z.trace().re) / d as f64;
            let y = &z + &ComplexMatrix::identity(d).scale(shift);
            p[2] = &z - &y;
            x = y;

            if (&x - &previous).frobenius_norm() < INNER_TOL {
                break;
            }
        }
        Ok(x)
    }

    /// One outer step. Returns `true` once the iterate is a fixed point.
    pub fn step(&mut self) -> Result<bool> {
        if self.converged {
            return Ok(true);
        }
        let next = self.project(&self.w - &self.choi.scale(self.step))?;
        let change = (&next - &self.w).frobenius_norm();
        self.w = next;
        self.iterations += 1;

        let repaired = repair_witness(&self.w, self.dims)?;
        let check = verify_witness(&self.choi, self.dims, &repaired, &self.tol)?;
        let improves_valid = match &self.best_valid {
            Some(Outcome::Witness { value, .. }) => check.value < *value,
            _ => true,
        };
        if check.valid && improves_valid {
            self.best_valid = Some(Outcome::Witness {
                w: repaired.clone(),
                value: check.value,
                min_eig_w: check.min_eig_w,
                min_eig_pt_w: check.min_eig_pt_w,
                trace: check.trace,
            });
        }
        if self.best.as_ref().is_none_or(|(_, v)| check.value < *v) {
            self.best = Some((repaired, check.value));
        }
        self.converged = change < FIXED_POINT_TOL;
        Ok(self.converged)
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn best_value(&self) -> Option<f64> {
        self.best.as_ref().map(|(_, v)| *v)
    }

    /// Best witness so far that passed [`verify_witness`].
    pub fn certified(&self) -> Option<&Outcome> {
        self.best_valid.as_ref()
    }

    pub(crate) fn fill_diagnostics(&self, d: &mut Diagnostics) {
        d.witness_iterations = self.iterations;
        d.best_witness_value = self.best_value();
    }
}

/// Runs [`WitnessSearch`] with the given step (default `1/‖C‖_F`) for at
/// most `max_iter` outer steps and [`DEFAULT_INNER`] inner projections.
pub fn find_witness(
    map: &LinearMapSpec,
    step: Option<f64>,
    max_iter: usize,
) -> Result<DecompCertificate> {
    let tol = CertTolerances::default();
    let mut search =
        WitnessSearch::new(map.hermitian_choi()?, map.dims(), step, DEFAULT_INNER, tol);
    for _ in 0..max_iter {
        if search.step()? {
            break;
        }
    }
    let mut diagnostics = Diagnostics::default();
    search.fill_diagnostics(&mut diagnostics);
    Ok(DecompCertificate {
        dims: map.dims(),
        outcome: search.certified().cloned().unwrap_or(Outcome::Undecided),
        tolerances: tol,
        diagnostics,
    })
}
