//! Minimal Stinespring dilations and the correspondence between maps
//! dominated by a CP map `α` and positive contractions in the commutant of
//! its dilation.
//!
//! For `α : M_m → M_n` with linearly independent Kraus operators
//! `K_1..K_r`, the dilation is `α(a) = V†(a ⊗ I_r)V` with
//! `V h = Σ_i (K_i† h) ⊗ e_i`. The commutant of `a ⊗ I_r` is `I_m ⊗ M_r`, so
//! a dominated map is `γ(a) = V†(a ⊗ z1)V = Σ_ij (z1)_ij K_i a K_j†` for a
//! unique `0 ≤ z1 ≤ I_r`.

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, kron, ComplexMatrix};
use crate::maps::{choi_to_kraus, kraus_to_vector, LinearMapSpec, MapDims, NOT_PSD_TOLERANCE};

/// Allowed excursion of `z1` outside `[0, I]`.
pub const Z_TOL: f64 = 1e-10;
/// Second-largest over largest Choi eigenvalue at or below which a map is pure.
pub const PURITY_RATIO: f64 = 1e-9;
/// Relative residual above which [`recover_z`] reports `NoSolution`.
pub const RECOVERY_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct StinespringTriple {
    pub dims: MapDims,
    /// `r`; the representation is `a ↦ a ⊗ I_r`.
    pub dilation_dim: usize,
    /// `(m·r) x n` isometry-like operator.
    pub v: ComplexMatrix,
    pub kraus: Vec<ComplexMatrix>,
}

impl StinespringTriple {
    /// `V†(a ⊗ z1)V`, with `z1 = I_r` when `None`.
    pub fn compress(&self, a: &ComplexMatrix, z1: Option<&ComplexMatrix>) -> Result<ComplexMatrix> {
        let r = self.dilation_dim;
        let inner = match z1 {
            Some(z) => kron(a, z)?,
            None => kron(a, &ComplexMatrix::identity(r))?,
        };
        Ok(self.v.adjoint_mul(&inner.matmul(&self.v)))
    }

    /// Gram matrix `⟨κ_i, κ_j⟩` of the vectorized Kraus operators.
    pub fn kraus_gram(&self) -> ComplexMatrix {
        let k = kraus_columns(&self.kraus, self.dims);
        k.adjoint_mul(&k)
    }
}

/// The `mn x r` matrix whose columns are the vectorized Kraus operators.
fn kraus_columns(kraus: &[ComplexMatrix], dims: MapDims) -> ComplexMatrix {
    let vecs: Vec<_> = kraus.iter().map(kraus_to_vector).collect();
    ComplexMatrix::from_fn(dims.choi_size(), vecs.len(), |row, i| vecs[i][row])
}

fn cp_choi(map: &LinearMapSpec) -> Result<ComplexMatrix> {
    let c = map.hermitian_choi()?;
    let min = eigh(&c)?.min();
    if min < -NOT_PSD_TOLERANCE {
        return Err(Error::NotCp {
            min_eigenvalue: min,
        });
    }
    Ok(c)
}

/// Minimal dilation from the eigen-decomposition Kraus operators.
pub fn minimal_dilation(map: &LinearMapSpec) -> Result<StinespringTriple> {
    let dims = map.dims();
    let choi = cp_choi(map)?;
    let kraus = choi_to_kraus(&choi, dims).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::NotCp { min_eigenvalue },
        other => other,
    })?;
    let (m, n, r) = (dims.dim_in, dims.dim_out, kraus.len());
    let v = ComplexMatrix::from_fn(m * r, n, |row, b| {
        let (p, i) = (row / r, row % r);
        kraus[i][(b, p)].conj()
    });
    Ok(StinespringTriple {
        dims,
        dilation_dim: r,
        v,
        kraus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Purity {
    pub pure: bool,
    pub largest: f64,
    pub second: f64,
}

/// Pure iff the Choi matrix has numerical rank one. The zero map is not pure.
pub fn is_pure(map: &LinearMapSpec) -> Result<Purity> {
    let ev = eigvalsh(&cp_choi(map)?)?;
    let largest = ev.last().copied().unwrap_or(0.0);
    let second = if ev.len() >= 2 {
        ev[ev.len() - 2].max(0.0)
    } else {
        0.0
    };
    Ok(Purity {
        pure: largest > 0.0 && second <= PURITY_RATIO * largest,
        largest,
        second,
    })
}

/// `z1` in `I_m ⊗ M_r`, the commutant of the dilation's representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantElement {
    pub z1: ComplexMatrix,
}

impl CommutantElement {
    pub fn new(z1: ComplexMatrix) -> Self {
        Self { z1 }
    }

    pub fn scalar(r: usize, c: f64) -> Self {
        Self {
            z1: ComplexMatrix::identity(r).scale(c),
        }
    }
}

fn check_contraction(z1: &ComplexMatrix, r: usize, tol: f64) -> Result<ComplexMatrix> {
    if z1.shape() != (r, r) {
        return Err(Error::DimensionMismatch(format!(
            "z1 must be {r}x{r}, got {}x{}",
            z1.rows(),
            z1.cols()
        )));
    }
    let z = z1.symmetrized()?;
    let ev = eigvalsh(&z)?;
    let (min, max) = (
        ev.first().copied().unwrap_or(0.0),
        ev.last().copied().unwrap_or(0.0),
    );
    if min < -tol || max > 1.0 + tol {
        return Err(Error::BadZ { min, max });
    }
    Ok(z)
}

/// `γ(a) = V†(a ⊗ z1)V`, returned in Choi form `K z1 K†`.
pub fn dominated_from_z(alpha: &LinearMapSpec, z: &CommutantElement) -> Result<LinearMapSpec> {
    let triple = minimal_dilation(alpha)?;
    let dims = alpha.dims();
    let z1 = check_contraction(&z.z1, triple.dilation_dim, Z_TOL)?;
    let k = kraus_columns(&triple.kraus, dims);
    let choi = k.matmul(&z1).matmul(&k.adjoint()).hermitian_part();
    LinearMapSpec::from_choi(dims, choi)
}

#[derive(Debug, Clone)]
pub struct RecoveredZ {
    pub z: CommutantElement,
    /// `‖K z1 K† − Choi(γ)‖_F / ‖Choi(α)‖_F`.
    pub residual: f64,
}

/// Solves `V†(e_pq ⊗ z1)V = γ(e_pq)` for all units by least squares.
///
/// In Choi form the system reads `K z1 K† = Choi(γ)`; the normal equations
/// give `z1 = G⁻¹ K† Choi(γ) K G⁻¹` with `G = K†K`, invertible for a minimal dilation.
pub fn recover_z(alpha: &LinearMapSpec, gamma: &LinearMapSpec) -> Result<RecoveredZ> {
    alpha.check_same_dims(gamma)?;
    let c_alpha = cp_choi(alpha)?;
    let c_gamma = cp_choi(gamma)?;
    let gap = eigh(&(&c_alpha - &c_gamma))?.min();
    if gap < -NOT_PSD_TOLERANCE {
        return Err(Error::NotDominated {
            min_eigenvalue: gap,
        });
    }
    let triple = minimal_dilation(alpha)?;
    let r = triple.dilation_dim;
    let scale = c_alpha.frobenius_norm();
    if r == 0 {
        let residual = c_gamma.frobenius_norm();
        if residual > RECOVERY_TOL {
            return Err(Error::NoSolution { residual });
        }
        return Ok(RecoveredZ {
            z: CommutantElement::new(ComplexMatrix::zeros(0, 0)),
            residual,
        });
    }
    let k = kraus_columns(&triple.kraus, alpha.dims());
    let g_inv = eigh(&k.adjoint_mul(&k))?.reconstruct_with(|x| 1.0 / x);
    let pinv = g_inv.matmul(&k.adjoint());
    let z1 = pinv
        .matmul(&c_gamma)
        .matmul(&pinv.adjoint())
        .hermitian_part();
    let fitted = k.matmul(&z1).matmul(&k.adjoint());
    let residual = (&fitted - &c_gamma).frobenius_norm() / scale;
    if residual > RECOVERY_TOL {
        return Err(Error::NoSolution { residual });
    }
    let z1 = check_contraction(&z1, r, 1e-9)?;
    Ok(RecoveredZ {
        z: CommutantElement::new(z1),
        residual,
    })
}
