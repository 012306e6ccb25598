//! Recovering tensor factors of dominated maps.
//!
//! * [`extract_rank_one_factor`]: if `0 ≤ z ≤ y ⊗ |h⟩⟨h|` then `z = v ⊗ |h⟩⟨h|`.
//! * [`factor_through_identity`]: if `β ≤ α ⊗ id_k` (as positive maps) then
//!   `β = γ ⊗ id_k`, with `γ` read off from the compressions
//!   `β(a ⊗ |h⟩⟨h|) = γ(a) ⊗ |h⟩⟨h|`.
//! * [`factor_through_pure`]: if `β ≤ α₁ ⊗ α₂` (as CP maps) with `α₂` pure
//!   then `β = β₁ ⊗ α₂` with `β₁ ≤ α₁`.

use num_complex::Complex64;

use crate::cones::{
    check_cp, check_dominates, refute_k_positivity, ConeVerdict, SeeSawConfig, SPECTRAL_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, norm, tensor_permute, ComplexMatrix, I, ONE, ZERO};
use crate::maps::{tensor_maps, zoo, LinearMapSpec, MapDims};
use crate::stinespring::is_pure;

/// Default tolerance for factorizations.
pub const FACTOR_TOL: f64 = 1e-7;

/// Search budget for the positivity checks inside [`factor_through_identity`].
pub const FACTOR_SEARCH: SeeSawConfig = SeeSawConfig {
    starts: 16,
    iterations: 200,
    seed: 0,
    tol: 1e-7,
    threads: 1,
};

#[derive(Debug, Clone)]
pub struct FactorResult {
    /// `γ` or `β₁`.
    pub factor: LinearMapSpec,
    /// `‖Choi(β) − Choi(factor ⊗ second)‖_F`.
    pub reconstruction_error: f64,
    /// Positivity of `γ` (refuter, k = 1) or complete positivity of `β₁`.
    pub positivity: ConeVerdict,
    /// `α₁` dominates `β₁`; absent for the identity factorization.
    pub domination: Option<ConeVerdict>,
    /// Largest Choi distance between the per-`h` extractions.
    pub h_deviation: Option<f64>,
}

fn scaled_tol(tol: f64, m: &ComplexMatrix) -> f64 {
    tol * m.frobenius_norm().max(1.0)
}

enum ExtractFailure {
    NotPositive(f64),
    OffBlock { error: f64, allowed: f64 },
    AboveBound(f64),
}

impl From<ExtractFailure> for Error {
    fn from(f: ExtractFailure) -> Self {
        match f {
            ExtractFailure::NotPositive(min) => {
                Error::PreconditionFailed(format!("z is not positive: min eigenvalue {min:.3e}"))
            }
            ExtractFailure::OffBlock { error, allowed } => Error::ReconstructionFailed {
                error,
                tol: allowed,
            },
            ExtractFailure::AboveBound(gap) => {
                Error::PreconditionFailed(format!("v ≤ y violated: min eigenvalue {gap:.3e}"))
            }
        }
    }
}

fn extract(
    z: &ComplexMatrix,
    y: &ComplexMatrix,
    h: &[Complex64],
    tol: f64,
) -> Result<std::result::Result<ComplexMatrix, ExtractFailure>> {
    let q = h.len();
    let p = y.rows();
    if !y.is_square() || z.shape() != (p * q, p * q) {
        return Err(Error::DimensionMismatch(format!(
            "z must be {0}x{0} for y {p}x{p} and h of length {q}",
            p * q
        )));
    }
    let hn = norm(h);
    if hn == 0.0 {
        return Err(Error::PreconditionFailed("h must be nonzero".into()));
    }
    let h: Vec<Complex64> = h.iter().map(|x| x / hn).collect();
    let z = z.symmetrized()?;
    let zmin = eigh(&z)?.min();
    if zmin < -tol {
        return Ok(Err(ExtractFailure::NotPositive(zmin)));
    }

    let v = ComplexMatrix::from_fn(p, p, |r, c| {
        let mut acc = ZERO;
        for s in 0..q {
            for t in 0..q {
                acc += h[s].conj() * z[(r * q + s, c * q + t)] * h[t];
            }
        }
        acc
    });
    let rebuilt = kron(&v, &ComplexMatrix::outer(&h, &h))?;
    let error = (&rebuilt - &z).frobenius_norm();
    let allowed = scaled_tol(tol, &z);
    if error > allowed {
        return Ok(Err(ExtractFailure::OffBlock { error, allowed }));
    }
    let gap = eigh(&(y - &v).symmetrized()?)?.min();
    if gap < -tol {
        return Ok(Err(ExtractFailure::AboveBound(gap)));
    }
    Ok(Ok(v))
}

/// Returns `v` with `z = v ⊗ |h⟩⟨h|`, where `v = (I ⊗ ⟨h|) z (I ⊗ |h⟩)` for normalized `h`.
///
/// Checks, in order: `z ⪰ 0`, the reconstruction (which fails exactly when
/// `z` has support off the `h` block), and `v ≤ y`.
pub fn extract_rank_one_factor(
    z: &ComplexMatrix,
    y: &ComplexMatrix,
    h: &[Complex64],
    tol: f64,
) -> Result<ComplexMatrix> {
    extract(z, y, h, tol)?.map_err(Error::from)
}

/// Test vectors for `h`-independence: the basis, `(e_1+e_2)/√2` and `(e_1+i·e_2)/√2`.
fn probe_vectors(k: usize) -> Vec<Vec<Complex64>> {
    let mut hs: Vec<Vec<Complex64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect();
    if k >= 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut real = vec![ZERO; k];
        real[0] = ONE * s;
        real[1] = ONE * s;
        let mut phase = vec![ZERO; k];
        phase[0] = ONE * s;
        phase[1] = I * s;
        hs.push(real);
        hs.push(phase);
    }
    hs
}

/// Choi matrix of `γ_h` from `β(a ⊗ |h⟩⟨h|)` on positive `a` only.
///
/// Off-diagonal units come from polarization with real and imaginary phases:
/// with `D = γ(e_pp) + γ(e_qq)`, `S = γ(P₊) − D` and `T = γ(P_i) − D` for
/// `P₊ = (e_p+e_q)(e_p+e_q)†`, `P_i = (e_p+i·e_q)(e_p+i·e_q)†`,
/// `γ(e_pq) = (S + iT)/2` and `γ(e_qp) = (S − iT)/2`.
fn extract_gamma_h(
    alpha: &LinearMapSpec,
    beta: &LinearMapSpec,
    h: &[Complex64],
    tol: f64,
) -> Result<ComplexMatrix> {
    let (m, n) = (alpha.dims().dim_in, alpha.dims().dim_out);
    let hh = ComplexMatrix::outer(h, h);
    let compress = |a: &ComplexMatrix| -> Result<ComplexMatrix> {
        let z = beta.apply(&kron(a, &hh)?)?;
        let y = alpha.apply(a)?;
        extract(&z, &y, h, tol)?.map_err(|f| match f {
            ExtractFailure::OffBlock { error, .. } => Error::NotAFactor(format!(
                "β(a ⊗ |h⟩⟨h|) is not of the form v ⊗ |h⟩⟨h| (off-block mass {error:.3e})"
            )),
            ExtractFailure::AboveBound(gap) => Error::NotDominated {
                min_eigenvalue: gap,
            },
            other => other.into(),
        })
    };
    let mut images = vec![vec![ComplexMatrix::zeros(n, n); m]; m];
    for (p, row) in images.iter_mut().enumerate() {
        row[p] = compress(&ComplexMatrix::unit(m, p, p))?;
    }
    for p in 0..m {
        for q in p + 1..m {
            let mut plus = vec![ZERO; m];
            plus[p] = ONE;
            plus[q] = ONE;
            let mut phase = plus.clone();
            phase[q] = I;
            let d = &images[p][p] + &images[q][q];
            let s = &compress(&ComplexMatrix::outer(&plus, &plus))? - &d;
            let t = &compress(&ComplexMatrix::outer(&phase, &phase))? - &d;
            let it = t.scale_complex(I);
            images[p][q] = (&s + &it).scale(0.5);
            images[q][p] = (&s - &it).scale(0.5);
        }
    }
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        images[r / n][c / n][(r % n, c % n)]
    }))
}

/// Recovers `γ` with `β = γ ⊗ id_k` from `β ≤ α ⊗ id_k`, using the default search budget.
pub fn factor_through_identity(
    alpha: &LinearMapSpec,
    beta: &LinearMapSpec,
    k: usize,
    tol: f64,
) -> Result<FactorResult> {
    factor_through_identity_with(alpha, beta, k, tol, &FACTOR_SEARCH)
}

/// As [`factor_through_identity`] with an explicit search budget for the
/// positivity checks of `α ⊗ id_k − β` and of the recovered `γ`.
///
/// The product structure is checked before positivity of `α ⊗ id_k − β`, so
/// a `β` that is not of the form `γ ⊗ id_k` reports `NotAFactor`; a product
/// `β` that `α ⊗ id_k` fails to dominate reports `NotDominated`.
pub fn factor_through_identity_with(
    alpha: &LinearMapSpec,
    beta: &LinearMapSpec,
    k: usize,
    tol: f64,
    search: &SeeSawConfig,
) -> Result<FactorResult> {
    let (da, db) = (alpha.dims(), beta.dims());
    if k == 0 || db != MapDims::new(da.dim_in * k, da.dim_out * k)? {
        return Err(Error::DimensionMismatch(format!(
            "β must map M_{} → M_{} for k = {k}, got M_{} → M_{}",
            da.dim_in * k,
            da.dim_out * k,
            db.dim_in,
            db.dim_out
        )));
    }

    let mut chois = Vec::new();
    for h in probe_vectors(k) {
        chois.push(extract_gamma_h(alpha, beta, &h, tol)?);
    }
    let reference = &chois[0];
    let h_deviation = chois[1..]
        .iter()
        .map(|c| (c - reference).frobenius_norm())
        .fold(0.0, f64::max);
    if h_deviation > scaled_tol(tol, reference) {
        return Err(Error::NotAFactor(format!(
            "compressions depend on h (deviation {h_deviation:.3e})"
        )));
    }

    let gamma = LinearMapSpec::from_choi(da, reference.clone())?;
    let beta_choi = beta.to_choi();
    let id_k = zoo("identity", &[k as f64])?;
    let reconstruction_error =
        (&tensor_maps(&gamma, &id_k)?.to_choi() - &beta_choi).frobenius_norm();
    if reconstruction_error > scaled_tol(tol, &beta_choi) {
        return Err(Error::NotAFactor(format!(
            "Choi(γ ⊗ id_k) differs from Choi(β) by {reconstruction_error:.3e}"
        )));
    }

    let gap = tensor_maps(alpha, &id_k)?.sub(beta)?;
    let gap_verdict = refute_k_positivity(&gap, 1, &SeeSawConfig { tol, ..*search })?;
    if gap_verdict.fails() {
        return Err(Error::NotDominated {
            min_eigenvalue: gap_verdict.evidence.value(),
        });
    }
    let positivity = refute_k_positivity(&gamma, 1, &SeeSawConfig { tol, ..*search })?;
    if positivity.fails() {
        return Err(Error::PreconditionFailed(format!(
            "recovered γ is not positive (value {:.3e}); β was not positive",
            positivity.evidence.value()
        )));
    }
    Ok(FactorResult {
        factor: gamma,
        reconstruction_error,
        positivity,
        domination: None,
        h_deviation: Some(h_deviation),
    })
}

/// Recovers `β₁` with `β = β₁ ⊗ α₂` when `α₁ ⊗ α₂` dominates `β` and `α₂` is pure.
///
/// With `Choi(α₂) = |w⟩⟨w|`, reorder `Choi(β)` to `(in₁, out₁, in₂, out₂)`
/// and contract the second pair against `w`: `Choi(β₁) = (I ⊗ ⟨w|)·P·(I ⊗ |w⟩) / ‖w‖⁴`.
pub fn factor_through_pure(
    alpha1: &LinearMapSpec,
    alpha2: &LinearMapSpec,
    beta: &LinearMapSpec,
    tol: f64,
) -> Result<FactorResult> {
    let (d1, d2) = (alpha1.dims(), alpha2.dims());
    if beta.dims() != d1.tensor(&d2) {
        return Err(Error::DimensionMismatch(format!(
            "β must map M_{} → M_{}",
            d1.dim_in * d2.dim_in,
            d1.dim_out * d2.dim_out
        )));
    }
    for (name, map) in [("α₁", alpha1), ("α₂", alpha2), ("β", beta)] {
        let v = check_cp(map, tol)?;
        if !v.holds() {
            return Err(Error::PreconditionFailed(format!(
                "{name} is not completely positive: min eigenvalue {:.3e}",
                v.evidence.value()
            )));
        }
    }
    let purity = is_pure(alpha2)?;
    if !purity.pure {
        return Err(Error::NotPure {
            ratio: if purity.largest > 0.0 {
                purity.second / purity.largest
            } else {
                f64::NAN
            },
        });
    }
    let joint = tensor_maps(alpha1, alpha2)?;
    let dom = check_dominates(&joint, beta, tol)?;
    if !dom.holds() {
        return Err(Error::NotDominated {
            min_eigenvalue: dom.evidence.value(),
        });
    }

    let spec = eigh(&alpha2.hermitian_choi()?)?;
    let top = spec.dim() - 1;
    let w: Vec<Complex64> = spec
        .vector(top)
        .into_iter()
        .map(|z| z * spec.values[top].sqrt())
        .collect();
    let w2 = norm(&w).powi(2);
    let reordered = tensor_permute(
        &beta.to_choi(),
        &[d1.dim_in, d2.dim_in, d1.dim_out, d2.dim_out],
        &[0, 2, 1, 3],
    )?;
    let (s1, s2) = (d1.choi_size(), d2.choi_size());
    let choi1 = ComplexMatrix::from_fn(s1, s1, |r, c| {
        let mut acc = ZERO;
        for s in 0..s2 {
            for t in 0..s2 {
                acc += w[s].conj() * reordered[(r * s2 + s, c * s2 + t)] * w[t];
            }
        }
        acc / (w2 * w2)
    })
    .hermitian_part();
    let beta1 = LinearMapSpec::from_choi(d1, choi1)?;

    let beta_choi = beta.to_choi();
    let reconstruction_error =
        (&tensor_maps(&beta1, alpha2)?.to_choi() - &beta_choi).frobenius_norm();
    let allowed = scaled_tol(tol, &beta_choi);
    if reconstruction_error > allowed {
        return Err(Error::ReconstructionFailed {
            error: reconstruction_error,
            tol: allowed,
        });
    }
    let positivity = check_cp(&beta1, SPECTRAL_TOL.max(tol))?;
    let domination = check_dominates(alpha1, &beta1, SPECTRAL_TOL.max(tol))?;
    if !positivity.holds() || !domination.holds() {
        return Err(Error::NotDominated {
            min_eigenvalue: domination.evidence.value().min(positivity.evidence.value()),
        });
    }
    Ok(FactorResult {
        factor: beta1,
        reconstruction_error,
        positivity,
        domination: Some(domination),
        h_deviation: None,
    })
}
