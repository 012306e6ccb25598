//! Membership tests for the positivity cones.
//!
//! Complete positivity and complete copositivity are decided spectrally on
//! the Choi matrix. k-positivity is equivalent to `⟨v, C v⟩ ≥ 0` for every
//! unit `v ∈ C^m ⊗ C^n` of Schmidt rank at most `k`; that problem is hard in
//! general, so it is only refuted by a multistart search. A search never
//! returns HOLDS on its own.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::random::{random_vector, rng_stream, SeededRng};
use crate::linalg::{dot, eigh, norm, ComplexMatrix};
use crate::maps::{compose_transpose, LinearMapSpec};

/// Default tolerance for spectral tests.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Default tolerance for search-based refutation.
pub const SEARCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeProperty {
    Cp,
    CoCp,
    /// `k`-positivity; `KPositive(1)` is plain positivity.
    KPositive(usize),
    /// `α − γ` is completely positive.
    Dominates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    /// Smallest eigenvalue of the tested matrix and a unit eigenvector for it.
    Spectral {
        min_eigenvalue: f64,
        vector: Vec<Complex64>,
    },
    /// Best quadratic-form value found by the see-saw search and the vector attaining it.
    Search {
        value: f64,
        vector: Vec<Complex64>,
        starts: usize,
    },
}

impl Evidence {
    pub fn vector(&self) -> &[Complex64] {
        match self {
            Evidence::Spectral { vector, .. } | Evidence::Search { vector, .. } => vector,
        }
    }

    /// The reported quadratic-form value (`λ_min` for spectral evidence).
    pub fn value(&self) -> f64 {
        match *self {
            Evidence::Spectral { min_eigenvalue, .. } => min_eigenvalue,
            Evidence::Search { value, .. } => value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeVerdict {
    pub property: ConeProperty,
    pub status: Status,
    pub evidence: Evidence,
    pub tolerance: f64,
}

impl ConeVerdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

/// Matrix whose quadratic form a verdict about `property` refers to.
///
/// For `Dominates` this is the Choi matrix of the difference, so callers pass `α − γ`.
pub fn tested_matrix(map: &LinearMapSpec, property: ConeProperty) -> Result<ComplexMatrix> {
    match property {
        ConeProperty::CoCp => compose_transpose(map).hermitian_choi(),
        _ => map.hermitian_choi(),
    }
}

/// Recomputes `⟨v, M v⟩` for the evidence vector from scratch; `M` as in [`tested_matrix`].
///
/// For k-positivity evidence the vector's Schmidt rank is checked too.
pub fn reverify_evidence(
    map: &LinearMapSpec,
    property: ConeProperty,
    evidence: &Evidence,
) -> Result<f64> {
    let m = tested_matrix(map, property)?;
    let v = evidence.vector();
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "evidence vector of length {} for a {}-dimensional space",
            v.len(),
            m.rows()
        )));
    }
    if let ConeProperty::KPositive(k) = property {
        let d = map.dims();
        let rank = schmidt_rank(v, d.dim_in, d.dim_out, 1e-10)?;
        if rank > k {
            return Err(Error::BadK {
                k,
                reason: format!("evidence vector has Schmidt rank {rank}"),
            });
        }
    }
    let nv = norm(v);
    Ok(m.quadratic_form(v) / (nv * nv))
}

fn spectral_verdict(property: ConeProperty, m: &ComplexMatrix, tol: f64) -> Result<ConeVerdict> {
    let spec = eigh(m)?;
    let min = spec.min();
    let status = if min >= -tol {
        Status::Holds
    } else {
        Status::Fails
    };
    Ok(ConeVerdict {
        property,
        status,
        evidence: Evidence::Spectral {
            min_eigenvalue: min,
            vector: if spec.dim() > 0 {
                spec.vector(0)
            } else {
                Vec::new()
            },
        },
        tolerance: tol,
    })
}

/// Completely positive iff the Choi matrix is PSD.
pub fn check_cp(map: &LinearMapSpec, tol: f64) -> Result<ConeVerdict> {
    spectral_verdict(ConeProperty::Cp, &map.hermitian_choi()?, tol)
}

/// Completely copositive iff `τ∘t` is completely positive.
pub fn check_ccp(map: &LinearMapSpec, tol: f64) -> Result<ConeVerdict> {
    let mut v = check_cp(&compose_transpose(map), tol)?;
    v.property = ConeProperty::CoCp;
    Ok(v)
}

/// `α` dominates `γ` iff `Choi(α) − Choi(γ)` is PSD.
pub fn check_dominates(
    alpha: &LinearMapSpec,
    gamma: &LinearMapSpec,
    tol: f64,
) -> Result<ConeVerdict> {
    let diff = alpha.sub(gamma)?;
    spectral_verdict(ConeProperty::Dominates, &diff.hermitian_choi()?, tol)
}

/// Budget and seeding for the multistart see-saw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeeSawConfig {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// A value below `-tol` refutes k-positivity.
    pub tol: f64,
    /// Worker threads for the starts; results do not depend on it.
    pub threads: usize,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            iterations: 500,
            seed: 0,
            tol: SEARCH_TOL,
            threads: 1,
        }
    }
}

/// Result of one see-saw start. `history[0]` is the starting value and the
/// sequence is non-increasing.
#[derive(Debug, Clone)]
pub struct SeeSawRun {
    pub vector: Vec<Complex64>,
    pub value: f64,
    pub history: Vec<f64>,
}

/// Refutes k-positivity by minimizing `⟨v, C v⟩` over unit vectors of Schmidt rank ≤ k.
///
/// Completely positive maps are reported HOLDS for every k. For
/// `k = min(m, n)` the problem is the smallest Choi eigenvalue, which is
/// decisive in both directions. Otherwise the outcome is FAILS with a
/// violating vector, or UNDECIDED with the best value found.
pub fn refute_k_positivity(
    map: &LinearMapSpec,
    k: usize,
    config: &SeeSawConfig,
) -> Result<ConeVerdict> {
    let d = map.dims();
    let (m, n) = (d.dim_in, d.dim_out);
    if k == 0 || k > m.min(n) {
        return Err(Error::BadK {
            k,
            reason: format!("must satisfy 1 ≤ k ≤ min({m}, {n})"),
        });
    }
    let choi = map.hermitian_choi()?;
    let cp = spectral_verdict(ConeProperty::Cp, &choi, SPECTRAL_TOL)?;
    if cp.holds() || k == m.min(n) {
        return Ok(ConeVerdict {
            property: ConeProperty::KPositive(k),
            ..cp
        });
    }

    let best = multistart_see_saw(&choi, m, n, k, config);
    let status = if best.value < -config.tol {
        Status::Fails
    } else {
        Status::Undecided
    };
    Ok(ConeVerdict {
        property: ConeProperty::KPositive(k),
        status,
        evidence: Evidence::Search {
            value: best.value,
            vector: best.vector,
            starts: config.starts,
        },
        tolerance: config.tol,
    })
}

/// Runs every start and keeps the lowest value, ties broken by start index.
pub fn multistart_see_saw(
    choi: &ComplexMatrix,
    m: usize,
    n: usize,
    k: usize,
    config: &SeeSawConfig,
) -> SeeSawRun {
    let run = |s: usize| {
        let mut rng = rng_stream(config.seed, s as u64);
        see_saw(choi, m, n, k, &mut rng, config.iterations)
    };
    let runs: Vec<SeeSawRun> = if config.threads > 1 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
        {
            Ok(pool) => pool.install(|| (0..config.starts).into_par_iter().map(run).collect()),
            Err(_) => (0..config.starts).map(run).collect(),
        }
    } else {
        (0..config.starts).map(run).collect()
    };
    runs.into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .unwrap_or_else(|| SeeSawRun {
            vector: Vec::new(),
            value: f64::INFINITY,
            history: Vec::new(),
        })
}

/// One start of the rank-constrained descent.
///
/// Each iteration minimizes the Rayleigh quotient exactly on the great circle
/// through `v` and its projected gradient, truncates the result to Schmidt
/// rank `k` and renormalizes. The step is shortened until the truncated point
/// improves; if none does, the start has converged.
pub fn see_saw(
    choi: &ComplexMatrix,
    m: usize,
    n: usize,
    k: usize,
    rng: &mut SeededRng,
    iterations: usize,
) -> SeeSawRun {
    let mut v = truncate_schmidt(&random_vector(m * n, rng), m, n, k);
    let mut cv = choi.matvec(&v);
    let mut f = dot(&v, &cv).re;
    let mut history = vec![f];

    for _ in 0..iterations {
        let mut g: Vec<Complex64> = cv.iter().zip(&v).map(|(c, x)| c - x * f).collect();
        let gn = norm(&g);
        if gn <= 1e-14 * f.abs().max(1.0) {
            break;
        }
        g.iter_mut().for_each(|z| *z /= gn);
        let h = choi.quadratic_form(&g);
        let half_gap = 0.5 * (f - h);
        let theta_opt = 0.5 * (-gn).atan2(-half_gap);

        let mut accepted = None;
        let mut theta = theta_opt;
        for _ in 0..30 {
            let (s, c) = theta.sin_cos();
            let w: Vec<Complex64> = v.iter().zip(&g).map(|(x, y)| x * c + y * s).collect();
            let w = truncate_schmidt(&w, m, n, k);
            let cw = choi.matvec(&w);
            let fw = dot(&w, &cw).re;
            if fw < f {
                accepted = Some((w, cw, fw));
                break;
            }
            theta *= 0.5;
        }
        let Some((w, cw, fw)) = accepted else { break };
        let improvement = f - fw;
        v = w;
        cv = cw;
        f = fw;
        history.push(f);
        if improvement <= 1e-15 * f.abs().max(1.0) {
            break;
        }
    }
    SeeSawRun {
        vector: v,
        value: f,
        history,
    }
}

/// Coefficient matrix `V[i][a] = v[i·n + a]` of a vector in `C^m ⊗ C^n`.
fn coefficient_matrix(v: &[Complex64], m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, n, |i, a| v[i * n + a])
}

/// Nearest vector of Schmidt rank ≤ k (singular values via `eigh` of the
/// smaller Gram matrix), normalized.
pub fn truncate_schmidt(v: &[Complex64], m: usize, n: usize, k: usize) -> Vec<Complex64> {
    let normalize = |w: Vec<Complex64>| {
        let nw = norm(&w);
        w.into_iter().map(|z| z / nw).collect::<Vec<_>>()
    };
    if k >= m.min(n) {
        return normalize(v.to_vec());
    }
    let c = coefficient_matrix(v, m, n);
    let truncated = if m <= n {
        let gram = c.matmul(&c.adjoint());
        let spec = eigh(&gram).expect("Gram matrix is Hermitian");
        let top = ComplexMatrix::from_fn(m, k, |r, j| spec.vectors[(r, m - 1 - j)]);
        top.matmul(&top.adjoint_mul(&c))
    } else {
        let gram = c.adjoint_mul(&c);
        let spec = eigh(&gram).expect("Gram matrix is Hermitian");
        let top = ComplexMatrix::from_fn(n, k, |r, j| spec.vectors[(r, n - 1 - j)]);
        c.matmul(&top).matmul(&top.adjoint())
    };
    normalize(truncated.into_vec())
}

/// Squared Schmidt coefficients in descending order.
pub fn schmidt_coefficients(v: &[Complex64], m: usize, n: usize) -> Result<Vec<f64>> {
    if v.len() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} is not {m}x{n}",
            v.len()
        )));
    }
    let c = coefficient_matrix(v, m, n);
    let gram = if m <= n {
        c.matmul(&c.adjoint())
    } else {
        c.adjoint_mul(&c)
    };
    let mut vals = eigh(&gram)?.values;
    vals.reverse();
    Ok(vals)
}

/// Number of squared Schmidt coefficients above `rel_cut` times the largest.
pub fn schmidt_rank(v: &[Complex64], m: usize, n: usize, rel_cut: f64) -> Result<usize> {
    let vals = schmidt_coefficients(v, m, n)?;
    let top = vals.first().copied().unwrap_or(0.0);
    Ok(vals.iter().filter(|&&x| x > rel_cut * top).count())
}
