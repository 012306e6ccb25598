//! Linear maps `M_m → M_n` in Choi, Kraus or superoperator form.
//!
//! Conventions, fixed for the whole crate:
//!
//! * Choi matrix `C(τ) = Σ_ij e_ij ⊗ τ(e_ij)`, input index on the left
//!   factor, unnormalized. Entry `(i·n + a, j·n + b)` is `τ(e_ij)[a, b]`.
//! * Kraus form `τ(X) = Σ_l K_l X K_l†` with `K_l` of size `n x m`.
//! * Superoperator `S` of size `n² x m²` acting on column-stacked vectors:
//!   `vec(X)[j·m + i] = X[i, j]`.

mod zoo;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_cap, eigh, partial_transpose, tensor_permute, ComplexMatrix, Factor, ZERO,
};

pub use zoo::{zoo, ZooMap};

/// Relative eigenvalue cut below which Choi eigenvectors are discarded as Kraus operators.
pub const KRAUS_RANK_CUT: f64 = 1e-10;
/// A Choi matrix with an eigenvalue below `-NOT_PSD_TOLERANCE` is not treated as CP.
pub const NOT_PSD_TOLERANCE: f64 = 1e-9;

/// Input and output sizes of a map `M_m → M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MapDims {
    pub dim_in: usize,
    pub dim_out: usize,
}

impl MapDims {
    pub fn new(dim_in: usize, dim_out: usize) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::BadParams(format!(
                "map dimensions must be positive, got {dim_in} -> {dim_out}"
            )));
        }
        Ok(Self { dim_in, dim_out })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Side length of the Choi matrix, `m·n`.
    pub fn choi_size(&self) -> usize {
        self.dim_in * self.dim_out
    }

    pub fn tensor(&self, other: &MapDims) -> MapDims {
        MapDims {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Choi(ComplexMatrix),
    Kraus(Vec<ComplexMatrix>),
    Super(ComplexMatrix),
}

/// A linear map between full matrix algebras.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapSpec {
    dims: MapDims,
    repr: Representation,
}

impl LinearMapSpec {
    pub fn from_choi(dims: MapDims, choi: ComplexMatrix) -> Result<Self> {
        let s = dims.choi_size();
        if choi.shape() != (s, s) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for {}->{} must be {s}x{s}, got {}x{}",
                dims.dim_in,
                dims.dim_out,
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self {
            dims,
            repr: Representation::Choi(choi),
        })
    }

    pub fn from_kraus(dims: MapDims, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        for (l, k) in kraus.iter().enumerate() {
            if k.shape() != (dims.dim_out, dims.dim_in) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {l} must be {}x{}, got {}x{}",
                    dims.dim_out,
                    dims.dim_in,
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Self {
            dims,
            repr: Representation::Kraus(kraus),
        })
    }

    pub fn from_super(dims: MapDims, sup: ComplexMatrix) -> Result<Self> {
        let (r, c) = (dims.dim_out * dims.dim_out, dims.dim_in * dims.dim_in);
        if sup.shape() != (r, c) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator must be {r}x{c}, got {}x{}",
                sup.rows(),
                sup.cols()
            )));
        }
        Ok(Self {
            dims,
            repr: Representation::Super(sup),
        })
    }

    /// Builds the Choi representation from the images of the matrix units.
    pub fn from_fn(dims: MapDims, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let (m, n) = (dims.dim_in, dims.dim_out);
        let mut choi = ComplexMatrix::zeros(m * n, m * n);
        for i in 0..m {
            for j in 0..m {
                let img = f(&ComplexMatrix::unit(m, i, j));
                assert_eq!(img.shape(), (n, n), "from_fn: image has wrong shape");
                for a in 0..n {
                    for b in 0..n {
                        choi[(i * n + a, j * n + b)] = img[(a, b)];
                    }
                }
            }
        }
        Self {
            dims,
            repr: Representation::Choi(choi),
        }
    }

    /// The zero map.
    pub fn zero(dims: MapDims) -> Self {
        let s = dims.choi_size();
        Self {
            dims,
            repr: Representation::Choi(ComplexMatrix::zeros(s, s)),
        }
    }

    pub fn dims(&self) -> MapDims {
        self.dims
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn to_choi(&self) -> ComplexMatrix {
        let (m, n) = (self.dims.dim_in, self.dims.dim_out);
        match &self.repr {
            Representation::Choi(c) => c.clone(),
            Representation::Kraus(ks) => {
                let mut c = ComplexMatrix::zeros(m * n, m * n);
                for k in ks {
                    let kappa = kraus_to_vector(k);
                    for r in 0..m * n {
                        if kappa[r] == ZERO {
                            continue;
                        }
                        for s in 0..m * n {
                            c[(r, s)] += kappa[r] * kappa[s].conj();
                        }
                    }
                }
                c
            }
            Representation::Super(s) => ComplexMatrix::from_fn(m * n, m * n, |r, c| {
                let (i, a, j, b) = (r / n, r % n, c / n, c % n);
                s[(b * n + a, j * m + i)]
            }),
        }
    }

    pub fn to_super(&self) -> ComplexMatrix {
        if let Representation::Super(s) = &self.repr {
            return s.clone();
        }
        let (m, n) = (self.dims.dim_in, self.dims.dim_out);
        let c = self.to_choi();
        ComplexMatrix::from_fn(n * n, m * m, |r, col| {
            let (b, a, j, i) = (r / n, r % n, col / m, col % m);
            c[(i * n + a, j * n + b)]
        })
    }

    /// Same map, Choi representation.
    pub fn as_choi_spec(&self) -> Self {
        Self {
            dims: self.dims,
            repr: Representation::Choi(self.to_choi()),
        }
    }

    /// `τ(X)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (m, n) = (self.dims.dim_in, self.dims.dim_out);
        if x.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "input must be {m}x{m}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(match &self.repr {
            Representation::Choi(c) => {
                // Σ_ij X_ij τ(e_ij) = Tr₁(C·(Xᵀ ⊗ I_n))
                let mut out = ComplexMatrix::zeros(n, n);
                for i in 0..m {
                    for j in 0..m {
                        let xij = x[(i, j)];
                        if xij == ZERO {
                            continue;
                        }
                        for a in 0..n {
                            for b in 0..n {
                                out[(a, b)] += xij * c[(i * n + a, j * n + b)];
                            }
                        }
                    }
                }
                out
            }
            Representation::Kraus(ks) => {
                let mut out = ComplexMatrix::zeros(n, n);
                for k in ks {
                    out += &k.matmul(x).matmul(&k.adjoint());
                }
                out
            }
            Representation::Super(s) => {
                let vx: Vec<Complex64> = (0..m * m).map(|t| x[(t % m, t / m)]).collect();
                let vy = s.matvec(&vx);
                ComplexMatrix::from_fn(n, n, |a, b| vy[b * n + a])
            }
        })
    }

    /// `τ(1)`.
    pub fn apply_to_unit(&self) -> ComplexMatrix {
        self.apply(&ComplexMatrix::identity(self.dims.dim_in))
            .expect("identity has the input shape")
    }

    /// `c·τ`. Kraus form is kept for `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Representation::Kraus(ks) if c >= 0.0 => {
                Representation::Kraus(ks.iter().map(|k| k.scale(c.sqrt())).collect())
            }
            Representation::Super(s) => Representation::Super(s.scale(c)),
            _ => Representation::Choi(self.to_choi().scale(c)),
        };
        Self {
            dims: self.dims,
            repr,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Self::from_choi(self.dims, &self.to_choi() + &other.to_choi())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Self::from_choi(self.dims, &self.to_choi() - &other.to_choi())
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "maps {}->{} and {}->{}",
                self.dims.dim_in, self.dims.dim_out, other.dims.dim_in, other.dims.dim_out
            )));
        }
        Ok(())
    }

    /// Hermiticity-preserving check on the Choi matrix, returning it symmetrized.
    pub fn hermitian_choi(&self) -> Result<ComplexMatrix> {
        let c = self.to_choi();
        c.symmetrized().map_err(|e| match e {
            Error::NotHermitian { defect, .. } => Error::NotHermitianChoi { defect },
            other => other,
        })
    }
}

/// `κ = Σ_p e_p ⊗ K e_p`, so that the Choi matrix of `X ↦ K X K†` is `|κ⟩⟨κ|`.
pub(crate) fn kraus_to_vector(k: &ComplexMatrix) -> Vec<Complex64> {
    let (n, m) = k.shape();
    let mut v = vec![ZERO; m * n];
    for p in 0..m {
        for a in 0..n {
            v[p * n + a] = k[(a, p)];
        }
    }
    v
}

pub(crate) fn vector_to_kraus(v: &[Complex64], dims: MapDims) -> ComplexMatrix {
    let (m, n) = (dims.dim_in, dims.dim_out);
    ComplexMatrix::from_fn(n, m, |a, p| v[p * n + a])
}

pub fn to_choi(map: &LinearMapSpec) -> ComplexMatrix {
    map.to_choi()
}

pub fn apply_map(map: &LinearMapSpec, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    map.apply(x)
}

/// Kraus operators from the scaled eigenvectors of a PSD Choi matrix.
///
/// Eigenvalues below `KRAUS_RANK_CUT` times the largest are dropped, so the
/// number of operators is the numerical rank of `choi`.
pub fn choi_to_kraus(choi: &ComplexMatrix, dims: MapDims) -> Result<Vec<ComplexMatrix>> {
    let s = dims.choi_size();
    if choi.shape() != (s, s) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix must be {s}x{s}, got {}x{}",
            choi.rows(),
            choi.cols()
        )));
    }
    let spec = eigh(choi)?;
    if spec.min() < -NOT_PSD_TOLERANCE {
        return Err(Error::NotPsd {
            min_eigenvalue: spec.min(),
        });
    }
    let top = spec.max();
    if top <= 0.0 {
        return Ok(Vec::new());
    }
    let cut = KRAUS_RANK_CUT * top;
    Ok((0..spec.dim())
        .rev()
        .filter(|&i| spec.values[i] > cut)
        .map(|i| {
            let scale = spec.values[i].sqrt();
            let v: Vec<Complex64> = spec.vector(i).into_iter().map(|z| z * scale).collect();
            vector_to_kraus(&v, dims)
        })
        .collect())
}

/// Kraus form of a CP map; errors with `NotPsd` when the Choi matrix is not PSD.
pub fn to_kraus_spec(map: &LinearMapSpec) -> Result<LinearMapSpec> {
    if let Representation::Kraus(_) = map.representation() {
        return Ok(map.clone());
    }
    let ks = choi_to_kraus(&map.to_choi(), map.dims())?;
    LinearMapSpec::from_kraus(map.dims(), ks)
}

/// `a ⊗ b : M_{m_a m_b} → M_{n_a n_b}`.
///
/// Choi factor order of the result is `(in_a, in_b, out_a, out_b)`; it is
/// obtained from `C_a ⊗ C_b`, ordered `(in_a, out_a, in_b, out_b)`, by a slot permutation.
pub fn tensor_maps(a: &LinearMapSpec, b: &LinearMapSpec) -> Result<LinearMapSpec> {
    let dims = a.dims().tensor(&b.dims());
    check_cap(dims.choi_size())?;
    if let (Representation::Kraus(ka), Representation::Kraus(kb)) =
        (a.representation(), b.representation())
    {
        let mut ks = Vec::with_capacity(ka.len() * kb.len());
        for x in ka {
            for y in kb {
                ks.push(crate::linalg::kron(x, y)?);
            }
        }
        return LinearMapSpec::from_kraus(dims, ks);
    }
    let (da, db) = (a.dims(), b.dims());
    let joint = crate::linalg::kron(&a.to_choi(), &b.to_choi())?;
    let choi = tensor_permute(
        &joint,
        &[da.dim_in, da.dim_out, db.dim_in, db.dim_out],
        &[0, 2, 1, 3],
    )?;
    LinearMapSpec::from_choi(dims, choi)
}

/// `τ ↦ τ∘t`: the Choi matrix is partially transposed on the input factor.
///
/// `τ` is completely copositive exactly when `τ∘t` is completely positive.
pub fn compose_transpose(map: &LinearMapSpec) -> LinearMapSpec {
    let d = map.dims();
    let choi = partial_transpose(&map.to_choi(), (d.dim_in, d.dim_out), Factor::First)
        .expect("Choi matrix has the bipartite shape by construction");
    LinearMapSpec {
        dims: d,
        repr: Representation::Choi(choi),
    }
}

/// `Σ_ij e_ji ⊗ e_ij` on `C^k ⊗ C^k`.
pub fn swap_matrix(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k * k, k * k, |r, c| {
        let (i, a, j, b) = (r / k, r % k, c / k, c % k);
        if i == b && a == j {
            crate::linalg::ONE
        } else {
            ZERO
        }
    })
}
