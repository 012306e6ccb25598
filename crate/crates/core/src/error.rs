use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants are grouped by the layer that raises them, but they share one
/// enum so that results can be threaded through the pipeline with `?`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // dense linear algebra
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {allowed:.3e}")]
    NotHermitian { defect: f64, allowed: f64 },
    #[error(
        "Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("dimension {requested} exceeds the configured cap {cap}")]
    DimensionOverflow { requested: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    // maps
    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("unknown map name '{0}'")]
    UnknownName(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("Choi matrix is not Hermitian: defect {defect:.3e}")]
    NotHermitianChoi { defect: f64 },

    // cones / pipeline
    #[error("bad Schmidt-rank bound k = {k}: {reason}")]
    BadK { k: usize, reason: String },
    #[error("the map sends the unit to zero")]
    ZeroMap,

    // dilations
    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCp { min_eigenvalue: f64 },
    #[error("commutant element outside [0, I]: eigenvalues in [{min:.3e}, {max:.3e}]")]
    BadZ { min: f64, max: f64 },
    #[error("no commutant solution: relative residual {residual:.3e}")]
    NoSolution { residual: f64 },

    // factorization
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("reconstruction failed: error {error:.3e} exceeds {tol:.3e}")]
    ReconstructionFailed { error: f64, tol: f64 },
    #[error("map does not factor through the second tensor slot: {0}")]
    NotAFactor(String),
    #[error("second map is not pure: Choi eigenvalue ratio {ratio:.3e}")]
    NotPure { ratio: f64 },
    #[error("map is not dominated: min eigenvalue of the Choi difference {min_eigenvalue:.3e}")]
    NotDominated { min_eigenvalue: f64 },
}
