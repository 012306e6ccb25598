//! Dense complex linear algebra.

pub mod eigh;
mod matrix;
pub mod random;
pub mod tensor;

pub use eigh::{eigh, eigvalsh, min_eigenvalue, psd_project, Spectrum};
pub(crate) use matrix::check_cap;
pub use matrix::{
    basis, dimension_cap, dot, norm, set_dimension_cap, ComplexMatrix, DEFAULT_DIMENSION_CAP, I,
    ONE, ZERO,
};
pub use tensor::{kron, partial_trace, partial_transpose, tensor_permute, Factor};
