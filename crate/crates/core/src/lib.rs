//! Linear maps between full matrix algebras `M_m → M_n`.
//!
//! The crate covers membership in the positivity cones (completely positive,
//! completely copositive, k-positive), decomposability with certificates that
//! re-verify independently of the solver, minimal Stinespring dilations with
//! the commutant parametrization of dominated maps, and the constructive
//! factorizations `β = γ ⊗ id` and `β = β₁ ⊗ α₂` for dominated maps.

pub mod cones;
pub mod decomp;
pub mod error;
pub mod factor;
pub mod linalg;
pub mod maps;
pub mod stinespring;

pub use cones::{ConeProperty, ConeVerdict, Evidence, SeeSawConfig, Status};
pub use decomp::{CertTolerances, CertificateKind, DecompCertificate, Outcome};
pub use error::{Error, Result};
pub use factor::FactorResult;
pub use linalg::{ComplexMatrix, Spectrum};
pub use maps::{LinearMapSpec, MapDims};
pub use stinespring::{CommutantElement, StinespringTriple};
