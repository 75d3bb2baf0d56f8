//! Exact symbolic computations with free commutative differential graded
//! algebras over ℚ: Sullivan models of biquotients and of quaternionic
//! projectivized bundles, change-of-variable reduction, truncated
//! cohomology, and quasi-isomorphism checks.

pub mod cdga;
pub mod cohomology;
pub mod constructors;
pub mod dsl;
pub mod error;
pub mod gradedalg;
pub mod linalg;
pub mod presets;
pub mod reduction;
pub mod verify;

pub use cdga::{
    cancel_acyclic_pair, change_of_variable, degree_violation, pure_check, tensor, CancellationCertificate, FreeCdga,
    Morphism, MorphismViolation, Violation,
};
pub use cohomology::{
    betti, betti_with, cup_product, is_quasi_iso, quotient_ring_dims, CohomologyOptions, CohomologyReport,
    QuasiIsoReport, RingPresentation,
};
pub use error::{Error, Result};
pub use gradedalg::{basis_of_degree, sort_with_sign, Generator, Monomial, Normalized, Polynomial, Scalar};
pub use reduction::{reduce, reduce_with, ReductionLog};
pub use verify::{verify_all, verify_case, CaseReport, Check, Status, VerifyOptions};
