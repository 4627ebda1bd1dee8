//! Sequential measurement on finite-dimensional von Neumann algebras.
//!
//! The crate models algebras as direct sums of full complex matrix blocks
//! and builds, on top of a dense Hermitian spectral toolkit:
//!
//! * effects `0 ≤ p ≤ 1` and the sequential product `p ∗ q = √p·q·√p`
//!   ([`effects`]);
//! * completely positive contractive maps in Kraus form, Choi matrices, and
//!   the classical operator inequalities attached to them ([`process`]);
//! * compressions and corners of an effect together with their universal
//!   (final/initial) factorization properties ([`universal`]);
//! * an axiom verification engine for candidate sequential products, with
//!   the counterexample families separating the axioms ([`axioms`]);
//! * seeded instance generators ([`sample`]), JSON wire formats ([`json`])
//!   and named verification suites ([`suite`]) shared by the test surface
//!   and the `seqprod` CLI.
//!
//! All numeric policy lives in [`tol::Tolerances`]; every routine is
//! deterministic for a fixed input and seed.

pub mod axioms;
pub mod effects;
pub mod json;
pub mod linalg;
pub mod process;
pub mod sample;
pub mod suite;
pub mod tol;
pub mod universal;

pub use num_complex::Complex64;

pub use axioms::{AxiomReport, AxiomStatus, Candidate};
pub use effects::{Algebra, Effect, Projection};
pub use linalg::{CMatrix, EigenDecomposition, LinalgError};
pub use process::{BlockLinearMap, Process};
pub use suite::{RunConfig, Suite, SuiteReport};
pub use tol::Tolerances;
pub use universal::{CornerEmbedding, FactorizationResult, LimitFactorization};
