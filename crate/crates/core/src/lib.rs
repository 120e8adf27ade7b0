//! Analysis of sparse polynomial systems whose equations share only their
//! constant terms.
//!
//! The crate is organised the way the analysis flows:
//!
//! - [`sparse_system`]: Laurent polynomial systems, their JSON format, the
//!   per-equation decomposition `x^{w_{i,0}} = p_i(x^{w_{i,1}}, ...)` and
//!   binomial elimination.
//! - [`lattice`]: exact integer linear algebra (Hermite and Smith normal
//!   forms) for relation lattices and lattice indices.
//! - [`gale`]: the Gale dual system, its normalised master-function form,
//!   sign-variant systems and chamber labels.
//! - [`bounds`]: every solution-count bound, with certified enclosures of
//!   `e^2` and `e^4` for the exact inequality checks.
//! - [`jacobian`]: exact blocked polynomials and the multidegree checks for
//!   Jacobian numerators and minors of master functions.
//! - [`solver`]: a subdivision real root counter used as an oracle.
//! - [`samples`]: seeded random instances used by the test suites and CLI.

pub mod bounds;
pub mod error;
pub mod gale;
pub mod interval;
pub mod jacobian;
pub mod lattice;
pub mod samples;
pub mod solver;
pub mod sparse_system;

pub use error::{Error, Result};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
