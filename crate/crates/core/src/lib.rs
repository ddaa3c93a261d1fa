//! Fractional integrals of orthogonal polynomials on `[0, 1]`.
//!
//! The crate computes the Riemann–Liouville integrals `I^α P_j(c)` of
//! polynomial families defined by a three-term recurrence, either through a
//! stable recurrence on the fractional integrals themselves or through the
//! classical canonical-basis expansion evaluated by a generalized Horner
//! scheme. The integrals drive a single-interval collocation solver for
//! scalar Caputo initial value problems.
//!
//! ```
//! use fracint::basis::RecurrenceBasis;
//! use fracint::frac_integrals::compute_psi_integrals;
//!
//! let legendre = RecurrenceBasis::legendre();
//! let values = compute_psi_integrals(&legendre, 1.0, 1.0, 1).unwrap();
//! assert!((values[0] - 1.0).abs() < 1e-15);
//! assert!(values[1].abs() < 1e-15);
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod expr;
pub mod frac_integrals;
pub mod oracle;
pub mod problems;
pub mod quadrature;
pub mod solver;

pub use basis::{BasisKind, RecurrenceBasis};
pub use error::{FracError, Result};
pub use frac_integrals::{compute_psi_integrals, IntegralBackend};
pub use quadrature::QuadratureRule;
pub use solver::{solve, FractionalIvp, QuasiPolynomialSolution, SolverConfig};
