//! Numerical and exact machinery for holomorphic functions on products of the
//! unit ball and the symmetric differentials they induce on ball quotients.
//!
//! Modules:
//! - [`ball`]: Bergman kernel and metric, the involutions `T_z`, frame matrix `A`.
//! - [`frame`]: Wirtinger differences, connection coefficients, expansion tables
//!   and the identity catalog.
//! - [`sym`]: symmetric-power coefficient tables, raising and curvature operators.
//! - [`jets`]: diagonal jets and the map to symmetric differentials, with residual checks.
//! - [`group`]: ball automorphisms, word enumeration and Poincare series.
//! - [`analysis`]: exact rational norm ladders and convergence diagnostics.
//! - [`report`]: verification records shared by the test harness and the CLI.

pub mod analysis;
pub mod ball;
pub mod error;
pub mod frame;
pub mod group;
pub mod jets;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod sym;

pub use error::{Error, Result};
pub use scalar::{Coeff, Real};

pub type Point64 = ball::Point<f64>;
pub type Point32 = ball::Point<f32>;
pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type SymCoeffs64 = sym::SymCoeffs<num_complex::Complex64>;
pub type SymCoeffsQ = sym::SymCoeffs<num_rational::BigRational>;
pub type GroupElement64 = group::GroupElement<f64>;
pub type PoincareSeries64 = group::PoincareSeries<f64>;
