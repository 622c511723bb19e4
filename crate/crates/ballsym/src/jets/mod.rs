//! Diagonal jets of holomorphic functions on `B^n × B^n` and the map from
//! a vanishing jet to a symmetric differential.

mod function;
mod jet;
mod psi;
mod residual;

pub use function::{
    cauchy_riemann_probe, parse_function_spec, Constant, CoordProduct, DiffPower, ExpDot, ExpTimesDiffPower, FnHolo,
    HoloFunction, LinearCombination, Swapped,
};
pub use jet::{diagonal_jet, torus_coefficients, w_taylor, JetConfig, JetTable};
pub use psi::{
    equivariance_residual, psi_at, psi_equivariance, psi_extract, psi_with_degree, vanishing_order, PsiResult,
    SymDifferentialSample,
};
pub use residual::{
    compatibility_residual, compatibility_residual_diagonal, dbar_phi_residual, max_compatibility_residual,
    residual_pair, ResidualConfig, ResidualPair,
};
