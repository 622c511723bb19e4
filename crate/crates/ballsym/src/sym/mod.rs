//! Symmetric powers of the cotangent space at a point: coefficient tables,
//! the weighted inner product, the raising operator `R_G`, the curvature
//! action and frame substitutions.

mod coeffs;
mod multi_index;
mod ops;

pub use coeffs::{Frame, SymCoeffs, SymOneFormCoeffs};
pub use multi_index::{count as index_count, factorial, MultiIndex};
pub use ops::{
    curvature_action, curvature_tensor, eigenvalue_e, eigenvalue_e_by_recursion, one_form_norm_sq, pushforward_sym,
    raising_rg, sym_inner,
};
