//! Exact scalar analysis of the norm ladder. Weight constants and monomial
//! moments feed the assembly check; the ladder feeds the Raabe and Gauss
//! diagnostics and the ∂̄ tail bound.

mod assembly;
mod ladder;
mod weights;

pub use assembly::{monte_carlo_moment, moment_assembly_check, AssemblyCheck};
pub use ladder::{
    a_ratio, a_seq, a_seq_by_ratio, a_seq_prefactor, dbar_tail_bound, ladder_coeff_norms, ladder_csv, ladder_step,
    ladder_table, norm_ladder, norm_ladder_by_recursion, raabe_diag, tail_log_slope, weighted_norm_assemble,
    LadderParams, LadderRow, RaabeDiagnostics,
};
pub use weights::{
    c_alpha, monomial_moment, pochhammer, pochhammer_f64, rat, rat_int, rat_to_f64, Alpha, PiMultiple, Rational, Value,
};
