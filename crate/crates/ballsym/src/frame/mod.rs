//! Wirtinger finite differences, the connection coefficients of the
//! orthonormal frame, the B/C expansion tables and the identity catalog.

mod bc;
mod connection;
mod identities;
mod wirtinger;

pub use bc::{absum_check, absum_residual, b2_closed_form, bc_expand, BCTables, DEGREE_TOL};
pub use connection::{connection_gamma, connection_gamma_1d, frame_a_derivatives, ConnectionTensor};
pub use wirtinger::{wirtinger_d, wirtinger_vec, Kind, WirtingerConfig};
pub use identities::{
    ball_ids, catalog, frame_ids, identity_suite, lookup, IdentityOutcome, IdentitySpec, SuiteConfig, ToleranceClass,
};
