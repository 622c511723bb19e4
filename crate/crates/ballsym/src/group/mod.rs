//! Automorphisms of the ball and reduced-word enumeration of finitely
//! generated groups. The Poincare series built over them lives in `series`.

mod element;
mod enumerate;
mod series;
mod spec_file;

pub use element::{GroupElement, FORM_TOL};
pub use enumerate::{probe_points, EnumeratedElement, WordEnumerator, DEDUP_TOL, PROBE_SEED};
pub use series::{
    classic_poincare_series, invariance_residual, jacobian_inequality_residual, pairwise_sum, poincare_series_f,
    ClassicSeries, PoincareSeries, SeriesValue, SeriesWeight,
};
pub use spec_file::{GeneratorSpec, GroupSpec};
