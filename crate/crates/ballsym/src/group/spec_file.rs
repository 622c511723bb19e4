//! JSON description of a finitely generated group.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "generators": [{ "a": [1.1547005383792515, 0.0], "b": [0.5773502691896258, 0.0] }],
//!   "max_len": 12,
//!   "dedup_tol": 1e-9
//! }
//! ```
//!
//! A generator is one of `{"a", "b"}` (n = 1 only), `{"rows"}` with an
//! `(n+1)×(n+1)` matrix of `[re, im]` entries, or `{"translate"}` with a
//! point `p`, meaning the boost sending 0 to `p`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::element::GroupElement;
use super::enumerate::{WordEnumerator, DEDUP_TOL};
use crate::ball::Point;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Mobius { a: [f64; 2], b: [f64; 2] },
    Matrix { rows: Vec<Vec<[f64; 2]>> },
    Translate { translate: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub dimension: usize,
    pub generators: Vec<GeneratorSpec>,
    pub max_len: usize,
    #[serde(default = "default_dedup_tol")]
    pub dedup_tol: f64,
}

fn default_dedup_tol() -> f64 {
    DEDUP_TOL
}

fn cx<T: Real>(p: [f64; 2]) -> Complex<T> {
    Complex::new(T::lit(p[0]), T::lit(p[1]))
}

impl GeneratorSpec {
    pub fn build<T: Real>(&self, n: usize) -> Result<GroupElement<T>> {
        let g = match self {
            GeneratorSpec::Mobius { a, b } => {
                if n != 1 {
                    return Err(Error::InvalidConfig(format!("(a, b) generators need dimension 1, got {n}")));
                }
                GroupElement::from_ab(cx(*a), cx(*b))?
            }
            GeneratorSpec::Matrix { rows } => {
                let rows = rows.iter().map(|r| r.iter().map(|&e| cx(e)).collect()).collect();
                GroupElement::from_matrix(Matrix::from_rows(rows)?)?
            }
            GeneratorSpec::Translate { translate } => {
                GroupElement::translation_to(&Point::new(translate.iter().map(|&e| cx(e)).collect())?)?
            }
        };
        if g.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
        }
        Ok(g)
    }
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("group spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group spec serializes")
    }

    /// Validated generators and enumeration bounds.
    pub fn enumerator<T: Real>(&self) -> Result<WordEnumerator<T>> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if !(self.dedup_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("dedup_tol must be positive, got {}", self.dedup_tol)));
        }
        let generators = self.generators.iter().map(|g| g.build(self.dimension)).collect::<Result<Vec<_>>>()?;
        if generators.is_empty() {
            return Err(Error::InvalidConfig("no generators".into()));
        }
        Ok(WordEnumerator { generators, max_len: self.max_len, dedup_tol: self.dedup_tol })
    }

    /// Cyclic group of the boost sending 0 to `a` on the real axis.
    pub fn cyclic(a: f64, max_len: usize) -> Self {
        let s = 1.0 / (1.0 - a * a).sqrt();
        GroupSpec {
            dimension: 1,
            generators: vec![GeneratorSpec::Mobius { a: [s, 0.0], b: [a * s, 0.0] }],
            max_len,
            dedup_tol: DEDUP_TOL,
        }
    }

    pub fn trivial(n: usize) -> Self {
        let rows = (0..=n).map(|i| (0..=n).map(|j| [if i == j { 1.0 } else { 0.0 }, 0.0]).collect()).collect();
        GroupSpec { dimension: n, generators: vec![GeneratorSpec::Matrix { rows }], max_len: 0, dedup_tol: DEDUP_TOL }
    }
}
