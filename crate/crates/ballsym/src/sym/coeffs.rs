use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::error::{Error, Result};
use crate::scalar::{Coeff, Real};

/// Which coframe the coefficients refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    /// Orthonormal frame `e = A dz`.
    #[serde(rename = "e")]
    E,
    /// Coordinate frame `dz`.
    #[serde(rename = "dz")]
    Dz,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::E => write!(f, "e"),
            Frame::Dz => write!(f, "dz"),
        }
    }
}

/// Section of `S^m T*` at a point: `Σ_{|I|=m} u_I e^I`.
///
/// Missing keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SymCoeffs<S> {
    n: usize,
    degree: usize,
    frame: Frame,
    coeff: BTreeMap<MultiIndex, S>,
}

impl<S: Coeff> SymCoeffs<S> {
    pub fn zero(n: usize, degree: usize, frame: Frame) -> Self {
        SymCoeffs { n, degree, frame, coeff: BTreeMap::new() }
    }

    pub fn from_entries(
        n: usize,
        degree: usize,
        frame: Frame,
        entries: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut out = Self::zero(n, degree, frame);
        for (i, v) in entries {
            out.insert(i, v)?;
        }
        Ok(out)
    }

    /// The basis element `e^I`.
    pub fn basis(index: MultiIndex, frame: Frame) -> Self {
        let mut out = Self::zero(index.dim(), index.degree(), frame);
        out.coeff.insert(index, S::one());
        out
    }

    pub fn insert(&mut self, index: MultiIndex, value: S) -> Result<()> {
        if index.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: index.dim() });
        }
        if index.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, index.degree()));
        }
        self.coeff.insert(index, value);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, index: MultiIndex, value: S) {
        debug_assert_eq!(index.degree(), self.degree);
        let slot = self.coeff.entry(index).or_insert_with(S::zero);
        *slot = slot.clone() + value;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn get(&self, index: &MultiIndex) -> S {
        self.coeff.get(index).cloned().unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeff.iter()
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        SymCoeffs {
            n: self.n,
            degree: self.degree,
            frame: self.frame,
            coeff: self.coeff.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(format!("{} vs {}", self.frame, other.frame)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeff {
            out.accumulate(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&(-S::one())))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeff.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.values().all(|v| *v == S::zero())
    }
}

/// Section of `S^m T* ⊗ Λ^{0,1}`: coefficients at `(I, μ)` of `e^I ⊗ ē_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymOneFormCoeffs<S> {
    n: usize,
    degree: usize,
    frame: Frame,
    coeff: BTreeMap<(MultiIndex, usize), S>,
}

impl<S: Coeff> SymOneFormCoeffs<S> {
    pub fn zero(n: usize, degree: usize, frame: Frame) -> Self {
        SymOneFormCoeffs { n, degree, frame, coeff: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn get(&self, index: &MultiIndex, mu: usize) -> S {
        self.coeff.get(&(index.clone(), mu)).cloned().unwrap_or_else(S::zero)
    }

    pub fn insert(&mut self, index: MultiIndex, mu: usize, value: S) -> Result<()> {
        if index.dim() != self.n || mu >= self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: index.dim().max(mu + 1) });
        }
        if index.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, index.degree()));
        }
        self.coeff.insert((index, mu), value);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, index: MultiIndex, mu: usize, value: S) {
        debug_assert_eq!(index.degree(), self.degree);
        let slot = self.coeff.entry((index, mu)).or_insert_with(S::zero);
        *slot = slot.clone() + value;
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &S)> {
        self.coeff.iter()
    }

    /// The `ē_μ` component as a symmetric tensor.
    pub fn slice(&self, mu: usize) -> SymCoeffs<S> {
        let mut out = SymCoeffs::zero(self.n, self.degree, self.frame);
        for ((i, m), v) in &self.coeff {
            if *m == mu {
                out.coeff.insert(i.clone(), v.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        SymOneFormCoeffs {
            n: self.n,
            degree: self.degree,
            frame: self.frame,
            coeff: self.coeff.iter().map(|(k, v)| (k.clone(), v.clone() * s.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(format!("{} vs {}", self.frame, other.frame)));
        }
        let mut out = self.clone();
        for ((i, mu), v) in &other.coeff {
            out.accumulate(i.clone(), *mu, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct SymCoeffsJson {
    dim: usize,
    degree: usize,
    frame: Frame,
    entries: Vec<(Vec<u32>, f64, f64)>,
}

impl<T: Real> Serialize for SymCoeffs<Complex<T>> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        SymCoeffsJson {
            dim: self.n,
            degree: self.degree,
            frame: self.frame,
            entries: self
                .coeff
                .iter()
                .map(|(i, v)| (i.entries().to_vec(), v.re.to_f64_lossy(), v.im.to_f64_lossy()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for SymCoeffs<Complex<T>> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SymCoeffsJson::deserialize(d)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|(i, re, im)| (MultiIndex::new(i), Complex::new(T::lit(re), T::lit(im))));
        SymCoeffs::from_entries(raw.dim, raw.degree, raw.frame, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_degree() {
        let mut u = SymCoeffs::<Complex<f64>>::zero(2, 2, Frame::E);
        assert!(u.insert(MultiIndex::new(vec![1, 0]), Complex::new(1.0, 0.0)).is_err());
        assert!(u.insert(MultiIndex::new(vec![1, 1, 0]), Complex::new(1.0, 0.0)).is_err());
        assert!(u.insert(MultiIndex::new(vec![1, 1]), Complex::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let u = SymCoeffs::from_entries(
            2,
            2,
            Frame::Dz,
            vec![
                (MultiIndex::new(vec![2, 0]), Complex::new(1.5, -0.25)),
                (MultiIndex::new(vec![0, 2]), Complex::new(0.0, 3.0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"{"dim":2,"degree":2,"frame":"dz","entries":[[[2,0],1.5,-0.25],[[0,2],0.0,3.0]]}"#);
        let back: SymCoeffs<Complex<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
    }
}
