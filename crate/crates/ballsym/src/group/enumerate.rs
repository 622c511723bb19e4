use std::collections::HashMap;

use super::element::GroupElement;
use crate::ball::Point;
use crate::error::{Error, Result};
use crate::sampling::Sampler;
use crate::scalar::Real;

/// Seed of the probe points used for deduplication.
pub const PROBE_SEED: u64 = 0xB411;
/// Default tolerance for two elements to count as the same map.
pub const DEDUP_TOL: f64 = 1e-9;

/// Reduced-word enumeration of the group generated by `generators`.
#[derive(Clone, Debug)]
pub struct WordEnumerator<T> {
    pub generators: Vec<GroupElement<T>>,
    pub max_len: usize,
    pub dedup_tol: f64,
}

/// A group element with the word that produced it.
///
/// Letters are `+(g+1)` for generator `g` and `-(g+1)` for its inverse.
#[derive(Clone, Debug)]
pub struct EnumeratedElement<T> {
    pub element: GroupElement<T>,
    pub word: Vec<i32>,
}

impl<T> EnumeratedElement<T> {
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

/// The four fixed probe points.
pub fn probe_points<T: Real>(n: usize) -> Vec<Point<T>> {
    let mut s = Sampler::new(PROBE_SEED);
    (0..4).map(|_| s.point(n, 0.9)).collect()
}

impl<T: Real> WordEnumerator<T> {
    pub fn new(generators: Vec<GroupElement<T>>, max_len: usize) -> Self {
        WordEnumerator { generators, max_len, dedup_tol: DEDUP_TOL }
    }

    /// All reduced words up to `max_len`, breadth first in generator order,
    /// keeping the first word for each distinct action on the probe set.
    pub fn enumerate(&self) -> Result<Vec<EnumeratedElement<T>>> {
        let n = match self.generators.first() {
            Some(g) => g.dim(),
            None => return Err(Error::InvalidConfig("no generators".into())),
        };
        for g in &self.generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
            }
            let residual = g.form_residual();
            if !(residual <= super::element::FORM_TOL) {
                return Err(Error::NotFormPreserving { residual });
            }
        }
        let probes = probe_points::<T>(n);
        let mut letters: Vec<(i32, GroupElement<T>)> = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            letters.push((k as i32 + 1, g.clone()));
            letters.push((-(k as i32 + 1), g.inverse()));
        }
        let cell = (self.dedup_tol * 1e3).max(1e-12);
        let mut seen: HashMap<i64, Vec<usize>> = HashMap::new();
        let mut images: Vec<Vec<Point<T>>> = Vec::new();
        let mut out: Vec<EnumeratedElement<T>> = Vec::new();

        let key = |img: &[Point<T>]| (img[0].coords()[0].re.to_f64_lossy() / cell).floor() as i64;
        let mut try_insert = |el: EnumeratedElement<T>, out: &mut Vec<EnumeratedElement<T>>| -> bool {
            let img: Vec<Point<T>> = probes.iter().map(|p| el.element.act(p)).collect();
            let k = key(&img);
            for kk in [k - 1, k, k + 1] {
                if let Some(list) = seen.get(&kk) {
                    for &idx in list {
                        let dist = images[idx]
                            .iter()
                            .zip(&img)
                            .map(|(a, b)| a.max_diff(b).to_f64_lossy())
                            .fold(0.0, f64::max);
                        if dist <= self.dedup_tol {
                            return false;
                        }
                    }
                }
            }
            seen.entry(k).or_default().push(images.len());
            images.push(img);
            out.push(el);
            true
        };

        try_insert(EnumeratedElement { element: GroupElement::identity(n), word: Vec::new() }, &mut out);
        let mut frontier: Vec<usize> = vec![0];
        for _ in 0..self.max_len {
            let mut next = Vec::new();
            for &idx in &frontier {
                let (word, base) = (out[idx].word.clone(), out[idx].element.clone());
                for (letter, g) in &letters {
                    if word.last() == Some(&-letter) {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(*letter);
                    let el = EnumeratedElement { element: base.compose(g), word: w };
                    if try_insert(el, &mut out) {
                        next.push(out.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cyclic() -> GroupElement<f64> {
        GroupElement::from_ab(c(2.0 / 3f64.sqrt(), 0.0), c(1.0 / 3f64.sqrt(), 0.0)).unwrap()
    }

    #[test]
    fn cyclic_words() {
        let e = WordEnumerator::new(vec![cyclic()], 3).enumerate().unwrap();
        assert_eq!(e.len(), 7);
        let words: Vec<Vec<i32>> = e.iter().map(|x| x.word.clone()).collect();
        assert_eq!(words, vec![vec![], vec![1], vec![-1], vec![1, 1], vec![-1, -1], vec![1, 1, 1], vec![-1, -1, -1]]);
        assert_eq!(WordEnumerator::new(vec![cyclic()], 0).enumerate().unwrap().len(), 1);
    }

    #[test]
    fn free_group_counts() {
        // two hyperbolic elements with disjoint axes
        let g1 = cyclic();
        let g2 = GroupElement::from_ab(c(2.0 / 3f64.sqrt(), 0.0), c(0.0, 1.0 / 3f64.sqrt())).unwrap();
        let e = WordEnumerator::new(vec![g1, g2], 2).enumerate().unwrap();
        assert_eq!(e.len(), 17);
    }

    #[test]
    fn torsion_is_deduplicated() {
        // rotation by 2π/5 has order 5
        let rot = GroupElement::from_ab(Complex::from_polar(1.0, std::f64::consts::PI / 5.0), c(0.0, 0.0)).unwrap();
        let e = WordEnumerator::new(vec![rot], 6).enumerate().unwrap();
        assert_eq!(e.len(), 5);
    }
}
