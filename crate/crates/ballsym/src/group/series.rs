use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use super::element::GroupElement;
use super::enumerate::EnumeratedElement;
use crate::ball::{BallPair, Point};
use crate::jets::HoloFunction;
use crate::scalar::Real;

/// Per-element weight in the series `Σ_γ w(γ) Σ_j (γ_j z - γ_j w)^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesWeight {
    /// `w(γ) = (1 - |γ^{-1}(0)|^2)^{N/2}`.
    OrbitDecay,
    /// `w(γ) = 1`; the sum is exactly invariant under reindexing.
    Unit,
}

/// Truncated series value with its tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<T> {
    pub value: Complex<T>,
    pub tail: T,
}

/// Below this many elements the series is summed on the calling thread.
const PAR_THRESHOLD: usize = 256;

/// Sum by recursive halving; fixed tree shape for a given length.
pub fn pairwise_sum<T: Real>(xs: &[Complex<T>]) -> Complex<T> {
    match xs.len() {
        0 => Complex::zero(),
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn pairwise_sum_real<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum_real(a) + pairwise_sum_real(b)
        }
    }
}

/// Truncated Poincare series over an enumerated set of group elements.
#[derive(Clone, Debug)]
pub struct PoincareSeries<T> {
    elements: Vec<GroupElement<T>>,
    lengths: Vec<usize>,
    weights: Vec<T>,
    n: usize,
    power: u32,
    weight: SeriesWeight,
    max_len: usize,
}

impl<T: Real> PoincareSeries<T> {
    pub fn new(elements: &[EnumeratedElement<T>], power: u32, weight: SeriesWeight) -> Self {
        let n = elements.first().map_or(1, |e| e.element.dim());
        let weights = elements
            .iter()
            .map(|e| match weight {
                SeriesWeight::Unit => T::one(),
                SeriesWeight::OrbitDecay => {
                    let a = e.element.preimage_of_origin();
                    (T::one() - a.norm_sq()).powf(T::lit(f64::from(power) / 2.0))
                }
            })
            .collect();
        PoincareSeries {
            elements: elements.iter().map(|e| e.element.clone()).collect(),
            lengths: elements.iter().map(EnumeratedElement::length).collect(),
            weights,
            n,
            power,
            weight,
            max_len: elements.iter().map(EnumeratedElement::length).max().unwrap_or(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn weight(&self) -> SeriesWeight {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Threshold warnings: convergence needs `N ≥ n+1`, the symmetric
    /// differential conclusion uses `N ≥ n+2`.
    pub fn threshold_warnings(&self) -> Vec<String> {
        let n = self.n as u32;
        let mut w = Vec::new();
        if self.power < n + 1 {
            w.push(format!("N = {} is below the convergence threshold n+1 = {}", self.power, n + 1));
        }
        if self.power < n + 2 {
            w.push(format!("N = {} is below the symmetric-differential threshold n+2 = {}", self.power, n + 2));
        }
        w
    }

    fn term(&self, k: usize, z: &[Complex<T>], w: &[Complex<T>]) -> (Complex<T>, T) {
        let g = &self.elements[k];
        let gz = g.act_coords(z);
        let gw = g.act_coords(w);
        let mut s = Complex::zero();
        let mut mag = T::zero();
        for (a, b) in gz.iter().zip(&gw) {
            let d = (a - b).powu(self.power);
            mag += d.norm();
            s += d;
        }
        (s * self.weights[k], mag * self.weights[k])
    }

    fn terms(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Vec<(Complex<T>, T)> {
        if self.elements.len() >= PAR_THRESHOLD {
            (0..self.elements.len()).into_par_iter().map(|k| self.term(k, z, w)).collect()
        } else {
            (0..self.elements.len()).map(|k| self.term(k, z, w)).collect()
        }
    }

    /// Series value at raw coordinates, without the tail.
    pub fn value(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        let t: Vec<Complex<T>> = self.terms(z, w).into_iter().map(|x| x.0).collect();
        pairwise_sum(&t)
    }

    /// Series value and tail estimate.
    ///
    /// For [`SeriesWeight::OrbitDecay`] the tail is `Σ_{last shell} n 2^N w(γ)`,
    /// from `|γ_j z - γ_j w| ≤ 2`. For [`SeriesWeight::Unit`] it is the
    /// observed magnitude `Σ_{last shell} Σ_j |γ_j z - γ_j w|^N`. Both include
    /// a floating-point rounding bound for the summation.
    pub fn eval_with_tail(&self, z: &Point<T>, w: &Point<T>) -> SeriesValue<T> {
        let terms = self.terms(z.coords(), w.coords());
        let vals: Vec<Complex<T>> = terms.iter().map(|x| x.0).collect();
        let shell: Vec<T> = terms
            .iter()
            .enumerate()
            .filter(|(k, _)| self.lengths[*k] == self.max_len)
            .map(|(k, x)| match self.weight {
                SeriesWeight::OrbitDecay => {
                    T::lit(self.n as f64) * T::lit(2f64.powi(self.power as i32)) * self.weights[k]
                }
                SeriesWeight::Unit => x.1,
            })
            .collect();
        // pairwise summation error is at most eps·depth·Σ|term|
        let mags: Vec<T> = terms.iter().map(|x| x.1).collect();
        let depth = T::lit((usize::BITS - terms.len().leading_zeros()) as f64 + 1.0);
        let rounding = T::epsilon() * depth * pairwise_sum_real(&mags);
        SeriesValue { value: pairwise_sum(&vals), tail: pairwise_sum_real(&shell) + rounding }
    }

    /// Tail estimate maximized over a set of pairs.
    pub fn max_tail(&self, pairs: &[BallPair<T>]) -> T {
        pairs.iter().map(|p| self.eval_with_tail(&p.z, &p.w).tail).fold(T::zero(), T::max)
    }
}

impl<T: Real> HoloFunction<T> for PoincareSeries<T> {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        self.value(z, w)
    }
    fn label(&self) -> String {
        let wt = match self.weight {
            SeriesWeight::OrbitDecay => "orbit-decay",
            SeriesWeight::Unit => "unit",
        };
        format!("poincare(N={}, {} elements, max_len={}, weight={wt})", self.power, self.len(), self.max_len)
    }
}

/// `Σ_γ (1 - |γ^{-1}(0)|^2)^{N/2} Σ_j (γ_j z - γ_j w)^N` over `elements`.
pub fn poincare_series_f<T: Real>(
    elements: &[EnumeratedElement<T>],
    power: u32,
    z: &Point<T>,
    w: &Point<T>,
) -> (SeriesValue<T>, Vec<String>) {
    let s = PoincareSeries::new(elements, power, SeriesWeight::OrbitDecay);
    let warnings = s.threshold_warnings();
    for msg in &warnings {
        log::warn!("{msg}");
    }
    (s.eval_with_tail(z, w), warnings)
}

/// Truncated `Σ_γ |J_C γ(z)|^2` and its per-length shell sums.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicSeries<T> {
    pub total: T,
    pub shells: Vec<T>,
}

pub fn classic_poincare_series<T: Real>(elements: &[EnumeratedElement<T>], z: &Point<T>) -> ClassicSeries<T> {
    let max_len = elements.iter().map(EnumeratedElement::length).max().unwrap_or(0);
    let mut per_shell: Vec<Vec<T>> = vec![Vec::new(); max_len + 1];
    for e in elements {
        per_shell[e.length()].push(e.element.complex_jacobian(z).norm_sqr());
    }
    let shells: Vec<T> = per_shell.iter().map(|v| pairwise_sum_real(v)).collect();
    ClassicSeries { total: pairwise_sum_real(&shells), shells }
}

/// `rhs - lhs` of `(1-|γ^{-1}0|^2)|γz-γw|^2 ≤ |Jγ(z)|^{2/(n+1)} |Jγ(w)|^{2/(n+1)} |z-w|^2`.
pub fn jacobian_inequality_residual<T: Real>(g: &GroupElement<T>, z: &Point<T>, w: &Point<T>) -> T {
    let n = g.dim();
    let a = g.preimage_of_origin();
    let gz = g.act(z);
    let gw = g.act(w);
    let lhs = (T::one() - a.norm_sq()) * crate::ball::norm_sq(&diff(gz.coords(), gw.coords()));
    let e = T::lit(2.0 / (n as f64 + 1.0));
    let rhs = g.complex_jacobian(z).norm().powf(e)
        * g.complex_jacobian(w).norm().powf(e)
        * crate::ball::norm_sq(&diff(z.coords(), w.coords()));
    rhs - lhs
}

fn diff<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `max |f(γz, γw) - f(z, w)|` over the sample pairs.
pub fn invariance_residual<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    g: &GroupElement<T>,
    samples: &[BallPair<T>],
) -> T {
    samples
        .iter()
        .map(|p| {
            let a = f.eval(g.act(&p.z).coords(), g.act(&p.w).coords());
            let b = f.eval(p.z.coords(), p.w.coords());
            (a - b).norm()
        })
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::super::enumerate::WordEnumerator;
    use super::*;
    use crate::jets::FnHolo;
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cyclic() -> GroupElement<f64> {
        GroupElement::from_ab(c(2.0 / 3f64.sqrt(), 0.0), c(1.0 / 3f64.sqrt(), 0.0)).unwrap()
    }

    fn pairs(seed: u64, n: usize, k: usize) -> Vec<BallPair<f64>> {
        let mut s = Sampler::new(seed);
        (0..k).map(|_| BallPair::new(s.point(n, 0.9), s.point(n, 0.9)).unwrap()).collect()
    }

    #[test]
    fn trivial_group_is_single_term() {
        let id = WordEnumerator::new(vec![GroupElement::identity(1)], 0).enumerate().unwrap();
        let z = Point::<f64>::from_f64(&[(0.3, 0.1)]).unwrap();
        let w = Point::<f64>::from_f64(&[(-0.2, 0.4)]).unwrap();
        let (v, warn) = poincare_series_f(&id, 3, &z, &w);
        assert_eq!(v.value, (z.coords()[0] - w.coords()[0]).powu(3));
        assert_eq!(warn.len(), 0);
        let (v, _) = poincare_series_f(&id, 3, &z, &z);
        assert_eq!(v.value, c(0.0, 0.0));
        let s = PoincareSeries::new(&id, 3, SeriesWeight::OrbitDecay);
        assert_eq!(invariance_residual(&s, &GroupElement::identity(1), &pairs(1, 1, 10)), 0.0);
    }

    #[test]
    fn truncations_agree_within_tail() {
        let e12 = WordEnumerator::new(vec![cyclic()], 12).enumerate().unwrap();
        let e14 = WordEnumerator::new(vec![cyclic()], 14).enumerate().unwrap();
        for p in pairs(2, 1, 10) {
            for weight in [SeriesWeight::OrbitDecay, SeriesWeight::Unit] {
                let a = PoincareSeries::new(&e12, 4, weight).eval_with_tail(&p.z, &p.w);
                let b = PoincareSeries::new(&e14, 4, weight).eval_with_tail(&p.z, &p.w);
                assert!((a.value - b.value).norm() <= a.tail, "{weight:?} {} {:?}", (a.value - b.value).norm(), a.tail);
            }
        }
    }

    #[test]
    fn threshold_warnings() {
        let e = WordEnumerator::new(vec![cyclic()], 2).enumerate().unwrap();
        assert_eq!(PoincareSeries::new(&e, 2, SeriesWeight::Unit).threshold_warnings().len(), 1);
        assert_eq!(PoincareSeries::new(&e, 1, SeriesWeight::Unit).threshold_warnings().len(), 2);
        assert!(PoincareSeries::new(&e, 3, SeriesWeight::Unit).threshold_warnings().is_empty());
    }

    #[test]
    fn classic_series_is_cauchy() {
        let z = Point::<f64>::from_f64(&[(0.1, -0.2)]).unwrap();
        let mut prev = 0.0;
        for len in [4, 8, 12, 20] {
            let e = WordEnumerator::new(vec![cyclic()], len).enumerate().unwrap();
            let s = classic_poincare_series(&e, &z);
            assert!(s.total > prev);
            prev = s.total;
            if len == 20 {
                assert!(s.shells[20] < 1e-8);
            }
        }
        let id = WordEnumerator::new(vec![GroupElement::identity(1)], 0).enumerate().unwrap();
        assert_eq!(classic_poincare_series(&id, &z).total, 1.0);
        let e = WordEnumerator::new(vec![cyclic()], 10).enumerate().unwrap();
        let at_image = classic_poincare_series(&e, &cyclic().act(&Point::origin(1))).total;
        assert!(at_image.is_finite());
    }

    #[test]
    fn unit_weight_series_is_invariant() {
        let e = WordEnumerator::new(vec![cyclic()], 20).enumerate().unwrap();
        let s = PoincareSeries::new(&e, 4, SeriesWeight::Unit);
        let ps = pairs(4, 1, 10);
        assert!(invariance_residual(&s, &cyclic(), &ps) < 1e-8);
    }

    #[test]
    fn orbit_decay_weight_breaks_invariance() {
        let e = WordEnumerator::new(vec![cyclic()], 20).enumerate().unwrap();
        let s = PoincareSeries::new(&e, 4, SeriesWeight::OrbitDecay);
        let ps = pairs(4, 1, 10);
        let tail = s.max_tail(&ps);
        assert!(invariance_residual(&s, &cyclic(), &ps) > 1e3 * tail);
    }

    #[test]
    fn non_invariant_negative_control() {
        let f = FnHolo { label: "z1".into(), f: |z: &[Complex<f64>], _: &[Complex<f64>]| z[0] };
        assert!(invariance_residual(&f, &cyclic(), &pairs(5, 1, 10)) > 0.01);
    }

    #[test]
    fn jacobian_inequality_in_one_dimension() {
        let mut s = Sampler::new(6);
        for _ in 0..2000 {
            let g = GroupElement::<f64>::random(&mut s, 1, 3.0);
            let z: Point<f64> = s.point(1, 0.9);
            let w: Point<f64> = s.point(1, 0.9);
            assert!(jacobian_inequality_residual(&g, &z, &w) >= -1e-10);
        }
        let z = Point::<f64>::from_f64(&[(0.2, 0.1), (0.0, 0.3)]).unwrap();
        let w = Point::<f64>::from_f64(&[(-0.4, 0.0), (0.1, 0.1)]).unwrap();
        assert!(jacobian_inequality_residual(&GroupElement::identity(2), &z, &w).abs() < 1e-15);
        let g = GroupElement::<f64>::random(&mut s, 2, 1.0);
        assert!(jacobian_inequality_residual(&g, &z, &z) >= 0.0);
    }

    #[test]
    fn jacobian_inequality_fails_in_two_dimensions() {
        // γ⁻¹(0) = (1/2, 0), z = (-1/2, 1/2), w = (-1/2, -1/2): rhs - lhs = -81/625
        let g = GroupElement::translation_to(&Point::<f64>::from_f64(&[(-0.5, 0.0), (0.0, 0.0)]).unwrap()).unwrap();
        assert!(g.preimage_of_origin().max_diff(&Point::from_f64(&[(0.5, 0.0), (0.0, 0.0)]).unwrap()) < 1e-15);
        let z = Point::<f64>::from_f64(&[(-0.5, 0.0), (0.5, 0.0)]).unwrap();
        let w = Point::<f64>::from_f64(&[(-0.5, 0.0), (-0.5, 0.0)]).unwrap();
        assert!((jacobian_inequality_residual(&g, &z, &w) + 81.0 / 625.0).abs() < 1e-12);
    }

    #[test]
    fn summation_is_deterministic() {
        let g1 = cyclic();
        let g2 = GroupElement::from_ab(c(2.0 / 3f64.sqrt(), 0.0), c(0.0, 1.0 / 3f64.sqrt())).unwrap();
        let e = WordEnumerator::new(vec![g1, g2], 5).enumerate().unwrap();
        assert!(e.len() > PAR_THRESHOLD);
        let s = PoincareSeries::new(&e, 4, SeriesWeight::OrbitDecay);
        let p = &pairs(7, 1, 1)[0];
        let a = s.eval_with_tail(&p.z, &p.w);
        for _ in 0..5 {
            assert_eq!(s.eval_with_tail(&p.z, &p.w), a);
        }
    }
}
