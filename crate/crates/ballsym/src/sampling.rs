//! Seeded random sampling of ball points and unitary matrices.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ball::Point;
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// Default radius for random test points.
pub const SAMPLE_RADIUS: f64 = 0.9;

/// Deterministic sampler; the same seed gives the same stream.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent sub-stream, for per-sample parallel work.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        // Box-Muller
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform in the disc of radius `r`.
    pub fn disc(&mut self, r: f64) -> Complex<f64> {
        let rho = r * self.uniform().sqrt();
        let th = std::f64::consts::TAU * self.uniform();
        Complex::from_polar(rho, th)
    }

    /// Uniform in the polydisc of radius `max_radius`, rejected to `|z| <= max_radius`.
    pub fn point<T: Real>(&mut self, n: usize, max_radius: f64) -> Point<T> {
        loop {
            let c: Vec<Complex<f64>> = (0..n).map(|_| self.disc(max_radius)).collect();
            let r2: f64 = c.iter().map(|x| x.norm_sqr()).sum();
            if r2 <= max_radius * max_radius && r2 < 1.0 {
                let coords = c.into_iter().map(|x| Complex::new(T::lit(x.re), T::lit(x.im))).collect();
                if let Ok(p) = Point::new(coords) {
                    return p;
                }
            }
        }
    }

    /// Haar-like random unitary via Gram-Schmidt on a complex Gaussian matrix.
    pub fn unitary<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v: Vec<Complex<f64>> = (0..n).map(|_| Complex::new(self.normal(), self.normal())).collect();
            for u in &cols {
                let p = u.iter().zip(&v).fold(Complex::zero(), |a: Complex<f64>, (x, y)| a + x.conj() * y);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
            let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                cols.push(v.into_iter().map(|x| x / nrm).collect());
            }
        }
        ComplexMatrix::from_fn(n, n, |i, j| Complex::new(T::lit(cols[j][i].re), T::lit(cols[j][i].im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_respect_radius_and_seed() {
        let mut a = Sampler::new(42);
        let mut b = Sampler::new(42);
        for _ in 0..1000 {
            let p: Point<f64> = a.point(3, 0.9);
            let q: Point<f64> = b.point(3, 0.9);
            assert_eq!(p, q);
            assert!(p.norm_sq() <= 0.81);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut s = Sampler::new(1);
        for n in 1..5 {
            let u: ComplexMatrix<f64> = s.unitary(n);
            assert!(u.adjoint().matmul(&u).max_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }
}
