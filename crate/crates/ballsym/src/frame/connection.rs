use num_complex::Complex;
use serde::Serialize;

use super::wirtinger::{wirtinger_vec, Kind, WirtingerConfig};
use crate::ball::{frame_a, frame_a_inv, Point};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// `Γ_l^{jμ}`, stored as `gamma[l][j][μ]`, so that `X̄_j e_l = Σ_μ Γ_l^{jμ} e_μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionTensor<T> {
    pub gamma: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> ConnectionTensor<T> {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, l: usize, j: usize, mu: usize) -> Complex<T> {
        self.gamma[l][j][mu]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().flatten().flatten().map(|c| c.norm().to_f64_lossy()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .zip(other.gamma.iter().flatten().flatten())
            .map(|(a, b)| (a - b).norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }
}

/// Wirtinger derivatives of the frame matrix, `out[k] = ∂A/∂z_k` or `∂A/∂z̄_k`.
pub fn frame_a_derivatives<T: Real>(z: &Point<T>, kind: Kind, cfg: &WirtingerConfig) -> Result<Vec<ComplexMatrix<T>>> {
    let n = z.dim();
    let entries = |x: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
        let a = frame_a(&Point::new(x.to_vec())?);
        Ok((0..n * n).map(|i| a[(i / n, i % n)]).collect())
    };
    (0..n)
        .map(|k| {
            let d = wirtinger_vec(entries, z.coords(), k, kind, cfg)?;
            Ok(ComplexMatrix::from_fn(n, n, |r, c| d[r * n + c]))
        })
        .collect()
}

/// `Γ_l^{jμ} = Σ_{k,s} conj(A^{kj}) ∂A_{ls}/∂z̄_k A^{sμ}` with finite-difference
/// z̄-derivatives of `A`.
pub fn connection_gamma<T: Real>(z: &Point<T>, cfg: &WirtingerConfig) -> Result<ConnectionTensor<T>> {
    let n = z.dim();
    let inv = frame_a_inv(z)?;
    let da = frame_a_derivatives(z, Kind::Anti, cfg)?;
    // m[k] = ∂A/∂z̄_k · A^{-1}
    let m: Vec<ComplexMatrix<T>> = da.iter().map(|d| d.matmul(&inv)).collect();
    let gamma = (0..n)
        .map(|l| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|mu| (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + inv[(k, j)].conj() * m[k][(l, mu)]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(ConnectionTensor { gamma })
}

/// One-dimensional closed form: `A = -1/(1-|z|^2)` gives `Γ = -z`.
pub fn connection_gamma_1d<T: Real>(z: &Point<T>) -> Result<ConnectionTensor<T>> {
    if z.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: z.dim() });
    }
    Ok(ConnectionTensor { gamma: vec![vec![vec![-z.coords()[0]]]] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn vanishes_at_origin() {
        for n in 1..=3 {
            let g = connection_gamma(&Point::<f64>::origin(n), &WirtingerConfig::default()).unwrap();
            assert!(g.max_abs() < 1e-7, "n = {n}");
        }
    }

    #[test]
    fn one_dimensional_value() {
        let z = Point::<f64>::from_f64(&[(0.5, 0.0)]).unwrap();
        let g = connection_gamma(&z, &WirtingerConfig::default()).unwrap();
        assert!((g.get(0, 0, 0) - Complex::new(-0.5, 0.0)).norm() < 1e-8);
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let z: Point<f64> = s.point(1, 0.9);
            let fd = connection_gamma(&z, &WirtingerConfig::new(1e-4, 4).unwrap()).unwrap();
            assert!(fd.max_diff(&connection_gamma_1d(&z).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn frame_derivative_relation() {
        // X̄_j e_l, with e_l = Σ_s A_{ls} dz_s, equals Σ_μ Γ_l^{jμ} e_μ
        let cfg = WirtingerConfig::default();
        let mut s = Sampler::new(4);
        for n in 2..=3 {
            for _ in 0..5 {
                let z: Point<f64> = s.point(n, 0.9);
                let a = frame_a(&z);
                let inv = frame_a_inv(&z).unwrap();
                let da = frame_a_derivatives(&z, Kind::Anti, &cfg).unwrap();
                let g = connection_gamma(&z, &cfg).unwrap();
                for l in 0..n {
                    for j in 0..n {
                        for col in 0..n {
                            let lhs: Complex<f64> = (0..n).map(|k| inv[(k, j)].conj() * da[k][(l, col)]).sum();
                            let rhs: Complex<f64> = (0..n).map(|mu| g.get(l, j, mu) * a[(mu, col)]).sum();
                            assert!((lhs - rhs).norm() < 1e-6);
                        }
                    }
                }
            }
        }
    }
}
