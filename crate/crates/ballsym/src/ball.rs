//! Closed-form geometry of the unit ball: Bergman kernel and metric, the
//! involutions `T_z`, their differentials and the orthonormal frame matrix `A`.
//!
//! Matrices of holomorphic differentials are stored as `m[(i, j)] = ∂F_i/∂w_j`.
//! At `z = 0` the projection `P_z` is taken to be zero, so `T_0(w) = -w`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// A point of the open unit ball in `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    coords: Vec<Complex<T>>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Result<Self> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        let norm_sq = norm_sq(&coords);
        if norm_sq >= T::one() {
            return Err(Error::OutsideBall { norm_sq: norm_sq.to_f64_lossy() });
        }
        Ok(Point { coords })
    }

    pub fn origin(n: usize) -> Self {
        Point { coords: vec![Complex::zero(); n] }
    }

    /// Convenience constructor from `(re, im)` pairs.
    pub fn from_f64(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex::new(T::lit(re), T::lit(im))).collect())
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> T {
        norm_sq(&self.coords)
    }

    pub fn into_coords(self) -> Vec<Complex<T>> {
        self.coords
    }

    /// Largest coordinate difference.
    pub fn max_diff(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }
}

/// A pair `(z, w)` of ball points; the diagonal is `z = w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPair<T> {
    pub z: Point<T>,
    pub w: Point<T>,
}

impl<T: Real> BallPair<T> {
    pub fn new(z: Point<T>, w: Point<T>) -> Result<Self> {
        if z.dim() != w.dim() {
            return Err(Error::DimensionMismatch { expected: z.dim(), found: w.dim() });
        }
        Ok(BallPair { z, w })
    }
}

/// Hermitian matrix, used for the Bergman metric.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    entries: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(entries: ComplexMatrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.rows(), found: entries.cols() });
        }
        let scale = entries.max_abs().max(1.0);
        let asym = entries.max_diff(&entries.adjoint());
        if asym > Self::SYMMETRY_TOL * scale {
            return Err(Error::Internal(format!("matrix not Hermitian (defect {asym:e})")));
        }
        Ok(HermitianMatrix { entries })
    }

    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.cholesky().is_some()
    }
}

/// `Σ_j a_j conj(b_j)`, written `a·b̄`.
pub fn hdot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x * y.conj())
}

/// `Σ_j a_j b_j`.
pub fn bdot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr())
}

/// `s_z = sqrt(1 - |z|^2)`.
pub fn s_z<T: Real>(z: &Point<T>) -> T {
    (T::one() - z.norm_sq()).sqrt()
}

/// `K(z, w) = (1 - z·w̄)^{-(n+1)}`.
pub fn bergman_kernel<T: Real>(z: &Point<T>, w: &Point<T>) -> Complex<T> {
    let n = z.dim() as i32;
    (Complex::<T>::one() - hdot(z.coords(), w.coords())).powi(-(n + 1))
}

/// Bergman metric `B(z)`, row index differentiated in `z̄`, column in `z`.
pub fn bergman_metric<T: Real>(z: &Point<T>) -> HermitianMatrix<T> {
    let n = z.dim();
    let r = z.norm_sq();
    let one_r = T::one() - r;
    let denom = one_r * one_r;
    let c = z.coords();
    let m = ComplexMatrix::from_fn(n, n, |a, b| {
        let diag = if a == b { Complex::new(one_r, T::zero()) } else { Complex::zero() };
        (diag + c[a] * c[b].conj()) / denom
    });
    HermitianMatrix { entries: m }
}

/// Orthogonal projection onto the line through `z` (zero at the origin).
pub fn projection_p<T: Real>(z: &Point<T>) -> ComplexMatrix<T> {
    let n = z.dim();
    let r = z.norm_sq();
    if r == T::zero() {
        return ComplexMatrix::zeros(n, n);
    }
    let c = z.coords();
    ComplexMatrix::from_fn(n, n, |a, b| c[a] * c[b].conj() / r)
}

/// `Q_z = I - P_z`.
pub fn projection_q<T: Real>(z: &Point<T>) -> ComplexMatrix<T> {
    ComplexMatrix::identity(z.dim()).sub(&projection_p(z))
}

/// Raw coordinates of `T_z(w)`.
pub fn t_map_coords<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Vec<Complex<T>> {
    let r = norm_sq(z);
    let s = (T::one() - r).sqrt();
    let u = hdot(w, z);
    let d = Complex::<T>::one() - u;
    // P_z w + s Q_z w = s w + (w·z̄) z / (1 + s)
    let k = u / (T::one() + s);
    z.iter().zip(w).map(|(&zi, &wi)| (zi - wi * s - zi * k) / d).collect()
}

/// The involution `T_z` swapping `0` and `z`.
pub fn t_map<T: Real>(z: &Point<T>, w: &Point<T>) -> Point<T> {
    Point { coords: t_map_coords(z.coords(), w.coords()) }
}

/// `δ(z, w) = (1-|z|^2)(1-|w|^2)/|1 - z·w̄|^2`.
pub fn delta<T: Real>(z: &Point<T>, w: &Point<T>) -> T {
    let num = (T::one() - z.norm_sq()) * (T::one() - w.norm_sq());
    num / (Complex::<T>::one() - hdot(z.coords(), w.coords())).norm_sqr()
}

/// Holomorphic Jacobian of `w ↦ T_z(w)` at `at`, from the quotient rule.
pub fn t_diff<T: Real>(z: &Point<T>, at: &Point<T>) -> ComplexMatrix<T> {
    let n = z.dim();
    let s = s_z(z);
    let p = projection_p(z);
    let d = Complex::<T>::one() - hdot(at.coords(), z.coords());
    let t = t_map_coords(z.coords(), at.coords());
    let zc = z.coords();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        let l = p[(i, j)] + Complex::new(id, T::zero()) * s - p[(i, j)] * s;
        (t[i] * zc[j].conj() - l) / d
    })
}

/// `dT_z(0) = -(1-|z|^2) P_z - s_z Q_z`.
pub fn t_diff_origin_closed<T: Real>(z: &Point<T>) -> ComplexMatrix<T> {
    let r = z.norm_sq();
    let s = s_z(z);
    let p = projection_p(z).scale(&Complex::new(-(T::one() - r), T::zero()));
    let q = projection_q(z).scale(&Complex::new(-s, T::zero()));
    p.add(&q)
}

/// `dT_z(z) = -P_z/(1-|z|^2) - Q_z/s_z`.
pub fn t_diff_self_closed<T: Real>(z: &Point<T>) -> ComplexMatrix<T> {
    let r = z.norm_sq();
    let s = s_z(z);
    let p = projection_p(z).scale(&Complex::new(-T::one() / (T::one() - r), T::zero()));
    let q = projection_q(z).scale(&Complex::new(-T::one() / s, T::zero()));
    p.add(&q)
}

/// Frame matrix `A = dT_z(z)`, so that `e = A dz` is orthonormal.
pub fn frame_a<T: Real>(z: &Point<T>) -> ComplexMatrix<T> {
    t_diff_self_closed(z)
}

/// `A^{-1}` via guarded elimination.
pub fn frame_a_inv<T: Real>(z: &Point<T>) -> Result<ComplexMatrix<T>> {
    frame_a(z).inverse()
}

/// `m[(j, k)] = ∂(T_z w)_k / ∂z̄_j`, exact.
pub fn dt_dzbar<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> ComplexMatrix<T> {
    let n = z.len();
    let r = norm_sq(z);
    let s = (T::one() - r).sqrt();
    let u = hdot(w, z);
    let d = Complex::<T>::one() - u;
    let t = t_map_coords(z, w);
    let two = T::lit(2.0);
    let inv1s = T::one() / (T::one() + s);
    let ds_coef = T::one() / (two * s * (T::one() + s) * (T::one() + s));
    ComplexMatrix::from_fn(n, n, |j, k| {
        let dn = w[k] * z[j] / (two * s) - z[k] * w[j] * inv1s - u * z[k] * z[j] * ds_coef;
        (dn + t[k] * w[j]) / d
    })
}

/// `m[(j, k)] = ∂(T_z w)_k / ∂z_j`, exact.
pub fn dt_dz<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> ComplexMatrix<T> {
    let n = z.len();
    let r = norm_sq(z);
    let s = (T::one() - r).sqrt();
    let u = hdot(w, z);
    let d = Complex::<T>::one() - u;
    let two = T::lit(2.0);
    let inv1s = T::one() / (T::one() + s);
    let ds_coef = T::one() / (two * s * (T::one() + s) * (T::one() + s));
    ComplexMatrix::from_fn(n, n, |j, k| {
        let e = if j == k { Complex::<T>::one() } else { Complex::zero() };
        let dn = e + w[k] * z[j].conj() / (two * s) - e * u * inv1s - u * z[k] * z[j].conj() * ds_coef;
        dn / d
    })
}

/// `h[k][j][α] = ∂²(T_z w)_k / ∂w_j ∂w_α` at `w = z`.
pub fn t_hessian_at_self<T: Real>(z: &Point<T>) -> Vec<Vec<Vec<Complex<T>>>> {
    let n = z.dim();
    let a = frame_a(z);
    let one_r = T::one() - z.norm_sq();
    let c = z.coords();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| (0..n).map(|al| (a[(k, al)] * c[j].conj() + a[(k, j)] * c[al].conj()) / one_r).collect())
                .collect()
        })
        .collect()
}

/// Real Jacobian determinant of a holomorphic map with complex Jacobian `m`.
pub fn real_jacobian<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.det().norm_sqr()
}
