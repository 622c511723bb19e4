//! Small dense matrices over a coefficient field.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Real};

/// Condition estimate above which [`Matrix::inverse`] refuses to invert.
pub const MAX_CONDITION: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Complex matrix over a real scalar.
pub type ComplexMatrix<T> = Matrix<Complex<T>>;

impl<S: Coeff> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = acc + a.clone() * b.clone();
                }
                acc
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Coeff> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: Self) -> Matrix<S> {
        self.matmul(rhs)
    }
}

struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut s = T::zero();
            for i in 0..self.rows {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    fn lu(&self) -> Result<Lu<T>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu: a, perm, sign })
    }

    fn lu_solve(lu: &Lu<T>, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = lu.lu.rows;
        let mut x: Vec<Complex<T>> = lu.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = lu.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = lu.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] = x[i] / lu.lu[(i, i)];
        }
        x
    }

    /// Solve `self * x = b` by partial-pivot elimination.
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let lu = self.lu()?;
        Ok(Self::lu_solve(&lu, b))
    }

    pub fn det(&self) -> Complex<T> {
        match self.lu() {
            Ok(lu) => {
                let mut d = Complex::new(lu.sign, T::zero());
                for i in 0..self.rows {
                    d = d * lu.lu[(i, i)];
                }
                d
            }
            Err(_) => Complex::zero(),
        }
    }

    /// Inverse together with the 1-norm condition estimate.
    ///
    /// Fails with [`Error::IllConditioned`] when the estimate exceeds
    /// [`MAX_CONDITION`].
    pub fn inverse_with_condition(&self) -> Result<(Self, f64)> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex::zero());
            e[j] = Complex::one();
            let col = Self::lu_solve(&lu, &e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        let cond = (self.norm1() * inv.norm1()).to_f64_lossy();
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::IllConditioned { estimate: cond });
        }
        Ok((inv, cond))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_condition().map(|(m, _)| m)
    }

    /// Cholesky factor `L` with `self = L L*`, if the matrix is positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d <= T::zero() || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(l)
    }
}
