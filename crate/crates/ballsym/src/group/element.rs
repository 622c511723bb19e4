use num_complex::Complex;
use num_traits::{One, Zero};

use crate::ball::Point;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::sampling::Sampler;
use crate::scalar::Real;

/// Tolerance for `M* J M = J`, relative to `|M|^2`.
pub const FORM_TOL: f64 = 1e-10;

/// Automorphism of `B^n` given by an `(n+1)×(n+1)` matrix preserving
/// `J = diag(1, .., 1, -1)`, acting by `z ↦ (A z + b)/(c·z + d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    n: usize,
    m: ComplexMatrix<T>,
}

fn form<T: Real>(n: usize) -> ComplexMatrix<T> {
    let mut j = ComplexMatrix::identity(n + 1);
    j[(n, n)] = -Complex::<T>::one();
    j
}

impl<T: Real> GroupElement<T> {
    pub fn identity(n: usize) -> Self {
        GroupElement { n, m: ComplexMatrix::identity(n + 1) }
    }

    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() || m.rows() < 2 {
            return Err(Error::DimensionMismatch { expected: m.rows().max(2), found: m.cols() });
        }
        let g = GroupElement { n: m.rows() - 1, m };
        let residual = g.form_residual();
        if !(residual <= FORM_TOL) {
            return Err(Error::NotFormPreserving { residual });
        }
        Ok(g)
    }

    /// `z ↦ (a z + b)/(b̄ z + ā)` with `|a|^2 - |b|^2 = 1`.
    pub fn from_ab(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let m = ComplexMatrix::from_rows(vec![vec![a, b], vec![b.conj(), a.conj()]])?;
        Self::from_matrix(m)
    }

    /// Block-diagonal unitary `diag(U, 1)`.
    pub fn unitary(u: &ComplexMatrix<T>) -> Result<Self> {
        let n = u.rows();
        let m = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => u[(i, j)],
            (false, false) => Complex::one(),
            _ => Complex::zero(),
        });
        Self::from_matrix(m)
    }

    /// Hyperbolic rotation in the `(z_1, z_{n+1})` plane, sending `0` to `(tanh τ, 0, ..)`.
    pub fn boost(n: usize, tau: T) -> Self {
        let mut m = ComplexMatrix::identity(n + 1);
        let (ch, sh) = (tau.cosh(), tau.sinh());
        m[(0, 0)] = Complex::new(ch, T::zero());
        m[(n, n)] = Complex::new(ch, T::zero());
        m[(0, n)] = Complex::new(sh, T::zero());
        m[(n, 0)] = Complex::new(sh, T::zero());
        GroupElement { n, m }
    }

    /// The transvection sending `0` to `p`.
    pub fn translation_to(p: &Point<T>) -> Result<Self> {
        let n = p.dim();
        let r = p.norm_sq().sqrt();
        if r == T::zero() {
            return Ok(Self::identity(n));
        }
        let tau = r.atanh();
        // unitary with first column p/|p|
        let mut cols: Vec<Vec<Complex<T>>> = vec![p.coords().iter().map(|c| c / r).collect()];
        for k in 0..n {
            if cols.len() == n {
                break;
            }
            let mut v = vec![Complex::<T>::zero(); n];
            v[k] = Complex::<T>::one();
            for u in &cols {
                let pr = u.iter().zip(&v).fold(Complex::<T>::zero(), |a, (x, y)| a + x.conj() * y);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= pr * ui;
                }
            }
            let nrm = v.iter().fold(T::zero(), |a, x| a + x.norm_sqr()).sqrt();
            if nrm > T::lit(1e-6) {
                cols.push(v.into_iter().map(|x| x / nrm).collect());
            }
        }
        let u = ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
        let ug = Self::unitary(&u)?;
        Ok(ug.compose(&Self::boost(n, tau)).compose(&ug.inverse()))
    }

    /// `U1 · boost(τ) · U2` with random unitaries and `τ` uniform in `[0, max_tau]`.
    pub fn random(s: &mut Sampler, n: usize, max_tau: f64) -> Self {
        let u1 = Self::unitary(&s.unitary(n)).expect("unitary");
        let u2 = Self::unitary(&s.unitary(n)).expect("unitary");
        let tau = T::lit(s.range(0.0, max_tau));
        u1.compose(&Self::boost(n, tau)).compose(&u2)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    /// `max |M* J M - J|` divided by `max(1, |M|^2)`.
    pub fn form_residual(&self) -> f64 {
        let j = form::<T>(self.n);
        let d = self.m.adjoint().matmul(&j).matmul(&self.m).max_diff(&j);
        let scale = self.m.max_abs().powi(2).max(1.0);
        d / scale
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement { n: self.n, m: self.m.matmul(&other.m) }
    }

    /// `J M* J`.
    pub fn inverse(&self) -> Self {
        let j = form::<T>(self.n);
        GroupElement { n: self.n, m: j.matmul(&self.m.adjoint()).matmul(&j) }
    }

    fn denom(&self, z: &[Complex<T>]) -> Complex<T> {
        let n = self.n;
        let mut d = self.m[(n, n)];
        for (k, zk) in z.iter().enumerate() {
            d += self.m[(n, k)] * zk;
        }
        d
    }

    pub fn act_coords(&self, z: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let d = self.denom(z);
        (0..n)
            .map(|i| {
                let mut num = self.m[(i, n)];
                for (k, zk) in z.iter().enumerate() {
                    num += self.m[(i, k)] * zk;
                }
                num / d
            })
            .collect()
    }

    /// `γ(z)`.
    pub fn act(&self, z: &Point<T>) -> Point<T> {
        let c = self.act_coords(z.coords());
        Point::new(c.clone()).unwrap_or_else(|_| {
            // roundoff for points extremely close to the sphere: pull back inside
            let r = crate::ball::norm_sq(&c).sqrt();
            let k = (T::one() - T::epsilon()) / r;
            Point::new(c.into_iter().map(|x| x * k).collect()).expect("rescaled point")
        })
    }

    /// Holomorphic differential `dγ(z) = (A - γ(z) cᵀ)/(c·z + d)`.
    pub fn differential(&self, z: &Point<T>) -> ComplexMatrix<T> {
        let n = self.n;
        let d = self.denom(z.coords());
        let g = self.act_coords(z.coords());
        ComplexMatrix::from_fn(n, n, |i, k| (self.m[(i, k)] - g[i] * self.m[(n, k)]) / d)
    }

    /// `det dγ(z) = det(M) / (c·z + d)^{n+1}`.
    pub fn complex_jacobian(&self, z: &Point<T>) -> Complex<T> {
        self.m.det() / self.denom(z.coords()).powi(self.n as i32 + 1)
    }

    /// Determinant of a central-difference Jacobian, for cross-checking.
    pub fn complex_jacobian_fd(&self, z: &Point<T>, h: f64) -> Complex<T> {
        let n = self.n;
        let h_t = T::lit(h);
        let jac = ComplexMatrix::from_fn(n, n, |i, k| {
            let mut zp = z.coords().to_vec();
            let mut zm = z.coords().to_vec();
            zp[k] += Complex::new(h_t, T::zero());
            zm[k] -= Complex::new(h_t, T::zero());
            (self.act_coords(&zp)[i] - self.act_coords(&zm)[i]) / (h_t + h_t)
        });
        jac.det()
    }

    /// `γ^{-1}(0)`.
    pub fn preimage_of_origin(&self) -> Point<T> {
        self.inverse().act(&Point::origin(self.n))
    }

    /// Largest displacement over a set of points.
    pub fn action_distance(&self, other: &Self, probes: &[Point<T>]) -> f64 {
        probes
            .iter()
            .map(|p| self.act(p).max_diff(&other.act(p)).to_f64_lossy())
            .fold(0.0, f64::max)
    }
}
