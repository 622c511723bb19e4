use num_complex::Complex;
use serde::Serialize;

use crate::ball::{dt_dz, dt_dzbar, frame_a_inv, s_z, t_map_coords, Point};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::sym::MultiIndex;

/// Largest allowed mismatch of the interpolant at the check nodes.
pub const DEGREE_TOL: f64 = 1e-9;
/// Lattice spacing of the interpolation nodes.
const NODE_STEP: f64 = 0.125;

/// Coefficients of the polynomials in `t`
///
/// `∂(T_z w)_k/∂z̄_j |_{w=T_z t} = B0^{jk} + Σ_l B^{jk}_l t_l + Σ_{l≥m} B^{jk}_{lm} t_l t_m`
/// and `∂(T_z w)_k/∂z_j |_{w=T_z t} = C^{jk} + Σ_l C^{jk}_l t_l`.
///
/// `B^{jk}_{lm}` is the monomial coefficient (for `l = m` the coefficient
/// of `t_l^2`) and is stored symmetrically.
#[derive(Clone, Debug, Serialize)]
pub struct BCTables<T> {
    pub b0: Vec<Vec<Complex<T>>>,
    pub b1: Vec<Vec<Vec<Complex<T>>>>,
    b2: Vec<Vec<Vec<Vec<Complex<T>>>>>,
    pub c0: Vec<Vec<Complex<T>>>,
    pub c1: Vec<Vec<Vec<Complex<T>>>>,
    /// Largest interpolation mismatch at the check nodes.
    pub degree_residual: f64,
}

impl<T: Real> BCTables<T> {
    pub fn dim(&self) -> usize {
        self.b1.len()
    }

    /// `B^{jk}_{lm}`, symmetric in `(l, m)`.
    pub fn b2(&self, j: usize, k: usize, l: usize, m: usize) -> Complex<T> {
        self.b2[j][k][l][m]
    }
}

fn nodes(n: usize, degree: usize) -> Vec<MultiIndex> {
    MultiIndex::enumerate_up_to(n, degree)
}

fn node_point<T: Real>(a: &MultiIndex) -> Vec<Complex<T>> {
    a.entries().iter().map(|&x| Complex::new(T::lit(NODE_STEP * f64::from(x)), T::zero())).collect()
}

/// Points off the lattice used to confirm the degree bound.
fn check_points<T: Real>(n: usize) -> Vec<Vec<Complex<T>>> {
    let pick = |k: usize, (re, im): (f64, f64)| {
        (0..n)
            .map(|i| {
                let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                Complex::new(T::lit(sign * re / (i + 1) as f64), T::lit(im * (i + 1) as f64 / n as f64))
            })
            .collect()
    };
    vec![pick(0, (0.11, 0.07)), pick(1, (-0.06, 0.13)), pick(2, (0.17, -0.09))]
}

/// Interpolate a matrix-valued polynomial of the given degree on the lattice nodes.
/// Returns the coefficients per basis monomial and the check-node mismatch.
fn interpolate<T: Real>(
    n: usize,
    degree: usize,
    f: &dyn Fn(&[Complex<T>]) -> ComplexMatrix<T>,
) -> Result<(Vec<MultiIndex>, Vec<ComplexMatrix<T>>, f64)> {
    let basis = nodes(n, degree);
    let pts: Vec<Vec<Complex<T>>> = basis.iter().map(node_point).collect();
    let v = ComplexMatrix::from_fn(basis.len(), basis.len(), |r, c| basis[c].monomial(&pts[r]));
    let values: Vec<ComplexMatrix<T>> = pts.iter().map(|t| f(t)).collect();
    let mut coeffs = vec![ComplexMatrix::zeros(n, n); basis.len()];
    for r in 0..n {
        for c in 0..n {
            let rhs: Vec<Complex<T>> = values.iter().map(|m| m[(r, c)]).collect();
            let sol = v.solve(&rhs).map_err(|e| Error::Internal(format!("node system: {e}")))?;
            for (q, x) in sol.into_iter().enumerate() {
                coeffs[q][(r, c)] = x;
            }
        }
    }
    let mut worst = 0.0f64;
    for t in check_points::<T>(n) {
        let actual = f(&t);
        let mut fit = ComplexMatrix::zeros(n, n);
        for (a, cm) in basis.iter().zip(&coeffs) {
            fit = fit.add(&cm.scale(&a.monomial(&t)));
        }
        worst = worst.max(fit.max_diff(&actual));
    }
    Ok((basis, coeffs, worst))
}

/// Recover the B and C tables from the exact z-derivatives of `T_z w`,
/// enforcing the degree bounds 2 (for B) and 1 (for C).
pub fn bc_expand<T: Real>(z: &Point<T>) -> Result<BCTables<T>> {
    let n = z.dim();
    let zc = z.coords().to_vec();
    let zb = zc.clone();
    let fb = move |t: &[Complex<T>]| dt_dzbar(&zb, &t_map_coords(&zb, t));
    let zh = zc.clone();
    let fc = move |t: &[Complex<T>]| dt_dz(&zh, &t_map_coords(&zh, t));
    let (basis_b, coef_b, res_b) = interpolate(n, 2, &fb)?;
    let (basis_c, coef_c, res_c) = interpolate(n, 1, &fc)?;
    let degree_residual = res_b.max(res_c);
    if !(degree_residual < DEGREE_TOL) {
        return Err(Error::Internal(format!("expansion exceeds its degree bound (mismatch {degree_residual:e})")));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut b0 = vec![vec![zero; n]; n];
    let mut b1 = vec![vec![vec![zero; n]; n]; n];
    let mut b2 = vec![vec![vec![vec![zero; n]; n]; n]; n];
    let mut c0 = vec![vec![zero; n]; n];
    let mut c1 = vec![vec![vec![zero; n]; n]; n];
    for (a, m) in basis_b.iter().zip(&coef_b) {
        let nz: Vec<usize> = (0..n).filter(|&i| a.get(i) > 0).collect();
        for j in 0..n {
            for k in 0..n {
                let x = m[(j, k)];
                match (a.degree(), nz.as_slice()) {
                    (0, _) => b0[j][k] = x,
                    (1, [l]) => b1[j][k][*l] = x,
                    (2, [l]) => b2[j][k][*l][*l] = x,
                    (2, [l, mm]) => {
                        b2[j][k][*l][*mm] = x;
                        b2[j][k][*mm][*l] = x;
                    }
                    _ => unreachable!("basis degree is at most 2"),
                }
            }
        }
    }
    for (a, m) in basis_c.iter().zip(&coef_c) {
        for j in 0..n {
            for k in 0..n {
                match a.degree() {
                    0 => c0[j][k] = m[(j, k)],
                    _ => {
                        let l = (0..n).find(|&i| a.get(i) > 0).expect("degree one index");
                        c1[j][k][l] = m[(j, k)];
                    }
                }
            }
        }
    }
    Ok(BCTables { b0, b1, b2, c0, c1, degree_residual })
}

/// Closed form `B^{jk}_{kα} = -s/(1-|z|^2) δ_{αj} + z_j (s-1)/(|z|^2(1-|z|^2)) z̄_α`,
/// written with `(s-1)/|z|^2 = -1/(1+s)` so it is regular at the origin.
pub fn b2_closed_form<T: Real>(z: &Point<T>, j: usize, alpha: usize) -> Complex<T> {
    let r = z.norm_sq();
    let s = s_z(z);
    let one_r = T::one() - r;
    let delta = if alpha == j { T::one() } else { T::zero() };
    let c = z.coords();
    Complex::new(-s / one_r * delta, T::zero()) - c[j] * c[alpha].conj() / ((T::one() + s) * one_r)
}

/// `Σ_j conj(A^{jμ}) B^{jk}_{kα} - δ_{μα}` for all `(μ, α, k)`, as `out[k][(μ, α)]`.
pub fn absum_check<T: Real>(z: &Point<T>, tables: &BCTables<T>) -> Result<Vec<ComplexMatrix<T>>> {
    let n = z.dim();
    let inv = frame_a_inv(z)?;
    Ok((0..n)
        .map(|k| {
            ComplexMatrix::from_fn(n, n, |mu, al| {
                let s = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + inv[(j, mu)].conj() * tables.b2(j, k, k, al));
                let d = if mu == al { T::one() } else { T::zero() };
                s - Complex::new(d, T::zero())
            })
        })
        .collect())
}

/// Largest entry of [`absum_check`].
pub fn absum_residual<T: Real>(z: &Point<T>) -> Result<f64> {
    let t = bc_expand(z)?;
    Ok(absum_check(z, &t)?.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn polynomial_reproduces_derivatives() {
        let mut s = Sampler::new(11);
        for n in 1..=3 {
            for _ in 0..5 {
                let z: Point<f64> = s.point(n, 0.9);
                let tb = bc_expand(&z).unwrap();
                assert!(tb.degree_residual < 1e-10);
                let t: Point<f64> = s.point(n, 0.5);
                let exact = dt_dzbar(z.coords(), &t_map_coords(z.coords(), t.coords()));
                let tc = t.coords();
                for j in 0..n {
                    for k in 0..n {
                        let mut v = tb.b0[j][k];
                        for l in 0..n {
                            v += tb.b1[j][k][l] * tc[l];
                            for m in 0..=l {
                                v += tb.b2(j, k, l, m) * tc[l] * tc[m];
                            }
                        }
                        assert!((v - exact[(j, k)]).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn b_plus_conj_c_and_b2_formula() {
        let mut s = Sampler::new(12);
        for n in 1..=3 {
            for _ in 0..10 {
                let z: Point<f64> = s.point(n, 0.9);
                let tb = bc_expand(&z).unwrap();
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            assert!((tb.b1[j][k][l] + tb.c1[j][l][k].conj()).norm() < 1e-9);
                        }
                        for al in 0..n {
                            assert!((tb.b2(j, k, k, al) - b2_closed_form(&z, j, al)).norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn absum_examples() {
        assert!(absum_residual(&Point::<f64>::origin(2)).unwrap() < 1e-9);
        let z = Point::<f64>::from_f64(&[(0.3, 0.0), (0.0, 0.2)]).unwrap();
        assert!(absum_residual(&z).unwrap() < 1e-9);
        let z = Point::<f64>::from_f64(&[(0.5, 0.0)]).unwrap();
        let tb = bc_expand(&z).unwrap();
        let a_inv = frame_a_inv(&z).unwrap()[(0, 0)];
        assert!((a_inv.conj() * tb.b2(0, 0, 0, 0) - Complex::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn constant_term_vanishes() {
        let mut s = Sampler::new(13);
        let z: Point<f64> = s.point(2, 0.9);
        let tb = bc_expand(&z).unwrap();
        assert!(tb.b0.iter().flatten().all(|x| x.norm() < 1e-12));
    }
}
