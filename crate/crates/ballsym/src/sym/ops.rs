use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::coeffs::{Frame, SymCoeffs, SymOneFormCoeffs};
use super::multi_index::{factorial, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Coeff;

fn weight<S: Coeff>(index: &MultiIndex) -> S {
    let num = BigInt::from(index.factorial());
    let den = BigInt::from(factorial(index.degree()));
    S::from_ratio(&num, &den)
}

/// `⟨u, v⟩ = Σ_I (I!/m!) u_I conj(v_I)`.
pub fn sym_inner<S: Coeff>(u: &SymCoeffs<S>, v: &SymCoeffs<S>) -> Result<S> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    if u.degree() != v.degree() {
        return Err(Error::DegreeMismatch(u.degree(), v.degree()));
    }
    if u.frame() != v.frame() {
        return Err(Error::FrameMismatch(format!("{} vs {}", u.frame(), v.frame())));
    }
    let mut acc = S::zero();
    for (i, a) in u.entries() {
        let b = v.get(i);
        if b != S::zero() {
            acc = acc + weight::<S>(i) * a.clone() * b.conj();
        }
    }
    Ok(acc)
}

/// `‖u‖²` for a one-form valued tensor: the sum over `μ` of the slice norms.
pub fn one_form_norm_sq<S: Coeff>(u: &SymOneFormCoeffs<S>) -> S {
    let mut acc = S::zero();
    for ((i, _), v) in u.entries() {
        acc = acc + weight::<S>(i) * v.clone() * v.conj();
    }
    acc
}

fn require_e_frame<S: Coeff>(u: &SymCoeffs<S>) -> Result<()> {
    if u.frame() != Frame::E {
        return Err(Error::FrameMismatch("operator is defined on the orthonormal frame".into()));
    }
    Ok(())
}

/// `R_G(u) = Σ_{J,l} u_J e^J e_l ⊗ ē_l`.
///
/// The coefficient at `(J, μ)` is `u_{J-ε_μ}`.
pub fn raising_rg<S: Coeff>(u: &SymCoeffs<S>) -> Result<SymOneFormCoeffs<S>> {
    require_e_frame(u)?;
    let n = u.dim();
    let mut out = SymOneFormCoeffs::zero(n, u.degree() + 1, Frame::E);
    for (i, v) in u.entries() {
        for mu in 0..n {
            out.accumulate(i.plus(mu), mu, v.clone());
        }
    }
    Ok(out)
}

/// Curvature coefficients of the cotangent bundle of the ball in the frame `e`.
///
/// `theta[a][b][c][d]` is the coefficient of `e_c ∧ ē_d` in `Θ^a_b`, with
/// `Θ^a_b = e_b ∧ ē_a + δ_{ab} Σ_r e_r ∧ ē_r`.
pub fn curvature_tensor(n: usize) -> Vec<Vec<Vec<Vec<i64>>>> {
    let d = |x: usize, y: usize| i64::from(x == y);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| (0..n).map(|e| d(c, b) * d(e, a) + d(a, b) * d(c, e)).collect()).collect())
                .collect()
        })
        .collect()
}

/// `R_Θ(u)`: the curvature of `S^m T*` applied factor by factor, followed by
/// moving the `(1,0)` part of each `(1,1)`-form into the symmetric product.
pub fn curvature_action<S: Coeff>(u: &SymCoeffs<S>) -> Result<SymOneFormCoeffs<S>> {
    require_e_frame(u)?;
    let n = u.dim();
    let theta = curvature_tensor(n);
    let mut out = SymOneFormCoeffs::zero(n, u.degree() + 1, Frame::E);
    for (i, v) in u.entries() {
        for j in 0..n {
            let mult = i.get(j);
            let Some(base) = i.minus(j) else { continue };
            let coef = v.clone() * S::from_int(i64::from(mult));
            // Θ(e_j) = Σ_a e_a ⊗ Θ^a_j
            for (a, theta_a) in theta.iter().enumerate() {
                for c in 0..n {
                    for d in 0..n {
                        let t = theta_a[j][c][d];
                        if t == 0 {
                            continue;
                        }
                        out.accumulate(base.plus(a).plus(c), d, coef.clone() * S::from_int(t));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `E_{N,m} = m(2N + m - 1)`.
pub fn eigenvalue_e(big_n: u64, m: u64) -> BigUint {
    if m == 0 {
        return BigUint::zero();
    }
    BigUint::from(m) * BigUint::from(2 * big_n + m - 1)
}

/// `E_{N,m}` from `E_{N,0} = 0` and `E_{N,m+1} = 2(N+m) + E_{N,m}`.
pub fn eigenvalue_e_by_recursion(big_n: u64, m: u64) -> BigUint {
    let mut e = BigUint::zero();
    for k in 0..m {
        e += BigUint::from(2 * (big_n + k));
    }
    e
}

/// Substitute `x_j -> Σ_k M_{jk} x_k` in `Σ_I u_I x^I` and collect.
///
/// Pulling back by a linear map `F` with Jacobian `M` gives the coefficients
/// of `F*u`; in particular `e = A dz` turns e-frame coefficients into dz-frame
/// coefficients with `M = A`. Substitutions compose contravariantly:
/// `pushforward(M1 M2) = pushforward(M2) ∘ pushforward(M1)`.
pub fn pushforward_sym<S: Coeff>(m: &Matrix<S>, u: &SymCoeffs<S>, target: Frame) -> Result<SymCoeffs<S>> {
    let n = u.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
    }
    let mut out = SymCoeffs::zero(n, u.degree(), target);
    for (i, v) in u.entries() {
        if *v == S::zero() {
            continue;
        }
        // product of linear forms, expanded one factor at a time
        let mut poly: Vec<(MultiIndex, S)> = vec![(MultiIndex::zeros(n), v.clone())];
        for (j, &e) in i.entries().iter().enumerate() {
            for _ in 0..e {
                let mut next: std::collections::BTreeMap<MultiIndex, S> = std::collections::BTreeMap::new();
                for (mono, c) in &poly {
                    for k in 0..n {
                        let mjk = m[(j, k)].clone();
                        if mjk == S::zero() {
                            continue;
                        }
                        let slot = next.entry(mono.plus(k)).or_insert_with(S::zero);
                        *slot = slot.clone() + c.clone() * mjk;
                    }
                }
                poly = next.into_iter().collect();
            }
        }
        for (mono, c) in poly {
            out.accumulate(mono, c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type C64 = Complex<f64>;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn random_sym(n: usize, m: usize, vals: &[f64]) -> SymCoeffs<C64> {
        let idx = MultiIndex::enumerate(n, m);
        SymCoeffs::from_entries(
            n,
            m,
            Frame::E,
            idx.into_iter().enumerate().map(|(k, i)| (i, c(vals[(2 * k) % vals.len()], vals[(2 * k + 1) % vals.len()]))),
        )
        .unwrap()
    }

    #[test]
    fn inner_examples() {
        for m in 0..6 {
            let u = SymCoeffs::<C64>::basis(mi(&[m, 0, 0]), Frame::E);
            assert_eq!(sym_inner(&u, &u).unwrap(), c(1.0, 0.0));
        }
        let u = SymCoeffs::<BigRational>::basis(mi(&[1, 1]), Frame::E);
        assert_eq!(sym_inner(&u, &u).unwrap(), BigRational::new(1.into(), 2.into()));
        let v = SymCoeffs::<C64>::basis(mi(&[1, 1]), Frame::Dz);
        assert!(matches!(
            sym_inner(&SymCoeffs::<C64>::basis(mi(&[1, 1]), Frame::E), &v),
            Err(Error::FrameMismatch(_))
        ));
    }

    #[test]
    fn raising_examples() {
        let u = SymCoeffs::<C64>::basis(mi(&[3]), Frame::E).scale(&c(0.5, 2.0));
        let r = raising_rg(&u).unwrap();
        assert_eq!(r.get(&mi(&[4]), 0), c(0.5, 2.0));
        let e1 = SymCoeffs::<C64>::basis(mi(&[1, 0]), Frame::E);
        let r = raising_rg(&e1).unwrap();
        let nonzero: Vec<_> = r.entries().filter(|(_, v)| **v != c(0.0, 0.0)).collect();
        assert_eq!(nonzero.len(), 2);
        assert_eq!(r.get(&mi(&[2, 0]), 0), c(1.0, 0.0));
        assert_eq!(r.get(&mi(&[1, 1]), 1), c(1.0, 0.0));
        let dz = SymCoeffs::<C64>::basis(mi(&[1, 0]), Frame::Dz);
        assert!(raising_rg(&dz).is_err());
    }

    #[test]
    fn raising_norm_ratio_exact() {
        for n in 1..=3usize {
            for m in 0..=6usize {
                for i in MultiIndex::enumerate(n, m) {
                    let u = SymCoeffs::<BigRational>::basis(i, Frame::E);
                    let lhs = one_form_norm_sq(&raising_rg(&u).unwrap());
                    let rhs = BigRational::new(((m + n) as i64).into(), ((m + 1) as i64).into())
                        * sym_inner(&u, &u).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn curvature_examples() {
        let e = SymCoeffs::<C64>::basis(mi(&[1]), Frame::E);
        let lhs = curvature_action(&e).unwrap();
        let rhs = raising_rg(&e).unwrap().scale(&c(2.0, 0.0));
        assert!(lhs.sub(&rhs).unwrap().max_abs() == 0.0);
        let one = SymCoeffs::<C64>::basis(mi(&[0, 0]), Frame::E);
        assert_eq!(curvature_action(&one).unwrap().max_abs(), 0.0);
        let u = random_sym(2, 3, &[0.3, -1.2, 0.7, 2.5, -0.1, 0.9, 1.4]);
        let d = curvature_action(&u).unwrap().sub(&raising_rg(&u).unwrap().scale(&c(6.0, 0.0))).unwrap();
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn curvature_is_twice_m_raising_exactly() {
        for n in 1..=3usize {
            for m in 0..=5usize {
                for i in MultiIndex::enumerate(n, m) {
                    let u = SymCoeffs::<BigRational>::basis(i, Frame::E);
                    let two_m = BigRational::from_integer(((2 * m) as i64).into());
                    let lhs = curvature_action(&u).unwrap();
                    let rhs = raising_rg(&u).unwrap().scale(&two_m);
                    assert!(lhs.sub(&rhs).unwrap().entries().all(|(_, v)| v.is_zero()));
                }
            }
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue_e(4, 0), BigUint::zero());
        assert_eq!(eigenvalue_e(4, 1), BigUint::from(8u32));
        assert_eq!(eigenvalue_e(3, 2), BigUint::from(14u32));
        for big_n in 1..12 {
            for m in 0..60 {
                assert_eq!(eigenvalue_e(big_n, m), eigenvalue_e_by_recursion(big_n, m));
            }
        }
    }

    #[test]
    fn pushforward_examples() {
        let u = random_sym(2, 3, &[0.3, -1.2, 0.7, 2.5, -0.1]);
        let id = Matrix::<C64>::identity(2);
        assert_eq!(pushforward_sym(&id, &u, Frame::E).unwrap().max_abs_diff(&u).unwrap(), 0.0);
        let a = c(0.3, -0.7);
        let v = SymCoeffs::<C64>::basis(mi(&[4]), Frame::E).scale(&c(1.5, 0.0));
        let m = Matrix::from_rows(vec![vec![a]]).unwrap();
        let p = pushforward_sym(&m, &v, Frame::Dz).unwrap();
        assert!((p.get(&mi(&[4])) - a.powi(4) * 1.5).norm() < 1e-15);
        assert_eq!(p.frame(), Frame::Dz);
        let swap = Matrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let e11 = SymCoeffs::<C64>::basis(mi(&[2, 0]), Frame::E);
        let p = pushforward_sym(&swap, &e11, Frame::E).unwrap();
        assert_eq!(p.get(&mi(&[0, 2])), c(1.0, 0.0));
        assert_eq!(p.get(&mi(&[2, 0])), c(0.0, 0.0));
    }

    #[test]
    fn pushforward_composes_contravariantly_exact() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let m1 = Matrix::from_rows(vec![vec![q(1, 2), q(-3, 1)], vec![q(2, 3), q(5, 7)]]).unwrap();
        let m2 = Matrix::from_rows(vec![vec![q(0, 1), q(4, 5)], vec![q(-1, 3), q(2, 1)]]).unwrap();
        for i in MultiIndex::enumerate(2, 4) {
            let u = SymCoeffs::<BigRational>::basis(i, Frame::E);
            let lhs = pushforward_sym(&m1.matmul(&m2), &u, Frame::E).unwrap();
            let rhs = pushforward_sym(&m2, &pushforward_sym(&m1, &u, Frame::E).unwrap(), Frame::E).unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero());
        }
    }

    proptest! {
        #[test]
        fn inner_is_hermitian_and_positive(vals in proptest::collection::vec(-2.0f64..2.0, 2..20), n in 1usize..4, m in 0usize..5) {
            let u = random_sym(n, m, &vals);
            let rev: Vec<f64> = vals.iter().rev().cloned().collect();
            let v = random_sym(n, m, &rev);
            let a = sym_inner(&u, &v).unwrap();
            let b = sym_inner(&v, &u).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
            if !u.is_zero() {
                prop_assert!(sym_inner(&u, &u).unwrap().re > 0.0);
            }
        }

        #[test]
        fn raising_norm_ratio_float(vals in proptest::collection::vec(-2.0f64..2.0, 2..20), n in 1usize..4, m in 0usize..6) {
            let u = random_sym(n, m, &vals);
            let lhs = one_form_norm_sq(&raising_rg(&u).unwrap()).re;
            let rhs = (m + n) as f64 / (m + 1) as f64 * sym_inner(&u, &u).unwrap().re;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn unitary_pushforward_preserves_inner(seed in 0u64..1000, n in 1usize..4, m in 0usize..5) {
            let mut s = crate::sampling::Sampler::new(seed);
            let un: Matrix<C64> = s.unitary(n);
            let vals: Vec<f64> = (0..12).map(|_| s.range(-1.0, 1.0)).collect();
            let u = random_sym(n, m, &vals);
            let p = pushforward_sym(&un, &u, Frame::E).unwrap();
            let a = sym_inner(&u, &u).unwrap().re;
            let b = sym_inner(&p, &p).unwrap().re;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
