use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::function::HoloFunction;
use super::jet::{diagonal_jet, JetConfig};
use crate::ball::{frame_a_inv, Point};
use crate::error::{Error, Result};
use crate::frame::{connection_gamma, wirtinger_vec, ConnectionTensor, Kind, WirtingerConfig};
use crate::scalar::Real;
use crate::sym::{raising_rg, Frame, MultiIndex, SymCoeffs, SymOneFormCoeffs};

/// Settings for the residual checks on diagonal jets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResidualConfig {
    pub jet: JetConfig,
    /// Differencing of jet coefficients in z̄. Each stencil point re-runs the
    /// jet extraction, so `h` balances jet noise against truncation.
    pub xbar: WirtingerConfig,
    /// Differencing of the frame matrix for the connection coefficients.
    pub gamma: WirtingerConfig,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        ResidualConfig {
            jet: JetConfig::default(),
            xbar: WirtingerConfig { h: 1e-4, order: 2 },
            gamma: WirtingerConfig { h: 1e-3, order: 4 },
        }
    }
}

/// Jets up to a degree at `z`, their `X̄_μ` derivatives and `Γ` at `z`.
struct JetDerivatives<T> {
    n: usize,
    jet: BTreeMap<MultiIndex, Complex<T>>,
    /// `xbar[μ][I] = X̄_μ f_I`.
    xbar: Vec<BTreeMap<MultiIndex, Complex<T>>>,
    gamma: ConnectionTensor<T>,
}

impl<T: Real> JetDerivatives<T> {
    fn new<F: HoloFunction<T> + ?Sized>(f: &F, z: &Point<T>, degree: usize, cfg: &ResidualConfig) -> Result<Self> {
        let n = z.dim();
        let indices = MultiIndex::enumerate_up_to(n, degree);
        let table = diagonal_jet(f, z, degree, &cfg.jet)?;
        let values = |x: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
            let t = diagonal_jet(f, &Point::new(x.to_vec())?, degree, &cfg.jet)?;
            Ok(indices.iter().map(|i| t.get(i)).collect())
        };
        // plain z̄_j derivatives, then X̄_μ = Σ_j conj(A^{jμ}) ∂/∂z̄_j
        let dz: Vec<Vec<Complex<T>>> =
            (0..n).map(|j| wirtinger_vec(values, z.coords(), j, Kind::Anti, &cfg.xbar)).collect::<Result<_>>()?;
        let inv = frame_a_inv(z)?;
        let zero = Complex::new(T::zero(), T::zero());
        let xbar = (0..n)
            .map(|mu| {
                indices
                    .iter()
                    .enumerate()
                    .map(|(q, i)| (i.clone(), (0..n).fold(zero, |acc, j| acc + inv[(j, mu)].conj() * dz[j][q])))
                    .collect()
            })
            .collect();
        Ok(JetDerivatives { n, jet: table.coeff, xbar, gamma: connection_gamma(z, &cfg.gamma)? })
    }

    fn f(&self, i: &MultiIndex) -> Complex<T> {
        self.jet.get(i).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Left-hand side of the compatibility relation at `(I, μ)`.
    ///
    /// With `full`, the connection term runs over all `(k, l)`:
    /// `Σ_{k,l: i_l ≥ 1} (i_k + 1 - δ_kl) Γ_k^{μl} f_{I+ε_k-ε_l}`; otherwise only
    /// the diagonal part `Σ_k i_k Γ_k^{μk} f_I` is kept.
    fn compat(&self, i: &MultiIndex, mu: usize, full: bool) -> Complex<T> {
        let n = self.n;
        let mut acc = self.xbar[mu][i];
        for k in 0..n {
            for l in 0..n {
                if k != l && !full {
                    continue;
                }
                let Some(lowered) = i.minus(l) else { continue };
                let shifted = lowered.plus(k);
                let c = i.get(k) + 1 - u32::from(k == l);
                acc += self.gamma.get(k, mu, l) * self.f(&shifted) * T::lit(f64::from(c));
            }
        }
        if let Some(lower) = i.minus(mu) {
            acc += self.f(&lower) * T::lit(i.degree() as f64 - 1.0);
        }
        acc
    }
}

/// Compatibility residual per `μ` at one multi-index.
///
/// Each entry is `X̄_μ f_I + Σ_{k,l} (i_k + 1 - δ_kl) Γ_k^{μl} f_{I+ε_k-ε_l} + (|I|-1) f_{I-ε_μ}`,
/// which vanishes for holomorphic `f`.
pub fn compatibility_residual<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    i: &MultiIndex,
    cfg: &ResidualConfig,
) -> Result<Vec<Complex<T>>> {
    residual_for(f, z, i, cfg, true)
}

/// The relation with only the diagonal connection terms `Σ_k i_k Γ_k^{μk} f_I`.
///
/// For `n = 1` this agrees with [`compatibility_residual`]; for `n ≥ 2` the
/// off-diagonal terms are generally needed and this residual does not vanish.
pub fn compatibility_residual_diagonal<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    i: &MultiIndex,
    cfg: &ResidualConfig,
) -> Result<Vec<Complex<T>>> {
    residual_for(f, z, i, cfg, false)
}

fn residual_for<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    i: &MultiIndex,
    cfg: &ResidualConfig,
    full: bool,
) -> Result<Vec<Complex<T>>> {
    if i.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), found: i.dim() });
    }
    let d = JetDerivatives::new(f, z, i.degree(), cfg)?;
    Ok((0..z.dim()).map(|mu| d.compat(i, mu, full)).collect())
}

/// Largest compatibility residual over all `|I| ≤ max_degree` and `μ`, with
/// one jet differencing pass shared by every index.
pub fn max_compatibility_residual<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    max_degree: usize,
    full: bool,
    cfg: &ResidualConfig,
) -> Result<f64> {
    let d = JetDerivatives::new(f, z, max_degree, cfg)?;
    let mut worst = 0.0f64;
    for i in MultiIndex::enumerate_up_to(z.dim(), max_degree) {
        for mu in 0..z.dim() {
            worst = worst.max(d.compat(&i, mu, full).norm().to_f64_lossy());
        }
    }
    Ok(worst)
}

/// `φ_k = Σ_{|J|=k} f_J e^J` as e-frame coefficients.
fn phi<T: Real>(d: &JetDerivatives<T>, k: usize) -> Result<SymCoeffs<Complex<T>>> {
    SymCoeffs::from_entries(d.n, k, Frame::E, MultiIndex::enumerate(d.n, k).into_iter().map(|j| {
        let v = d.f(&j);
        (j, v)
    }))
}

/// `∂̄φ_k` in the frame `e^J ⊗ ē_μ`: coefficient derivatives plus the
/// derivative of the frame, `X̄_μ e^I = Σ_{a,l} i_a Γ_a^{μl} e^{I-ε_a+ε_l}`.
fn dbar_phi<T: Real>(d: &JetDerivatives<T>, k: usize) -> SymOneFormCoeffs<Complex<T>> {
    let n = d.n;
    let mut out = SymOneFormCoeffs::zero(n, k, Frame::E);
    for i in MultiIndex::enumerate(n, k) {
        let fi = d.f(&i);
        for mu in 0..n {
            out.accumulate(i.clone(), mu, d.xbar[mu][&i]);
            for a in 0..n {
                let Some(lowered) = i.minus(a) else { continue };
                for l in 0..n {
                    out.accumulate(lowered.plus(l), mu, d.gamma.get(a, mu, l) * fi * T::lit(f64::from(i.get(a))));
                }
            }
        }
    }
    out
}

/// `max_{J,μ} |(∂̄φ_k)_{J,μ} + (k-1) R_G(φ_{k-1})_{J,μ}|`, with `φ_0 = 0`.
pub fn dbar_phi_residual<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    k: usize,
    cfg: &ResidualConfig,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidConfig("the relation starts at k = 1".into()));
    }
    let d = JetDerivatives::new(f, z, k, cfg)?;
    dbar_from(&d, k)
}

fn dbar_from<T: Real>(d: &JetDerivatives<T>, k: usize) -> Result<f64> {
    let lhs = dbar_phi(d, k);
    if k == 1 {
        return Ok(lhs.max_abs());
    }
    let raised = raising_rg(&phi(d, k - 1)?)?;
    let rhs = raised.scale(&Complex::new(T::lit(k as f64 - 1.0), T::zero()));
    Ok(lhs.add(&rhs)?.max_abs())
}

/// Both residual paths over `|I| ≤ max_degree` from one differencing pass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualPair {
    /// Largest compatibility residual.
    pub compat: f64,
    /// Largest `∂̄φ_k` residual over `1 ≤ k ≤ max_degree`.
    pub dbar: f64,
    /// Largest mismatch between the two paths, entry by entry.
    pub mismatch: f64,
}

pub fn residual_pair<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &Point<T>,
    max_degree: usize,
    cfg: &ResidualConfig,
) -> Result<ResidualPair> {
    let n = z.dim();
    let d = JetDerivatives::new(f, z, max_degree, cfg)?;
    let mut out = ResidualPair { compat: 0.0, dbar: 0.0, mismatch: 0.0 };
    for k in 1..=max_degree {
        let lhs = dbar_phi(&d, k);
        let full = if k == 1 {
            lhs
        } else {
            lhs.add(&raising_rg(&phi(&d, k - 1)?)?.scale(&Complex::new(T::lit(k as f64 - 1.0), T::zero())))?
        };
        out.dbar = out.dbar.max(full.max_abs());
        for i in MultiIndex::enumerate(n, k) {
            for mu in 0..n {
                let c = d.compat(&i, mu, true);
                out.compat = out.compat.max(c.norm().to_f64_lossy());
                out.mismatch = out.mismatch.max((c - full.get(&i, mu)).norm().to_f64_lossy());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::function::{parse_function_spec, Constant, DiffPower, ExpDot};
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn exponential_example() {
        let z = Point::<f64>::from_f64(&[(0.4, 0.1)]).unwrap();
        let r = compatibility_residual(&ExpDot, &z, &MultiIndex::new(vec![2]), &ResidualConfig::default()).unwrap();
        assert!(r[0].norm() < 1e-5, "{r:?}");
        assert!(dbar_phi_residual(&ExpDot, &z, 2, &ResidualConfig::default()).unwrap() < 1e-5);
    }

    #[test]
    fn cube_example() {
        let mut s = Sampler::new(31);
        for _ in 0..5 {
            let z: Point<f64> = s.point(1, 0.8);
            let r = compatibility_residual(&DiffPower(3), &z, &MultiIndex::new(vec![3]), &ResidualConfig::default()).unwrap();
            assert!(r[0].norm() < 1e-5);
        }
    }

    #[test]
    fn constant_is_exact() {
        let z = Point::<f64>::from_f64(&[(0.2, 0.1), (-0.3, 0.2)]).unwrap();
        let f = Constant(c(1.5, -0.5));
        let cfg = ResidualConfig::default();
        for i in MultiIndex::enumerate(2, 2).into_iter().chain(MultiIndex::enumerate(2, 3)) {
            for r in compatibility_residual(&f, &z, &i, &cfg).unwrap() {
                assert!(r.norm() < 1e-9);
            }
        }
        for k in 1..=3 {
            assert!(dbar_phi_residual(&f, &z, k, &cfg).unwrap() < 1e-9);
        }
    }

    #[test]
    fn both_paths_vanish_and_agree() {
        let cfg = ResidualConfig::default();
        let mut s = Sampler::new(32);
        for spec in ["exp", "(z-w)^3", "(z-w)^4", "prod:0:1:4", "expdiff:3"] {
            let f = parse_function_spec::<f64>(spec).unwrap();
            for n in 1..=2 {
                for _ in 0..3 {
                    let z: Point<f64> = s.point(n, 0.8);
                    let p = residual_pair(&*f, &z, 4, &cfg).unwrap();
                    assert!(p.compat < 1e-5 && p.dbar < 1e-5, "{spec} n={n} {p:?}");
                    assert!(p.mismatch < 1e-10, "{spec} n={n} {p:?}");
                }
            }
        }
    }

    #[test]
    fn diagonal_form_needs_off_diagonal_terms() {
        let cfg = ResidualConfig::default();
        let z1 = Point::<f64>::from_f64(&[(0.4, 0.1)]).unwrap();
        let a = max_compatibility_residual(&ExpDot, &z1, 4, false, &cfg).unwrap();
        assert!(a < 1e-5);
        let z2 = Point::<f64>::from_f64(&[(0.4, 0.1), (-0.2, 0.3)]).unwrap();
        let full = max_compatibility_residual(&ExpDot, &z2, 4, true, &cfg).unwrap();
        let diag = max_compatibility_residual(&ExpDot, &z2, 4, false, &cfg).unwrap();
        assert!(full < 1e-5);
        assert!(diag > 1e-3, "{diag}");
    }

    #[test]
    fn degree_one_is_closed() {
        // φ_1 of a function vanishing to first order is ∂̄-closed
        let z = Point::<f64>::from_f64(&[(0.1, 0.3), (0.2, -0.2)]).unwrap();
        let f = parse_function_spec::<f64>("(z-w)^1").unwrap();
        assert!(dbar_phi_residual(&*f, &z, 1, &ResidualConfig::default()).unwrap() < 1e-5);
    }
}
