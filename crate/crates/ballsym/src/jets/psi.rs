use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::function::HoloFunction;
use super::jet::{diagonal_jet, JetConfig, JetTable};
use crate::ball::{frame_a, Point};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::scalar::Real;
use crate::sym::{pushforward_sym, Frame, MultiIndex, SymCoeffs};

/// A symmetric differential sampled at a list of points, in one frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct SymDifferentialSample<T> {
    pub degree: usize,
    pub frame: Frame,
    pub samples: Vec<(Point<T>, SymCoeffs<Complex<T>>)>,
}

impl<T: Real> SymDifferentialSample<T> {
    pub fn new(degree: usize, frame: Frame, samples: Vec<(Point<T>, SymCoeffs<Complex<T>>)>) -> Result<Self> {
        for (_, u) in &samples {
            if u.degree() != degree {
                return Err(Error::DegreeMismatch(degree, u.degree()));
            }
            if u.frame() != frame {
                return Err(Error::FrameMismatch(format!("expected {frame}, found {}", u.frame())));
            }
        }
        Ok(SymDifferentialSample { degree, frame, samples })
    }

    /// Largest coefficient magnitude over all samples.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|(_, u)| u.max_abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        SymDifferentialSample {
            degree: self.degree,
            frame: self.frame,
            samples: self.samples.iter().map(|(p, u)| (p.clone(), u.scale(&c))).collect(),
        }
    }
}

/// Ψ of a function: its leading diagonal jet in both frames.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct PsiResult<T> {
    /// First total degree with a coefficient above the tolerance.
    pub degree: usize,
    pub e_frame: SymDifferentialSample<T>,
    pub dz_frame: SymDifferentialSample<T>,
}

fn jets<T: Real, F: HoloFunction<T> + ?Sized>(f: &F, zs: &[Point<T>], order: usize, cfg: &JetConfig) -> Result<Vec<JetTable<T>>> {
    zs.par_iter().map(|z| diagonal_jet(f, z, order, cfg)).collect()
}

fn order_from_jets<T: Real>(tables: &[JetTable<T>], order: usize, tol: f64) -> Result<usize> {
    (0..=order)
        .find(|&d| tables.iter().any(|t| t.max_at_degree(d) > tol))
        .ok_or(Error::NoNonvanishingJet { order, tol })
}

/// Smallest total degree `d ≤ order` with `max_z max_{|I|=d} |f_I(z)| > tol`.
///
/// `f` then vanishes to order `d-1` on the diagonal and Ψ(f) has degree `d`.
pub fn vanishing_order<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    zs: &[Point<T>],
    order: usize,
    tol: f64,
    cfg: &JetConfig,
) -> Result<usize> {
    check_points(zs)?;
    order_from_jets(&jets(f, zs, order, cfg)?, order, tol)
}

fn check_points<T: Real>(zs: &[Point<T>]) -> Result<()> {
    if zs.len() < 3 {
        return Err(Error::InvalidConfig(format!("need at least 3 base points, got {}", zs.len())));
    }
    let n = zs[0].dim();
    if let Some(p) = zs.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
    }
    Ok(())
}

/// Leading coefficients of a jet as an e-frame section, and the dz-frame
/// section obtained by substituting `e = A dz`.
pub fn psi_at<T: Real>(table: &JetTable<T>, degree: usize) -> Result<(SymCoeffs<Complex<T>>, SymCoeffs<Complex<T>>)> {
    let n = table.base.dim();
    if degree > table.order {
        return Err(Error::DegreeMismatch(degree, table.order));
    }
    let e = SymCoeffs::from_entries(n, degree, Frame::E, MultiIndex::enumerate(n, degree).into_iter().map(|i| {
        let v = table.get(&i);
        (i, v)
    }))?;
    let dz = pushforward_sym(&frame_a(&table.base), &e, Frame::Dz)?;
    Ok((e, dz))
}

/// Ψ(f) at the given points, with the degree found by [`vanishing_order`].
pub fn psi_extract<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    zs: &[Point<T>],
    order: usize,
    tol: f64,
    cfg: &JetConfig,
) -> Result<PsiResult<T>> {
    check_points(zs)?;
    let tables = jets(f, zs, order, cfg)?;
    let degree = order_from_jets(&tables, order, tol)?;
    psi_from_tables(&tables, degree)
}

/// Ψ(f) at the given points for a known degree (no vanishing test).
pub fn psi_with_degree<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    zs: &[Point<T>],
    degree: usize,
    cfg: &JetConfig,
) -> Result<PsiResult<T>> {
    psi_from_tables(&jets(f, zs, degree, cfg)?, degree)
}

fn psi_from_tables<T: Real>(tables: &[JetTable<T>], degree: usize) -> Result<PsiResult<T>> {
    let mut e = Vec::with_capacity(tables.len());
    let mut dz = Vec::with_capacity(tables.len());
    for t in tables {
        let (a, b) = psi_at(t, degree)?;
        e.push((t.base.clone(), a));
        dz.push((t.base.clone(), b));
    }
    Ok(PsiResult {
        degree,
        e_frame: SymDifferentialSample::new(degree, Frame::E, e)?,
        dz_frame: SymDifferentialSample::new(degree, Frame::Dz, dz)?,
    })
}

/// `max_z |γ*ψ(z) - ψ(z)|` from dz-frame samples at `z` and at `γz`.
///
/// The pullback substitutes `dw = dγ(z) dz` in `ψ(γz)`; for `n = 1` this is
/// `ψ(γz) γ'(z)^N`.
pub fn equivariance_residual<T: Real>(
    at_z: &SymDifferentialSample<T>,
    at_gz: &SymDifferentialSample<T>,
    gamma: &GroupElement<T>,
) -> Result<f64> {
    if at_z.frame != Frame::Dz || at_gz.frame != Frame::Dz {
        return Err(Error::FrameMismatch("equivariance needs dz-frame samples".into()));
    }
    if at_z.samples.len() != at_gz.samples.len() {
        return Err(Error::DimensionMismatch { expected: at_z.samples.len(), found: at_gz.samples.len() });
    }
    let mut worst = 0.0f64;
    for ((z, psi_z), (gz, psi_gz)) in at_z.samples.iter().zip(&at_gz.samples) {
        if z.dim() != gamma.dim() {
            return Err(Error::DimensionMismatch { expected: gamma.dim(), found: z.dim() });
        }
        let image = gamma.act(z);
        if image.max_diff(gz).to_f64_lossy() > 1e-12 {
            return Err(Error::InvalidConfig("second sample is not at the image points".into()));
        }
        let pulled = pushforward_sym(&gamma.differential(z), psi_gz, Frame::Dz)?;
        worst = worst.max(pulled.max_abs_diff(psi_z)?);
    }
    Ok(worst)
}

/// Extract Ψ(f) at `zs` and at `γ zs` with a fixed degree and compare.
pub fn psi_equivariance<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    gamma: &GroupElement<T>,
    zs: &[Point<T>],
    degree: usize,
    cfg: &JetConfig,
) -> Result<(f64, PsiResult<T>)> {
    let images: Vec<Point<T>> = zs.iter().map(|z| gamma.act(z)).collect();
    let a = psi_with_degree(f, zs, degree, cfg)?;
    let b = psi_with_degree(f, &images, degree, cfg)?;
    Ok((equivariance_residual(&a.dz_frame, &b.dz_frame, gamma)?, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::function::{parse_function_spec, Constant, DiffPower, FnHolo, Swapped};
    use crate::jets::jet::w_taylor;
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn points(seed: u64, n: usize, k: usize) -> Vec<Point<f64>> {
        let mut s = Sampler::new(seed);
        (0..k).map(|_| s.point(n, 0.8)).collect()
    }

    #[test]
    fn orders() {
        let zs = points(1, 1, 4);
        let cfg = JetConfig::default();
        assert_eq!(vanishing_order(&DiffPower(3), &zs, 6, 1e-8, &cfg).unwrap(), 3);
        assert_eq!(vanishing_order(&Constant(c(1.0, 0.0)), &zs, 6, 1e-8, &cfg).unwrap(), 0);
        assert!(matches!(
            vanishing_order(&Constant(c(0.0, 0.0)), &zs, 4, 1e-8, &cfg),
            Err(Error::NoNonvanishingJet { .. })
        ));
        assert!(vanishing_order(&DiffPower(3), &zs[..2], 6, 1e-8, &cfg).is_err());
    }

    #[test]
    fn cube_gives_minus_one() {
        let zs = points(2, 1, 5);
        let p = psi_extract(&DiffPower(3), &zs, 5, 1e-8, &JetConfig::default()).unwrap();
        assert_eq!(p.degree, 3);
        for (_, u) in &p.dz_frame.samples {
            assert!((u.get(&MultiIndex::new(vec![3])) - c(-1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn symmetric_and_linear() {
        let zs = points(3, 2, 3);
        let cfg = JetConfig::default();
        let f = parse_function_spec::<f64>("(z-w)^4").unwrap();
        let a = psi_extract(&*f, &zs, 5, 1e-8, &cfg).unwrap();
        let b = psi_extract(&Swapped(f.clone()), &zs, 5, 1e-8, &cfg).unwrap();
        for ((_, x), (_, y)) in a.dz_frame.samples.iter().zip(&b.dz_frame.samples) {
            assert!(x.max_abs_diff(y).unwrap() < 1e-12);
        }
        let k = c(2.0, -1.5);
        let scaled = FnHolo { label: "scaled".into(), f: |z: &[Complex<f64>], w: &[Complex<f64>]| k * f.eval(z, w) };
        let s = psi_extract(&scaled, &zs, 5, 1e-8, &cfg).unwrap();
        for ((_, x), (_, y)) in a.e_frame.scale(k).samples.iter().zip(&s.e_frame.samples) {
            assert!(x.max_abs_diff(y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn leading_jet_matches_w_derivatives() {
        for spec in ["(z-w)^3", "(z-w)^4", "prod:0:1:4", "expdiff:3"] {
            let f = parse_function_spec::<f64>(spec).unwrap();
            for n in 1..=2 {
                let zs = points(4 + n as u64, n, 4);
                let p = psi_extract(&*f, &zs, 6, 1e-8, &JetConfig::default()).unwrap();
                for (z, u) in &p.dz_frame.samples {
                    let oracle = w_taylor(&*f, z, p.degree, 32).unwrap();
                    for i in MultiIndex::enumerate(n, p.degree) {
                        assert!((u.get(&i) - oracle[&i]).norm() < 1e-8, "{spec} {i:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn equivariance_basics() {
        let zs = points(6, 1, 3);
        let cfg = JetConfig::default();
        let id = GroupElement::identity(1);
        let (r, _) = psi_equivariance(&DiffPower(3), &id, &zs, 3, &cfg).unwrap();
        assert_eq!(r, 0.0);
        // (z-w)^3 is not invariant under a boost
        let g = GroupElement::from_ab(c(2.0 / 3f64.sqrt(), 0.0), c(1.0 / 3f64.sqrt(), 0.0)).unwrap();
        let (r1, _) = psi_equivariance(&DiffPower(3), &g, &zs, 3, &cfg).unwrap();
        assert!(r1 > 1e-3);
        let imgs: Vec<Point<f64>> = zs.iter().map(|z| g.act(z)).collect();
        let a = psi_with_degree(&DiffPower(3), &zs, 3, &cfg).unwrap().dz_frame;
        let b = psi_with_degree(&DiffPower(3), &imgs, 3, &cfg).unwrap().dz_frame;
        let two = c(2.0, 0.0);
        let r2 = equivariance_residual(&a.scale(two), &b.scale(two), &g).unwrap();
        assert!((r2 - 2.0 * r1).abs() < 1e-12 * r1.max(1.0));
    }
}
