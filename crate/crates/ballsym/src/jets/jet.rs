use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::function::HoloFunction;
use crate::ball::{t_map_coords, Point};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sym::MultiIndex;

/// Torus radius and grid size for the Cauchy-integral coefficient extraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetConfig {
    pub radius: f64,
    pub grid: usize,
}

impl Default for JetConfig {
    fn default() -> Self {
        JetConfig { radius: 0.25, grid: 64 }
    }
}

impl JetConfig {
    pub fn validate(&self, n: usize, order: usize) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= 0.5) {
            return Err(Error::InvalidConfig(format!("jet radius {} outside (0, 0.5]", self.radius)));
        }
        if self.radius * (n as f64).sqrt() >= 1.0 {
            return Err(Error::InvalidConfig(format!("torus of radius {} does not fit in the {n}-ball", self.radius)));
        }
        if self.grid < 2 * order + 2 {
            return Err(Error::GridTooSmall { grid: self.grid, order });
        }
        Ok(())
    }
}

/// Taylor coefficients `f_I(z)`, `|I| ≤ order`, of `t ↦ f(z, T_z t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct JetTable<T> {
    pub base: Point<T>,
    pub order: usize,
    #[serde(serialize_with = "serialize_coeffs")]
    pub coeff: BTreeMap<MultiIndex, Complex<T>>,
    pub radius: f64,
    pub grid: usize,
    /// Largest scaled DFT value at negative frequencies. Holomorphic input
    /// has none, so this measures aliasing and rounding; the error in
    /// `f_I` is about this value divided by `radius^{|I|}`.
    pub aliasing_estimate: f64,
}

fn serialize_coeffs<T: Real, S: serde::Serializer>(
    m: &BTreeMap<MultiIndex, Complex<T>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<(Vec<u32>, f64, f64)> =
        m.iter().map(|(i, c)| (i.entries().to_vec(), c.re.to_f64_lossy(), c.im.to_f64_lossy())).collect();
    v.serialize(s)
}

impl<T: Real> JetTable<T> {
    pub fn get(&self, i: &MultiIndex) -> Complex<T> {
        self.coeff.get(i).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Largest `|f_I|` over `|I| = degree`.
    pub fn max_at_degree(&self, degree: usize) -> f64 {
        self.coeff
            .iter()
            .filter(|(i, _)| i.degree() == degree)
            .map(|(_, c)| c.norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }
}

/// Taylor coefficients of `g` around the origin of `C^n` up to total degree
/// `order`, from samples on the torus `|t_j| = radius`.
///
/// Returns the coefficients and the negative-frequency magnitude.
pub fn torus_coefficients<T, G>(n: usize, order: usize, radius: f64, grid: usize, g: G) -> (BTreeMap<MultiIndex, Complex<T>>, f64)
where
    T: Real,
    G: Fn(&[Complex<T>]) -> Complex<T> + Sync,
{
    let total = grid.pow(n as u32);
    let roots: Vec<Complex<T>> = (0..grid)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / grid as f64;
            Complex::new(T::lit(radius * th.cos()), T::lit(radius * th.sin()))
        })
        .collect();
    let mut data: Vec<Complex<T>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut t = vec![Complex::new(T::zero(), T::zero()); n];
            let mut rem = flat;
            for slot in t.iter_mut().rev() {
                *slot = roots[rem % grid];
                rem /= grid;
            }
            g(&t)
        })
        .collect();

    // n-dimensional FFT, one axis at a time
    let fft = FftPlanner::<T>::new().plan_fft_forward(grid);
    let mut line = vec![Complex::new(T::zero(), T::zero()); grid];
    for axis in 0..n {
        let stride = grid.pow((n - 1 - axis) as u32);
        for start in 0..total {
            if (start / stride) % grid != 0 {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[start + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[start + k * stride] = *v;
            }
        }
    }

    let scale = T::lit(total as f64);
    let mut alias = 0.0f64;
    for (flat, v) in data.iter().enumerate() {
        let mut rem = flat;
        let mut negative = false;
        for _ in 0..n {
            if rem % grid > grid / 2 {
                negative = true;
            }
            rem /= grid;
        }
        if negative {
            alias = alias.max((v / scale).norm().to_f64_lossy());
        }
    }
    let mut coeff = BTreeMap::new();
    for i in MultiIndex::enumerate_up_to(n, order) {
        let flat = i.entries().iter().fold(0usize, |acc, &e| acc * grid + e as usize);
        let r_pow = T::lit(radius.powi(i.degree() as i32));
        coeff.insert(i, data[flat] / scale / r_pow);
    }
    (coeff, alias)
}

/// Diagonal jet of `f` at `z`: coefficients of `f(z, T_z t)` in `t`.
pub fn diagonal_jet<T: Real, F: HoloFunction<T> + ?Sized>(f: &F, z: &Point<T>, order: usize, cfg: &JetConfig) -> Result<JetTable<T>> {
    let n = z.dim();
    cfg.validate(n, order)?;
    let zc = z.coords();
    let g = |t: &[Complex<T>]| f.eval(zc, &t_map_coords(zc, t));
    let (coeff, aliasing_estimate) = torus_coefficients(n, order, cfg.radius, cfg.grid, g);
    if coeff.values().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("jet coefficients"));
    }
    Ok(JetTable { base: z.clone(), order, coeff, radius: cfg.radius, grid: cfg.grid, aliasing_estimate })
}

/// Coefficients `(1/I!) ∂_w^I f(z, w)|_{w=z}` from a polydisc DFT in `w`.
pub fn w_taylor<T: Real, F: HoloFunction<T> + ?Sized>(f: &F, z: &Point<T>, order: usize, grid: usize) -> Result<BTreeMap<MultiIndex, Complex<T>>> {
    let n = z.dim();
    if grid < 2 * order + 2 {
        return Err(Error::GridTooSmall { grid, order });
    }
    // polydisc of radius rho around z stays inside the ball
    let room = 1.0 - z.norm_sq().sqrt().to_f64_lossy();
    let rho = (0.5 * room / (n as f64).sqrt()).min(0.25);
    let zc = z.coords();
    let g = |t: &[Complex<T>]| {
        let w: Vec<Complex<T>> = zc.iter().zip(t).map(|(a, b)| a + b).collect();
        f.eval(zc, &w)
    };
    Ok(torus_coefficients(n, order, rho, grid, g).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::function::{parse_function_spec, Constant, DiffPower, ExpDot};
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn constant_function() {
        let z = Point::<f64>::from_f64(&[(0.3, 0.1), (-0.2, 0.0)]).unwrap();
        let j = diagonal_jet(&Constant(c(1.0, 0.0)), &z, 4, &JetConfig::default()).unwrap();
        assert!((j.get(&mi(&[0, 0])) - c(1.0, 0.0)).norm() < 1e-12);
        for (i, v) in &j.coeff {
            if i.degree() > 0 {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_of_difference() {
        // z - T_z t = t(1-|z|^2)/(1 - t z̄), so (z-w)^3 = t^3 (1-|z|^2)^3 (1 - t z̄)^{-3}
        let z = Point::<f64>::from_f64(&[(0.5, 0.0)]).unwrap();
        let j = diagonal_jet(&DiffPower(3), &z, 6, &JetConfig::default()).unwrap();
        assert!((j.get(&mi(&[3])) - c(0.421875, 0.0)).norm() < 1e-10);
        assert!((j.get(&mi(&[4])) - c(0.6328125, 0.0)).norm() < 1e-10);
        for d in 0..3 {
            assert!(j.get(&mi(&[d])).norm() < 1e-12);
        }
        let mut s = Sampler::new(21);
        for _ in 0..10 {
            let z: Point<f64> = s.point(1, 0.9);
            let j = diagonal_jet(&DiffPower(3), &z, 5, &JetConfig::default()).unwrap();
            let r = 1.0 - z.norm_sq();
            let zb = z.coords()[0].conj();
            assert!((j.get(&mi(&[3])) - c(r.powi(3), 0.0)).norm() < 1e-10);
            assert!((j.get(&mi(&[4])) - zb * 3.0 * r.powi(3)).norm() < 1e-10);
            assert!((j.get(&mi(&[5])) - zb * zb * 6.0 * r.powi(3)).norm() < 1e-9);
        }
    }

    #[test]
    fn exponential_at_origin() {
        let j = diagonal_jet(&ExpDot, &Point::<f64>::origin(1), 4, &JetConfig::default()).unwrap();
        assert!((j.get(&mi(&[0])) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(j.max_at_degree(1).max(j.max_at_degree(4)) < 1e-14);
    }

    #[test]
    fn grid_and_radius_independence() {
        let mut s = Sampler::new(22);
        for spec in ["exp", "(z-w)^3", "(z-w)^4", "prod:0:1:4", "expdiff:3"] {
            let f = parse_function_spec::<f64>(spec).unwrap();
            for n in 1..=2 {
                let z: Point<f64> = s.point(n, 0.7);
                let a = diagonal_jet(&*f, &z, 6, &JetConfig { radius: 0.2, grid: 64 }).unwrap();
                let b = diagonal_jet(&*f, &z, 6, &JetConfig { radius: 0.3, grid: 128 }).unwrap();
                for (i, v) in &a.coeff {
                    assert!((v - b.get(i)).norm() < 1e-9, "{spec} n={n} {i:?}");
                }
            }
        }
    }

    #[test]
    fn config_errors() {
        let z = Point::<f64>::origin(1);
        assert!(matches!(
            diagonal_jet(&ExpDot, &z, 10, &JetConfig { radius: 0.25, grid: 16 }),
            Err(Error::GridTooSmall { grid: 16, order: 10 })
        ));
        assert!(diagonal_jet(&ExpDot, &z, 2, &JetConfig { radius: 0.6, grid: 16 }).is_err());
        assert!(diagonal_jet(&ExpDot, &z, 2, &JetConfig { radius: 0.0, grid: 16 }).is_err());
    }

    #[test]
    fn w_taylor_of_exponential() {
        // exp(z w) around w = z: coefficients exp(z^2) z^k / k!
        let z = Point::<f64>::from_f64(&[(0.3, -0.2)]).unwrap();
        let t = w_taylor(&ExpDot, &z, 4, 32).unwrap();
        let zz = z.coords()[0];
        let mut fact = 1.0;
        for k in 0..=4u32 {
            if k > 0 {
                fact *= f64::from(k);
            }
            let expect = (zz * zz).exp() * zz.powu(k) / fact;
            assert!((t[&mi(&[k])] - expect).norm() < 1e-12);
        }
    }
}
