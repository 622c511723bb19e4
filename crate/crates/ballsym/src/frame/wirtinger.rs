use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Holomorphic `∂/∂z_j` or antiholomorphic `∂/∂z̄_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Holo,
    Anti,
}

/// Central-difference settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirtingerConfig {
    pub h: f64,
    /// 2 or 4.
    pub order: u8,
}

impl Default for WirtingerConfig {
    fn default() -> Self {
        WirtingerConfig { h: 1e-5, order: 2 }
    }
}

impl WirtingerConfig {
    pub fn new(h: f64, order: u8) -> Result<Self> {
        let cfg = WirtingerConfig { h, order };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-9..=1e-2).contains(&self.h) {
            return Err(Error::InvalidConfig(format!("step h = {} outside [1e-9, 1e-2]", self.h)));
        }
        if self.order != 2 && self.order != 4 {
            return Err(Error::InvalidConfig(format!("difference order must be 2 or 4, got {}", self.order)));
        }
        Ok(())
    }

    /// Stencil offsets (in units of h) and weights for a first derivative.
    fn stencil(&self) -> &'static [(f64, f64)] {
        match self.order {
            4 => &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
            _ => &[(-1.0, -0.5), (1.0, 0.5)],
        }
    }
}

/// Wirtinger derivative of a vector-valued function in coordinate `j`.
///
/// `f` may fail (for instance when a shifted point leaves the ball); every
/// stencil point must stay within `|z| < 1`.
pub fn wirtinger_vec<T, F>(f: F, z: &[Complex<T>], j: usize, kind: Kind, cfg: &WirtingerConfig) -> Result<Vec<Complex<T>>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Result<Vec<Complex<T>>>,
{
    cfg.validate()?;
    let reach = T::lit(2.0 * cfg.h);
    let r = crate::ball::norm_sq(z).sqrt();
    if r + reach >= T::one() {
        return Err(Error::OutsideBall { norm_sq: (r + reach).powi(2).to_f64_lossy() });
    }
    let h = T::lit(cfg.h);
    let partial = |dir: Complex<T>| -> Result<Vec<Complex<T>>> {
        let mut acc: Option<Vec<Complex<T>>> = None;
        for &(off, wt) in cfg.stencil() {
            let mut zz = z.to_vec();
            zz[j] += dir * T::lit(off) * h;
            let v = f(&zz)?;
            let acc = acc.get_or_insert_with(|| vec![Complex::new(T::zero(), T::zero()); v.len()]);
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += x * T::lit(wt);
            }
        }
        Ok(acc.unwrap_or_default().into_iter().map(|x| x / h).collect())
    };
    let dx = partial(Complex::new(T::one(), T::zero()))?;
    let dy = partial(Complex::new(T::zero(), T::one()))?;
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let out: Vec<Complex<T>> = dx
        .iter()
        .zip(&dy)
        .map(|(a, b)| match kind {
            Kind::Holo => (a - i * b) * half,
            Kind::Anti => (a + i * b) * half,
        })
        .collect();
    if out.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("finite difference"));
    }
    Ok(out)
}

/// Scalar Wirtinger derivative.
pub fn wirtinger_d<T, F>(f: F, z: &[Complex<T>], j: usize, kind: Kind, cfg: &WirtingerConfig) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Complex<T>,
{
    Ok(wirtinger_vec(|x| Ok(vec![f(x)]), z, j, kind, cfg)?[0])
}
