//! Holomorphic functions on `B^n × B^n` and the builtin catalog.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::ball::bdot;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A function holomorphic in both arguments.
///
/// Evaluators must be pure: they are called concurrently.
pub trait HoloFunction<T: Real>: Send + Sync {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T>;
    fn label(&self) -> String;
}

impl<T: Real, F: HoloFunction<T> + ?Sized> HoloFunction<T> for Arc<F> {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        (**self).eval(z, w)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Real, F: HoloFunction<T> + ?Sized> HoloFunction<T> for Box<F> {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        (**self).eval(z, w)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Real, F: HoloFunction<T> + ?Sized> HoloFunction<T> for &F {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        (**self).eval(z, w)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// Constant function.
#[derive(Clone, Debug)]
pub struct Constant<T>(pub Complex<T>);

impl<T: Real> HoloFunction<T> for Constant<T> {
    fn eval(&self, _: &[Complex<T>], _: &[Complex<T>]) -> Complex<T> {
        self.0
    }
    fn label(&self) -> String {
        format!("const({}{:+}i)", self.0.re, self.0.im)
    }
}

/// `Σ_j (z_j - w_j)^N`.
#[derive(Clone, Debug)]
pub struct DiffPower(pub u32);

impl<T: Real> HoloFunction<T> for DiffPower {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        z.iter().zip(w).fold(Complex::zero(), |acc, (a, b)| acc + (a - b).powu(self.0))
    }
    fn label(&self) -> String {
        format!("(z-w)^{}", self.0)
    }
}

/// `exp(Σ_j z_j w_j)`.
#[derive(Clone, Debug)]
pub struct ExpDot;

impl<T: Real> HoloFunction<T> for ExpDot {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        bdot(z, w).exp()
    }
    fn label(&self) -> String {
        "exp(z.w)".into()
    }
}

/// `(z_a - w_a)(z_b - w_b) · (Σ_k (z_k - w_k))^{N-2}`, indices taken modulo `n`.
#[derive(Clone, Debug)]
pub struct CoordProduct {
    pub a: usize,
    pub b: usize,
    pub total: u32,
}

impl<T: Real> HoloFunction<T> for CoordProduct {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        let d = |k: usize| z[k] - w[k];
        let s = z.iter().zip(w).fold(Complex::zero(), |acc, (x, y)| acc + (x - y));
        d(self.a % z.len()) * d(self.b % z.len()) * s.powu(self.total.saturating_sub(2))
    }
    fn label(&self) -> String {
        format!("prod:{}:{}:{}", self.a, self.b, self.total)
    }
}

/// `exp(z·w) · Σ_j (z_j - w_j)^N`, a product with an infinite diagonal jet.
#[derive(Clone, Debug)]
pub struct ExpTimesDiffPower(pub u32);

impl<T: Real> HoloFunction<T> for ExpTimesDiffPower {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        ExpDot.eval(z, w) * DiffPower(self.0).eval(z, w)
    }
    fn label(&self) -> String {
        format!("exp(z.w)*(z-w)^{}", self.0)
    }
}

/// `f(w, z)`.
pub struct Swapped<F>(pub F);

impl<T: Real, F: HoloFunction<T>> HoloFunction<T> for Swapped<F> {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        self.0.eval(w, z)
    }
    fn label(&self) -> String {
        format!("swap({})", self.0.label())
    }
}

/// `Σ_k c_k f_k`.
pub struct LinearCombination<T: Real> {
    pub terms: Vec<(Complex<T>, Arc<dyn HoloFunction<T>>)>,
}

impl<T: Real> HoloFunction<T> for LinearCombination<T> {
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        self.terms.iter().fold(Complex::zero(), |acc, (c, f)| acc + *c * f.eval(z, w))
    }
    fn label(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(c, f)| format!("({}{:+}i)*{}", c.re, c.im, f.label())).collect();
        parts.join(" + ")
    }
}

/// A closure with a label.
pub struct FnHolo<F> {
    pub label: String,
    pub f: F,
}

impl<T: Real, F> HoloFunction<T> for FnHolo<F>
where
    F: Fn(&[Complex<T>], &[Complex<T>]) -> Complex<T> + Send + Sync,
{
    fn eval(&self, z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        (self.f)(z, w)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Parse a function spec string.
///
/// Accepted forms: `const`, `const:RE[,IM]`, `(z-w)^N`, `diffpow:N`,
/// `exp(z.w)`, `exp`, `prod:A:B:N`, `expdiff:N`.
pub fn parse_function_spec<T: Real>(spec: &str) -> Result<Arc<dyn HoloFunction<T>>> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('\u{2212}', "-").replace('\u{b7}', ".");
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{x}` in `{spec}`")));
    let int = |x: &str| x.parse::<u32>().map_err(|_| Error::Parse(format!("bad integer `{x}` in `{spec}`")));
    if s == "const" {
        return Ok(Arc::new(Constant(Complex::<T>::one())));
    }
    if let Some(rest) = s.strip_prefix("const:") {
        let mut parts = rest.split(',');
        let re = num(parts.next().unwrap_or("1"))?;
        let im = parts.next().map(num).transpose()?.unwrap_or(0.0);
        return Ok(Arc::new(Constant(Complex::new(T::lit(re), T::lit(im)))));
    }
    if let Some(rest) = s.strip_prefix("(z-w)^").or_else(|| s.strip_prefix("diffpow:")) {
        return Ok(Arc::new(DiffPower(int(rest)?)));
    }
    if s == "exp(z.w)" || s == "exp" {
        return Ok(Arc::new(ExpDot));
    }
    if let Some(rest) = s.strip_prefix("expdiff:") {
        return Ok(Arc::new(ExpTimesDiffPower(int(rest)?)));
    }
    if let Some(rest) = s.strip_prefix("prod:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected prod:A:B:N, got `{spec}`")));
        }
        return Ok(Arc::new(CoordProduct {
            a: int(parts[0])? as usize,
            b: int(parts[1])? as usize,
            total: int(parts[2])?,
        }));
    }
    Err(Error::Parse(format!("unknown function spec `{spec}`")))
}

/// Largest `|∂f/∂z̄_j|` and `|∂f/∂w̄_j|` by central differences; near zero
/// for holomorphic `f`.
pub fn cauchy_riemann_probe<T: Real, F: HoloFunction<T> + ?Sized>(
    f: &F,
    z: &[Complex<T>],
    w: &[Complex<T>],
    h: f64,
) -> f64 {
    let n = z.len();
    let h_t = T::lit(h);
    let i = Complex::new(T::zero(), T::one());
    let mut worst = 0.0f64;
    for slot in 0..2 {
        for j in 0..n {
            let eval = |d: Complex<T>| {
                let mut zz = z.to_vec();
                let mut ww = w.to_vec();
                if slot == 0 {
                    zz[j] += d;
                } else {
                    ww[j] += d;
                }
                f.eval(&zz, &ww)
            };
            let dx = (eval(Complex::new(h_t, T::zero())) - eval(Complex::new(-h_t, T::zero()))) / (h_t + h_t);
            let dy = (eval(Complex::new(T::zero(), h_t)) - eval(Complex::new(T::zero(), -h_t))) / (h_t + h_t);
            let dbar = (dx + i * dy) * T::lit(0.5);
            worst = worst.max(dbar.norm().to_f64_lossy());
        }
    }
    worst
}
