use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sym::MultiIndex;

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn serialize_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Weight exponent: exact when rational, floating otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    Exact(Rational),
    Approx(f64),
}

impl Alpha {
    pub fn to_f64(&self) -> f64 {
        match self {
            Alpha::Exact(q) => rat_to_f64(q),
            Alpha::Approx(x) => *x,
        }
    }

    /// Parse `p`, `p/q` or a decimal. Decimals with a finite expansion are
    /// kept exact; anything else falls back to floating point.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad alpha `{s}`")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad alpha `{s}`")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in alpha `{s}`")));
            }
            return Ok(Alpha::Exact(Rational::new(p, q)));
        }
        if let Ok(k) = s.parse::<BigInt>() {
            return Ok(Alpha::Exact(Rational::from_integer(k)));
        }
        let x: f64 = s.parse().map_err(|_| Error::Parse(format!("bad alpha `{s}`")))?;
        if !x.is_finite() {
            return Err(Error::Parse(format!("alpha `{s}` is not finite")));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if !frac.contains(['e', 'E']) && frac.len() <= 18 {
                let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| Error::Parse(format!("bad alpha `{s}`")))?;
                let den = num_traits::pow(BigInt::from(10), frac.len());
                return Ok(Alpha::Exact(Rational::new(digits, den)));
            }
        }
        Ok(Alpha::Approx(x))
    }

    /// `α` is a pole of `Γ(α + 1)`.
    fn is_negative_integer(&self) -> bool {
        match self {
            Alpha::Exact(q) => q.is_integer() && q.is_negative(),
            Alpha::Approx(x) => x.fract() == 0.0 && *x < 0.0,
        }
    }
}

impl From<Rational> for Alpha {
    fn from(q: Rational) -> Self {
        Alpha::Exact(q)
    }
}

impl From<i64> for Alpha {
    fn from(k: i64) -> Self {
        Alpha::Exact(Rational::from_integer(BigInt::from(k)))
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Exact(q) => write!(f, "{q}"),
            Alpha::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// A scalar that is exact whenever its inputs were.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rat_to_f64(q),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(q) => s.serialize_str(&q.to_string()),
            Value::Approx(x) => s.serialize_f64(*x),
        }
    }
}

/// `coeff · π^power`, with `π` kept symbolic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiMultiple {
    pub coeff: Value,
    pub pi_power: u32,
}

impl PiMultiple {
    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64() * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut f = x.clone();
    for _ in 0..k {
        acc *= &f;
        f += Rational::one();
    }
    acc
}

pub fn pochhammer_f64(x: f64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (x + j as f64))
}

fn factorial_rat(k: u64) -> Rational {
    pochhammer(&Rational::one(), k)
}

/// `c_α = Γ(n+α+1) / (n! Γ(α+1))`, evaluated as `(α+1)_n / n!`.
///
/// Values for `α ≤ -1` are returned but logged, since the weighted measure
/// is then not finite.
pub fn c_alpha(n: usize, alpha: &Alpha) -> Result<Value> {
    if alpha.is_negative_integer() {
        return Err(Error::GammaPole(format!("Γ(α+1) at α = {alpha}")));
    }
    if alpha.to_f64() <= -1.0 {
        log::warn!("c_alpha: α = {alpha} ≤ -1, the weighted measure is not finite");
    }
    let n = n as u64;
    Ok(match alpha {
        Alpha::Exact(a) => Value::Exact(pochhammer(&(a + Rational::one()), n) / factorial_rat(n)),
        Alpha::Approx(a) => Value::Approx(pochhammer_f64(a + 1.0, n) / pochhammer_f64(1.0, n)),
    })
}

/// `∫_{B^n} |t^I|² (1-|t|²)^α dλ = π^n I! Γ(α+1) / Γ(n+|I|+α+1)`.
pub fn monomial_moment(i: &MultiIndex, alpha: &Alpha) -> Result<PiMultiple> {
    if alpha.to_f64() <= -1.0 {
        return Err(Error::InvalidConfig(format!("moment diverges for α = {alpha} ≤ -1")));
    }
    let n = i.dim() as u64;
    let k = n + i.degree() as u64;
    let i_fact = Rational::from_integer(BigInt::from(i.factorial()));
    let coeff = match alpha {
        Alpha::Exact(a) => Value::Exact(i_fact / pochhammer(&(a + Rational::one()), k)),
        Alpha::Approx(a) => Value::Approx(rat_to_f64(&i_fact) / pochhammer_f64(a + 1.0, k)),
    };
    Ok(PiMultiple { coeff, pi_power: n as u32 })
}
