use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::ladder::weighted_norm_assemble;
use super::weights::{c_alpha, monomial_moment, rat_to_f64, Alpha, Rational, Value};
use crate::error::{Error, Result};
use crate::sampling::Sampler;
use crate::sym::{factorial, MultiIndex};

/// The two sides of the weighted-norm decomposition for given `|f_I|²`.
#[derive(Clone, Debug, Serialize)]
pub struct AssemblyCheck {
    /// `c_α Σ_I |f_I|² ∫ |t^I|² (1-|t|²)^α dλ`, coefficient of `π^n`.
    pub from_moments: Value,
    /// `(1/n!) Σ_m ‖φ_m‖² m! Γ(n+α+1)/Γ(n+m+α+1)` with `‖φ_m‖² = Σ_{|I|=m} (I!/m!) |f_I|²`.
    pub from_series: Value,
    /// Zero for exact inputs; otherwise the relative mismatch.
    pub mismatch: f64,
}

/// Compare the monomial-moment expansion of `‖f‖²_α` with the series in the
/// symmetric-differential norms.
pub fn moment_assembly_check(n: usize, alpha: &Alpha, abs_sq: &BTreeMap<MultiIndex, Rational>) -> Result<AssemblyCheck> {
    if let Some(i) = abs_sq.keys().find(|i| i.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: i.dim() });
    }
    let max_deg = abs_sq.keys().map(MultiIndex::degree).max().unwrap_or(0);
    let c = c_alpha(n, alpha)?;
    let mut norms = vec![Rational::from_integer(0.into()); max_deg + 1];
    for (i, q) in abs_sq {
        let w = Rational::new(BigInt::from(i.factorial()), BigInt::from(factorial(i.degree())));
        norms[i.degree()] += w * q;
    }
    let series = weighted_norm_assemble(&norms, n as u64, alpha)?.pop().expect("at least degree zero");
    let moments: Vec<Value> = abs_sq.keys().map(|i| monomial_moment(i, alpha).map(|m| m.coeff)).collect::<Result<_>>()?;
    let from_moments = match (&c, alpha) {
        (Value::Exact(c), Alpha::Exact(_)) => {
            let mut acc = Rational::from_integer(0.into());
            for (q, m) in abs_sq.values().zip(&moments) {
                acc += q * m.exact().expect("exact moment");
            }
            Value::Exact(c * acc)
        }
        _ => Value::Approx(c.to_f64() * abs_sq.values().zip(&moments).map(|(q, m)| rat_to_f64(q) * m.to_f64()).sum::<f64>()),
    };
    let mismatch = match (&from_moments, &series) {
        (Value::Exact(a), Value::Exact(b)) => {
            if a == b {
                0.0
            } else {
                rat_to_f64(&((a - b) / b)).abs()
            }
        }
        (a, b) => ((a.to_f64() - b.to_f64()) / b.to_f64()).abs(),
    };
    Ok(AssemblyCheck { from_moments, from_series: series, mismatch })
}

/// Monte-Carlo estimate of `∫_{B^n} |t^I|² (1-|t|²)^α dλ` from uniform
/// samples of the ball, with its standard error.
///
/// A uniform point has `|t|^{2n}` uniform and `(|t_1|², ..., |t_n|²)/|t|²`
/// uniform on the simplex; both are drawn from Latin-hypercube stratified
/// uniforms within each chunk. The reported error ignores the
/// stratification and so overestimates.
pub fn monte_carlo_moment(i: &MultiIndex, alpha: f64, samples: usize, seed: u64) -> (f64, f64) {
    let n = i.dim();
    const CHUNK: usize = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let (s1, s2, count) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = Sampler::fork(seed, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let strata: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut p: Vec<usize> = (0..len).collect();
                    for k in (1..len).rev() {
                        p.swap(k, rng.index(k + 1));
                    }
                    p
                })
                .collect();
            let (mut a, mut b) = (0.0f64, 0.0f64);
            for j in 0..len {
                let mut u = strata.iter().map(|p| (p[j] as f64 + rng.uniform()) / len as f64);
                let r2 = u.next().expect("n >= 1").powf(1.0 / n as f64);
                // stick breaking: the k-th share is Beta(1, n-1-k) of what is left
                let mut rest = 1.0;
                let mut val = (1.0 - r2).powf(alpha);
                for (k, v) in u.enumerate() {
                    let share = rest * (1.0 - v.powf(1.0 / (n - 1 - k) as f64));
                    rest -= share;
                    val *= (r2 * share).powi(i.get(k) as i32);
                }
                val *= (r2 * rest).powi(i.get(n - 1) as i32);
                a += val;
                b += val * val;
            }
            (a, b, len)
        })
        .collect::<Vec<_>>()
        .into_iter()
        // summed in chunk order so the result does not depend on scheduling
        .fold((0.0, 0.0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    let k = count as f64;
    let mean = s1 / k;
    let var = (s2 / k - mean * mean).max(0.0);
    // volume of the unit ball in C^n is π^n / n!
    let vol = std::f64::consts::PI.powi(n as i32) / (1..=n).map(|x| x as f64).product::<f64>();
    (vol * mean, vol * (var / k).sqrt())
}
