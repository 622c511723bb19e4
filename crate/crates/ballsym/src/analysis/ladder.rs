use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::weights::{pochhammer, rat_int, rat_to_f64, Alpha, Rational, Value};
use crate::error::{Error, Result};
use crate::sym::eigenvalue_e;

/// Ladder parameters: starting degree `N`, dimension `n` and weight exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderParams {
    pub big_n: u64,
    pub n: u64,
    pub alpha: Rational,
}

impl LadderParams {
    pub fn new(big_n: u64, n: u64, alpha: Rational) -> Result<Self> {
        if big_n == 0 || n == 0 {
            return Err(Error::InvalidConfig(format!("need N ≥ 1 and n ≥ 1, got N = {big_n}, n = {n}")));
        }
        Ok(LadderParams { big_n, n, alpha })
    }

    /// Eigenspaces used by the ladder are nontrivial only for `N ≥ n + 2`.
    pub fn in_nontrivial_range(&self) -> bool {
        self.big_n >= self.n + 2
    }

    /// `c_α` finite needs `α > -(n+1)`.
    pub fn c_alpha_finite(&self) -> bool {
        self.alpha > -rat_int(self.n + 1)
    }
}

fn factorial(k: u64) -> Rational {
    pochhammer(&Rational::one(), k)
}

fn e_rat(big_n: u64, m: u64) -> Rational {
    Rational::from_integer(BigInt::from(eigenvalue_e(big_n, m)))
}

/// `‖φ_{N+m}‖²` for `‖ψ‖² = 1`, from the product formula
/// `Π_{j=1}^m (1 + (n-1)/(N+j)) · (2N-1)! ((N+m-1)!)² / (((N-1)!)² m! (2N+m-1)!)`.
pub fn norm_ladder(big_n: u64, n: u64, m: u64) -> Rational {
    let mut prod = Rational::one();
    for j in 1..=m {
        prod *= Rational::new(BigInt::from(big_n + j + n - 1), BigInt::from(big_n + j));
    }
    let num = factorial(2 * big_n - 1) * factorial(big_n + m - 1) * factorial(big_n + m - 1);
    let den = factorial(big_n - 1) * factorial(big_n - 1) * factorial(m) * factorial(2 * big_n + m - 1);
    prod * num / den
}

/// One ladder step: `‖φ_{N+m}‖² / ‖φ_{N+m-1}‖² = (1 + (n-1)/(N+m)) (N+m-1)² / E_{N,m}`.
pub fn ladder_step(big_n: u64, n: u64, m: u64) -> Rational {
    debug_assert!(m >= 1);
    let growth = Rational::one() + Rational::new(BigInt::from(n - 1), BigInt::from(big_n + m));
    let k = rat_int(big_n + m - 1);
    growth * &k * &k / e_rat(big_n, m)
}

/// `‖φ_{N+m}‖²` for `m = 0..=max_m` by iterating [`ladder_step`].
pub fn norm_ladder_by_recursion(big_n: u64, n: u64, max_m: u64) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max_m as usize + 1);
    let mut cur = Rational::one();
    out.push(cur.clone());
    for m in 1..=max_m {
        cur *= ladder_step(big_n, n, m);
        out.push(cur.clone());
    }
    out
}

/// `a_l = (N+1)_l/(n+N+α+1)_l · (N)_l (N)_l/(2N)_l · 1/l! · Π_{j=1}^l (1 + (n-1)/(N+j))`.
pub fn a_seq(p: &LadderParams, l: u64) -> Result<Rational> {
    let base = rat_int(p.n + p.big_n + 1) + &p.alpha;
    let den_poch = pochhammer(&base, l);
    if den_poch.is_zero() {
        return Err(Error::GammaPole(format!("(n+N+α+1)_l vanishes for α = {}", p.alpha)));
    }
    let nn = rat_int(p.big_n);
    let mut prod = Rational::one();
    for j in 1..=l {
        prod *= Rational::new(BigInt::from(p.big_n + j + p.n - 1), BigInt::from(p.big_n + j));
    }
    Ok(pochhammer(&(nn.clone() + Rational::one()), l) / den_poch * pochhammer(&nn, l) * pochhammer(&nn, l)
        / pochhammer(&rat_int(2 * p.big_n), l)
        / factorial(l)
        * prod)
}

/// `a_0, ..., a_{max_l}` by the term ratio
/// `a_{l+1}/a_l = (l+N)² (l+n+N) / ((l+1)(l+2N)(l+n+N+α+1))`.
pub fn a_seq_by_ratio(p: &LadderParams, max_l: u64) -> Result<Vec<Rational>> {
    let mut out = vec![Rational::one()];
    for l in 0..max_l {
        let r = a_ratio(p, l)?;
        let next = out[l as usize].clone() / r;
        out.push(next);
    }
    Ok(out)
}

/// `a_l / a_{l+1} = (l+1)(l+2N)(l+n+N+α+1) / ((l+N)² (l+n+N))`.
pub fn a_ratio(p: &LadderParams, l: u64) -> Result<Rational> {
    let num = rat_int(l + 1) * rat_int(l + 2 * p.big_n) * (rat_int(l + p.n + p.big_n + 1) + &p.alpha);
    if num.is_zero() {
        return Err(Error::GammaPole(format!("a_{} vanishes for α = {}", l + 1, p.alpha)));
    }
    let k = rat_int(l + p.big_n);
    Ok(num / (&k * &k * rat_int(l + p.n + p.big_n)))
}

/// Raabe diagnostics on `l (a_l/a_{l+1} - 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct RaabeDiagnostics {
    pub big_n: u64,
    pub n: u64,
    pub alpha: String,
    pub max_l: u64,
    /// `(l, l (a_l/a_{l+1} - 1))` over the fitted window `[L/2, L]`.
    #[serde(skip)]
    pub tail: Vec<(u64, Rational)>,
    /// Value at `l = L`.
    pub last: f64,
    /// Least-squares fit `c0 + c1/l + c2/l²` over the window; `c0` estimates the limit.
    pub fitted_limit: f64,
    /// Gauss exponent `h` in `a_l/a_{l+1} = 1 + h/l + O(1/l²)`, read off the
    /// ratio polynomials exactly. Equals `2 + α`.
    #[serde(serialize_with = "super::weights::serialize_rational")]
    pub gauss_exponent: Rational,
    /// `Σ a_l` converges iff `h > 1` (Gauss's test).
    pub converges: bool,
}

/// Raabe sequence over `[L/2, L]`, its fitted limit and the exact Gauss verdict.
pub fn raabe_diag(p: &LadderParams, max_l: u64) -> Result<RaabeDiagnostics> {
    if max_l < 100 {
        return Err(Error::InvalidConfig(format!("raabe window needs L ≥ 100, got {max_l}")));
    }
    let mut tail = Vec::new();
    for l in max_l / 2..=max_l {
        let r = a_ratio(p, l)?;
        tail.push((l, rat_int(l) * (r - Rational::one())));
    }
    let fitted_limit = fit_limit(&tail.iter().map(|(l, v)| (*l as f64, rat_to_f64(v))).collect::<Vec<_>>());
    // numerator minus denominator, coefficient of l²; both are monic cubics
    let num_l2 = rat_int(1) + rat_int(2 * p.big_n) + rat_int(p.n + p.big_n + 1) + &p.alpha;
    let den_l2 = rat_int(2 * p.big_n) + rat_int(p.n + p.big_n);
    let gauss_exponent = num_l2 - den_l2;
    let converges = gauss_exponent > Rational::one();
    Ok(RaabeDiagnostics {
        big_n: p.big_n,
        n: p.n,
        alpha: p.alpha.to_string(),
        max_l,
        last: rat_to_f64(&tail.last().expect("window is nonempty").1),
        tail,
        fitted_limit,
        gauss_exponent,
        converges,
    })
}

/// Least squares for `y ≈ c0 + c1 x + c2 x²` with `x = L/l`, returning `c0`.
fn fit_limit(points: &[(f64, f64)]) -> f64 {
    let scale = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for &(l, y) in points {
        let x = scale / l;
        let row = [1.0, x, x * x];
        for r in 0..3 {
            aty[r] += row[r] * y;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    // Cramer's rule on the 3x3 normal equations
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut m0 = ata;
    for r in 0..3 {
        m0[r][0] = aty[r];
    }
    det(&m0) / det(&ata)
}

/// Partial sums of `(1/n!) Σ_{m ≤ M} ‖φ_m‖² m! Γ(n+α+1)/Γ(n+m+α+1)`, the
/// coefficient of `π^n` in `‖f‖²_α`.
pub fn weighted_norm_assemble(coeff_norms: &[Rational], n: u64, alpha: &Alpha) -> Result<Vec<Value>> {
    if let Some(q) = coeff_norms.iter().find(|q| **q < Rational::zero()) {
        return Err(Error::InvalidConfig(format!("negative coefficient norm {q}")));
    }
    let n_fact = factorial(n);
    match alpha {
        Alpha::Exact(a) => {
            let base = rat_int(n + 1) + a;
            let mut acc = Rational::zero();
            // m! / (n+α+1)_m, updated one factor at a time
            let mut weight = Rational::one() / &n_fact;
            let mut out = Vec::with_capacity(coeff_norms.len());
            for (m, q) in coeff_norms.iter().enumerate() {
                if m > 0 {
                    let f = &base + rat_int(m as u64 - 1);
                    if f.is_zero() {
                        return Err(Error::GammaPole(format!("Γ(n+m+α+1) at m = {m}, α = {a}")));
                    }
                    weight = weight * rat_int(m as u64) / f;
                }
                if !q.is_zero() {
                    acc += q * &weight;
                }
                out.push(Value::Exact(acc.clone()));
            }
            Ok(out)
        }
        Alpha::Approx(a) => {
            let base = (n + 1) as f64 + a;
            let mut acc = 0.0;
            let mut weight = 1.0 / rat_to_f64(&n_fact);
            let mut out = Vec::with_capacity(coeff_norms.len());
            for (m, q) in coeff_norms.iter().enumerate() {
                if m > 0 {
                    weight *= m as f64 / (base + (m - 1) as f64);
                }
                acc += rat_to_f64(q) * weight;
                out.push(Value::Approx(acc));
            }
            Ok(out)
        }
    }
}

/// Coefficient norms `‖φ_m‖²`, `m = 0..=N+max_l`, of the ladder started at `ψ`.
pub fn ladder_coeff_norms(big_n: u64, n: u64, max_l: u64) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); big_n as usize];
    out.extend(norm_ladder_by_recursion(big_n, n, max_l));
    out
}

/// `Γ(n+α+1) Γ(N+1) / (n! Γ(N+n+α+1))`, the factor relating the assembled
/// ladder norm to `Σ a_l`.
pub fn a_seq_prefactor(p: &LadderParams) -> Result<Rational> {
    let poch = pochhammer(&(rat_int(p.n + 1) + &p.alpha), p.big_n);
    if poch.is_zero() {
        return Err(Error::GammaPole(format!("Γ(N+n+α+1) for α = {}", p.alpha)));
    }
    Ok(factorial(p.big_n) / poch / factorial(p.n))
}

/// `b_m = m² Γ(n+2) (m+1)! / Γ(n+m+3) · ‖φ_m‖²` for `m = N..=max_m`.
pub fn dbar_tail_bound(big_n: u64, n: u64, max_m: u64) -> Vec<(u64, Rational)> {
    if max_m < big_n {
        return Vec::new();
    }
    let norms = norm_ladder_by_recursion(big_n, n, max_m - big_n);
    // (n+1)! (m+1)! / (n+m+2)! = (n+1)! / ((m+2)_{n+1})
    let n1_fact = factorial(n + 1);
    (big_n..=max_m)
        .zip(norms)
        .map(|(m, q)| {
            let mm = rat_int(m);
            (m, &mm * &mm * &n1_fact / pochhammer(&rat_int(m + 2), n + 1) * q)
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x` over the upper half of the
/// samples; near zero for a sequence that settles to a constant.
pub fn tail_log_slope(samples: &[(u64, f64)]) -> f64 {
    let tail = &samples[samples.len() / 2..];
    let k = tail.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(m, y) in tail {
        let (x, y) = ((m as f64).ln(), y.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (k * sxy - sx * sy) / (k * sxx - sx * sx)
}

/// One row of the ladder table.
#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    pub m: u64,
    /// `E_{N,m}`.
    pub e: u64,
    /// `‖φ_{N+m}‖²`.
    pub ladder: f64,
    /// `a_m`.
    pub a: f64,
    /// `m (a_m/a_{m+1} - 1)`.
    pub raabe: f64,
    /// `b_{N+m}`.
    pub b: f64,
}

/// The ladder quantities for `m = 0..=max_m`, computed exactly and rendered as `f64`.
pub fn ladder_table(p: &LadderParams, max_m: u64) -> Result<Vec<LadderRow>> {
    let norms = norm_ladder_by_recursion(p.big_n, p.n, max_m);
    let a = a_seq_by_ratio(p, max_m)?;
    let b = dbar_tail_bound(p.big_n, p.n, p.big_n + max_m);
    (0..=max_m)
        .map(|m| {
            let raabe = rat_int(m) * (a_ratio(p, m)? - Rational::one());
            Ok(LadderRow {
                m,
                e: m * (2 * p.big_n + m - 1),
                ladder: rat_to_f64(&norms[m as usize]),
                a: rat_to_f64(&a[m as usize]),
                raabe: rat_to_f64(&raabe),
                b: rat_to_f64(&b[m as usize].1),
            })
        })
        .collect()
}

/// CSV rendering of [`ladder_table`] with header `m,E,ladder,a_l,raabe_diag,b_m`.
pub fn ladder_csv(rows: &[LadderRow]) -> String {
    let mut s = String::from("m,E,ladder,a_l,raabe_diag,b_m\n");
    for r in rows {
        s.push_str(&format!("{},{},{:e},{:e},{:e},{:e}\n", r.m, r.e, r.ladder, r.a, r.raabe, r.b));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::weights::rat;
    use crate::sym::eigenvalue_e_by_recursion;

    fn params(big_n: u64, n: u64, alpha: Rational) -> LadderParams {
        LadderParams::new(big_n, n, alpha).unwrap()
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(norm_ladder(3, 1, 0), rat(1, 1));
        assert_eq!(norm_ladder(3, 1, 1), rat(3, 2));
        assert_eq!(norm_ladder(3, 2, 1), rat(15, 8));
        // (1+0) (N+m-1)^2 / E_{3,1} with E_{3,1} = 6
        assert_eq!(ladder_step(3, 1, 1), rat(9, 6));
    }

    #[test]
    fn closed_form_matches_recursion() {
        for big_n in 1..=10 {
            for n in 1..=4 {
                let rec = norm_ladder_by_recursion(big_n, n, 50);
                for m in 0..=50 {
                    assert_eq!(norm_ladder(big_n, n, m), rec[m as usize], "N={big_n} n={n} m={m}");
                    assert_eq!(eigenvalue_e(big_n, m), eigenvalue_e_by_recursion(big_n, m));
                }
            }
        }
    }

    #[test]
    fn a_seq_examples() {
        assert_eq!(a_seq(&params(3, 2, rat(0, 1)), 0).unwrap(), rat(1, 1));
        assert_eq!(a_seq(&params(3, 2, rat(0, 1)), 1).unwrap(), rat(5, 4));
        assert_eq!(a_seq(&params(3, 1, rat(0, 1)), 1).unwrap(), rat(6, 5));
        for (big_n, n, a) in [(3, 1, rat(0, 1)), (4, 2, rat(-1, 2)), (2, 3, rat(7, 3)), (5, 1, rat(-1, 1))] {
            let p = params(big_n, n, a);
            let by_ratio = a_seq_by_ratio(&p, 60).unwrap();
            for l in 0..=60 {
                let direct = a_seq(&p, l).unwrap();
                assert_eq!(direct, by_ratio[l as usize]);
                assert!(direct > Rational::zero());
            }
        }
    }

    #[test]
    fn raabe_limits() {
        for (num, den) in [(-1, 1), (-1, 2), (0, 1), (1, 1), (2, 1)] {
            let a = rat(num, den);
            let d = raabe_diag(&params(3, 1, a.clone()), 10_000).unwrap();
            let target = 2.0 + rat_to_f64(&a);
            assert!((d.fitted_limit - target).abs() < 1e-3, "α={a}: {}", d.fitted_limit);
            assert_eq!(d.gauss_exponent, rat(2, 1) + &a);
            assert_eq!(d.converges, a > rat(-1, 1));
        }
        assert!(raabe_diag(&params(3, 1, rat(0, 1)), 50).is_err());
    }

    #[test]
    fn raabe_from_terms() {
        // small window computed from the terms themselves
        let p = params(3, 2, rat(1, 3));
        let terms = a_seq_by_ratio(&p, 201).unwrap();
        let d = raabe_diag(&p, 200).unwrap();
        for (l, v) in &d.tail {
            let direct = rat_int(*l) * (&terms[*l as usize] / &terms[*l as usize + 1] - Rational::one());
            assert_eq!(*v, direct);
        }
    }

    #[test]
    fn assembly_matches_a_series() {
        for (big_n, n, a) in [(3u64, 1u64, rat(0, 1)), (4, 2, rat(1, 1)), (5, 3, rat(-1, 2)), (3, 2, rat(5, 3))] {
            let p = params(big_n, n, a.clone());
            let norms = ladder_coeff_norms(big_n, n, 30);
            let sums = weighted_norm_assemble(&norms, n, &Alpha::Exact(a)).unwrap();
            let terms = a_seq_by_ratio(&p, 30).unwrap();
            let pre = a_seq_prefactor(&p).unwrap();
            let mut acc = Rational::zero();
            for l in 0..=30usize {
                acc += &terms[l];
                assert_eq!(sums[big_n as usize + l].exact().unwrap(), &(&pre * &acc));
            }
        }
    }

    #[test]
    fn assembly_degenerate_input() {
        let mut norms = vec![Rational::zero(); 5];
        norms[0] = rat(1, 1);
        for n in 1..=3 {
            let sums = weighted_norm_assemble(&norms, n, &Alpha::from(2)).unwrap();
            let expect = rat(1, 1) / factorial(n);
            assert!(sums.iter().all(|v| v.exact() == Some(&expect)));
        }
        assert!(weighted_norm_assemble(&[rat(-1, 1)], 1, &Alpha::from(0)).is_err());
    }

    #[test]
    fn partial_sums_at_boundary_weight() {
        // α = -1: terms decay like 1/l, partial sums keep growing
        let norms = ladder_coeff_norms(3, 1, 2000);
        let sums = |a: Rational| -> Vec<f64> {
            weighted_norm_assemble(&norms, 1, &Alpha::Exact(a)).unwrap().iter().map(Value::to_f64).collect()
        };
        let s = sums(rat(-1, 1));
        let scaled_term = |l: usize| l as f64 * (s[l] - s[l - 1]);
        assert!((scaled_term(2000) / scaled_term(1000) - 1.0).abs() < 0.01);
        assert!(s[2000] - s[1000] > 0.9 * scaled_term(1000) * 2f64.ln());
        let c = sums(rat(1, 1));
        assert!(c[2000] - c[1000] < 1e-3 * c[2000]);
    }

    #[test]
    fn tail_bound_behaviour() {
        for n in 1..=3 {
            let b = dbar_tail_bound(3, n, 1000);
            assert!(b.iter().all(|(_, q)| *q > Rational::zero()));
            let mb: Vec<(u64, f64)> = b.iter().map(|(m, q)| (*m, *m as f64 * rat_to_f64(q))).collect();
            assert!(tail_log_slope(&mb).abs() < 0.05, "n={n}");
            let ladder: Vec<(u64, f64)> = norm_ladder_by_recursion(3, n, 1000)
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, q)| (m as u64, rat_to_f64(q) * (m as f64).powi(2 - n as i32)))
                .collect();
            assert!(tail_log_slope(&ladder).abs() < 0.05, "n={n}");
        }
    }

    #[test]
    fn table_rows() {
        let p = params(3, 1, rat(0, 1));
        let rows = ladder_table(&p, 5).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].e, 6);
        assert!((rows[1].ladder - 1.5).abs() < 1e-15);
        assert!((rows[1].a - 1.2).abs() < 1e-15);
        assert!(ladder_csv(&rows).starts_with("m,E,ladder,a_l,raabe_diag,b_m\n0,0,"));
    }
}
