//! The checks behind each subcommand, producing [`Record`]s.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{LadderConfig, Record, RunConfig};
use crate::analysis::{
    a_seq_by_ratio, a_seq_prefactor, dbar_tail_bound, ladder_coeff_norms, moment_assembly_check, monomial_moment,
    monte_carlo_moment, norm_ladder, norm_ladder_by_recursion, raabe_diag, rat, rat_to_f64, tail_log_slope,
    weighted_norm_assemble, Alpha, LadderParams, Rational,
};
use crate::ball::{t_map_coords, BallPair, Point};
use crate::error::Result;
use crate::frame::{ball_ids, frame_ids, identity_suite, SuiteConfig};
use crate::group::{invariance_residual, jacobian_inequality_residual, GroupElement, PoincareSeries, WordEnumerator};
use crate::jets::{
    diagonal_jet, parse_function_spec, psi_equivariance, psi_extract, residual_pair, w_taylor, JetConfig, PsiResult,
};
use crate::sampling::Sampler;
use crate::sym::{
    curvature_action, eigenvalue_e, eigenvalue_e_by_recursion, one_form_norm_sq, raising_rg, sym_inner, Frame, MultiIndex,
    SymCoeffs,
};

/// Function specs checked by default.
pub const CATALOG_FUNCTIONS: &[&str] = &["const", "exp", "(z-w)^3", "(z-w)^4", "prod:0:1:4", "expdiff:3"];

fn seed_for(seed: u64, tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64 ^ seed, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Ball and frame identity catalogs plus the exact symmetric-power sweeps.
pub fn verify_records(cfg: &RunConfig) -> Result<Vec<Record>> {
    let suite = |ids: &[&str], samples: usize| {
        let sc = SuiteConfig { seed: cfg.seed, samples, dims: cfg.dims.clone(), ..SuiteConfig::default() };
        identity_suite(ids, &sc)
    };
    let mut out: Vec<Record> = Vec::new();
    let ball = ball_ids();
    let frame: Vec<&str> = frame_ids().into_iter().filter(|id| crate::frame::lookup(id).map(|s| s.default_run).unwrap_or(false)).collect();
    for o in suite(&ball, cfg.ball_samples)?.into_iter().chain(suite(&frame, cfg.frame_samples)?) {
        out.push(Record::below(o.id, o.samples, o.max_residual, o.tol));
    }
    out.extend(sym_records());
    Ok(out)
}

/// `‖R_G u‖² = (m+n)/(m+1) ‖u‖²` and `R_Θ = 2m R_G` on every basis element, exactly.
pub fn sym_records() -> Vec<Record> {
    let q = |k: usize| BigRational::from_integer(BigInt::from(k));
    let (mut count, mut bad) = (0, 0);
    for n in 1..=3 {
        for m in 0..=6 {
            for i in MultiIndex::enumerate(n, m) {
                let u = SymCoeffs::<BigRational>::basis(i, Frame::E);
                let lhs = raising_rg(&u).map(|r| one_form_norm_sq(&r));
                let rhs = sym_inner(&u, &u).map(|s| q(m + n) / q(m + 1) * s);
                count += 1;
                if !matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b) {
                    bad += 1;
                }
            }
        }
    }
    let mut out = vec![Record::exact("SYM-RG-NORM", count, bad)];
    let (mut count, mut bad) = (0, 0);
    for n in 1..=3 {
        for m in 0..=5 {
            for i in MultiIndex::enumerate(n, m) {
                let u = SymCoeffs::<BigRational>::basis(i, Frame::E);
                count += 1;
                let ok = match (curvature_action(&u), raising_rg(&u)) {
                    (Ok(a), Ok(b)) => a.sub(&b.scale(&q(2 * m))).map(|d| d.entries().all(|(_, v)| v.is_zero())).unwrap_or(false),
                    _ => false,
                };
                if !ok {
                    bad += 1;
                }
            }
        }
    }
    out.push(Record::exact("SYM-CURVATURE", count, bad));
    out
}

/// Largest entry of a per-point result list; errors count as infinite.
fn worst(values: &[Result<f64>]) -> f64 {
    values.iter().map(|r| match r {
        Ok(x) if !x.is_nan() => *x,
        _ => f64::INFINITY,
    })
    .fold(0.0, f64::max)
}

#[derive(Default)]
struct JetStats {
    consistency: Vec<Result<f64>>,
    leading: Vec<Result<f64>>,
    compat: Vec<Result<f64>>,
    dbar: Vec<Result<f64>>,
    agree: Vec<Result<f64>>,
}

/// Jet checks over the configured functions and dimensions: jet consistency
/// plus the leading-jet oracle, then both residual paths of the
/// compatibility relation.
pub fn jets_records(cfg: &RunConfig, functions: &[String]) -> Result<Vec<Record>> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![1, 2]);
    let mut st = JetStats::default();
    for spec in functions {
        let f = parse_function_spec::<f64>(spec)?;
        for &n in &dims {
            let mut s = Sampler::new(seed_for(cfg.seed, &format!("jets/{spec}/{n}")));
            let zs: Vec<Point<f64>> = (0..cfg.jet_base_points).map(|_| s.point(n, 0.8)).collect();
            let rows: Vec<[Result<f64>; 4]> = zs
                .par_iter()
                .map(|z| {
                    let consistency = (|| {
                        let a = diagonal_jet(&*f, z, 6, &JetConfig { radius: 0.2, grid: 64 })?;
                        let b = diagonal_jet(&*f, z, 6, &JetConfig { radius: 0.3, grid: 128 })?;
                        Ok(a.coeff.iter().map(|(i, v)| (v - b.get(i)).norm()).fold(0.0, f64::max))
                    })();
                    let pair = residual_pair(&*f, z, cfg.max_degree, &cfg.residual);
                    let (c, d, m) = match pair {
                        Ok(p) => (Ok(p.compat), Ok(p.dbar), Ok(p.mismatch)),
                        Err(e) => (Err(e.clone()), Err(e.clone()), Err(e)),
                    };
                    [consistency, c, d, m]
                })
                .collect();
            for [a, b, c, d] in rows {
                st.consistency.push(a);
                st.compat.push(b);
                st.dbar.push(c);
                st.agree.push(d);
            }
            st.leading.push(leading_jet_error(&*f, &zs, &cfg.residual.jet));
        }
    }
    let k = st.compat.len();
    Ok(vec![
        Record::below("JET-CONSISTENCY", k, worst(&st.consistency), 1e-9),
        Record::below("LEADING-JET", k, worst(&st.leading), 1e-8),
        Record::below("COMPAT", k, worst(&st.compat), 1e-5),
        Record::below("DBAR-PHI", k, worst(&st.dbar), 1e-5),
        Record::below("PATHS-AGREE", k, worst(&st.agree), 1e-10),
    ])
}

/// dz-frame Ψ coefficients against `(1/I!) ∂_w^I f(z, w)|_{w=z}`.
fn leading_jet_error<F: crate::jets::HoloFunction<f64> + ?Sized>(f: &F, zs: &[Point<f64>], jet: &JetConfig) -> Result<f64> {
    let p = psi_extract(f, zs, 6, 1e-8, jet)?;
    let mut worst = 0.0f64;
    for (z, u) in &p.dz_frame.samples {
        let oracle = w_taylor(f, z, p.degree, 32)?;
        for i in MultiIndex::enumerate(z.dim(), p.degree) {
            worst = worst.max((u.get(&i) - oracle[&i]).norm());
        }
    }
    Ok(worst)
}

/// Smallest `rhs - lhs` of the Jacobian inequality over random elements of
/// a two-generator group, words up to `word_len`.
pub fn jacobian_sweep(n: usize, samples: usize, word_len: usize, seed: u64) -> Result<f64> {
    let mut s = Sampler::new(seed_for(seed, &format!("jacobian/{n}")));
    let gens = vec![GroupElement::<f64>::random(&mut s, n, 1.0), GroupElement::random(&mut s, n, 1.0)];
    let elements = WordEnumerator::new(gens, word_len).enumerate()?;
    let picks: Vec<(usize, Point<f64>, Point<f64>)> =
        (0..samples).map(|_| (s.index(elements.len()), s.point(n, 0.9), s.point(n, 0.9))).collect();
    Ok(picks
        .par_iter()
        .map(|(k, z, w)| jacobian_inequality_residual(&elements[*k].element, z, w))
        .reduce(|| f64::INFINITY, f64::min))
}

/// Jacobian inequality in each configured dimension (default 1 to 3).
pub fn jacobian_records(cfg: &RunConfig) -> Result<Vec<Record>> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![1, 2, 3]);
    dims.iter()
        .map(|&n| {
            let min = jacobian_sweep(n, cfg.jacobian_samples, cfg.jacobian_word_len, cfg.seed)?;
            Ok(Record::below(format!("JACOBIAN-INEQUALITY-N{n}"), cfg.jacobian_samples, -min, 1e-10))
        })
        .collect()
}

/// Output of the Poincaré-series pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct PoincareRun {
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    pub elements: usize,
    /// Tail estimate at the sampled pairs.
    pub tail: f64,
    pub invariance_residual: f64,
    pub psi: Option<PsiResult<f64>>,
    pub max_psi: f64,
}

/// Builds the series and checks its invariance, then extracts Ψ and checks
/// its equivariance.
pub fn poincare_run(cfg: &RunConfig) -> Result<PoincareRun> {
    let pc = &cfg.poincare;
    let spec = &pc.group;
    let enumerator = spec.enumerator::<f64>()?;
    let generators = enumerator.generators.clone();
    let elements = enumerator.enumerate()?;
    let series = PoincareSeries::new(&elements, pc.power, pc.weight);
    let warnings = series.threshold_warnings();
    let n = spec.dimension;
    let mut s = Sampler::new(seed_for(cfg.seed, "poincare"));
    let pairs: Vec<BallPair<f64>> =
        (0..pc.base_points).map(|_| BallPair::new(s.point(n, pc.radius), s.point(n, pc.radius))).collect::<Result<_>>()?;
    let mut all_pairs = pairs.clone();
    for g in &generators {
        for p in &pairs {
            all_pairs.push(BallPair::new(g.act(&p.z), g.act(&p.w))?);
        }
    }
    let tail = series.max_tail(&all_pairs);
    let invariance = generators.iter().map(|g| invariance_residual(&series, g, &pairs)).fold(0.0, f64::max);
    let mut records = vec![Record::below("SERIES-INVARIANCE", pairs.len() * generators.len(), invariance, 3.0 * tail)];

    let zs: Vec<Point<f64>> = pairs.iter().map(|p| p.z.clone()).collect();
    let jet = &cfg.residual.jet;
    let order = pc.power as usize + 2;
    let psi = match psi_extract(&series, &zs, order, 1e-8, jet) {
        Ok(p) => p,
        Err(e) => {
            records.push(Record::exact("PSI-DEGREE", zs.len(), 1));
            log::warn!("Ψ extraction failed: {e}");
            return Ok(PoincareRun { records, warnings, elements: elements.len(), tail, invariance_residual: invariance, psi: None, max_psi: 0.0 });
        }
    };
    records.push(Record::exact("PSI-DEGREE", zs.len(), usize::from(psi.degree != pc.power as usize)));

    // the jets sample the series on the torus w = T_z(t), |t_j| = radius
    let mut torus_pairs = Vec::new();
    for z in zs.iter().cloned().chain(generators.iter().flat_map(|g| zs.iter().map(move |z| g.act(z)))) {
        for k in 0..4 {
            let th = std::f64::consts::FRAC_PI_2 * k as f64;
            let t = vec![Complex::from_polar(jet.radius, th); n];
            torus_pairs.push(BallPair::new(z.clone(), Point::new(t_map_coords(z.coords(), &t))?)?);
        }
    }
    // Cauchy estimate: a degree-d coefficient read off the torus of radius r
    // moves by at most tail / r^d
    let psi_tail = series.max_tail(&torus_pairs) / jet.radius.powi(psi.degree as i32);
    let mut equiv = 0.0f64;
    for g in &generators {
        equiv = equiv.max(psi_equivariance(&series, g, &zs, psi.degree, jet)?.0);
    }
    records.push(Record::below("PSI-EQUIVARIANCE", zs.len() * generators.len(), equiv, 1e-5f64.max(3.0 * psi_tail)));
    let max_psi = psi.dz_frame.max_abs();
    records.push(Record::above("PSI-NONZERO", zs.len(), max_psi, 1e-6));
    Ok(PoincareRun { records, warnings, elements: elements.len(), tail, invariance_residual: invariance, psi: Some(psi), max_psi })
}

/// Exact ladder identities, Raabe and Gauss diagnostics, tail-bound growth,
/// the weighted-norm assembly and the Monte-Carlo moment check.
pub fn analysis_records(cfg: &RunConfig) -> Result<Vec<Record>> {
    let mut out = ladder_records();
    out.extend(raabe_records(&cfg.ladder)?);
    out.extend(tail_records(cfg.ladder.big_n));
    out.extend(assembly_records(cfg)?);
    Ok(out)
}

/// Closed-form ladder against its recursion and `E_{N,m}` against its own,
/// exactly, for `N ≤ 10`, `n ≤ 4`, `m ≤ 50`.
pub fn ladder_records() -> Vec<Record> {
    let mut out = Vec::new();
    let (mut count, mut bad) = (0, 0);
    for big_n in 1..=10u64 {
        for n in 1..=4u64 {
            let rec = norm_ladder_by_recursion(big_n, n, 50);
            for m in 0..=50u64 {
                count += 1;
                if norm_ladder(big_n, n, m) != rec[m as usize] {
                    bad += 1;
                }
            }
        }
    }
    out.push(Record::exact("LADDER-CLOSED-FORM", count, bad));
    let bad = (1..=10u64).flat_map(|nn| (0..=50u64).map(move |m| (nn, m))).filter(|&(nn, m)| eigenvalue_e(nn, m) != eigenvalue_e_by_recursion(nn, m)).count();
    out.push(Record::exact("LADDER-EIGENVALUE", 510, bad));
    out
}

/// Raabe limits `2 + α` at the configured window and the Gauss verdict.
pub fn raabe_records(lc: &LadderConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let alphas = [rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 1), rat(2, 1)];
    let mut verdict_bad = 0;
    for a in &alphas {
        let p = LadderParams::new(lc.big_n, lc.n, a.clone())?;
        let d = raabe_diag(&p, lc.max_l)?;
        let target = 2.0 + rat_to_f64(a);
        out.push(Record::below(format!("RAABE[{a}]"), d.tail.len(), (d.fitted_limit - target).abs(), 1e-3));
        if d.converges != (*a > rat(-1, 1)) {
            verdict_bad += 1;
        }
    }
    out.push(Record::exact("GAUSS-VERDICT", alphas.len(), verdict_bad));
    Ok(out)
}

/// Boundedness of `m b_m` and of `ladder · m^{2-n}` up to `m = 1000`, read
/// from the log-log slope of the tail.
pub fn tail_records(big_n: u64) -> Vec<Record> {
    let mut slope_b = 0.0f64;
    let mut slope_ladder = 0.0f64;
    for n in 1..=3u64 {
        let b = dbar_tail_bound(big_n, n, 1000);
        let mb: Vec<(u64, f64)> = b.iter().map(|(m, q)| (*m, *m as f64 * rat_to_f64(q))).collect();
        slope_b = slope_b.max(tail_log_slope(&mb).abs());
        let lad: Vec<(u64, f64)> = norm_ladder_by_recursion(big_n, n, 1000)
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, q)| (m as u64, rat_to_f64(q) * (m as f64).powi(2 - n as i32)))
            .collect();
        slope_ladder = slope_ladder.max(tail_log_slope(&lad).abs());
    }
    vec![Record::below("TAIL-BOUND", 3, slope_b, 0.05), Record::below("LADDER-GROWTH", 3, slope_ladder, 0.05)]
}

/// Moment expansion against the symmetric-differential series, exactly and
/// in floating point, and the moments against Monte-Carlo quadrature.
pub fn assembly_records(cfg: &RunConfig) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    let mut s = Sampler::new(seed_for(cfg.seed, "assembly"));
    let table = |s: &mut Sampler, n: usize| -> BTreeMap<MultiIndex, Rational> {
        MultiIndex::enumerate_up_to(n, 5).into_iter().map(|i| (i, rat(s.index(100) as i64 + 1, s.index(9) as i64 + 1))).collect()
    };
    let (mut count, mut bad) = (0, 0);
    for n in 1..=3 {
        for a in [rat(0, 1), rat(1, 1), rat(4, 1), rat(-1, 2), rat(7, 3)] {
            count += 1;
            if moment_assembly_check(n, &Alpha::Exact(a), &table(&mut s, n))?.mismatch != 0.0 {
                bad += 1;
            }
        }
    }
    for (big_n, n, a) in [(3u64, 1u64, rat(0, 1)), (4, 2, rat(1, 1)), (5, 3, rat(-1, 2))] {
        count += 1;
        let p = LadderParams::new(big_n, n, a.clone())?;
        let sums = weighted_norm_assemble(&ladder_coeff_norms(big_n, n, 40), n, &Alpha::Exact(a))?;
        let terms = a_seq_by_ratio(&p, 40)?;
        let total: Rational = terms.iter().fold(Rational::zero(), |acc, t| acc + t);
        if sums.last().and_then(|v| v.exact()) != Some(&(a_seq_prefactor(&p)? * total)) {
            bad += 1;
        }
    }
    out.push(Record::exact("ASSEMBLY-EXACT", count, bad));
    let mut float_err = 0.0f64;
    for n in 1..=3 {
        for a in [std::f64::consts::E - 2.0, std::f64::consts::SQRT_2, std::f64::consts::PI / 7.0] {
            float_err = float_err.max(moment_assembly_check(n, &Alpha::Approx(a), &table(&mut s, n))?.mismatch);
        }
    }
    out.push(Record::below("ASSEMBLY-FLOAT", 9, float_err, 1e-10));

    let mut mc_err = 0.0f64;
    for k in 0..10u64 {
        let n = 1 + s.index(3);
        let i = MultiIndex::new((0..n).map(|_| s.index(3) as u32).collect());
        let a = s.range(0.0, 2.0);
        let exact = monomial_moment(&i, &Alpha::Approx(a))?.to_f64();
        let (est, _) = monte_carlo_moment(&i, a, cfg.moment_samples, seed_for(cfg.seed, &format!("moment/{k}")));
        mc_err = mc_err.max(((est - exact) / exact).abs());
    }
    out.push(Record::below("MOMENT-MC", 10, mc_err, 1e-3));
    Ok(out)
}
