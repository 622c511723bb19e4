//! Catalog of ball and frame identities, each checked as a sampled residual.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bc::{absum_residual, b2_closed_form, bc_expand};
use super::connection::frame_a_derivatives;
use super::wirtinger::{wirtinger_vec, Kind, WirtingerConfig};
use crate::ball::{
    bergman_metric, delta, dt_dz, dt_dzbar, frame_a, frame_a_inv, hdot, norm_sq, real_jacobian, s_z, t_diff,
    t_diff_origin_closed, t_diff_self_closed, t_hessian_at_self, t_map, t_map_coords, Point,
};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::ComplexMatrix;
use crate::sampling::{Sampler, SAMPLE_RADIUS};

type C64 = Complex<f64>;
type P = Point<f64>;

/// Largest boost parameter for random automorphisms in the suite.
const GROUP_TAU: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceClass {
    /// Exact formulas evaluated in floating point.
    ClosedForm,
    /// Involves finite-difference derivatives.
    FiniteDifference,
}

type Check = fn(&Ctx, &mut Sampler, usize) -> Result<f64>;

/// One catalog entry.
pub struct IdentitySpec {
    pub id: &'static str,
    pub summary: &'static str,
    pub class: ToleranceClass,
    pub tol: f64,
    pub dims: &'static [usize],
    /// Included when no ids are requested explicitly.
    pub default_run: bool,
    check: Check,
}

impl std::fmt::Debug for IdentitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentitySpec").field("id", &self.id).field("tol", &self.tol).finish()
    }
}

struct Ctx {
    fd: WirtingerConfig,
}

const BALL_DIMS: &[usize] = &[1, 2, 3];
const FRAME_DIMS: &[usize] = &[1, 2];

const fn spec(id: &'static str, summary: &'static str, class: ToleranceClass, tol: f64, dims: &'static [usize], check: Check) -> IdentitySpec {
    IdentitySpec { id, summary, class, tol, dims, default_run: true, check }
}

static CATALOG: &[IdentitySpec] = &[
    spec("INVOLUTION", "T_z(T_z(w)) = w", ToleranceClass::ClosedForm, 1e-12, BALL_DIMS, involution),
    spec("EQ22", "1 - T_z(w)·z̄ = (1-|z|^2)/(1 - w·z̄)", ToleranceClass::ClosedForm, 1e-12, BALL_DIMS, eq22),
    spec("EQ24", "1 - |T_z w|^2 = (1-|z|^2)(1-|w|^2)/|1 - z·w̄|^2", ToleranceClass::ClosedForm, 1e-12, BALL_DIMS, eq24),
    spec("DT-ORIGIN", "dT_z(0) = -(1-|z|^2)P_z - s_z Q_z", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, dt_origin),
    spec("DT-JACOBIAN", "real Jacobian of T_z at 0 is (1-|z|^2)^(n+1)", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, dt_jacobian),
    spec("DT-SELF", "dT_z(z) = -P_z/(1-|z|^2) - Q_z/s_z", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, dt_self),
    spec("METRIC-FRAME", "B(z) = A*A with A = dT_z(z)", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, metric_frame),
    spec("METRIC-INVARIANCE", "B(z) = dγ(z)* B(γz) dγ(z)", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, metric_invariance),
    spec("DT-PRODUCT", "dT_z(0) dT_z(z) = I", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, dt_product),
    spec("DELTA-INVARIANCE", "δ(γz, γw) = δ(z, w)", ToleranceClass::ClosedForm, 1e-10, BALL_DIMS, delta_invariance),
    spec("FORMULA3", "Σ_k ∂(T_z w)_k/∂z̄_j z̄_k at w = T_z t", ToleranceClass::ClosedForm, 1e-8, FRAME_DIMS, formula3),
    spec("FORMULA9", "Hermitian pairing of ∂(T_z w)/∂z̄_j with t at w = T_z t", ToleranceClass::ClosedForm, 1e-8, FRAME_DIMS, formula9),
    spec("TAYLOR2", "Σ_k ∂(T_z w)_k/∂z_j z̄_k = z̄_j(1 - t·z̄)/(1-|z|^2)", ToleranceClass::ClosedForm, 1e-8, FRAME_DIMS, taylor2),
    spec("BC-DEGREE", "B has degree ≤ 2 and C degree ≤ 1 in t", ToleranceClass::ClosedForm, 1e-9, FRAME_DIMS, bc_degree),
    spec("BC2", "B^{jk}_l + conj(C^{jl}_k) = 0 and the closed form of B^{jk}_{kα}", ToleranceClass::ClosedForm, 1e-8, FRAME_DIMS, bc2),
    IdentitySpec {
        id: "BC2-SPARSITY",
        summary: "B^{jk}_l = 0 unless j = k = l, C^{jk}_l = 0 unless l = k",
        class: ToleranceClass::ClosedForm,
        tol: 1e-10,
        dims: FRAME_DIMS,
        default_run: false,
        check: bc2_sparsity,
    },
    spec("B-VIA-A", "B^{jk}_l = Σ_α ∂A_{kα}/∂z̄_j A^{αl}", ToleranceClass::FiniteDifference, 1e-6, FRAME_DIMS, b_via_a),
    spec("C-VIA-A", "C^{jk}_l = Σ_α (∂A_{kα}/∂z_j - ∂²(T_z w)_k/∂w_j∂w_α) A^{αl}", ToleranceClass::FiniteDifference, 1e-6, FRAME_DIMS, c_via_a),
    spec("DIAG-VANISH", "∂(T_z w)_k/∂z̄_j = 0 at w = z", ToleranceClass::FiniteDifference, 1e-8, FRAME_DIMS, diag_vanish),
    spec("ABSUM", "Σ_j conj(A^{jμ}) B^{jk}_{kα} = δ_{μα}", ToleranceClass::ClosedForm, 1e-8, FRAME_DIMS, absum),
    spec("FRAME-UNITARY", "U_z = A(γz) dγ(z) A(z)^{-1} is unitary and T_{γz}(γw) = U_z T_z(w)", ToleranceClass::ClosedForm, 1e-9, FRAME_DIMS, frame_unitary),
    spec("DBAR-CLOSED", "Σ_l ∂(A_{lm} conj(A_{lj}))/∂z̄_k is symmetric in (k, j)", ToleranceClass::FiniteDifference, 1e-6, FRAME_DIMS, dbar_closed),
];

/// The full catalog in a fixed order.
pub fn catalog() -> &'static [IdentitySpec] {
    CATALOG
}

pub fn lookup(id: &str) -> Result<&'static IdentitySpec> {
    CATALOG.iter().find(|s| s.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Ids of the ball-geometry identities.
pub fn ball_ids() -> Vec<&'static str> {
    CATALOG.iter().filter(|s| s.dims == BALL_DIMS).map(|s| s.id).collect()
}

/// Ids of the frame identities run by default.
pub fn frame_ids() -> Vec<&'static str> {
    CATALOG.iter().filter(|s| s.dims == FRAME_DIMS && s.default_run).map(|s| s.id).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Overrides the per-identity dimensions when set.
    pub dims: Option<Vec<usize>>,
    pub wirtinger: WirtingerConfig,
    pub tol_overrides: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            samples: 1000,
            dims: None,
            // fourth order keeps truncation error well below the finite-difference tolerances
            wirtinger: WirtingerConfig { h: 1e-5, order: 4 },
            tol_overrides: BTreeMap::new(),
        }
    }
}

/// Result of one identity over all its dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub id: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// `(n, sample index)` of the largest residual.
    pub worst: (usize, usize),
}

fn stream_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a, so streams differ per identity but not per run
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64 ^ seed, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Run the requested identities; an empty list means every default entry.
pub fn identity_suite(ids: &[&str], cfg: &SuiteConfig) -> Result<Vec<IdentityOutcome>> {
    cfg.wirtinger.validate()?;
    for id in cfg.tol_overrides.keys() {
        lookup(id)?;
    }
    let specs: Vec<&IdentitySpec> = if ids.is_empty() {
        CATALOG.iter().filter(|s| s.default_run).collect()
    } else {
        ids.iter().map(|id| lookup(id)).collect::<Result<_>>()?
    };
    let ctx = Ctx { fd: cfg.wirtinger };
    specs
        .into_iter()
        .map(|spec| {
            let dims: Vec<usize> = cfg.dims.clone().unwrap_or_else(|| spec.dims.to_vec());
            let base = stream_seed(cfg.seed, spec.id);
            let mut worst = (f64::NEG_INFINITY, (0, 0));
            for &n in &dims {
                let residuals: Vec<Result<f64>> = (0..cfg.samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut s = Sampler::fork(base, ((n as u64) << 40) | i as u64);
                        (spec.check)(&ctx, &mut s, n)
                    })
                    .collect();
                for (i, r) in residuals.into_iter().enumerate() {
                    // a non-finite residual counts as the worst possible
                    let r = r?;
                    let r = if r.is_nan() { f64::INFINITY } else { r };
                    if r > worst.0 {
                        worst = (r, (n, i));
                    }
                }
            }
            let tol = cfg.tol_overrides.get(spec.id).copied().unwrap_or(spec.tol);
            let max_residual = worst.0.max(0.0);
            Ok(IdentityOutcome {
                id: spec.id.to_string(),
                samples: cfg.samples * dims.len(),
                max_residual,
                tol,
                pass: max_residual < tol,
                worst: worst.1,
            })
        })
        .collect()
}

fn pt(s: &mut Sampler, n: usize) -> P {
    s.point(n, SAMPLE_RADIUS)
}

fn cabs(x: C64) -> f64 {
    x.norm()
}

fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn identity(n: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::identity(n)
}

fn involution(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, w) = (pt(s, n), pt(s, n));
    Ok(t_map(&z, &t_map(&z, &w)).max_diff(&w))
}

fn eq22(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, w) = (pt(s, n), pt(s, n));
    let one = C64::new(1.0, 0.0);
    let lhs = one - hdot(t_map(&z, &w).coords(), z.coords());
    let rhs = (1.0 - z.norm_sq()) / (one - hdot(w.coords(), z.coords()));
    Ok(cabs(lhs - rhs))
}

fn eq24(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, w) = (pt(s, n), pt(s, n));
    Ok((delta(&z, &w) - (1.0 - t_map(&z, &w).norm_sq())).abs())
}

fn dt_origin(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    Ok(t_diff(&z, &P::origin(n)).max_diff(&t_diff_origin_closed(&z)))
}

fn dt_jacobian(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    Ok((real_jacobian(&t_diff(&z, &P::origin(n))) - (1.0 - z.norm_sq()).powi(n as i32 + 1)).abs())
}

fn dt_self(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    Ok(t_diff(&z, &z).max_diff(&t_diff_self_closed(&z)))
}

fn metric_frame(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let a = frame_a(&z);
    Ok(bergman_metric(&z).entries().max_diff(&a.adjoint().matmul(&a)))
}

fn metric_invariance(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let g = GroupElement::<f64>::random(s, n, GROUP_TAU);
    let d = g.differential(&z);
    let pulled = d.adjoint().matmul(bergman_metric(&g.act(&z)).entries()).matmul(&d);
    Ok(bergman_metric(&z).entries().max_diff(&pulled))
}

fn dt_product(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    Ok(t_diff(&z, &P::origin(n)).matmul(&t_diff(&z, &z)).max_diff(&identity(n)))
}

fn delta_invariance(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, w) = (pt(s, n), pt(s, n));
    let g = GroupElement::<f64>::random(s, n, GROUP_TAU);
    Ok((delta(&g.act(&z), &g.act(&w)) - delta(&z, &w)).abs())
}

/// `(s-1)/|z|^2`, regular at the origin.
fn s_minus_one_over_r(z: &P) -> f64 {
    -1.0 / (1.0 + s_z(z))
}

fn formula3(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, t) = (pt(s, n), pt(s, n));
    let (zc, tc) = (z.coords(), t.coords());
    let one_r = 1.0 - z.norm_sq();
    let sz = s_z(&z);
    let k1 = -s_minus_one_over_r(&z) / one_r; // (1-s)/(|z|^2(1-|z|^2))
    let tz = hdot(tc, zc);
    let d = dt_dzbar(zc, &t_map_coords(zc, tc));
    let mut worst = 0.0f64;
    for j in 0..n {
        let lhs: C64 = (0..n).map(|k| d[(j, k)] * zc[k].conj()).sum();
        let rhs = tc[j] * (-1.0 + sz / one_r) + zc[j] * tz * k1 - tc[j] * tz * (sz / one_r) - zc[j] * tz * tz * k1;
        worst = worst.max(cabs(lhs - rhs));
    }
    Ok(worst)
}

fn formula9(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, t) = (pt(s, n), pt(s, n));
    let (zc, tc) = (z.coords(), t.coords());
    let one_r = 1.0 - z.norm_sq();
    let sz = s_z(&z);
    let k = s_minus_one_over_r(&z) / one_r; // (s-1)/(|z|^2(1-|z|^2))
    let tz = hdot(tc, zc);
    let tt = norm_sq(tc);
    let w = t_map_coords(zc, tc);
    let (db, dh) = (dt_dzbar(zc, &w), dt_dz(zc, &w));
    let mut worst = 0.0f64;
    for j in 0..n {
        let lhs: C64 = (0..n).map(|kk| db[(j, kk)] * tc[kk].conj() + dh[(j, kk)].conj() * tc[kk]).sum();
        let rhs = -zc[j] * tz * k + tc[j] * (sz / one_r) - tc[j] * (tt * sz / one_r) + zc[j] * tz * (tt * k);
        worst = worst.max(cabs(lhs - rhs));
    }
    Ok(worst)
}

fn taylor2(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, t) = (pt(s, n), pt(s, n));
    let (zc, tc) = (z.coords(), t.coords());
    let one_r = 1.0 - z.norm_sq();
    let tz = hdot(tc, zc);
    let d = dt_dz(zc, &t_map_coords(zc, tc));
    let mut worst = 0.0f64;
    for j in 0..n {
        let lhs: C64 = (0..n).map(|k| d[(j, k)] * zc[k].conj()).sum();
        let rhs = zc[j].conj() / one_r * (1.0 - tz);
        worst = worst.max(cabs(lhs - rhs));
    }
    Ok(worst)
}

fn bc_degree(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    Ok(bc_expand(&pt(s, n))?.degree_residual)
}

fn bc2(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let tb = bc_expand(&z)?;
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                worst = worst.max(cabs(tb.b1[j][k][l] + tb.c1[j][l][k].conj()));
                worst = worst.max(cabs(tb.b2(j, k, k, l) - b2_closed_form(&z, j, l)));
            }
        }
    }
    Ok(worst)
}

fn bc2_sparsity(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let tb = bc_expand(&pt(s, n))?;
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                if !(j == k && k == l) {
                    worst = worst.max(cabs(tb.b1[j][k][l]));
                }
                if l != k {
                    worst = worst.max(cabs(tb.c1[j][k][l]));
                }
            }
        }
    }
    Ok(worst)
}

fn b_via_a(ctx: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let tb = bc_expand(&z)?;
    let inv = frame_a_inv(&z)?;
    let da = frame_a_derivatives(&z, Kind::Anti, &ctx.fd)?;
    let mut worst = 0.0f64;
    for j in 0..n {
        let m = da[j].matmul(&inv);
        for k in 0..n {
            for l in 0..n {
                worst = worst.max(cabs(tb.b1[j][k][l] - m[(k, l)]));
            }
        }
    }
    Ok(worst)
}

fn c_via_a(ctx: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let tb = bc_expand(&z)?;
    let inv = frame_a_inv(&z)?;
    let da = frame_a_derivatives(&z, Kind::Holo, &ctx.fd)?;
    let hess = t_hessian_at_self(&z);
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                let v: C64 = (0..n).map(|al| (da[j][(k, al)] - hess[k][j][al]) * inv[(al, l)]).sum();
                worst = worst.max(cabs(tb.c1[j][k][l] - v));
            }
        }
    }
    Ok(worst)
}

fn diag_vanish(ctx: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    let w = z.coords().to_vec();
    let f = |x: &[C64]| Ok(t_map_coords(x, &w));
    let mut worst = 0.0f64;
    for j in 0..n {
        let d = wirtinger_vec(f, z.coords(), j, Kind::Anti, &ctx.fd)?;
        worst = worst.max(d.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn absum(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    absum_residual(&pt(s, n))
}

fn frame_unitary(_: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let (z, w) = (pt(s, n), pt(s, n));
    let g = GroupElement::<f64>::random(s, n, GROUP_TAU);
    let gz = g.act(&z);
    let u = frame_a(&gz).matmul(&g.differential(&z)).matmul(&frame_a_inv(&z)?);
    let unitary = u.adjoint().matmul(&u).max_diff(&identity(n));
    let lhs = t_map(&gz, &g.act(&w));
    let rhs = u.mul_vec(t_map(&z, &w).coords());
    Ok(unitary.max(vec_diff(lhs.coords(), &rhs)))
}

fn dbar_closed(ctx: &Ctx, s: &mut Sampler, n: usize) -> Result<f64> {
    let z = pt(s, n);
    // g[m][j] = Σ_l A_{lm} conj(A_{lj})
    let g = |x: &[C64]| -> Result<Vec<C64>> {
        let a = frame_a(&Point::new(x.to_vec())?);
        Ok((0..n * n).map(|q| (0..n).map(|l| a[(l, q / n)] * a[(l, q % n)].conj()).sum()).collect())
    };
    let d: Vec<Vec<C64>> = (0..n).map(|k| wirtinger_vec(g, z.coords(), k, Kind::Anti, &ctx.fd)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for m in 0..n {
        for k in 0..n {
            for j in 0..n {
                worst = worst.max(cabs(d[k][m * n + j] - d[j][m * n + k]));
            }
        }
    }
    Ok(worst)
}
