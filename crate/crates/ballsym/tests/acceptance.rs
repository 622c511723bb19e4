//! Acceptance criteria, one line each. Lines marked `known` are checks that
//! fail against the formulas exactly as written; they print FAIL and do not
//! change the exit status. Any other failure exits nonzero.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ballsym::frame::{ball_ids, frame_ids, identity_suite, lookup, SuiteConfig};
use ballsym::group::SeriesWeight;
use ballsym::jets::{max_compatibility_residual, parse_function_spec, ResidualConfig};
use ballsym::report::*;
use ballsym::sampling::Sampler;
use ballsym::Point64;

struct Line {
    id: &'static str,
    what: String,
    pass: bool,
    known: bool,
}

struct Board(Vec<Line>);

impl Board {
    fn push(&mut self, id: &'static str, what: impl Into<String>, pass: bool) {
        self.0.push(Line { id, what: what.into(), pass, known: false });
    }

    fn push_known(&mut self, id: &'static str, what: impl Into<String>, pass: bool) {
        self.0.push(Line { id, what: what.into(), pass, known: true });
    }
}

fn records_line(recs: &[Record]) -> (bool, String) {
    let pass = recs.iter().all(|r| r.pass);
    let detail = recs
        .iter()
        .map(|r| {
            if r.tol == 0.0 && !r.lower_bound {
                return format!("{} {} mismatches in {}", r.id, r.max_residual, r.samples);
            }
            let rel = if r.lower_bound { ">" } else { "<" };
            format!("{}={:.2e}{rel}{:.0e}{}", r.id, r.max_residual, r.tol, if r.pass { "" } else { "!" })
        })
        .collect::<Vec<_>>()
        .join(" ");
    (pass, detail)
}

fn pick(recs: &[Record], ids: &[&str]) -> Vec<Record> {
    recs.iter().filter(|r| ids.contains(&r.id.as_str())).cloned().collect()
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn main() -> ExitCode {
    let mut b = Board(Vec::new());

    // 1: ball identities, 10^4 samples per dimension, closed-form tolerance 1e-10
    let sc = SuiteConfig { samples: 10_000, ..SuiteConfig::default() };
    let (out, t) = timed(|| identity_suite(&ball_ids(), &sc).expect("ball suite"));
    let worst = out.iter().map(|o| o.max_residual).fold(0.0, f64::max);
    let pass = out.iter().all(|o| o.max_residual < 1e-10) && t < Duration::from_secs(30);
    b.push("1", format!("ball identities, {} ids, max {worst:.2e} < 1e-10, {:.1?} < 30s", out.len(), t), pass);

    // 2: frame identities, 10^3 samples, n in {1, 2}
    let default_frame: Vec<&str> = frame_ids().into_iter().filter(|id| lookup(id).is_ok_and(|s| s.default_run)).collect();
    let sc = SuiteConfig { samples: 1000, ..SuiteConfig::default() };
    let (out, t) = timed(|| identity_suite(&default_frame, &sc).expect("frame suite"));
    let failed: Vec<&str> = out.iter().filter(|o| !o.pass).map(|o| o.id.as_str()).collect();
    b.push(
        "2",
        format!("frame identities, {} ids, failing {:?}, {:.1?} < 60s", out.len(), failed, t),
        failed.is_empty() && t < Duration::from_secs(60),
    );
    let sparsity = identity_suite(&["BC2-SPARSITY"], &SuiteConfig { samples: 1000, ..SuiteConfig::default() }).expect("sparsity");
    b.push_known(
        "2b",
        format!("B^{{jk}}_l vanishing off the diagonal as written, n in {{1,2}}, max {:.2e} < 1e-10", sparsity[0].max_residual),
        sparsity[0].pass,
    );

    // 3, 4: exact symmetric-power sweeps
    let sym = sym_records();
    let (p, d) = records_line(&pick(&sym, &["SYM-RG-NORM"]));
    b.push("3", format!("raising-operator norm ratio, n<=3, m<=6: {d}"), p);
    let (p, d) = records_line(&pick(&sym, &["SYM-CURVATURE"]));
    b.push("4", format!("curvature action = 2m R_G, n<=3, m<=5: {d}"), p);

    // 5, 6: jets over the catalog, n in {1, 2}, |I| <= 4, 20 base points
    let cfg = RunConfig { jet_base_points: 20, max_degree: 4, dims: Some(vec![1, 2]), ..RunConfig::default() };
    let funcs: Vec<String> = ["exp", "(z-w)^3", "(z-w)^4", "prod:0:1:4", "prod:0:0:3"].iter().map(|s| s.to_string()).collect();
    let jets = jets_records(&cfg, &funcs).expect("jets");
    let (p, d) = records_line(&pick(&jets, &["COMPAT", "DBAR-PHI", "PATHS-AGREE"]));
    b.push("5", format!("compatibility relation with full connection: {d}"), p);
    let mut printed = 0.0f64;
    let mut s = Sampler::new(5);
    for spec in &funcs {
        let f = parse_function_spec::<f64>(spec).expect("spec");
        for _ in 0..5 {
            let z: Point64 = s.point(2, 0.8);
            let r = max_compatibility_residual(&*f, &z, 4, false, &ResidualConfig::default()).unwrap_or(f64::INFINITY);
            printed = printed.max(r);
        }
    }
    b.push_known("5b", format!("compatibility relation with diagonal connection terms only, n=2, max {printed:.2e} < 1e-5"), printed < 1e-5);
    let catalog: Vec<String> = CATALOG_FUNCTIONS.iter().map(|s| s.to_string()).collect();
    let lead = jets_records(&RunConfig { jet_base_points: 10, dims: Some(vec![1, 2]), ..RunConfig::default() }, &catalog).expect("jets");
    let (p, d) = records_line(&pick(&lead, &["LEADING-JET", "JET-CONSISTENCY"]));
    b.push("6", format!("leading dz-frame jet against w-derivatives: {d}"), p);

    // 7: Poincaré series end to end at n = 1
    let cfg = RunConfig::default();
    let (run, t) = timed(|| poincare_run(&cfg).expect("poincare"));
    let (p, d) = records_line(&run.records);
    b.push_known("7", format!("orbit-decay weight (1-|γ^-1(0)|^2)^(N/2): {d}, {:.1?}", t), p && t < Duration::from_secs(300));
    let mut unit = RunConfig::default();
    unit.poincare.weight = SeriesWeight::Unit;
    let (run, t) = timed(|| poincare_run(&unit).expect("poincare"));
    let (p, d) = records_line(&run.records);
    b.push("7u", format!("unit weight: {d}, {:.1?} < 300s", t), p && t < Duration::from_secs(300));

    // 8: Jacobian inequality, 10^4 samples, words up to length 6
    for (n, id) in [(1usize, "8"), (2, "8b"), (3, "8c")] {
        let min = jacobian_sweep(n, 10_000, 6, 0).expect("sweep");
        let what = format!("Jacobian inequality n={n}, min(rhs-lhs) {min:.2e} >= -1e-10");
        if n == 1 {
            b.push(id, what, min >= -1e-10);
        } else {
            b.push_known(id, what, min >= -1e-10);
        }
    }

    // 9 .. 12: exact analysis
    let (p, d) = records_line(&ladder_records());
    b.push("9", format!("ladder closed form and E recursion: {d}"), p);
    let (p, d) = records_line(&raabe_records(&LadderConfig::default()).expect("raabe"));
    b.push("10", format!("Raabe limits 2+α at L=10^4: {d}"), p);
    let (recs, t) = timed(|| tail_records(3));
    let (p, d) = records_line(&recs);
    b.push("11", format!("m b_m and ladder m^(2-n) bounded: {d}, {:.1?} < 10s", t), p && t < Duration::from_secs(10));
    let (p, d) = records_line(&assembly_records(&RunConfig::default()).expect("assembly"));
    b.push("12", format!("moment assembly and Monte-Carlo moments: {d}"), p);

    let mut unexpected = 0;
    for l in &b.0 {
        let tag = match (l.pass, l.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL known",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {:>3}  {}", l.id, l.what);
        if !l.pass && !l.known {
            unexpected += 1;
        }
    }
    let passed = b.0.iter().filter(|l| l.pass).count();
    println!("{passed}/{} criteria pass, {unexpected} unexpected failures", b.0.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
