//! `ballsym`: runs the verification suites and writes a JSON report.
//!
//! Exit status:
//!
//! - 0: every check passes
//! - 1: a check fails or a computation errors
//! - 2: configuration error

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballsym::analysis::{ladder_csv, ladder_table, raabe_diag, Alpha, LadderParams};
use ballsym::group::{GroupSpec, SeriesWeight};
use ballsym::jets::parse_function_spec;
use ballsym::report::{
    analysis_records, jacobian_records, jets_records, poincare_run, verify_records, Record, Report, RunConfig,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "ballsym", version, about = "Numerical and exact checks for ball quotients and their symmetric differentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON); flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Replace the tolerance of one check, e.g. `EQ22=1e-9`. Repeatable.
    #[arg(long = "tol-override", global = true, value_name = "ID=VAL")]
    tol_override: Vec<String>,
    /// Restrict dimensions, e.g. `1,2`.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// More log output on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball and frame identity catalogs and the exact symmetric-power checks.
    Verify {
        /// Samples per dimension for the ball identities.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Diagonal jets and the compatibility residuals.
    Jets {
        /// Function spec; repeatable. Replaces the configured list.
        #[arg(long = "function", value_name = "SPEC")]
        functions: Vec<String>,
        /// File with one function spec per line.
        #[arg(long, value_name = "PATH")]
        functions_file: Option<PathBuf>,
        #[arg(long)]
        base_points: Option<usize>,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Poincaré series checks and the Jacobian inequality.
    Poincare {
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Exact ladder identities and convergence diagnostics, plus the moment checks.
    Ladder {
        #[command(flatten)]
        ladder: LadderArgs,
        /// Also write the ladder table as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Every check above in one report.
    Report {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        ladder: LadderArgs,
    },
}

#[derive(clap::Args, Debug)]
struct SeriesArgs {
    /// Group spec file (JSON).
    #[arg(long, value_name = "PATH")]
    group: Option<PathBuf>,
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    /// Exponent N of the series.
    #[arg(long)]
    power: Option<u32>,
}

#[derive(clap::Args, Debug)]
struct LadderArgs {
    #[arg(long = "N")]
    big_n: Option<u64>,
    #[arg(long = "n")]
    n: Option<u64>,
    /// `p`, `p/q` or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    max_m: Option<u64>,
    #[arg(long)]
    max_l: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightArg {
    OrbitDecay,
    Unit,
}

impl From<WeightArg> for SeriesWeight {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::OrbitDecay => SeriesWeight::OrbitDecay,
            WeightArg::Unit => SeriesWeight::Unit,
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Function specs from a file: one per line, `#` starts a comment.
fn parse_function_file(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

fn apply_series(cfg: &mut RunConfig, a: &SeriesArgs) -> Result<(), String> {
    if let Some(p) = &a.group {
        cfg.poincare.group = GroupSpec::from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if let Some(w) = a.weight {
        cfg.poincare.weight = w.into();
    }
    if let Some(p) = a.power {
        cfg.poincare.power = p;
    }
    Ok(())
}

fn apply_ladder(cfg: &mut RunConfig, a: &LadderArgs) {
    let l = &mut cfg.ladder;
    l.big_n = a.big_n.unwrap_or(l.big_n);
    l.n = a.n.unwrap_or(l.n);
    l.alpha = a.alpha.clone().unwrap_or_else(|| l.alpha.clone());
    l.max_m = a.max_m.unwrap_or(l.max_m);
    l.max_l = a.max_l.unwrap_or(l.max_l);
}

/// Config file, then flags; everything that can be rejected up front is.
fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.dims.is_some() {
        cfg.dims = cli.dims.clone();
    }
    if let Some(d) = &cfg.dims {
        if d.is_empty() || d.contains(&0) {
            return Err(format!("dimensions must be positive, got {d:?}"));
        }
    }
    for o in &cli.tol_override {
        let (id, val) = o.split_once('=').ok_or_else(|| format!("--tol-override expects ID=VAL, got `{o}`"))?;
        let v: f64 = val.trim().parse().map_err(|_| format!("bad tolerance `{val}` in `{o}`"))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!("tolerance must be finite and non-negative in `{o}`"));
        }
        cfg.tol_overrides.insert(id.trim().to_string(), v);
    }
    match &cli.command {
        Command::Verify { samples } => {
            if let Some(s) = samples {
                cfg.ball_samples = *s;
            }
        }
        Command::Jets { functions, functions_file, base_points, max_degree } => {
            let mut list = functions.clone();
            if let Some(p) = functions_file {
                list.extend(parse_function_file(&read(p)?));
            }
            if !list.is_empty() {
                cfg.functions = list;
            }
            cfg.jet_base_points = base_points.unwrap_or(cfg.jet_base_points);
            cfg.max_degree = max_degree.unwrap_or(cfg.max_degree);
        }
        Command::Poincare { series } => apply_series(&mut cfg, series)?,
        Command::Ladder { ladder, .. } => apply_ladder(&mut cfg, ladder),
        Command::Report { series, ladder } => {
            apply_series(&mut cfg, series)?;
            apply_ladder(&mut cfg, ladder);
        }
    }
    for f in &cfg.functions {
        parse_function_spec::<f64>(f).map_err(|e| e.to_string())?;
    }
    cfg.poincare.group.enumerator::<f64>().map_err(|e| format!("group: {e}"))?;
    Alpha::parse(&cfg.ladder.alpha).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    cfg.out = cli.out.clone();
    Ok(cfg)
}

fn is_config_error(e: &ballsym::Error) -> bool {
    matches!(e, ballsym::Error::UnknownIdentity(_) | ballsym::Error::InvalidConfig(_) | ballsym::Error::Parse(_))
}

struct Output {
    records: Vec<Record>,
    warnings: Vec<String>,
    artifact: Option<serde_json::Value>,
}

fn poincare(cfg: &RunConfig) -> ballsym::Result<Output> {
    let run = poincare_run(cfg)?;
    let mut records = run.records.clone();
    records.extend(jacobian_records(cfg)?);
    let artifact = json!({
        "elements": run.elements,
        "tail": run.tail,
        "invariance_residual": run.invariance_residual,
        "max_psi": run.max_psi,
        "psi": run.psi,
    });
    Ok(Output { records, warnings: run.warnings, artifact: Some(artifact) })
}

fn ladder(cfg: &RunConfig, csv: Option<&Path>) -> ballsym::Result<Output> {
    let records = analysis_records(cfg)?;
    let lc = &cfg.ladder;
    let alpha = match Alpha::parse(&lc.alpha)? {
        Alpha::Exact(q) => q,
        Alpha::Approx(_) => {
            return Err(ballsym::Error::InvalidConfig(format!("ladder alpha `{}` must be rational", lc.alpha)))
        }
    };
    let p = LadderParams::new(lc.big_n, lc.n, alpha)?;
    let rows = ladder_table(&p, lc.max_m)?;
    if let Some(path) = csv {
        fs::write(path, ladder_csv(&rows))
            .map_err(|e| ballsym::Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?;
    }
    let raabe = raabe_diag(&p, lc.max_l)?;
    Ok(Output { records, warnings: Vec::new(), artifact: Some(json!({ "raabe": raabe, "table": rows })) })
}

fn run(cli: &Cli, cfg: &RunConfig) -> ballsym::Result<Report> {
    let (name, out) = match &cli.command {
        Command::Verify { .. } => ("verify", Output { records: verify_records(cfg)?, warnings: Vec::new(), artifact: None }),
        Command::Jets { .. } => {
            ("jets", Output { records: jets_records(cfg, &cfg.functions)?, warnings: Vec::new(), artifact: None })
        }
        Command::Poincare { .. } => ("poincare", poincare(cfg)?),
        Command::Ladder { csv, .. } => ("ladder", ladder(cfg, csv.as_deref())?),
        Command::Report { .. } => {
            let mut records = verify_records(cfg)?;
            records.extend(jets_records(cfg, &cfg.functions)?);
            let p = poincare(cfg)?;
            records.extend(p.records);
            records.extend(analysis_records(cfg)?);
            ("report", Output { records, warnings: p.warnings, artifact: None })
        }
    };
    let mut report = Report::new(name, out.records, cfg)?;
    report.warnings = out.warnings;
    report.artifact = out.artifact;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cli, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    let text = report.to_json() + "\n";
    match &cfg.out {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // a closed pipe on stdout is not an error worth reporting
            let _ = std::io::Write::write_all(&mut std::io::stdout(), text.as_bytes());
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for r in report.failed() {
        let rel = if r.lower_bound { "<=" } else { ">=" };
        eprintln!("FAIL {}: {:e} {rel} {:e}", r.id, r.max_residual, r.tol);
    }
    let passed = report.records.len() - report.failed().count();
    eprintln!("{}: {passed}/{} checks pass", report.command, report.records.len());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
