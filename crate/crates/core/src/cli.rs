//! Command-line driver.
//!
//! Exit codes: `0` success, `1` usage, configuration or I/O error, `2` the
//! spec fails condition (alpha) (and `--force` was not given, or the command
//! cannot be forced), `3` a numerical guard tripped or a tolerance check
//! failed. Every command prints its JSON report to stdout and, with `--out`,
//! also writes it to `DIR/<command>.json`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{build_spec, parse_config, FamilyConfig, Options, RunConfig};
use crate::cylinder::{
    consistency_check, marginal, probe_points, semigroup_check, ConsistencyOptions, DiscreteMeasure,
    FamilyMember, FamilySpec, MemberMeasure,
};
use crate::error::Error;
use crate::kernel::{eval_kernel, suggest_grid, write_binary, write_csv, GaussianOracle, GridSpec, DECAY_TARGET};
use crate::moments::{ccd_to_json, estimate_moments, CovarianceRoute};
use crate::selftest;
use crate::spectral::{check_alpha_with, AdmissibilityReport, MeasureSpec};
use crate::CCDNumber;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INADMISSIBLE: u8 = 2;
pub const EXIT_GUARD: u8 = 3;

/// Time used when no `[grid]` section is given.
const DEFAULT_TIME: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(name = "hypergauss", version, about = "Hypercomplex Gaussian-type measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for reports and kernel files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Evaluate even when condition (alpha) fails.
    #[arg(long, global = true)]
    force: bool,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,
    #[arg(long, global = true, value_name = "VALUE")]
    tol_alpha: Option<f64>,
    #[arg(long, global = true, value_name = "VALUE")]
    tol_kernel: Option<f64>,
    #[arg(long, global = true, value_name = "VALUE")]
    tol_moment: Option<f64>,
    #[arg(long, global = true, value_name = "VALUE")]
    tol_semigroup: Option<f64>,
    #[arg(long, global = true, value_name = "VALUE")]
    tol_consistency: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check condition (alpha) block by block.
    Validate,
    /// Evaluate the fundamental solution on the grid; writes kernel.csv and kernel.bin.
    Kernel,
    /// Estimate mean and covariance from the density.
    Moments {
        #[arg(long, value_enum, default_value_t = Route::Diagonalized)]
        route: Route,
    },
    /// Check theta(t) theta(s) = theta(t + s) at random probes.
    Semigroup,
    /// Check projective consistency of the [family] section.
    Consistency,
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    Direct,
    Diagonalized,
}

impl From<Route> for CovarianceRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Direct => CovarianceRoute::Direct,
            Route::Diagonalized => CovarianceRoute::Diagonalized,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Error(String),
    Inadmissible(Value),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inadmissible { .. } => Failure::Inadmissible(json!({ "error": e.to_string() })),
            Error::GridTooSmall(_)
            | Error::InsufficientResolution(_)
            | Error::TimeTooSmall(_)
            | Error::NonFinite(_) => Failure::Guard(e.to_string()),
            _ => Failure::Error(e.to_string()),
        }
    }
}

/// Outcome of a command: the report and whether its checks passed.
struct Outcome {
    name: &'static str,
    report: Value,
    code: u8,
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => match emit(&cli.common, &outcome) {
            Ok(()) => outcome.code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("numerical guard: {msg}");
            EXIT_GUARD
        }
        Err(Failure::Inadmissible(report)) => {
            eprintln!("condition (alpha) fails; rerun with --force to evaluate anyway");
            eprintln!("{}", to_pretty(&report));
            EXIT_INADMISSIBLE
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let common = &cli.common;
    let cfg = match &common.config {
        Some(path) => Some(load(path)?),
        None => None,
    };
    let mut opts = cfg.as_ref().map(|c| c.options.clone()).unwrap_or_default();
    override_tolerances(common, &mut opts)?;

    if let Command::Selftest = cli.command {
        let report = selftest::run(&opts);
        for c in report.failures() {
            eprintln!("selftest failure: {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
        }
        let code = if report.pass { EXIT_OK } else { EXIT_GUARD };
        return Ok(Outcome {
            name: "selftest",
            report: with_command("selftest", serde_json::to_value(&report).map_err(Error::from)?),
            code,
        });
    }

    let cfg = cfg.ok_or_else(|| Failure::Error("--config is required for this command".into()))?;
    match cli.command {
        Command::Validate => validate(&cfg, &opts),
        Command::Kernel => kernel(&cfg, &opts, common),
        Command::Moments { route } => moments(&cfg, &opts, route.into(), common.force),
        Command::Semigroup => semigroup(&cfg, &opts, common.force),
        Command::Consistency => consistency(&cfg, &opts),
        Command::Selftest => unreachable!("handled above"),
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn override_tolerances(common: &Common, opts: &mut Options) -> Result<(), Failure> {
    let pairs = [
        ("--tol-alpha", common.tol_alpha, &mut opts.tol_alpha),
        ("--tol-kernel", common.tol_kernel, &mut opts.tol_kernel),
        ("--tol-moment", common.tol_moment, &mut opts.tol_moment),
        ("--tol-semigroup", common.tol_semigroup, &mut opts.tol_semigroup),
        ("--tol-consistency", common.tol_consistency, &mut opts.tol_consistency),
    ];
    for (flag, value, slot) in pairs {
        if let Some(v) = value {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Failure::Error(format!("{flag} must be finite and non-negative, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(())
}

fn top_spec(cfg: &RunConfig) -> Result<MeasureSpec, Failure> {
    if cfg.blocks.is_empty() {
        return Err(Failure::Error("the config has no [block] sections".into()));
    }
    Ok(cfg.spec()?)
}

fn with_command(name: &str, mut report: Value) -> Value {
    if let Value::Object(map) = &mut report {
        map.insert("command".into(), Value::String(name.into()));
    }
    report
}

/// Admissibility report; refuses with exit 2 unless `force`.
fn admit(spec: &MeasureSpec, opts: &Options, force: bool) -> Result<AdmissibilityReport, Failure> {
    let report = check_alpha_with(spec, opts.tol_alpha)?;
    if !report.pass && !force {
        let value = serde_json::to_value(&report).map_err(Error::from)?;
        return Err(Failure::Inadmissible(value));
    }
    Ok(report)
}

fn grid_for(cfg: &RunConfig, spec: &MeasureSpec) -> Result<GridSpec, Failure> {
    match cfg.grid_spec(spec.n())? {
        Some(g) => Ok(g),
        None => Ok(suggest_grid(spec, DEFAULT_TIME)?),
    }
}

fn validate(cfg: &RunConfig, opts: &Options) -> Result<Outcome, Failure> {
    let spec = top_spec(cfg)?;
    let report = check_alpha_with(&spec, opts.tol_alpha)?;
    let code = if report.pass { EXIT_OK } else { EXIT_INADMISSIBLE };
    let value = json!({
        "admissibility": report,
        "level": spec.level(),
        "n": spec.n(),
        "tolerance": opts.tol_alpha,
    });
    Ok(Outcome {
        name: "validate",
        report: with_command("validate", value),
        code,
    })
}

fn kernel(cfg: &RunConfig, opts: &Options, common: &Common) -> Result<Outcome, Failure> {
    let spec = top_spec(cfg)?;
    let admissibility = admit(&spec, opts, common.force)?;
    if !admissibility.pass && cfg.grid.is_none() {
        return Err(Failure::Error("a forced kernel evaluation needs a [grid] section".into()));
    }
    let grid = grid_for(cfg, &spec)?;
    let field = eval_kernel(&spec, &grid, common.force)?;
    if !field.is_finite() {
        return Err(Failure::Guard("kernel field contains non-finite values".into()));
    }

    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Error(format!("{}: {e}", dir.display())))?;
    let io = |path: &Path, e: &dyn std::fmt::Display| Failure::Error(format!("{}: {e}", path.display()));
    let csv = dir.join("kernel.csv");
    let bin = dir.join("kernel.bin");
    write_csv(&field, BufWriter::new(File::create(&csv).map_err(|e| io(&csv, &e))?))
        .map_err(|e| io(&csv, &e))?;
    write_binary(&field, BufWriter::new(File::create(&bin).map_err(|e| io(&bin, &e))?))
        .map_err(|e| io(&bin, &e))?;

    let mut warnings = Vec::new();
    if field.boundary_decay > DECAY_TARGET {
        warnings.push(format!(
            "symbol magnitude {:e} at the frequency boundary exceeds {DECAY_TARGET:e}; refine the grid",
            field.boundary_decay
        ));
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let mut code = EXIT_OK;
    let oracle = match GaussianOracle::for_spec(&spec)? {
        Some(o) if grid.t() > 0.0 => {
            let t = grid.t();
            let level = spec.level();
            let dev = field.max_abs_deviation(|x| CCDNumber::scalar(level, o.value(x, t)));
            let pass = dev <= opts.tol_kernel;
            if !pass {
                eprintln!("kernel deviates from the Gaussian oracle by {dev:e} (tolerance {:e})", opts.tol_kernel);
                code = EXIT_GUARD;
            }
            json!({ "deviation": dev, "tolerance": opts.tol_kernel, "pass": pass })
        }
        _ => Value::Null,
    };

    let value = json!({
        "admissibility": admissibility,
        "forced": common.force && !admissibility.pass,
        "grid": { "axes": grid.axes(), "t": grid.t() },
        "level": field.level,
        "integral": ccd_to_json(&field.integral()),
        "mass": field.mass(),
        "variation": field.variation(),
        "boundary_decay": field.boundary_decay,
        "decay_target": DECAY_TARGET,
        "files": { "csv": "kernel.csv", "binary": "kernel.bin" },
        "oracle": oracle,
        "warnings": warnings,
    });
    Ok(Outcome {
        name: "kernel",
        report: with_command("kernel", value),
        code,
    })
}

fn moments(cfg: &RunConfig, opts: &Options, route: CovarianceRoute, force: bool) -> Result<Outcome, Failure> {
    let spec = top_spec(cfg)?;
    admit(&spec, opts, force)?;
    let grid = grid_for(cfg, &spec)?;
    let report = estimate_moments(&spec, &grid, route)?;
    let dev = report.max_mean_deviation().max(report.max_covariance_deviation());
    let pass = dev <= opts.tol_moment;
    if !pass {
        eprintln!("moments deviate from p t and U t by {dev:e} (tolerance {:e})", opts.tol_moment);
    }
    let mut value = report.to_json();
    if let Value::Object(map) = &mut value {
        map.insert("grid".into(), json!({ "axes": grid.axes(), "t": grid.t() }));
        map.insert("tolerance".into(), json!(opts.tol_moment));
        map.insert("pass".into(), json!(pass));
    }
    Ok(Outcome {
        name: "moments",
        report: with_command("moments", value),
        code: if pass { EXIT_OK } else { EXIT_GUARD },
    })
}

fn semigroup(cfg: &RunConfig, opts: &Options, force: bool) -> Result<Outcome, Failure> {
    let spec = top_spec(cfg)?;
    admit(&spec, opts, force)?;
    let (t, s) = (opts.semigroup_t, opts.semigroup_s);
    let half = 0.5 * (t + s);
    let probes = probe_points(spec.n(), opts.probes, opts.seed, 3.0);
    let mut cases = Vec::new();
    let mut worst: f64 = 0.0;
    for (t, s) in [(t, s), (half, half)] {
        let dev = semigroup_check(&spec, t, s, &probes)?;
        worst = worst.max(dev);
        cases.push(json!({ "t": t, "s": s, "deviation": dev }));
    }
    let pass = worst <= opts.tol_semigroup;
    if !pass {
        eprintln!("semigroup deviation {worst:e} exceeds {:e}", opts.tol_semigroup);
    }
    let value = json!({
        "cases": cases,
        "probes": probes.len(),
        "probe_radius": 3.0,
        "seed": opts.seed,
        "max_deviation": worst,
        "tolerance": opts.tol_semigroup,
        "pass": pass,
    });
    Ok(Outcome {
        name: "semigroup",
        report: with_command("semigroup", value),
        code: if pass { EXIT_OK } else { EXIT_GUARD },
    })
}

fn family_from(cfg: &RunConfig, family: &FamilyConfig) -> Result<FamilySpec, Failure> {
    let top = if cfg.blocks.is_empty() { None } else { Some(cfg.spec()?) };
    let members = family
        .members
        .iter()
        .map(|m| {
            let measure = if !m.atoms.is_empty() {
                MemberMeasure::Discrete(DiscreteMeasure::new(cfg.level, m.coords.len(), m.atoms.clone())?)
            } else if !m.blocks.is_empty() {
                MemberMeasure::Spec(build_spec(cfg.level, &m.blocks, m.p.as_ref())?)
            } else {
                let top = top.as_ref().ok_or_else(|| {
                    Failure::Error(format!(
                        "member {:?} is a marginal but the config has no [block] sections",
                        m.name
                    ))
                })?;
                if top.n() != family.labels.len() {
                    return Err(Failure::Error(format!(
                        "member {:?} is a marginal: the spec has {} coordinates but there are {} labels",
                        m.name,
                        top.n(),
                        family.labels.len()
                    )));
                }
                MemberMeasure::Spec(marginal(top, &m.coords)?)
            };
            Ok(FamilyMember {
                name: m.name.clone(),
                coords: m.coords.clone(),
                measure,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(FamilySpec::new(family.labels.clone(), members)?)
}

fn consistency(cfg: &RunConfig, opts: &Options) -> Result<Outcome, Failure> {
    let family = cfg
        .family
        .as_ref()
        .ok_or_else(|| Failure::Error("the config has no [family] section".into()))?;
    let family = family_from(cfg, family)?;
    let copts = ConsistencyOptions {
        probes: opts.probes,
        seed: opts.seed,
        tolerance: opts.tol_consistency,
        ..ConsistencyOptions::default()
    };
    let report = consistency_check(&family, &copts)?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    let code = if report.consistent { EXIT_OK } else { EXIT_GUARD };
    let mut value = serde_json::to_value(&report).map_err(Error::from)?;
    if let Value::Object(map) = &mut value {
        map.insert("tolerance".into(), json!(opts.tol_consistency));
        map.insert(
            "members".into(),
            json!(family.members().iter().map(|m| &m.name).collect::<Vec<_>>()),
        );
    }
    Ok(Outcome {
        name: "consistency",
        report: with_command("consistency", value),
        code,
    })
}

fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn emit(common: &Common, outcome: &Outcome) -> Result<(), String> {
    let mut report = outcome.report.clone();
    if !common.reproducible {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        if let Value::Object(map) = &mut report {
            map.insert("generated_at".into(), json!(now));
        }
    }
    report
        .as_object_mut()
        .map(|m| m.insert("version".into(), json!(env!("CARGO_PKG_VERSION"))));
    let text = to_pretty(&report) + "\n";
    print!("{text}");
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let path = dir.join(format!("{}.json", outcome.name));
        fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["hypergauss", "frobnicate"]), EXIT_ERROR);
        assert_eq!(run(["hypergauss", "validate"]), EXIT_ERROR);
        assert_eq!(run(["hypergauss", "validate", "--config", "/nonexistent/x.cfg"]), EXIT_ERROR);
    }

    #[test]
    fn guard_errors_map_to_three() {
        assert!(matches!(
            Failure::from(Error::GridTooSmall("x".into())),
            Failure::Guard(_)
        ));
        assert!(matches!(
            Failure::from(Error::Inadmissible { blocks: vec![0] }),
            Failure::Inadmissible(_)
        ));
        assert!(matches!(Failure::from(Error::EmptySubset), Failure::Error(_)));
    }
}
