//! The `krf` subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krf_core::analysis::blowup_rates;
use krf_core::flow::{run_flow, RunStatus, MAX_BARRIER_DELTA};
use krf_core::soliton::{
    cao_koiso_profile, fik_profile, SolitonProfile, CLOSURE_TOL, CONSTANT_QUAD_TOL, DEFAULT_F_MAX, MIN_SOLITON_NODES,
};
use thiserror::Error;

use crate::acceptance::{self, Level, GAUGE_SLOPE, LAMBDA2_LIMIT, SCALAR_LIMIT};
use crate::config::{self, ConfigError};
use crate::io;
use crate::report::{self, ManifestStatus, RatesJson, RunManifest};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0:#}")]
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "krf", version, about = "Kähler–Ricci flow on the blown-up complex plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a gradient shrinking soliton profile.
    Soliton(SolitonArgs),
    /// Run the flow from a configuration file.
    Evolve(EvolveArgs),
    /// Fit blow-up rates to a series CSV.
    Analyze(AnalyzeArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fik,
    CaoKoiso,
}

#[derive(Debug, Args)]
pub struct SolitonArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Right end of the noncompact profile.
    #[arg(long, default_value_t = DEFAULT_F_MAX)]
    pub f_max: f64,
    /// Profile CSV; metadata goes next to it with a `.meta` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Fit window `lo,hi` in τ; defaults to the last 1.5 units.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad number `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad number `{hi}`"))?;
    if !(lo < hi) {
        return Err("window must satisfy lo < hi".into());
    }
    Ok((lo, hi))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Soliton(a) => soliton(&a),
        Command::Evolve(a) => evolve(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn soliton(args: &SolitonArgs) -> Result<(), CliError> {
    if args.n < MIN_SOLITON_NODES {
        return Err(CliError::Usage(format!(
            "node count below minimum: --n {} < {MIN_SOLITON_NODES}",
            args.n
        )));
    }
    if args.family == Family::Fik && !(args.f_max > 1.0 && args.f_max.is_finite()) {
        return Err(CliError::Usage(format!("--f-max must exceed 1, got {}", args.f_max)));
    }
    let built: Result<SolitonProfile, _> = match args.family {
        Family::Fik => fik_profile(args.n, args.f_max),
        Family::CaoKoiso => cao_koiso_profile(args.n),
    };
    let p = built.map_err(|e| CliError::Runtime(e.into()))?;
    let f_max = *p.profile.f().last().expect("nonempty profile");
    let meta = vec![
        (
            "family".to_string(),
            match args.family {
                Family::Fik => "fik",
                Family::CaoKoiso => "cao-koiso",
            }
            .to_string(),
        ),
        ("C".to_string(), format!("{:.10}", p.c)),
        ("residual".to_string(), format!("{:.6e}", p.residual())),
        ("f_max".to_string(), format!("{f_max}")),
    ];
    for (k, v) in &meta {
        println!("{k}={v}");
    }
    if let Some(out) = &args.out {
        io::write_radial_csv(out, &p.profile)?;
        io::write_key_values(&out.with_extension("meta"), &meta)?;
    }
    Ok(())
}

fn tau_label(tau: f64) -> String {
    format!("{tau:.4}").replace('.', "p")
}

fn name(dir: &Path, file: &str, artifacts: &mut Vec<String>) -> PathBuf {
    artifacts.push(file.to_string());
    dir.join(file)
}

fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    let rc = config::load_config(&args.config)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot create {}: {e}", args.out_dir.display())))?;
    let start = Instant::now();
    let out = run_flow(&rc.flow).map_err(|e| match e {
        krf_core::flow::FlowError::Config { .. } => CliError::Config(e.into()),
        other => CliError::Runtime(other.into()),
    })?;
    let wall = start.elapsed().as_secs_f64();
    let dir = &args.out_dir;
    let mut artifacts = Vec::new();

    std::fs::write(name(dir, "config.resolved", &mut artifacts), config::render_config(&rc))
        .map_err(|e| CliError::Runtime(e.into()))?;
    io::write_series_csv(&name(dir, "series.csv", &mut artifacts), &out.series)?;
    if !out.dilated_series.is_empty() {
        io::write_series_csv(&name(dir, "dilated_series.csv", &mut artifacts), &out.dilated_series)?;
    }
    io::write_violations_csv(&name(dir, "violations.csv", &mut artifacts), &out.violations)?;
    if !out.anchors.is_empty() {
        io::write_anchors_csv(&name(dir, "anchors.csv", &mut artifacts), &out.anchors)?;
    }
    for s in &out.snapshots {
        let label = tau_label(s.tau);
        io::write_radial_csv(&name(dir, &format!("snap_tau{label}_radial.csv"), &mut artifacts), &s.radial)?;
        io::write_dilated_csv(&name(dir, &format!("snap_tau{label}_dilated.csv"), &mut artifacts), &s.dilated)?;
        if let Some(d) = &s.dilated_engine {
            io::write_dilated_csv(&name(dir, &format!("snap_tau{label}_dilated_engine.csv"), &mut artifacts), d)?;
        }
    }
    artifacts.push("manifest.json".to_string());

    let status = match &out.status {
        RunStatus::Completed => ManifestStatus::Completed,
        RunStatus::Failed { step, tau, message } => ManifestStatus::Failed {
            step: *step,
            tau: *tau,
            message: message.clone(),
        },
    };
    let tolerances = BTreeMap::from([
        ("closure_tol".to_string(), CLOSURE_TOL),
        ("constant_quad_tol".to_string(), CONSTANT_QUAD_TOL),
        ("max_barrier_delta".to_string(), MAX_BARRIER_DELTA),
        ("monitor_slack".to_string(), krf_core::barriers::MONITOR_SLACK),
    ]);
    let manifest = RunManifest {
        config: config::resolved_pairs(&rc),
        artifacts,
        wall_time_s: wall,
        status: status.clone(),
        tolerances,
        version: env!("CARGO_PKG_VERSION").to_string(),
        lambda0: out.lambda0,
        class_c_margin: out.class_c_margin,
        truncation_tau: out.truncation_tau,
        cross_engine_max: out.cross_engine.iter().map(|c| c.1).reduce(f64::max),
        cross_engine: out.cross_engine.clone(),
        sandwich_violations: out.violations.len(),
        remeshes: out.remeshes.len(),
    };
    report::write_json(&dir.join("manifest.json"), &manifest)?;

    let last = out.series.last();
    println!(
        "records={} final_tau={:.6} violations={} wall_time_s={wall:.1}",
        out.series.len(),
        last.map_or(f64::NAN, |r| r.tau),
        out.violations.len()
    );
    match status {
        ManifestStatus::Completed => Ok(()),
        ManifestStatus::Failed { step, tau, message } => Err(CliError::Runtime(anyhow::anyhow!(
            "flow failed at step {step} (τ = {tau:.6}): {message}"
        ))),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let series = io::read_series_csv(&args.series)?;
    let rates = blowup_rates(&series, args.window, None).map_err(|e| CliError::Runtime(e.into()))?;
    let rows = [
        ("limit_R_times_Tt", rates.limit_r_times_tt, format!("{SCALAR_LIMIT:.6}")),
        ("limit_lambda2_times_Tt", rates.limit_lambda2_times_tt, format!("{LAMBDA2_LIMIT:.6}")),
        ("gauge_slope", rates.gauge_slope, format!("{GAUGE_SLOPE:.6}")),
        ("decay_rate_delta0", rates.decay_rate_delta0, "> 0".to_string()),
    ];
    for (k, v, target) in rows {
        println!("{k:<24} {v:>12.6}   target {target}");
    }
    println!("window = [{:.6}, {:.6}]", rates.window.0, rates.window.1);
    report::write_json(&args.report, &RatesJson::from(&rates))?;
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let outcomes = acceptance::run_level(args.level);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Runtime(anyhow::anyhow!("{failed} criteria failed")))
    }
}
