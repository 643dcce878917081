//! `lienard` CLI: audit hypotheses, locate cycles, trace the zeta curve, and
//! dump phase-portrait data as CSV/JSON.
//!
//! Exit codes: 0 on success/pass, 1 on a semantic failure (hypothesis fail,
//! uniqueness violation, sign-pattern failure), 2 on configuration errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use lienard::hypotheses::AnalysisWindow;
use lienard::integrator::IntegratorConfig;
use lienard::presets;
use lienard::PlanarSystem;

#[derive(Parser)]
#[command(
    name = "lienard",
    about = "Limit-cycle analysis for planar fields x' = phi(y) - F(x,y), y' = -g(x)",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Audit the uniqueness hypotheses on the analysis window.
    Check(CommonArgs),
    /// Scan the return map, refine cycles, and write certificates.
    Cycle(CommonArgs),
    /// Trace the curve of x-nullcline zeros inside the inner regions.
    Zeta(CommonArgs),
    /// Emit phase-portrait data: curves, direction field, cycle, trajectories.
    Render(CommonArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "system"])))]
struct CommonArgs {
    /// Built-in system: figure2 | vdp-cubic | harmonic.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file with {"phi":…,"g":…,"F":…,"domain":[a,b],"psi1":…,"psi2":…}.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Analysis window "x0,x1,y0,y1" (defaults to the preset's window or [-2,2]^2).
    #[arg(long, value_parser = parse_window)]
    window: Option<Window>,
    /// Displacement scan "lo,hi,n" (default 0.05 to the window edge, n = 64).
    #[arg(long, value_parser = parse_scan)]
    scan: Option<Scan>,
    /// Integrator relative tolerance.
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    /// Integrator absolute tolerance.
    #[arg(long, default_value_t = 1e-11)]
    atol: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed recorded in the manifest; outputs are deterministic per seed and config.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug)]
struct Window {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

#[derive(Clone, Copy, Debug)]
struct Scan {
    lo: f64,
    hi: f64,
    n: usize,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected x0,x1,y0,y1".into());
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|e| e.to_string())?;
    if !(nums[0] < nums[1] && nums[2] < nums[3]) {
        return Err("window ranges must be increasing".into());
    }
    Ok(Window {
        x0: nums[0],
        x1: nums[1],
        y0: nums[2],
        y1: nums[3],
    })
}

fn parse_scan(s: &str) -> Result<Scan, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected lo,hi,n".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    let hi: f64 = parts[1].trim().parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    let n: usize = parts[2].trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if !(0.0 < lo && lo < hi && n >= 2) {
        return Err("scan needs 0 < lo < hi and n >= 2".into());
    }
    Ok(Scan { lo, hi, n })
}

/// Everything a command needs, resolved from flags.
pub struct RunConfig {
    pub source_name: String,
    pub system: PlanarSystem,
    pub window: AnalysisWindow,
    pub scan: Option<(f64, f64, usize)>,
    pub integrator: IntegratorConfig,
    pub out: PathBuf,
    pub seed: u64,
}

/// Configuration-level failure: reported on stderr, exit 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for ConfigError {}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn resolve(args: &CommonArgs) -> Result<RunConfig, ConfigError> {
    if !(args.rtol > 0.0 && args.atol > 0.0) {
        return Err(ConfigError("tolerances must be positive".into()));
    }
    let (source_name, system, preset_window) = match (&args.preset, &args.system) {
        (Some(name), None) => {
            let p = presets::preset(name).ok_or_else(|| {
                ConfigError(format!(
                    "unknown preset {name:?}; available: {}",
                    presets::PRESET_NAMES.join(", ")
                ))
            })?;
            (p.name.to_string(), p.system, Some(p.window))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            let system: PlanarSystem = serde_json::from_str(&text)
                .map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "system".into());
            (name, system, None)
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let window = match args.window {
        Some(w) => AnalysisWindow::new(w.x0, w.x1, w.y0, w.y1),
        None => preset_window.unwrap_or_else(|| AnalysisWindow::new(-2.0, 2.0, -2.0, 2.0)),
    };
    let window = window
        .clipped_to(&system.domain)
        .map_err(|e| ConfigError(e.to_string()))?;
    std::fs::create_dir_all(&args.out)?;
    Ok(RunConfig {
        source_name,
        system,
        window,
        scan: args.scan.map(|s| (s.lo, s.hi, s.n)),
        integrator: IntegratorConfig {
            rel_tol: args.rtol,
            abs_tol: args.atol,
            ..IntegratorConfig::default()
        },
        out: args.out.clone(),
        seed: args.seed,
    })
}

type CommandFn = fn(&RunConfig) -> Result<ExitCode, ConfigError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, CommandFn) = match &cli.cmd {
        Cmd::Check(a) => (a, commands::check),
        Cmd::Cycle(a) => (a, commands::cycle),
        Cmd::Zeta(a) => (a, commands::zeta),
        Cmd::Render(a) => (a, commands::render),
    };
    let config = match resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
