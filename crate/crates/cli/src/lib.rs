//! `nfext` command-line driver: loads a scenario, runs one experiment and writes CSV
//! outputs plus a `manifest.txt` into the output directory.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use nfext::scenario::ScenarioConfig;

mod commands;
mod output;
pub mod validate;

pub use output::version_string;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "NFEXT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nfext", version, about = "Near-field extended-target radar experiments")]
struct Cli {
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every experiment; each one overrides the config key of the same name.
#[derive(Debug, Args, Default)]
struct Scene {
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Planar array `NYxNZ`.
    #[arg(long, value_name = "NYxNZ")]
    array: Option<String>,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    spacing: Option<f64>,
    /// True target range.
    #[arg(long)]
    standoff: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    carrier: Option<f64>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    rstep: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Specular points of every antenna pair on each target kind.
    StationaryPoints {
        #[command(flatten)]
        scene: Scene,
        /// Comma-separated target kinds.
        #[arg(long, default_value = "plate,sphere,cylinder")]
        targets: String,
    },
    /// Range profile of the ML objective and its lobe metrics.
    Profile {
        #[command(flatten)]
        scene: Scene,
    },
    /// Range-angle ambiguity map.
    Ambiguity {
        #[command(flatten)]
        scene: Scene,
        /// `azimuth` or `elevation`.
        #[arg(long)]
        axis: Option<String>,
        /// Lower angle, degrees.
        #[arg(long, allow_negative_numbers = true)]
        amin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        amax: Option<f64>,
        #[arg(long)]
        astep: Option<f64>,
    },
    /// Point-model range bias over a one- or two-parameter grid.
    MismatchSweep {
        #[command(flatten)]
        scene: Scene,
        /// `NAME=LO:HI:COUNT`, NAME one of range, radius, spacing, subarray_spacing.
        #[arg(long)]
        axis1: String,
        #[arg(long)]
        axis2: Option<String>,
        /// `genie` or `ml`.
        #[arg(long, default_value = "genie")]
        estimator: String,
        /// Report `|R_hat - R| / R` instead of metres.
        #[arg(long)]
        relative: bool,
    },
    /// Ranges at which the plate point-model bias equals a fixed level.
    Equipotential {
        #[command(flatten)]
        scene: Scene,
        /// Bias level, m.
        #[arg(long)]
        alpha: f64,
        /// `LO:HI:COUNT` element spacings.
        #[arg(long)]
        spacings: String,
    },
    /// Sampled received signals of every pair.
    Synthesize {
        #[command(flatten)]
        scene: Scene,
    },
    /// Cross-checks of the solver against brute-force oracles.
    Validate {
        #[command(flatten)]
        scene: Scene,
        #[arg(long)]
        all_targets: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::StationaryPoints { .. } => "stationary-points",
            Command::Profile { .. } => "profile",
            Command::Ambiguity { .. } => "ambiguity",
            Command::MismatchSweep { .. } => "mismatch-sweep",
            Command::Equipotential { .. } => "equipotential",
            Command::Synthesize { .. } => "synthesize",
            Command::Validate { .. } => "validate",
        }
    }

    fn scene(&self) -> &Scene {
        match self {
            Command::StationaryPoints { scene, .. }
            | Command::Profile { scene }
            | Command::Ambiguity { scene, .. }
            | Command::MismatchSweep { scene, .. }
            | Command::Equipotential { scene, .. }
            | Command::Synthesize { scene }
            | Command::Validate { scene, .. } => scene,
        }
    }
}

#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Compute(nfext::Error),
    Io(std::io::Error),
    /// Ran to completion but some checks failed.
    Checks(String),
}

impl From<nfext::Error> for Failure {
    fn from(e: nfext::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn parse_array(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--array expects NYxNZ, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn apply_scene(cfg: &mut ScenarioConfig, s: &Scene) -> Result<(), Failure> {
    let mut set = |key: &str, value: String| cfg.set(key, &value).map_err(|e| Failure::Usage(e.to_string()));
    if let Some(v) = &s.target {
        set("target", v.clone())?;
    }
    if let Some(v) = &s.model {
        set("model", v.clone())?;
    }
    if let Some(v) = &s.array {
        let (ny, nz) = parse_array(v)?;
        set("layout", "planar".into())?;
        set("elements_y", ny.to_string())?;
        set("elements", nz.to_string())?;
    }
    let numbers = [
        ("elements", s.elements.map(|v| v.to_string())),
        ("spacing", s.spacing.map(|v| v.to_string())),
        ("standoff", s.standoff.map(|v| v.to_string())),
        ("radius", s.radius.map(|v| v.to_string())),
        ("carrier", s.carrier.map(|v| v.to_string())),
        ("bandwidth", s.bandwidth.map(|v| v.to_string())),
        ("seed", s.seed.map(|v| v.to_string())),
        ("range_min", s.rmin.map(|v| v.to_string())),
        ("range_max", s.rmax.map(|v| v.to_string())),
        ("range_step", s.rstep.map(|v| v.to_string())),
    ];
    for (key, value) in numbers {
        if let Some(v) = value {
            set(key, v)?;
        }
    }
    Ok(())
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::parse(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
        None => ScenarioConfig::default(),
    };
    for item in &cli.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got '{item}'")))?;
        cfg.set(k.trim(), v.trim()).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    apply_scene(&mut cfg, cli.command.scene())?;
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn dispatch(command: &Command, cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    match command {
        Command::StationaryPoints { targets, .. } => commands::stationary_points(cfg, targets, dir),
        Command::Profile { .. } => commands::profile(cfg, dir),
        Command::Ambiguity { axis, amin, amax, astep, .. } => {
            let mut cfg = cfg.clone();
            let mut set = |key: &str, v: Option<String>| -> Result<(), Failure> {
                if let Some(v) = v {
                    cfg.set(key, &v).map_err(|e| Failure::Usage(e.to_string()))?;
                }
                Ok(())
            };
            set("angle_axis", axis.clone())?;
            set("angle_min_deg", amin.map(|v| v.to_string()))?;
            set("angle_max_deg", amax.map(|v| v.to_string()))?;
            set("angle_step_deg", astep.map(|v| v.to_string()))?;
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            commands::ambiguity(&cfg, dir)
        }
        Command::MismatchSweep { axis1, axis2, estimator, relative, .. } => {
            commands::mismatch_sweep(cfg, axis1, axis2.as_deref(), estimator, *relative, dir)
        }
        Command::Equipotential { alpha, spacings, .. } => commands::equipotential(cfg, *alpha, spacings, dir),
        Command::Synthesize { .. } => commands::synthesize(cfg, dir),
        Command::Validate { all_targets, .. } => validate::run(cfg, *all_targets, dir),
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    let cfg = load_config(cli)?;
    let start = Instant::now();
    let dir = cfg.output_dir.clone();
    let result = dispatch(&cli.command, &cfg, &dir);
    let outputs = match &result {
        Ok(paths) => paths.clone(),
        Err(_) => Vec::new(),
    };
    output::write_manifest(&dir, cli.command.name(), &cfg, &outputs, start.elapsed())?;
    result.map(|_| ())
}

/// Runs the CLI on `argv` (program name first) and returns the process exit code:
/// 0 on success, 1 on a computational failure, 2 on a usage or configuration error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            eprintln!("{}: {e}", e.name());
            1
        }
        Err(Failure::Io(e)) => {
            eprintln!("IoError: {e}");
            1
        }
        Err(Failure::Checks(msg)) => {
            eprintln!("ValidationFailure: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_flag() {
        assert_eq!(parse_array("10x10").unwrap(), (10, 10));
        assert_eq!(parse_array("3X7").unwrap(), (3, 7));
        assert!(parse_array("10").is_err());
        assert!(parse_array("ax2").is_err());
    }

    #[test]
    fn flags_override_config_keys() {
        let cli = Cli::try_parse_from([
            "nfext",
            "--set",
            "bandwidth=5e7",
            "profile",
            "--target",
            "plate",
            "--rmin",
            "3.5",
            "--array",
            "2x3",
        ])
        .unwrap();
        let cfg = load_config(&cli).unwrap();
        assert_eq!(cfg.bandwidth, 5e7);
        assert_eq!(cfg.range_min, 3.5);
        assert_eq!((cfg.elements_y, cfg.elements), (2, 3));
        assert_eq!(cfg.target, nfext::scenario::TargetKind::Plate);
    }

    #[test]
    fn bad_override_is_usage_error() {
        let cli = Cli::try_parse_from(["nfext", "--set", "nonsense=1", "profile"]).unwrap();
        assert!(matches!(load_config(&cli), Err(Failure::Usage(_))));
    }
}
