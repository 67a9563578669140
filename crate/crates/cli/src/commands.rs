use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use nfext::estimators::{ambiguity_map, lobe_metrics, range_profile_at};
use nfext::mismatch::{bias_sweep, equipotential_curve, BiasEstimator, BiasScale, SweepAxis, SweepSpec};
use nfext::scenario::{ScenarioConfig, TargetKind};
use nfext::signal::write_signals_csv;
use nfext::spa::{solve_stationary_with, specular_guess, SolverOptions};
use nfext::StationaryPoint;

use crate::output::{num, Csv};
use crate::Failure;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// `LO:HI:COUNT` as `COUNT` evenly spaced values, both ends included.
pub(crate) fn parse_linspace(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || usage(format!("expected LO:HI:COUNT, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn parse_sweep_axis(s: &str) -> Result<(SweepAxis, Vec<f64>), Failure> {
    let (name, grid) = s.split_once('=').ok_or_else(|| usage(format!("expected NAME=LO:HI:COUNT, got '{s}'")))?;
    let axis = SweepAxis::parse(name.trim()).map_err(|e| usage(e.to_string()))?;
    Ok((axis, parse_linspace(grid)?))
}

pub(crate) fn stationary_points(cfg: &ScenarioConfig, targets: &str, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let kinds: Vec<TargetKind> = targets
        .split(',')
        .map(|t| TargetKind::parse(t.trim()).map_err(|e| usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::create(
        dir,
        "stationary_points.csv",
        &[
            "target", "pair_tx", "pair_rx", "y_s", "z_s", "x", "y", "z", "r_tx", "r_rx", "total_distance", "det",
            "signature", "on_surface",
        ],
    )?;
    for kind in kinds {
        let mut c = cfg.clone();
        c.target = kind;
        let layout = c.antenna_layout::<f64>()?;
        let surface = c.target_surface(&layout)?;
        let k = c.physics::<f64>()?.wavenumber();
        let n = layout.len();
        let solutions: Vec<Vec<StationaryPoint>> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (tx, rx) = (layout.position(idx / n), layout.position(idx % n));
                let opts = specular_guess(&surface, tx, rx).map(SolverOptions::with_hint).unwrap_or_default();
                solve_stationary_with(&surface, tx, rx, k, &opts)
            })
            .collect::<Result<_, _>>()?;
        for (idx, sps) in solutions.iter().enumerate() {
            for sp in sps {
                csv.row(&[
                    kind.name().to_string(),
                    (idx / n).to_string(),
                    (idx % n).to_string(),
                    num(sp.param[0]),
                    num(sp.param[1]),
                    num(sp.point.x),
                    num(sp.point.y),
                    num(sp.point.z),
                    num(sp.r_tx),
                    num(sp.r_rx),
                    num(sp.total_distance),
                    num(sp.det),
                    sp.signature.to_string(),
                    sp.on_surface.to_string(),
                ])?;
            }
        }
    }
    Ok(vec![csv.finish()?])
}

pub(crate) fn profile(cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let problem = cfg.observe::<f64>(cfg.range_min, cfg.range_max)?;
    let pose = cfg.truth_pose::<f64>();
    let ranges = cfg.range_axis::<f64>();
    let prof = range_profile_at(&problem, &cfg.target_model(), &ranges, pose.azimuth, pose.elevation)?;
    let mut csv = Csv::create(dir, "profile.csv", &["r_tilde", "value_db"])?;
    for (r, v) in prof.axis.iter().zip(&prof.values_db) {
        csv.row(&[num(*r), num(*v)])?;
    }
    let profile_path = csv.finish()?;
    println!("argmax = {}", prof.argmax);
    let m = lobe_metrics(&prof)?;
    let mut csv = Csv::create(dir, "metrics.csv", &["width_3db", "psl_db", "argmax"])?;
    csv.row(&[num(m.width_3db), num(m.peak_sidelobe_db), num(m.argmax)])?;
    println!("width_3db = {}  psl_db = {}", m.width_3db, m.peak_sidelobe_db);
    Ok(vec![profile_path, csv.finish()?])
}

pub(crate) fn ambiguity(cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let problem = cfg.observe::<f64>(cfg.range_min, cfg.range_max)?;
    let pose = cfg.truth_pose::<f64>();
    let fixed = match cfg.angle_axis {
        nfext::estimators::AngleAxis::Azimuth => pose.elevation,
        nfext::estimators::AngleAxis::Elevation => pose.azimuth,
    };
    let map = ambiguity_map(
        &problem,
        &cfg.target_model(),
        &cfg.range_axis::<f64>(),
        &cfg.angle_axis_rad::<f64>(),
        cfg.angle_axis,
        fixed,
    )?;
    let mut csv = Csv::create(dir, "ambiguity.csv", &["r_tilde", "angle_rad", "value_db"])?;
    for (i, r) in map.ranges.iter().enumerate() {
        for (j, a) in map.angles.iter().enumerate() {
            csv.row(&[num(*r), num(*a), num(map.values_db[i][j])])?;
        }
    }
    println!("argmax = ({}, {} rad)", map.argmax.0, map.argmax.1);
    Ok(vec![csv.finish()?])
}

pub(crate) fn mismatch_sweep(
    cfg: &ScenarioConfig,
    axis1: &str,
    axis2: Option<&str>,
    estimator: &str,
    relative: bool,
    dir: &Path,
) -> Result<Vec<PathBuf>, Failure> {
    let estimator = match estimator {
        "genie" => BiasEstimator::Genie,
        "ml" => BiasEstimator::Ml,
        other => return Err(usage(format!("unknown estimator '{other}' (genie, ml)"))),
    };
    let spec = SweepSpec {
        base: cfg.clone(),
        axis1: parse_sweep_axis(axis1)?,
        axis2: axis2.map(parse_sweep_axis).transpose()?,
        estimator,
        scale: if relative { BiasScale::Relative } else { BiasScale::Absolute },
    };
    let sweep = bias_sweep(&spec)?;
    let bias_col = if relative { "bias_rel" } else { "bias_m" };
    let mut csv = Csv::create(dir, "sweep.csv", &["axis1", "axis2", bias_col])?;
    for (i, a) in sweep.values1.iter().enumerate() {
        if sweep.values2.is_empty() {
            csv.row(&[num(*a), String::new(), num(sweep.bias[i][0])])?;
        } else {
            for (j, b) in sweep.values2.iter().enumerate() {
                csv.row(&[num(*a), num(*b), num(sweep.bias[i][j])])?;
            }
        }
    }
    Ok(vec![csv.finish()?])
}

pub(crate) fn equipotential(cfg: &ScenarioConfig, alpha: f64, spacings: &str, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let curve = equipotential_curve(alpha, cfg.elements, &parse_linspace(spacings)?)?;
    let mut csv = Csv::create(dir, "equipotential.csv", &["spacing", "range"])?;
    for (d, r) in curve {
        csv.row(&[num(d), num(r)])?;
    }
    Ok(vec![csv.finish()?])
}

pub(crate) fn synthesize(cfg: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let problem = cfg.observe::<f64>(cfg.range_min, cfg.range_max)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join("signals.csv");
    write_signals_csv(&problem.signals, BufWriter::new(File::create(&path)?))?;
    Ok(vec![path])
}
