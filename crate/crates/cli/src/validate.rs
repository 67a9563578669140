//! Oracle cross-checks behind the `validate` subcommand.

use std::path::{Path, PathBuf};

use num_complex::Complex;
use rayon::prelude::*;

use nfext::oracle::{fd_hessian, grid_specular, po_quadrature, QuadratureMesh};
use nfext::scenario::{ScenarioConfig, TargetKind};
use nfext::spa::{pair_response_with, solve_stationary_with, specular_guess, SolverOptions};
use nfext::{Layout, Result, Surface};

use crate::output::{num, Csv};
use crate::Failure;

/// Specular point tolerances, m.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
pub const GRID_TOL: f64 = 1e-5;
pub const HESSIAN_REL_TOL: f64 = 1e-5;
pub const PO_MAGNITUDE_TOL: f64 = 0.05;
pub const PO_PHASE_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub target: TargetKind,
    /// Pair or population the value refers to.
    pub detail: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.abs() <= self.tolerance
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n * n).map(|i| (i / n, i % n)).collect()
}

fn hinted(surface: &Surface, layout: &Layout, tx: usize, rx: usize) -> SolverOptions<f64> {
    specular_guess(surface, layout.position(tx), layout.position(rx))
        .map(SolverOptions::with_hint)
        .unwrap_or_default()
}

/// Largest distance between the closed-form plate mirror point and the numeric Fermat
/// minimiser over all pairs.
pub fn closed_form_vs_fermat(surface: &Surface, layout: &Layout, k: f64) -> Result<f64> {
    let numeric = SolverOptions { force_numeric: true, ..SolverOptions::default() };
    let errs: Vec<f64> = pairs(layout.len())
        .into_par_iter()
        .map(|(l, m)| {
            let (tx, rx) = (layout.position(l), layout.position(m));
            let a = solve_stationary_with(surface, tx, rx, k, &SolverOptions::default())?;
            let b = solve_stationary_with(surface, tx, rx, k, &numeric)?;
            Ok(a[0].point.distance(b[0].point))
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest distance between the solver's shortest-path point and the lattice minimiser.
pub fn solver_vs_grid(surface: &Surface, layout: &Layout, k: f64, grid_n: usize) -> Result<f64> {
    let errs: Vec<f64> = pairs(layout.len())
        .into_par_iter()
        .map(|(l, m)| {
            let (tx, rx) = (layout.position(l), layout.position(m));
            let sps = solve_stationary_with(surface, tx, rx, k, &hinted(surface, layout, l, m))?;
            let Some(sp) = sps.iter().find(|s| s.on_surface) else {
                return Ok(0.0);
            };
            let g = grid_specular(surface, tx, rx, grid_n)?;
            Ok(sp.point.distance(g.point))
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest relative entry error of the analytic phase Hessian against central
/// differences, normalised by the largest analytic entry.
pub fn hessian_vs_fd(surface: &Surface, layout: &Layout, k: f64, step: f64) -> Result<f64> {
    let errs: Vec<f64> = pairs(layout.len())
        .into_par_iter()
        .map(|(l, m)| {
            let (tx, rx) = (layout.position(l), layout.position(m));
            let mut worst = 0.0f64;
            for sp in solve_stationary_with(surface, tx, rx, k, &hinted(surface, layout, l, m))? {
                if !sp.on_surface {
                    continue;
                }
                let fd = fd_hessian(surface, tx, rx, sp.param, step, k)?;
                let a = sp.hess_psi;
                let scale = a.yy.abs().max(a.zz.abs()).max(a.yz.abs());
                let diff = (a.yy - fd.yy).abs().max((a.zz - fd.zz).abs()).max((a.yz - fd.yz).abs());
                worst = worst.max(diff / scale);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// SPA and quadrature responses of one pair at the validation carrier.
pub fn spa_and_po(cfg: &ScenarioConfig, kind: TargetKind, tx: usize, rx: usize) -> Result<(Complex<f64>, Complex<f64>)> {
    let mut c = cfg.clone();
    c.target = kind;
    c.carrier = cfg.validation_carrier;
    let layout = c.antenna_layout::<f64>()?;
    let surface = c.target_surface(&layout)?;
    let physics = c.physics::<f64>()?;
    let spa: Complex<f64> = pair_response_with(&surface, &layout, tx, rx, &physics, &hinted(&surface, &layout, tx, rx))?
        .terms
        .iter()
        .map(|t| t.amplitude)
        .sum();
    let mesh = QuadratureMesh::new(c.po_samples_per_wavelength, c.po_budget)?;
    let po = po_quadrature(&surface, layout.position(tx), layout.position(rx), &physics, &mesh)?;
    Ok((spa, po))
}

/// Boresight (middle element, monostatic), the end-to-end pair and an edge monostatic pair.
pub fn po_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = vec![(n / 2, n / 2)];
    if n > 1 {
        v.push((0, n - 1));
        v.push((0, 0));
    }
    v
}

pub fn target_checks(cfg: &ScenarioConfig, kind: TargetKind) -> Result<Vec<Check>> {
    let mut c = cfg.clone();
    c.target = kind;
    c.carrier = cfg.validation_carrier;
    let layout = c.antenna_layout::<f64>()?;
    let surface = c.target_surface(&layout)?;
    let k = c.physics::<f64>()?.wavenumber();
    let all = format!("{} pairs", layout.len() * layout.len());
    let mut out = Vec::new();
    let mut push = |name, detail: String, value, tolerance| out.push(Check { name, target: kind, detail, value, tolerance });
    if kind == TargetKind::Plate {
        push("closed_form_vs_fermat", all.clone(), closed_form_vs_fermat(&surface, &layout, k)?, CLOSED_FORM_TOL);
    }
    push("solver_vs_grid", all.clone(), solver_vs_grid(&surface, &layout, k, c.grid_n)?, GRID_TOL);
    push("hessian_vs_fd", all, hessian_vs_fd(&surface, &layout, k, c.fd_step)?, HESSIAN_REL_TOL);
    for (tx, rx) in po_pairs(layout.len()) {
        let (spa, po) = spa_and_po(cfg, kind, tx, rx)?;
        let pair = format!("{tx}-{rx}");
        push("spa_vs_po_magnitude", pair.clone(), po.norm() / spa.norm() - 1.0, PO_MAGNITUDE_TOL);
        push("spa_vs_po_phase", pair, (po / spa).arg(), PO_PHASE_TOL);
    }
    Ok(out)
}

pub(crate) fn run(cfg: &ScenarioConfig, all_targets: bool, dir: &Path) -> std::result::Result<Vec<PathBuf>, Failure> {
    let kinds: Vec<TargetKind> = if all_targets { TargetKind::ALL.to_vec() } else { vec![cfg.target] };
    let mut csv = Csv::create(dir, "validation.csv", &["check", "target", "detail", "value", "tolerance", "status"])?;
    let mut failed = 0;
    let mut total = 0;
    for kind in kinds {
        for check in target_checks(cfg, kind)? {
            let status = if check.passed() { "pass" } else { "fail" };
            println!("{status:4}  {:<20} {:<8} {:<10} {:+.3e} (tol {:.0e})", check.name, kind.name(), check.detail, check.value, check.tolerance);
            csv.row(&[
                check.name.to_string(),
                kind.name().to_string(),
                check.detail.clone(),
                num(check.value),
                num(check.tolerance),
                status.to_string(),
            ])?;
            total += 1;
            failed += usize::from(!check.passed());
        }
    }
    let path = csv.finish()?;
    if failed > 0 {
        return Err(Failure::Checks(format!("{failed} of {total} checks failed")));
    }
    Ok(vec![path])
}
