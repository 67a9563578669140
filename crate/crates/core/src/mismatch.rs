//! Range bias of the point-target abstraction: genie-aided least squares on path
//! lengths, its second-order closed form, constant-bias operating curves and parameter
//! sweeps.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{range_profile, TargetModel};
use crate::geometry::{AntennaLayout, TargetSurface};
use crate::optimize::{golden_section, parabolic_vertex};
use crate::scalar::Scalar;
use crate::scenario::{uniform_axis, LayoutKind, ScenarioConfig, TargetKind};
use crate::spa::{solve_stationary_with, specular_guess, SolverOptions, StationaryPointSolution};
use crate::vec3::Vec3;

/// Golden-section bracket width for range searches, m.
pub const RANGE_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenieModel {
    /// Distances to a single reference point at the candidate range.
    Point,
    /// Stationary-point path lengths of the true shape moved to the candidate range.
    Extended,
}

fn specular_point<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
) -> Result<StationaryPointSolution<T>> {
    let opts = specular_guess(surface, tx, rx).map(SolverOptions::with_hint).unwrap_or_default();
    // the shape function is used beyond the physical rim: every pair has a specular point
    solve_stationary_with(surface, tx, rx, T::one(), &opts)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Geometry("pair has no stationary point".into()))
}

/// Specular path lengths `r_tx + r_rx` of every ordered pair, transmitter-major.
pub fn actual_path_lengths<T: Scalar>(surface: &TargetSurface<T>, layout: &AntennaLayout<T>) -> Result<Vec<T>> {
    let n = layout.len();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let sp = specular_point(surface, layout.position(idx / n), layout.position(idx % n))?;
            Ok(sp.total_distance)
        })
        .collect()
}

/// Unit vector from the array centroid towards the target reference point.
fn look_direction<T: Scalar>(surface: &TargetSurface<T>, layout: &AntennaLayout<T>) -> Result<(Vec3<T>, T)> {
    let offset = surface.placement.translation - layout.centroid();
    let range = offset.norm();
    if !(range > T::zero()) {
        return Err(Error::Geometry("target reference point coincides with the array centroid".into()));
    }
    Ok((offset * range.recip(), range))
}

/// Candidate path lengths with the target (or its reference point) moved to `range`
/// along the centroid-to-target line.
pub fn candidate_path_lengths<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    model: GenieModel,
    range: T,
) -> Result<Vec<T>> {
    let (dir, _) = look_direction(surface, layout)?;
    let reference = layout.centroid() + dir * range;
    let n = layout.len();
    match model {
        GenieModel::Point => Ok((0..n * n)
            .map(|idx| reference.distance(layout.position(idx / n)) + reference.distance(layout.position(idx % n)))
            .collect()),
        GenieModel::Extended => {
            let mut moved = *surface;
            moved.placement.translation = reference;
            actual_path_lengths(&moved, layout)
        }
    }
}

/// Range minimising `sum (D_actual - D_candidate(R))^2` over `[lo, hi]`.
pub fn genie_ls_range<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    model: GenieModel,
    interval: (T, T),
) -> Result<T> {
    let actual = actual_path_lengths(surface, layout)?;
    let cost = |r: T| -> Result<T> {
        let cand = candidate_path_lengths(surface, layout, model, r)?;
        Ok(actual.iter().zip(&cand).map(|(a, c)| (*a - *c) * (*a - *c)).sum())
    };
    Ok(golden_section(cost, interval.0, interval.1, T::lit(RANGE_TOLERANCE))?.x)
}

/// `R - R_hat` of the genie estimator, with `R` the true centroid-to-target distance.
pub fn genie_bias<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    model: GenieModel,
    interval: (T, T),
) -> Result<T> {
    let (_, range) = look_direction(surface, layout)?;
    Ok(range - genie_ls_range(surface, layout, model, interval)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBias<T> {
    /// Predicted `R - R_hat`, m.
    pub bias: T,
    /// Reference range is at least ten apertures.
    pub far_field: bool,
}

/// Unit vector along a collinear layout, `None` when the antennas are not on one line.
fn collinear_axis<T: Scalar>(layout: &AntennaLayout<T>) -> Option<Vec3<T>> {
    let axis = layout.axis()?;
    let c = layout.centroid();
    let tol = T::lit(1e-9) * layout.aperture();
    layout.positions().iter().all(|p| (*p - c).cross(axis).norm() <= tol).then_some(axis)
}

/// First-order bias of the point model:
/// `sum_pairs w (D_point - D_actual) / sum_pairs w^2`, `w = s_tx + s_rx`, where `s` is the
/// sine of the angle between the array axis and the antenna-to-reference line. For
/// layouts that are not a single line (or a single antenna) `s` is the projection of
/// that line on the centroid-to-reference direction.
pub fn analytic_point_bias<T: Scalar>(
    layout: &AntennaLayout<T>,
    surface: &TargetSurface<T>,
    reference: Vec3<T>,
) -> Result<AnalyticBias<T>> {
    let n = layout.len();
    let centroid = layout.centroid();
    let range = (reference - centroid).norm();
    let boresight = (reference - centroid).normalized();
    let axis = collinear_axis(layout);
    let weight = |a: Vec3<T>| -> T {
        let u = (reference - a).normalized();
        match axis {
            Some(ax) => ax.cross(u).norm(),
            None => u.dot(boresight),
        }
    };
    let sines: Vec<T> = layout.positions().iter().map(|a| weight(*a)).collect();
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..n {
        for j in 0..n {
            let (tx, rx) = (layout.position(i), layout.position(j));
            let sp = specular_point(surface, tx, rx)?;
            let point_total = reference.distance(tx) + reference.distance(rx);
            let w = sines[i] + sines[j];
            num = num + w * (point_total - sp.total_distance);
            den = den + w * w;
        }
    }
    if !(den > T::zero()) {
        return Err(Error::DegenerateWeight);
    }
    let far_field = range >= T::lit(10.0) * layout.aperture();
    if !far_field {
        warn!("reference range {range} is below ten apertures; the closed-form bias is outside its validity");
    }
    Ok(AnalyticBias { bias: num / den, far_field })
}

/// Range at which the closed-form plate bias of an `n`-element linear array with spacing
/// `spacing` equals `alpha`: `R = spacing^2 sum_{l,m} (c_l + c_m)^2 / (8 n^2 alpha)` with
/// centred indices `c_l = l - (n - 1)/2`.
pub fn equipotential_plate<T: Scalar>(alpha: T, n: usize, spacing: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::Config(format!("bias level must be positive, got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Config("array needs at least one element".into()));
    }
    let half = T::from_usize_lossy(n - 1) / T::lit(2.0);
    let centred: Vec<T> = (0..n).map(|l| T::from_usize_lossy(l) - half).collect();
    let sum: T = centred.iter().flat_map(|a| centred.iter().map(move |b| (*a + *b) * (*a + *b))).sum();
    let nn = T::from_usize_lossy(n * n);
    Ok(spacing * spacing * sum / (T::lit(8.0) * nn * alpha))
}

/// `(spacing, R)` pairs of the constant-bias curve.
pub fn equipotential_curve<T: Scalar>(alpha: T, n: usize, spacings: &[T]) -> Result<Vec<(T, T)>> {
    spacings.iter().map(|d| Ok((*d, equipotential_plate(alpha, n, *d)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Array standoff.
    Range,
    /// Sphere or cylinder radius; half side of a square plate.
    Radius,
    /// Element spacing.
    Spacing,
    /// Centre-to-centre spacing of distributed sub-arrays.
    SubarraySpacing,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Range => "range",
            SweepAxis::Radius => "radius",
            SweepAxis::Spacing => "spacing",
            SweepAxis::SubarraySpacing => "subarray_spacing",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "range" => Ok(SweepAxis::Range),
            "radius" => Ok(SweepAxis::Radius),
            "spacing" => Ok(SweepAxis::Spacing),
            "subarray_spacing" => Ok(SweepAxis::SubarraySpacing),
            _ => Err(Error::Config(format!("unknown sweep axis '{s}'"))),
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, value: f64) {
        match self {
            SweepAxis::Range => cfg.standoff = value,
            SweepAxis::Radius => match cfg.target {
                TargetKind::Plate => {
                    cfg.plate_dy = 2.0 * value;
                    cfg.plate_dz = 2.0 * value;
                }
                _ => cfg.radius = value,
            },
            SweepAxis::Spacing => cfg.spacing = value,
            SweepAxis::SubarraySpacing => cfg.subarray_spacing = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasEstimator {
    /// Least squares on the true path lengths.
    Genie,
    /// Phase-coherent matched filter on synthesised signals.
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasScale {
    /// `|R_hat - R|`, m.
    Absolute,
    /// `|R_hat - R| / R`.
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axis1: (SweepAxis, Vec<f64>),
    /// Second axis; a single-row sweep when absent.
    pub axis2: Option<(SweepAxis, Vec<f64>)>,
    pub estimator: BiasEstimator,
    pub scale: BiasScale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSweep {
    pub axis1: SweepAxis,
    pub values1: Vec<f64>,
    pub axis2: Option<SweepAxis>,
    pub values2: Vec<f64>,
    pub scale: BiasScale,
    /// `bias[i][j]` at `(values1[i], values2[j])`.
    pub bias: Vec<Vec<f64>>,
}

impl BiasSweep {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.bias[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.bias.iter().map(|r| r[j]).collect()
    }
}

/// Point-model range estimate of the ML backend: boresight profile over
/// `R +- sweep_window` with step `range_step` (lambda/8 by default), refined by a parabola
/// through the peak and its neighbours.
pub fn ml_point_range(cfg: &ScenarioConfig) -> Result<f64> {
    let lo = (cfg.standoff - cfg.sweep_window).max(0.05);
    let hi = cfg.standoff + cfg.sweep_window;
    let problem = cfg.observe::<f64>(lo, hi)?;
    let axis = uniform_axis(lo, hi, cfg.effective_range_step());
    let profile = range_profile(&problem, &TargetModel::Point, &axis)?;
    let i = profile.argmax_index();
    if i == 0 || i + 1 == axis.len() {
        return Err(Error::Boundary { at: profile.argmax });
    }
    let x = [axis[i - 1], axis[i], axis[i + 1]];
    let lin = |k: usize| 10f64.powf(profile.values_db[k] / 10.0);
    Ok(parabolic_vertex(x, [-lin(i - 1), -lin(i), -lin(i + 1)]).map(|v| v.clamp(x[0], x[2])).unwrap_or(x[1]))
}

/// Point-model genie range estimate for a scenario.
pub fn genie_point_range(cfg: &ScenarioConfig) -> Result<f64> {
    cfg.validate()?;
    let layout = cfg.antenna_layout::<f64>()?;
    let surface = cfg.target_surface(&layout)?;
    let lo = (cfg.standoff - cfg.sweep_window).max(1e-3);
    genie_ls_range(&surface, &layout, GenieModel::Point, (lo, cfg.standoff + cfg.sweep_window))
}

fn cell_bias(cfg: &ScenarioConfig, estimator: BiasEstimator, scale: BiasScale) -> Result<f64> {
    let estimate = match estimator {
        BiasEstimator::Genie => genie_point_range(cfg)?,
        BiasEstimator::Ml => ml_point_range(cfg)?,
    };
    let err = (estimate - cfg.standoff).abs();
    Ok(match scale {
        BiasScale::Absolute => err,
        BiasScale::Relative => err / cfg.standoff,
    })
}

/// Point-model bias over a one- or two-parameter grid.
pub fn bias_sweep(spec: &SweepSpec) -> Result<BiasSweep> {
    let (a1, v1) = &spec.axis1;
    let (a2, v2) = match &spec.axis2 {
        Some((a, v)) => (Some(*a), v.clone()),
        None => (None, vec![f64::NAN]),
    };
    for values in [v1, &v2].into_iter().filter(|v| !(v.len() == 1 && v[0].is_nan())) {
        if values.is_empty() || values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep grids must be non-empty and strictly increasing".into()));
        }
    }
    if spec.axis2.is_some() && a2 == Some(*a1) {
        return Err(Error::Config("sweep axes must differ".into()));
    }
    if [Some(*a1), a2].contains(&Some(SweepAxis::SubarraySpacing)) && spec.base.layout != LayoutKind::Distributed {
        return Err(Error::Config("sub-array spacing sweeps need a distributed layout".into()));
    }
    let n2 = v2.len();
    let cells: Vec<f64> = (0..v1.len() * n2)
        .into_par_iter()
        .map(|idx| {
            let mut cfg = spec.base.clone();
            a1.apply(&mut cfg, v1[idx / n2]);
            if let Some(a) = a2 {
                a.apply(&mut cfg, v2[idx % n2]);
            }
            cell_bias(&cfg, spec.estimator, spec.scale)
        })
        .collect::<Result<_>>()?;
    Ok(BiasSweep {
        axis1: *a1,
        values1: v1.clone(),
        axis2: a2,
        values2: if a2.is_some() { v2 } else { Vec::new() },
        scale: spec.scale,
        bias: cells.chunks(n2).map(<[f64]>::to_vec).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_layout, LayoutSpec};
    use approx::assert_relative_eq;

    fn linear(n: usize, spacing: f64, standoff: f64) -> AntennaLayout<f64> {
        build_layout(&LayoutSpec::Linear { count: n, spacing, standoff }).unwrap()
    }

    #[test]
    fn single_antenna_plate_point_model_is_exact() {
        let layout = linear(1, 0.1, 2.0);
        let plate = TargetSurface::plate(1.0, 1.0).unwrap();
        let r = genie_ls_range(&plate, &layout, GenieModel::Point, (1.0, 3.0)).unwrap();
        assert!((r - 2.0).abs() < 1e-7);
        let b = analytic_point_bias(&layout, &plate, Vec3::zero()).unwrap();
        assert!(b.bias.abs() < 1e-15);
    }

    #[test]
    fn extended_model_has_no_bias() {
        let layout = linear(5, 0.2, 3.0);
        for s in [TargetSurface::plate(2.0, 2.0).unwrap(), TargetSurface::sphere(0.7).unwrap()] {
            let b = genie_bias(&s, &layout, GenieModel::Extended, (2.5, 3.5)).unwrap();
            assert!(b.abs() < 1e-6, "{b}");
        }
    }

    #[test]
    fn boundary_reported() {
        let layout = linear(3, 0.1, 2.0);
        let plate = TargetSurface::plate(1.0, 1.0).unwrap();
        assert!(matches!(
            genie_ls_range(&plate, &layout, GenieModel::Point, (2.5, 3.0)),
            Err(Error::Boundary { .. })
        ));
    }

    #[test]
    fn equipotential_matches_centred_index_sum() {
        for n in [1usize, 2, 5, 13] {
            let r = equipotential_plate(0.01, n, 0.1).unwrap();
            let closed = 0.01 * ((n * n) as f64 - 1.0) / (48.0 * 0.01);
            assert_relative_eq!(r, closed, epsilon = 1e-15, max_relative = 1e-12);
        }
        let r1 = equipotential_plate(0.15, 13, 0.1).unwrap();
        let r2 = equipotential_plate(0.15, 13, 0.2).unwrap();
        assert_relative_eq!(r2, 4.0 * r1, max_relative = 1e-14);
        assert!(equipotential_plate(1e12, 13, 0.1).unwrap() < 1e-12);
        assert!(matches!(equipotential_plate(0.0, 13, 0.1), Err(Error::Config(_))));
    }

    #[test]
    fn degenerate_weights() {
        // reference on the array axis: every antenna-to-reference line is parallel to it
        let layout = linear(3, 0.1, 2.0);
        let plate = TargetSurface::plate(1.0, 1.0).unwrap();
        let r = analytic_point_bias(&layout, &plate, Vec3::new(-2.0, 0.0, 5.0));
        assert!(matches!(r, Err(Error::DegenerateWeight)));
    }

    #[test]
    fn sweep_grid_validation() {
        let spec = SweepSpec {
            base: ScenarioConfig::default(),
            axis1: (SweepAxis::Range, vec![2.0, 1.0]),
            axis2: None,
            estimator: BiasEstimator::Genie,
            scale: BiasScale::Absolute,
        };
        assert!(bias_sweep(&spec).is_err());
        let spec = SweepSpec { axis1: (SweepAxis::SubarraySpacing, vec![1.0, 2.0]), ..spec };
        assert!(bias_sweep(&spec).is_err());
    }
}
