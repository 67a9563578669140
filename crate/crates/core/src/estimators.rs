//! Matched-filter maximum-likelihood localisation: objective, range profiles, 2D
//! ambiguity maps, 3D grid search and lobe metrics.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{AntennaLayout, SurfaceKind, TargetSurface};
use crate::optimize::parabolic_vertex;
use crate::physics::Physics;
use crate::scalar::Scalar;
use crate::signal::{accumulate_terms, SampledSignal, TimeGrid, Waveform};
use crate::spa::{pair_response_with, specular_guess, ResponseTerm, SolverOptions};
use crate::vec3::{Mat3, Placement, Vec3};

/// Relative tolerance under which two objective values count as tied.
const TIE_TOLERANCE: f64 = 1e-12;
/// Floor applied to normalised values before conversion to dB.
const DB_FLOOR: f64 = 1e-30;

/// Target pose seen from an anchor point (the array centroid): range, azimuth in the
/// x-z plane, elevation towards +y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    pub range: T,
    pub azimuth: T,
    pub elevation: T,
}

impl<T: Scalar> Pose<T> {
    pub fn new(range: T, azimuth: T, elevation: T) -> Self {
        Self { range, azimuth, elevation }
    }

    pub fn boresight(range: T) -> Self {
        Self::new(range, T::zero(), T::zero())
    }

    /// Unit vector from the anchor towards the target reference point.
    pub fn direction(&self) -> Vec3<T> {
        let (st, ct) = self.elevation.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        Vec3::new(ct * cp, st, ct * sp)
    }

    /// Rotation taking the surface frame onto the radial/elevation/azimuth triad at the pose.
    pub fn rotation(&self) -> Mat3<T> {
        let (st, ct) = self.elevation.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        let e_r = Vec3::new(ct * cp, st, ct * sp);
        let e_theta = Vec3::new(-st * cp, ct, -st * sp);
        let e_phi = Vec3::new(-sp, T::zero(), cp);
        Mat3::from_rows(e_r, e_theta, e_phi).transpose()
    }

    pub fn reference_point(&self, anchor: Vec3<T>) -> Vec3<T> {
        anchor + self.direction() * self.range
    }

    pub fn placement(&self, anchor: Vec3<T>) -> Placement<T> {
        Placement { rotation: self.rotation(), translation: self.reference_point(anchor) }
    }
}

/// Target description used to build candidate signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetModel<T> {
    /// Stationary-phase response of the given shape placed at the candidate pose.
    Extended(SurfaceKind<T>),
    /// Single scatterer at the candidate reference point with amplitude `1/(r_tx r_rx)`.
    Point,
}

impl<T> TargetModel<T> {
    pub fn name(&self) -> &'static str {
        match self {
            TargetModel::Extended(_) => "extended",
            TargetModel::Point => "point",
        }
    }
}

/// Observed pair signals together with everything needed to synthesise candidates on the
/// same time grid.
#[derive(Debug, Clone)]
pub struct MlProblem<T> {
    pub layout: AntennaLayout<T>,
    pub physics: Physics<T>,
    pub waveform: Waveform<T>,
    pub anchor: Vec3<T>,
    pub grid: TimeGrid<T>,
    pub signals: Vec<SampledSignal<T>>,
}

impl<T: Scalar> MlProblem<T> {
    pub fn new(
        layout: AntennaLayout<T>,
        physics: Physics<T>,
        grid: TimeGrid<T>,
        signals: Vec<SampledSignal<T>>,
    ) -> Result<Self> {
        let n = layout.len();
        for s in &signals {
            if s.tx_index >= n || s.rx_index >= n {
                return Err(Error::Config(format!("signal pair ({}, {}) outside the layout", s.tx_index, s.rx_index)));
            }
            if s.samples.len() != grid.n || s.t0 != grid.t0 || s.dt != grid.dt {
                return Err(Error::Config("signals must share the problem time grid".into()));
            }
        }
        let waveform = Waveform::new(physics.bandwidth)?;
        let anchor = layout.centroid();
        Ok(Self { layout, physics, waveform, anchor, grid, signals })
    }

    /// Candidate response terms for every observed pair, in signal order.
    pub fn model_terms(&self, model: &TargetModel<T>, pose: &Pose<T>) -> Result<Vec<Vec<ResponseTerm<T>>>> {
        match model {
            TargetModel::Point => {
                let p = pose.reference_point(self.anchor);
                let k = self.physics.wavenumber();
                let c = Physics::<T>::speed_of_light();
                Ok(self
                    .signals
                    .iter()
                    .map(|s| {
                        let r_tx = p.distance(self.layout.position(s.tx_index));
                        let r_rx = p.distance(self.layout.position(s.rx_index));
                        let total = r_tx + r_rx;
                        vec![ResponseTerm {
                            amplitude: Complex::from_polar((r_tx * r_rx).recip(), -k * total),
                            delay: total / c,
                        }]
                    })
                    .collect())
            }
            TargetModel::Extended(kind) => {
                let surface = TargetSurface::new(*kind)?.with_placement(pose.placement(self.anchor));
                self.signals
                    .iter()
                    .map(|s| {
                        let tx = self.layout.position(s.tx_index);
                        let rx = self.layout.position(s.rx_index);
                        let opts = specular_guess(&surface, tx, rx).map(SolverOptions::with_hint).unwrap_or_default();
                        Ok(pair_response_with(&surface, &self.layout, s.tx_index, s.rx_index, &self.physics, &opts)?
                            .terms)
                    })
                    .collect()
            }
        }
    }

    /// `|sum_pairs int u mu* dt|^2 / sum_pairs int |mu|^2 dt`, rectangle rule on the
    /// shared grid.
    pub fn objective(&self, model: &TargetModel<T>, pose: &Pose<T>) -> Result<T> {
        let terms = self.model_terms(model, pose)?;
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let mut mu = vec![zero; self.grid.n];
        let mut cross = zero;
        let mut energy = T::zero();
        for (signal, pair_terms) in self.signals.iter().zip(&terms) {
            if pair_terms.is_empty() {
                continue;
            }
            mu.iter_mut().for_each(|m| *m = zero);
            accumulate_terms(pair_terms, &self.waveform, &self.grid, one, &mut mu);
            for (u, m) in signal.samples.iter().zip(&mu) {
                cross = cross + u * m.conj();
                energy = energy + m.norm_sqr();
            }
        }
        if !(energy > T::zero()) {
            return Err(Error::Model(format!("{} model has zero energy at range {}", model.name(), pose.range)));
        }
        let dt = self.grid.dt;
        Ok((cross * dt).norm_sqr() / (energy * dt))
    }
}

pub fn ml_objective<T: Scalar>(problem: &MlProblem<T>, model: &TargetModel<T>, pose: &Pose<T>) -> Result<T> {
    problem.objective(model, pose)
}

fn check_axis<T: Scalar>(axis: &[T], what: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Config(format!("{what} axis is empty")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(format!("{what} axis must be strictly increasing")));
    }
    Ok(())
}

fn to_db<T: Scalar>(values: &[T], peak: T) -> Vec<T> {
    let floor = T::lit(DB_FLOOR);
    values.iter().map(|v| T::lit(10.0) * (*v / peak).max(floor).log10()).collect()
}

/// Index of the maximum, ties resolved by the smallest key.
fn tie_broken_argmax<T: Scalar, K: PartialOrd>(values: &[T], key: impl Fn(usize) -> K) -> Option<usize> {
    let peak = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !peak.is_finite() {
        return None;
    }
    let cut = peak - peak.abs() * T::lit(TIE_TOLERANCE);
    (0..values.len())
        .filter(|&i| values[i] >= cut)
        .min_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFunction<T> {
    pub axis: Vec<T>,
    /// Objective normalised to its peak, dB.
    pub values_db: Vec<T>,
    pub argmax: T,
}

impl<T: Scalar> ProfileFunction<T> {
    /// Builds a profile from raw objective values.
    pub fn from_values(axis: Vec<T>, values: &[T]) -> Result<Self> {
        check_axis(&axis, "profile")?;
        if values.len() != axis.len() {
            return Err(Error::Config("profile values and axis differ in length".into()));
        }
        let i = tie_broken_argmax(values, |i| axis[i]).ok_or_else(|| Error::Model("profile has no finite value".into()))?;
        let peak = values[i];
        if !(peak > T::zero()) {
            return Err(Error::Model("objective vanishes on the whole axis".into()));
        }
        Ok(Self { values_db: to_db(values, peak), argmax: axis[i], axis })
    }

    pub fn argmax_index(&self) -> usize {
        self.axis.iter().position(|x| *x == self.argmax).unwrap_or(0)
    }
}

/// Objective swept over `ranges` at the given look angles.
pub fn range_profile_at<T: Scalar>(
    problem: &MlProblem<T>,
    model: &TargetModel<T>,
    ranges: &[T],
    azimuth: T,
    elevation: T,
) -> Result<ProfileFunction<T>> {
    check_axis(ranges, "range")?;
    let values: Vec<T> = ranges
        .par_iter()
        .map(|r| problem.objective(model, &Pose::new(*r, azimuth, elevation)))
        .collect::<Result<_>>()?;
    ProfileFunction::from_values(ranges.to_vec(), &values)
}

/// Range profile on boresight.
pub fn range_profile<T: Scalar>(
    problem: &MlProblem<T>,
    model: &TargetModel<T>,
    ranges: &[T],
) -> Result<ProfileFunction<T>> {
    range_profile_at(problem, model, ranges, T::zero(), T::zero())
}

/// Which look angle an ambiguity map sweeps; the other stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleAxis {
    Azimuth,
    Elevation,
}

impl AngleAxis {
    pub fn name(self) -> &'static str {
        match self {
            AngleAxis::Azimuth => "azimuth",
            AngleAxis::Elevation => "elevation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityMap<T> {
    pub ranges: Vec<T>,
    pub angles: Vec<T>,
    pub angle_axis: AngleAxis,
    /// `values_db[i][j]` at `(ranges[i], angles[j])`, normalised to 0 dB.
    pub values_db: Vec<Vec<T>>,
    pub argmax: (T, T),
}

impl<T: Scalar> AmbiguityMap<T> {
    /// Angle cut through the peak range.
    pub fn angle_cut(&self) -> Vec<T> {
        let i = self.ranges.iter().position(|r| *r == self.argmax.0).unwrap_or(0);
        self.values_db[i].clone()
    }
}

pub fn ambiguity_map<T: Scalar>(
    problem: &MlProblem<T>,
    model: &TargetModel<T>,
    ranges: &[T],
    angles: &[T],
    angle_axis: AngleAxis,
    fixed_angle: T,
) -> Result<AmbiguityMap<T>> {
    check_axis(ranges, "range")?;
    check_axis(angles, "angle")?;
    let na = angles.len();
    let values: Vec<T> = (0..ranges.len() * na)
        .into_par_iter()
        .map(|idx| {
            let (r, a) = (ranges[idx / na], angles[idx % na]);
            let pose = match angle_axis {
                AngleAxis::Azimuth => Pose::new(r, a, fixed_angle),
                AngleAxis::Elevation => Pose::new(r, fixed_angle, a),
            };
            problem.objective(model, &pose)
        })
        .collect::<Result<_>>()?;
    let best = tie_broken_argmax(&values, |i| (ranges[i / na], angles[i % na].abs()))
        .ok_or_else(|| Error::Model("ambiguity map has no finite value".into()))?;
    let peak = values[best];
    if !(peak > T::zero()) {
        return Err(Error::Model("objective vanishes on the whole map".into()));
    }
    let db = to_db(&values, peak);
    Ok(AmbiguityMap {
        ranges: ranges.to_vec(),
        angles: angles.to_vec(),
        angle_axis,
        values_db: db.chunks(na).map(<[T]>::to_vec).collect(),
        argmax: (ranges[best / na], angles[best % na]),
    })
}

/// Search grids for [`estimate_3d`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoseGrid<T> {
    pub ranges: Vec<T>,
    pub azimuths: Vec<T>,
    pub elevations: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate3d<T> {
    pub pose: Pose<T>,
    pub objective: T,
    /// Grid cell that won the exhaustive search.
    pub grid_pose: Pose<T>,
}

fn refine_axis<T: Scalar>(axis: &[T], i: usize, f: [T; 3]) -> T {
    if i == 0 || i + 1 >= axis.len() {
        return axis[i];
    }
    let x = [axis[i - 1], axis[i], axis[i + 1]];
    parabolic_vertex(x, f).map(|v| v.max(x[0]).min(x[2])).unwrap_or(x[1])
}

/// Exhaustive grid argmax over `(range, azimuth, elevation)` followed by one parabolic
/// refinement along each axis through the neighbouring grid cells.
pub fn estimate_3d<T: Scalar>(
    problem: &MlProblem<T>,
    model: &TargetModel<T>,
    grid: &PoseGrid<T>,
) -> Result<Estimate3d<T>> {
    check_axis(&grid.ranges, "range")?;
    check_axis(&grid.azimuths, "azimuth")?;
    check_axis(&grid.elevations, "elevation")?;
    let (nr, na, ne) = (grid.ranges.len(), grid.azimuths.len(), grid.elevations.len());
    let split = |idx: usize| (idx / (na * ne), (idx / ne) % na, idx % ne);
    let pose_at = |(i, j, l): (usize, usize, usize)| Pose::new(grid.ranges[i], grid.azimuths[j], grid.elevations[l]);
    let values: Vec<T> = (0..nr * na * ne)
        .into_par_iter()
        .map(|idx| problem.objective(model, &pose_at(split(idx))))
        .collect::<Result<_>>()?;
    let best = tie_broken_argmax(&values, |idx| {
        let p = pose_at(split(idx));
        (p.range, p.azimuth.abs(), p.elevation.abs())
    })
    .ok_or_else(|| Error::Model("objective has no finite value on the grid".into()))?;
    let (i, j, l) = split(best);
    let at = |i: usize, j: usize, l: usize| values[(i * na + j) * ne + l];
    let neighbours = |n: usize, k: usize, get: &dyn Fn(usize) -> T| {
        if k == 0 || k + 1 >= n {
            [get(k); 3]
        } else {
            [get(k - 1), get(k), get(k + 1)]
        }
    };
    let grid_pose = pose_at((i, j, l));
    let refined = Pose::new(
        refine_axis(&grid.ranges, i, neighbours(nr, i, &|k| at(k, j, l))),
        refine_axis(&grid.azimuths, j, neighbours(na, j, &|k| at(i, k, l))),
        refine_axis(&grid.elevations, l, neighbours(ne, l, &|k| at(i, j, k))),
    );
    let refined_value = problem.objective(model, &refined)?;
    if refined_value >= values[best] {
        Ok(Estimate3d { pose: refined, objective: refined_value, grid_pose })
    } else {
        Ok(Estimate3d { pose: grid_pose, objective: values[best], grid_pose })
    }
}

/// Main-lobe width and sidelobe level of a normalised profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobeMetrics<T> {
    pub width_3db: T,
    /// Highest value outside the main lobe, dB; `-inf` when there is none.
    pub peak_sidelobe_db: T,
    pub argmax: T,
}

/// The main lobe spans the -3 dB crossings (linearly interpolated) and, for the sidelobe
/// search, extends further out to the nearest local minima on each side.
pub fn lobe_metrics<T: Scalar>(profile: &ProfileFunction<T>) -> Result<LobeMetrics<T>> {
    let (x, v) = (&profile.axis, &profile.values_db);
    if x.len() != v.len() || x.is_empty() {
        return Err(Error::Metrics("profile axis and values differ in length".into()));
    }
    let peak = (0..v.len())
        .max_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a)))
        .expect("non-empty");
    let level = v[peak] - T::lit(3.0);
    let interpolate = |i: usize, j: usize| x[i] + (level - v[i]) / (v[j] - v[i]) * (x[j] - x[i]);

    let left = (0..peak)
        .rev()
        .find(|&i| v[i] <= level)
        .ok_or_else(|| Error::Metrics("no -3 dB crossing below the peak".into()))?;
    let right = (peak + 1..v.len())
        .find(|&i| v[i] <= level)
        .ok_or_else(|| Error::Metrics("no -3 dB crossing above the peak".into()))?;
    let width = interpolate(right - 1, right) - interpolate(left + 1, left);

    let mut lo = left;
    while lo > 0 && v[lo - 1] <= v[lo] {
        lo -= 1;
    }
    let mut hi = right;
    while hi + 1 < v.len() && v[hi + 1] <= v[hi] {
        hi += 1;
    }
    let sidelobe = v[..lo].iter().chain(&v[hi + 1..]).copied().fold(T::neg_infinity(), T::max);
    Ok(LobeMetrics { width_3db: width, peak_sidelobe_db: sidelobe, argmax: x[peak] })
}
