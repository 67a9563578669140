//! Scenario configuration: a flat `key = value` file whose defaults are the reference
//! 77 GHz scene (13-element linear array, 4 m standoff).

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::estimators::{AngleAxis, MlProblem, Pose, TargetModel};
use crate::geometry::{build_layout, AntennaLayout, LayoutSpec, SurfaceKind, TargetSurface};
use crate::physics::{Pattern, Physics};
use crate::scalar::Scalar;
use crate::signal::{synthesize, NoiseSpec, TimeGrid, Waveform};
use crate::spa::all_pair_responses;

/// Extra time margin of observation grids on each side of the delay span, in `1/B`.
pub const GRID_MARGIN_PERIODS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Plate,
    Sphere,
    Cylinder,
}

impl TargetKind {
    pub const ALL: [TargetKind; 3] = [TargetKind::Plate, TargetKind::Sphere, TargetKind::Cylinder];

    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Plate => "plate",
            TargetKind::Sphere => "sphere",
            TargetKind::Cylinder => "cylinder",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plate" => Ok(TargetKind::Plate),
            "sphere" => Ok(TargetKind::Sphere),
            "cylinder" => Ok(TargetKind::Cylinder),
            _ => Err(Error::Config(format!("unknown target kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Linear,
    Planar,
    Distributed,
}

impl LayoutKind {
    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::Linear => "linear",
            LayoutKind::Planar => "planar",
            LayoutKind::Distributed => "distributed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(LayoutKind::Linear),
            "planar" => Ok(LayoutKind::Planar),
            "distributed" => Ok(LayoutKind::Distributed),
            _ => Err(Error::Config(format!("unknown layout '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Extended,
    Point,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Extended => "extended",
            ModelKind::Point => "point",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "extended" => Ok(ModelKind::Extended),
            "point" => Ok(ModelKind::Point),
            _ => Err(Error::Config(format!("unknown model '{s}'"))),
        }
    }
}

fn parse_pattern(s: &str) -> Result<Pattern> {
    match s {
        "isotropic" => Ok(Pattern::Isotropic),
        "cosine" => Ok(Pattern::Cosine),
        _ => Err(Error::Config(format!("unknown antenna pattern '{s}'"))),
    }
}

fn pattern_name(p: Pattern) -> &'static str {
    match p {
        Pattern::Isotropic => "isotropic",
        Pattern::Cosine => "cosine",
    }
}

fn parse_angle_axis(s: &str) -> Result<AngleAxis> {
    match s {
        "azimuth" => Ok(AngleAxis::Azimuth),
        "elevation" => Ok(AngleAxis::Elevation),
        _ => Err(Error::Config(format!("unknown angle axis '{s}'"))),
    }
}

/// Every tunable of an experiment. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub target: TargetKind,
    pub plate_dy: f64,
    pub plate_dz: f64,
    pub radius: f64,
    pub cyl_length: f64,
    pub layout: LayoutKind,
    /// Elements of a linear array, of each sub-array, or along z of a planar array.
    pub elements: usize,
    /// Rows along y of a planar array.
    pub elements_y: usize,
    pub spacing: f64,
    pub standoff: f64,
    pub subarrays: usize,
    pub subarray_spacing: f64,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub carrier: f64,
    pub bandwidth: f64,
    pub l2i0: f64,
    pub pattern: Pattern,
    pub noise_variance: f64,
    pub seed: u64,
    pub xi_re: f64,
    pub xi_im: f64,
    pub oversample: usize,
    pub model: ModelKind,
    pub range_min: f64,
    pub range_max: f64,
    /// Range grid step; 0 selects lambda / 8.
    pub range_step: f64,
    pub angle_axis: AngleAxis,
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    pub angle_step_deg: f64,
    /// Half-width of the range search window around the true range in bias sweeps.
    pub sweep_window: f64,
    pub validation_carrier: f64,
    pub po_samples_per_wavelength: f64,
    pub po_budget: u64,
    pub grid_n: usize,
    pub fd_step: f64,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            target: TargetKind::Sphere,
            plate_dy: 0.8,
            plate_dz: 1.75,
            radius: 1.24,
            cyl_length: 1.75,
            layout: LayoutKind::Linear,
            elements: 13,
            elements_y: 1,
            spacing: 0.125,
            standoff: 4.0,
            subarrays: 3,
            subarray_spacing: 2.0,
            azimuth_deg: 0.0,
            elevation_deg: 0.0,
            carrier: 77e9,
            bandwidth: 100e6,
            l2i0: 1.0,
            pattern: Pattern::Isotropic,
            noise_variance: 0.0,
            seed: 0,
            xi_re: 1.0,
            xi_im: 0.0,
            oversample: 8,
            model: ModelKind::Extended,
            range_min: 3.0,
            range_max: 5.0,
            range_step: 0.0,
            angle_axis: AngleAxis::Azimuth,
            angle_min_deg: -5.0,
            angle_max_deg: 5.0,
            angle_step_deg: 0.25,
            sweep_window: 0.75,
            validation_carrier: 3.5e9,
            po_samples_per_wavelength: 10.0,
            po_budget: 10_000_000,
            grid_n: 256,
            fd_step: 1e-5,
            output_dir: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 38] = [
    "target",
    "plate_dy",
    "plate_dz",
    "radius",
    "cyl_length",
    "layout",
    "elements",
    "elements_y",
    "spacing",
    "standoff",
    "subarrays",
    "subarray_spacing",
    "azimuth_deg",
    "elevation_deg",
    "carrier",
    "bandwidth",
    "l2i0",
    "pattern",
    "noise_variance",
    "seed",
    "xi_re",
    "xi_im",
    "oversample",
    "model",
    "range_min",
    "range_max",
    "range_step",
    "angle_axis",
    "angle_min_deg",
    "angle_max_deg",
    "angle_step_deg",
    "sweep_window",
    "validation_carrier",
    "po_samples_per_wavelength",
    "po_budget",
    "grid_n",
    "fd_step",
    "output_dir",
];

fn num<V: std::str::FromStr>(key: &str, value: &str) -> Result<V> {
    value.parse().map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "target" => self.target = TargetKind::parse(value)?,
            "plate_dy" => self.plate_dy = num(key, value)?,
            "plate_dz" => self.plate_dz = num(key, value)?,
            "radius" => self.radius = num(key, value)?,
            "cyl_length" => self.cyl_length = num(key, value)?,
            "layout" => self.layout = LayoutKind::parse(value)?,
            "elements" => self.elements = num(key, value)?,
            "elements_y" => self.elements_y = num(key, value)?,
            "spacing" => self.spacing = num(key, value)?,
            "standoff" => self.standoff = num(key, value)?,
            "subarrays" => self.subarrays = num(key, value)?,
            "subarray_spacing" => self.subarray_spacing = num(key, value)?,
            "azimuth_deg" => self.azimuth_deg = num(key, value)?,
            "elevation_deg" => self.elevation_deg = num(key, value)?,
            "carrier" => self.carrier = num(key, value)?,
            "bandwidth" => self.bandwidth = num(key, value)?,
            "l2i0" => self.l2i0 = num(key, value)?,
            "pattern" => self.pattern = parse_pattern(value)?,
            "noise_variance" => self.noise_variance = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "xi_re" => self.xi_re = num(key, value)?,
            "xi_im" => self.xi_im = num(key, value)?,
            "oversample" => self.oversample = num(key, value)?,
            "model" => self.model = ModelKind::parse(value)?,
            "range_min" => self.range_min = num(key, value)?,
            "range_max" => self.range_max = num(key, value)?,
            "range_step" => self.range_step = num(key, value)?,
            "angle_axis" => self.angle_axis = parse_angle_axis(value)?,
            "angle_min_deg" => self.angle_min_deg = num(key, value)?,
            "angle_max_deg" => self.angle_max_deg = num(key, value)?,
            "angle_step_deg" => self.angle_step_deg = num(key, value)?,
            "sweep_window" => self.sweep_window = num(key, value)?,
            "validation_carrier" => self.validation_carrier = num(key, value)?,
            "po_samples_per_wavelength" => self.po_samples_per_wavelength = num(key, value)?,
            "po_budget" => self.po_budget = num(key, value)?,
            "grid_n" => self.grid_n = num(key, value)?,
            "fd_step" => self.fd_step = num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Serialises every field; `parse(to_text())` reproduces the config exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("target", self.target.name().into());
        put("plate_dy", self.plate_dy.to_string());
        put("plate_dz", self.plate_dz.to_string());
        put("radius", self.radius.to_string());
        put("cyl_length", self.cyl_length.to_string());
        put("layout", self.layout.name().into());
        put("elements", self.elements.to_string());
        put("elements_y", self.elements_y.to_string());
        put("spacing", self.spacing.to_string());
        put("standoff", self.standoff.to_string());
        put("subarrays", self.subarrays.to_string());
        put("subarray_spacing", self.subarray_spacing.to_string());
        put("azimuth_deg", self.azimuth_deg.to_string());
        put("elevation_deg", self.elevation_deg.to_string());
        put("carrier", self.carrier.to_string());
        put("bandwidth", self.bandwidth.to_string());
        put("l2i0", self.l2i0.to_string());
        put("pattern", pattern_name(self.pattern).into());
        put("noise_variance", self.noise_variance.to_string());
        put("seed", self.seed.to_string());
        put("xi_re", self.xi_re.to_string());
        put("xi_im", self.xi_im.to_string());
        put("oversample", self.oversample.to_string());
        put("model", self.model.name().into());
        put("range_min", self.range_min.to_string());
        put("range_max", self.range_max.to_string());
        put("range_step", self.range_step.to_string());
        put("angle_axis", self.angle_axis.name().into());
        put("angle_min_deg", self.angle_min_deg.to_string());
        put("angle_max_deg", self.angle_max_deg.to_string());
        put("angle_step_deg", self.angle_step_deg.to_string());
        put("sweep_window", self.sweep_window.to_string());
        put("validation_carrier", self.validation_carrier.to_string());
        put("po_samples_per_wavelength", self.po_samples_per_wavelength.to_string());
        put("po_budget", self.po_budget.to_string());
        put("grid_n", self.grid_n.to_string());
        put("fd_step", self.fd_step.to_string());
        put("output_dir", self.output_dir.display().to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("plate_dy", self.plate_dy),
            ("plate_dz", self.plate_dz),
            ("radius", self.radius),
            ("cyl_length", self.cyl_length),
            ("spacing", self.spacing),
            ("standoff", self.standoff),
            ("subarray_spacing", self.subarray_spacing),
            ("carrier", self.carrier),
            ("bandwidth", self.bandwidth),
            ("l2i0", self.l2i0),
            ("range_min", self.range_min),
            ("range_max", self.range_max),
            ("angle_step_deg", self.angle_step_deg),
            ("sweep_window", self.sweep_window),
            ("validation_carrier", self.validation_carrier),
            ("fd_step", self.fd_step),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        let finite = [
            ("azimuth_deg", self.azimuth_deg),
            ("elevation_deg", self.elevation_deg),
            ("xi_re", self.xi_re),
            ("xi_im", self.xi_im),
            ("angle_min_deg", self.angle_min_deg),
            ("angle_max_deg", self.angle_max_deg),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(Error::Config(format!("{key} must be finite, got {v}")));
            }
        }
        if !(self.noise_variance >= 0.0) {
            return Err(Error::Config("noise_variance must be >= 0".into()));
        }
        if !(self.range_step >= 0.0) {
            return Err(Error::Config("range_step must be >= 0".into()));
        }
        if self.range_max <= self.range_min {
            return Err(Error::Config("range_max must exceed range_min".into()));
        }
        if self.angle_max_deg < self.angle_min_deg {
            return Err(Error::Config("angle_max_deg must not be below angle_min_deg".into()));
        }
        if self.elements == 0 || self.elements_y == 0 || self.subarrays == 0 {
            return Err(Error::Config("element and sub-array counts must be >= 1".into()));
        }
        if self.oversample < 2 {
            return Err(Error::Config("oversample must be >= 2".into()));
        }
        if self.po_samples_per_wavelength < 4.0 {
            return Err(Error::Config("po_samples_per_wavelength must be >= 4".into()));
        }
        if self.grid_n < 64 {
            return Err(Error::Config("grid_n must be >= 64".into()));
        }
        if self.xi_re == 0.0 && self.xi_im == 0.0 {
            return Err(Error::Config("xi must be nonzero".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        crate::scalar::SPEED_OF_LIGHT / self.carrier
    }

    pub fn physics<T: Scalar>(&self) -> Result<Physics<T>> {
        let mut p = Physics::new(T::lit(self.carrier), T::lit(self.bandwidth))?;
        p.l2i0 = T::lit(self.l2i0);
        p.pattern = self.pattern;
        p.validate()?;
        Ok(p)
    }

    pub fn surface_kind<T: Scalar>(&self) -> SurfaceKind<T> {
        match self.target {
            TargetKind::Plate => SurfaceKind::Plate { dy: T::lit(self.plate_dy), dz: T::lit(self.plate_dz) },
            TargetKind::Sphere => SurfaceKind::Sphere { radius: T::lit(self.radius) },
            TargetKind::Cylinder => {
                SurfaceKind::Cylinder { radius: T::lit(self.radius), length: T::lit(self.cyl_length) }
            }
        }
    }

    pub fn layout_spec<T: Scalar>(&self) -> LayoutSpec<T> {
        let spacing = T::lit(self.spacing);
        let standoff = T::lit(self.standoff);
        match self.layout {
            LayoutKind::Linear => LayoutSpec::Linear { count: self.elements, spacing, standoff },
            LayoutKind::Planar => {
                LayoutSpec::Planar { count_y: self.elements_y, count_z: self.elements, spacing, standoff }
            }
            LayoutKind::Distributed => LayoutSpec::Distributed {
                elements: self.elements,
                spacing,
                subarrays: self.subarrays,
                separation: T::lit(self.subarray_spacing),
                standoff,
            },
        }
    }

    pub fn antenna_layout<T: Scalar>(&self) -> Result<AntennaLayout<T>> {
        build_layout(&self.layout_spec())
    }

    /// True target pose relative to the array centroid.
    pub fn truth_pose<T: Scalar>(&self) -> Pose<T> {
        Pose::new(
            T::lit(self.standoff),
            T::lit(self.azimuth_deg.to_radians()),
            T::lit(self.elevation_deg.to_radians()),
        )
    }

    pub fn target_surface<T: Scalar>(&self, layout: &AntennaLayout<T>) -> Result<TargetSurface<T>> {
        Ok(TargetSurface::new(self.surface_kind())?.with_placement(self.truth_pose().placement(layout.centroid())))
    }

    pub fn target_model<T: Scalar>(&self) -> TargetModel<T> {
        match self.model {
            ModelKind::Extended => TargetModel::Extended(self.surface_kind()),
            ModelKind::Point => TargetModel::Point,
        }
    }

    pub fn xi<T: Scalar>(&self) -> Complex<T> {
        Complex::new(T::lit(self.xi_re), T::lit(self.xi_im))
    }

    pub fn noise<T: Scalar>(&self) -> Option<NoiseSpec<T>> {
        (self.noise_variance > 0.0).then(|| NoiseSpec { variance: T::lit(self.noise_variance), seed: self.seed })
    }

    /// Range grid step actually used.
    pub fn effective_range_step(&self) -> f64 {
        if self.range_step > 0.0 {
            self.range_step
        } else {
            self.wavelength() / 8.0
        }
    }

    pub fn range_axis<T: Scalar>(&self) -> Vec<T> {
        uniform_axis(self.range_min, self.range_max, self.effective_range_step()).into_iter().map(T::lit).collect()
    }

    /// Angle axis in radians.
    pub fn angle_axis_rad<T: Scalar>(&self) -> Vec<T> {
        uniform_axis(self.angle_min_deg, self.angle_max_deg, self.angle_step_deg)
            .into_iter()
            .map(|d| T::lit(d.to_radians()))
            .collect()
    }

    /// Synthesises the observed signals of every ordered pair on a grid wide enough for
    /// candidates with range in `[range_lo, range_hi]`.
    pub fn observe<T: Scalar>(&self, range_lo: f64, range_hi: f64) -> Result<MlProblem<T>> {
        self.validate()?;
        let layout = self.antenna_layout::<T>()?;
        let physics = self.physics::<T>()?;
        let surface = self.target_surface(&layout)?;
        let responses = all_pair_responses(&surface, &layout, &physics)?;
        let waveform = Waveform::new(physics.bandwidth)?;
        let c = crate::scalar::SPEED_OF_LIGHT;
        let (mut lo, mut hi) = responses
            .iter()
            .flat_map(|r| r.terms.iter().map(|t| t.delay.as_f64()))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        if !lo.is_finite() {
            // no pair sees the target; centre the grid on the nominal round trip
            lo = 2.0 * self.standoff / c;
            hi = lo;
        }
        lo += 2.0 * (range_lo - self.standoff).min(0.0) / c;
        hi += 2.0 * ((range_hi - self.standoff).max(0.0) + layout.aperture().as_f64()) / c;
        let grid = TimeGrid::covering(
            T::lit(lo),
            T::lit(hi),
            &waveform,
            self.oversample,
            T::lit(GRID_MARGIN_PERIODS),
        )?;
        let signals = synthesize(&responses, &waveform, &grid, self.xi(), self.noise())?;
        MlProblem::new(layout, physics, grid, signals)
    }
}

/// `lo, lo + step, ...` up to `hi` inclusive (within a thousandth of a step).
pub fn uniform_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-3).floor() as usize + 1;
    (0..n).map(|i| lo + step * i as f64).collect()
}
