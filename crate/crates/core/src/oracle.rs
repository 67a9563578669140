//! Brute-force references: direct quadrature of the physical-optics surface integral,
//! lattice search for specular points and finite-difference phase Hessians.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{spherical_view, SurfaceKind, TargetSurface};
use crate::physics::Physics;
use crate::scalar::{CompensatedSum, Scalar};
use crate::spa::Sym2;
use crate::vec3::Vec3;

/// Midpoint-rule mesh controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMesh<T> {
    /// Nodes per wavelength of arc length along each surface axis (>= 4).
    pub samples_per_wavelength: T,
    /// Largest node count the caller accepts.
    pub budget: u64,
}

impl<T: Scalar> Default for QuadratureMesh<T> {
    fn default() -> Self {
        Self { samples_per_wavelength: T::lit(10.0), budget: 10_000_000 }
    }
}

impl<T: Scalar> QuadratureMesh<T> {
    pub fn new(samples_per_wavelength: T, budget: u64) -> Result<Self> {
        if !(samples_per_wavelength >= T::lit(4.0)) {
            return Err(Error::Config(format!("samples per wavelength must be >= 4, got {samples_per_wavelength}")));
        }
        Ok(Self { samples_per_wavelength, budget })
    }

    pub fn step(&self, wavelength: T) -> T {
        wavelength / self.samples_per_wavelength
    }

    /// Mesh with twice the density.
    pub fn refined(&self) -> Self {
        Self { samples_per_wavelength: self.samples_per_wavelength * T::lit(2.0), budget: self.budget }
    }

    /// Per-axis node counts for `surface`.
    pub fn axis_counts(&self, surface: &TargetSurface<T>, wavelength: T) -> (usize, usize) {
        let step = self.step(wavelength);
        let count = |len: T| (len / step).ceil().to_usize().unwrap_or(usize::MAX).max(1);
        match surface.kind {
            SurfaceKind::Plate { dy, dz } => (count(dy), count(dz)),
            SurfaceKind::Cylinder { radius, length } => (count(length), count(T::PI() * radius)),
            SurfaceKind::Sphere { radius } => (count(T::FRAC_PI_2() * radius), count(T::lit(2.0) * T::PI() * radius)),
        }
    }

    pub fn node_count(&self, surface: &TargetSurface<T>, wavelength: T) -> u64 {
        let (a, b) = self.axis_counts(surface, wavelength);
        (a as u64).saturating_mul(b as u64)
    }
}

/// Node of the surface mesh: local position, local outward normal, area weight.
#[inline]
fn mesh_node<T: Scalar>(kind: &SurfaceKind<T>, counts: (usize, usize), i: usize, j: usize) -> (Vec3<T>, Vec3<T>, T) {
    let half = T::lit(0.5);
    let mid = |idx: usize, n: usize| (T::from_usize_lossy(idx) + half) / T::from_usize_lossy(n);
    match *kind {
        SurfaceKind::Plate { dy, dz } => {
            let y = (mid(i, counts.0) - half) * dy;
            let z = (mid(j, counts.1) - half) * dz;
            let w = dy * dz / T::from_usize_lossy(counts.0 * counts.1);
            (Vec3::new(T::zero(), y, z), -Vec3::unit_x(), w)
        }
        SurfaceKind::Cylinder { radius, length } => {
            let y = (mid(i, counts.0) - half) * length;
            let g = (mid(j, counts.1) - half) * T::PI();
            let (s, c) = g.sin_cos();
            let w = length / T::from_usize_lossy(counts.0) * radius * T::PI() / T::from_usize_lossy(counts.1);
            (Vec3::new(radius * (T::one() - c), y, radius * s), Vec3::new(-c, T::zero(), s), w)
        }
        SurfaceKind::Sphere { radius } => {
            let beta = mid(i, counts.0) * T::FRAC_PI_2();
            let alpha = mid(j, counts.1) * T::lit(2.0) * T::PI();
            let (sb, cb) = beta.sin_cos();
            let (sa, ca) = alpha.sin_cos();
            let n = Vec3::new(-cb, sb * ca, sb * sa);
            let w = radius * radius * sb * T::FRAC_PI_2() / T::from_usize_lossy(counts.0) * T::lit(2.0) * T::PI()
                / T::from_usize_lossy(counts.1);
            (Vec3::new(radius * (T::one() - cb), radius * sb * ca, radius * sb * sa), n, w)
        }
    }
}

/// Direct quadrature of the physical-optics received-signal integral at the carrier
/// (waveform factor 1), prefactor included, so the result is comparable with the sum of
/// stationary-phase coefficients of the pair.
///
/// Nodes are spaced uniformly in arc length (plate: `y`, `z`; cylinder: `y` and polar
/// angle; sphere: polar and azimuth angle over the antenna-facing hemisphere). Nodes
/// not facing both antennas carry no current.
pub fn po_quadrature<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    physics: &Physics<T>,
    mesh: &QuadratureMesh<T>,
) -> Result<Complex<T>> {
    let wavelength = physics.wavelength();
    let nodes = mesh.node_count(surface, wavelength);
    if nodes > mesh.budget {
        return Err(Error::Budget { nodes, budget: mesh.budget });
    }
    let k = physics.wavenumber();
    let counts = mesh.axis_counts(surface, wavelength);
    let kind = surface.kind;
    let placement = surface.placement;
    let pattern = physics.pattern;

    let rows: Vec<Result<(CompensatedSum<T>, CompensatedSum<T>)>> = (0..counts.0)
        .into_par_iter()
        .map(|i| {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for j in 0..counts.1 {
                let (p_loc, n_loc, w) = mesh_node(&kind, counts, i, j);
                let p = placement.to_world(p_loc);
                let n = placement.dir_to_world(n_loc);
                if n.dot(tx - p) <= T::zero() || n.dot(rx - p) <= T::zero() {
                    continue;
                }
                let vt = spherical_view(tx, p)?;
                let vr = spherical_view(rx, p)?;
                let g = pattern.gain(vt.cos_theta) * pattern.gain(vr.cos_theta) / (vt.distance * vr.distance)
                    * n.dot(vt.e_phi.cross(vr.e_theta));
                let (s, c) = (-k * (vt.distance + vr.distance)).sin_cos();
                re.add(g * c * w);
                im.add(g * s * w);
            }
            Ok((re, im))
        })
        .collect();

    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for row in rows {
        let (r, i) = row?;
        re.add(r.value());
        im.add(i.value());
    }
    Ok(Complex::new(re.value(), im.value()) * physics.prefactor())
}

/// Result of the lattice search for the path-length minimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpecular<T> {
    pub param: [T; 2],
    pub point: Vec3<T>,
    pub total_distance: T,
}

/// Brute-force minimiser of `r_tx + r_rx` over a `grid_n x grid_n` lattice spanning the
/// target's parameter box, refined by four zooms of factor 10.
pub fn grid_specular<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    grid_n: usize,
) -> Result<GridSpecular<T>> {
    if grid_n < 64 {
        return Err(Error::Config(format!("grid_n must be >= 64, got {grid_n}")));
    }
    let a = surface.placement.to_local(tx);
    let b = surface.placement.to_local(rx);
    let path = |y: T, z: T| -> Option<T> {
        let h = surface.height(y, z).ok()?;
        let p = Vec3::new(h, y, z);
        Some(p.distance(a) + p.distance(b))
    };
    let (yb, zb) = surface.param_box();
    let mut centre = [(yb[0] + yb[1]) * T::lit(0.5), (zb[0] + zb[1]) * T::lit(0.5)];
    let mut half = [(yb[1] - yb[0]) * T::lit(0.5), (zb[1] - zb[0]) * T::lit(0.5)];
    let mut best: Option<([T; 2], T)> = None;
    let denom = T::from_usize_lossy(grid_n - 1);
    for _level in 0..5 {
        let mut level_best: Option<([T; 2], T)> = None;
        for i in 0..grid_n {
            let y = centre[0] - half[0] + T::lit(2.0) * half[0] * T::from_usize_lossy(i) / denom;
            for j in 0..grid_n {
                let z = centre[1] - half[1] + T::lit(2.0) * half[1] * T::from_usize_lossy(j) / denom;
                if let Some(d) = path(y, z) {
                    if level_best.is_none_or(|(_, bd)| d < bd) {
                        level_best = Some(([y, z], d));
                    }
                }
            }
        }
        if let Some(lb) = level_best {
            if best.is_none_or(|(_, bd)| lb.1 <= bd) {
                best = Some(lb);
            }
        }
        let Some((p, _)) = best else {
            return Err(Error::Geometry("lattice misses the shape domain".into()));
        };
        centre = p;
        half = [half[0] / T::lit(10.0), half[1] / T::lit(10.0)];
    }
    let (param, total_distance) = best.expect("set above");
    Ok(GridSpecular { param, point: surface.world_point(param[0], param[1])?, total_distance })
}

/// Central second differences of `psi(y, z) = -k (r_tx + r_rx)` around `param`.
///
/// Path-length increments are formed as `(|u1|^2 - |u0|^2) / (r1 + r0)` so the stencil
/// does not cancel against the total path length.
pub fn fd_hessian<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    param: [T; 2],
    step: T,
    k: T,
) -> Result<Sym2<T>> {
    if !(step >= T::lit(1e-7) && step <= T::lit(1e-3)) {
        return Err(Error::Config(format!("finite-difference step must lie in [1e-7, 1e-3], got {step}")));
    }
    let a = surface.placement.to_local(tx);
    let b = surface.placement.to_local(rx);
    let p0 = surface.local_point(param[0], param[1])?;
    let increment = |dy: T, dz: T| -> Result<T> {
        let q = [param[0] + dy, param[1] + dz];
        let dh = surface.height_delta(param, q)?;
        let du = Vec3::new(dh, dy, dz);
        let mut acc = T::zero();
        for ant in [a, b] {
            let u0 = p0 - ant;
            let u1 = u0 + du;
            acc = acc + du.dot(u0 + u1) / (u0.norm() + u1.norm());
        }
        Ok(acc)
    };
    let h2 = step * step;
    let yy = (increment(step, T::zero())? + increment(-step, T::zero())?) / h2;
    let zz = (increment(T::zero(), step)? + increment(T::zero(), -step)?) / h2;
    let yz = (increment(step, step)? - increment(step, -step)? - increment(-step, step)? + increment(-step, -step)?)
        / (T::lit(4.0) * h2);
    Ok(Sym2 { yy, zz, yz }.scale(-k))
}
