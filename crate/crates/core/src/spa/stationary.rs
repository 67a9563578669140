use crate::error::{Error, Result};
use crate::geometry::{SurfaceKind, TargetSurface};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Symmetric 2x2 matrix over the `(y, z)` surface parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2<T> {
    pub yy: T,
    pub zz: T,
    pub yz: T,
}

impl<T: Scalar> Sym2<T> {
    pub fn det(&self) -> T {
        self.yy * self.zz - self.yz * self.yz
    }

    pub fn trace(&self) -> T {
        self.yy + self.zz
    }

    pub fn scale(&self, s: T) -> Self {
        Self { yy: self.yy * s, zz: self.zz * s, yz: self.yz * s }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5);
        let m = (self.yy + self.zz) * half;
        let d = (self.yy - self.zz) * half;
        let r = (d * d + self.yz * self.yz).sqrt();
        [m - r, m + r]
    }

    /// Number of positive minus number of negative eigenvalues.
    pub fn signature(&self) -> i8 {
        let det = self.det();
        if det < T::zero() {
            0
        } else if det > T::zero() {
            if self.trace() > T::zero() {
                2
            } else {
                -2
            }
        } else {
            let [a, b] = self.eigenvalues();
            let s = |v: T| {
                if v > T::zero() {
                    1
                } else if v < T::zero() {
                    -1
                } else {
                    0
                }
            };
            s(a) + s(b)
        }
    }

    fn solve(&self, rhs: [T; 2]) -> [T; 2] {
        let det = self.det();
        [
            (self.zz * rhs[0] - self.yz * rhs[1]) / det,
            (self.yy * rhs[1] - self.yz * rhs[0]) / det,
        ]
    }
}

/// Path length `r_tx + r_rx` through the surface point `(y, z)` with its gradient and
/// Hessian w.r.t. the surface parameters. Antenna positions are in the target's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathJet<T> {
    pub r_tx: T,
    pub r_rx: T,
    pub grad: [T; 2],
    pub hess: Sym2<T>,
}

impl<T: Scalar> PathJet<T> {
    pub fn total(&self) -> T {
        self.r_tx + self.r_rx
    }

    pub fn residual(&self) -> T {
        (self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]).sqrt()
    }
}

pub fn path_length_jet<T: Scalar>(
    surface: &TargetSurface<T>,
    tx_local: Vec3<T>,
    rx_local: Vec3<T>,
    y: T,
    z: T,
) -> Result<PathJet<T>> {
    let jet = surface.shape_jet(y, z)?;
    let p = Vec3::new(jet.h, y, z);
    let mut grad = [T::zero(); 2];
    let mut hess = Sym2::default();
    let mut legs = [T::zero(); 2];
    for (i, a) in [tx_local, rx_local].into_iter().enumerate() {
        let u = p - a;
        let r = u.norm();
        if !(r > T::zero()) {
            return Err(Error::Geometry("antenna lies on the surface".into()));
        }
        legs[i] = r;
        // d r / d y = (u . dP/dy) / r with dP/dy = (h_y, 1, 0)
        let gy = u.x * jet.hy + u.y;
        let gz = u.x * jet.hz + u.z;
        let inv = T::one() / r;
        let inv3 = inv * inv * inv;
        grad[0] = grad[0] + gy * inv;
        grad[1] = grad[1] + gz * inv;
        hess.yy = hess.yy + (T::one() + jet.hy * jet.hy + u.x * jet.hyy) * inv - gy * gy * inv3;
        hess.zz = hess.zz + (T::one() + jet.hz * jet.hz + u.x * jet.hzz) * inv - gz * gz * inv3;
        hess.yz = hess.yz + (jet.hy * jet.hz + u.x * jet.hyz) * inv - gy * gz * inv3;
    }
    Ok(PathJet { r_tx: legs[0], r_rx: legs[1], grad, hess })
}

/// Specular reflection point of a stationary-phase evaluation for one antenna pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPointSolution<T> {
    /// Surface parameters `(y_s, z_s)` in the target's local frame.
    pub param: [T; 2],
    /// Stationary point in world coordinates.
    pub point: Vec3<T>,
    pub r_tx: T,
    pub r_rx: T,
    pub total_distance: T,
    /// `psi = -k (r_tx + r_rx)`.
    pub phase: T,
    pub hess_psi: Sym2<T>,
    pub det: T,
    pub signature: i8,
    pub on_boundary: bool,
    pub on_surface: bool,
    /// Norm of the path-length gradient at the point (dimensionless).
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Starts per axis of the deterministic multi-start grid.
    pub starts_per_axis: usize,
    /// Optional warm start tried before the grid; the grid is only used if it fails.
    pub hint: Option<[T; 2]>,
    /// Solutions closer than this (m) are merged.
    pub merge_radius: T,
    /// Accepted path-gradient residual.
    pub residual_tol: T,
    /// Use the numeric minimiser for plates too.
    pub force_numeric: bool,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            starts_per_axis: 5,
            hint: None,
            merge_radius: T::lit(1e-7),
            residual_tol: T::lit(1e-8),
            force_numeric: false,
        }
    }
}

impl<T: Scalar> SolverOptions<T> {
    pub fn with_hint(hint: [T; 2]) -> Self {
        Self { hint: Some(hint), ..Self::default() }
    }
}

/// Closed-form mirror point on the `x = 0` plane for two antennas (local frame) on the
/// same side of the plane.
pub fn plate_specular_point<T: Scalar>(tx_local: Vec3<T>, rx_local: Vec3<T>) -> Result<[T; 2]> {
    let (xl, xm) = (tx_local.x, rx_local.x);
    let same_side = (xl < T::zero() && xm < T::zero()) || (xl > T::zero() && xm > T::zero());
    if !same_side {
        return Err(Error::Precondition(format!(
            "plate closed form needs both antennas strictly on one side (x = {xl}, {xm})"
        )));
    }
    let s = xl + xm;
    Ok([
        (tx_local.y * xm + rx_local.y * xl) / s,
        (tx_local.z * xm + rx_local.z * xl) / s,
    ])
}

/// Geometric first guess of the specular point in surface parameters: the plate mirror
/// point, or the point where the bisector of the directions from the centre of curvature
/// towards both antennas pierces the surface.
pub fn specular_guess<T: Scalar>(surface: &TargetSurface<T>, tx: Vec3<T>, rx: Vec3<T>) -> Option<[T; 2]> {
    let a = surface.placement.to_local(tx);
    let b = surface.placement.to_local(rx);
    let guess = match surface.kind {
        SurfaceKind::Plate { .. } => plate_specular_point(a, b).ok()?,
        SurfaceKind::Sphere { radius } => {
            let c = Vec3::new(radius, T::zero(), T::zero());
            let u = ((a - c).normalized() + (b - c).normalized()).normalized();
            [radius * u.y, radius * u.z]
        }
        SurfaceKind::Cylinder { radius, .. } => {
            let ua = Vec3::new(a.x - radius, T::zero(), a.z);
            let ub = Vec3::new(b.x - radius, T::zero(), b.z);
            let (da, db) = (ua.norm(), ub.norm());
            let u = (ua.normalized() + ub.normalized()).normalized();
            [(a.y * db + b.y * da) / (da + db), radius * u.z]
        }
    };
    surface.in_shape_domain(guess[0], guess[1]).then_some(guess)
}

/// All stationary points of the pair `(tx, rx)` (world coordinates) on `surface`,
/// sorted by total path length.
pub fn solve_stationary<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    wavenumber: T,
) -> Result<Vec<StationaryPointSolution<T>>> {
    solve_stationary_with(surface, tx, rx, wavenumber, &SolverOptions::default())
}

pub fn solve_stationary_with<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    wavenumber: T,
    opts: &SolverOptions<T>,
) -> Result<Vec<StationaryPointSolution<T>>> {
    if let (SurfaceKind::Plate { .. }, false) = (surface.kind, opts.force_numeric) {
        let a = surface.placement.to_local(tx);
        let b = surface.placement.to_local(rx);
        let p = plate_specular_point(a, b)?;
        return Ok(vec![finish(surface, a, b, p, wavenumber)?]);
    }
    fermat_minimize(surface, tx, rx, wavenumber, opts)
}

/// Multi-start minimisation of the path length over the surface parameters.
pub fn fermat_minimize<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    wavenumber: T,
    opts: &SolverOptions<T>,
) -> Result<Vec<StationaryPointSolution<T>>> {
    let a = surface.placement.to_local(tx);
    let b = surface.placement.to_local(rx);
    let mut best_residual = T::infinity();
    let mut found: Vec<([T; 2], T)> = Vec::new();

    let mut try_start = |start: [T; 2], found: &mut Vec<([T; 2], T)>| {
        if let Some((p, jet)) = descend(surface, a, b, start) {
            let res = jet.residual();
            if res < best_residual {
                best_residual = res;
            }
            if res <= opts.residual_tol {
                found.push((p, jet.total()));
            }
        }
    };

    if let Some(h) = opts.hint {
        if surface.in_shape_domain(h[0], h[1]) {
            try_start(h, &mut found);
        }
    }
    if found.is_empty() {
        for s in start_grid(surface, opts.starts_per_axis.max(1)) {
            try_start(s, &mut found);
        }
    }
    if found.is_empty() {
        return Err(Error::Convergence { best_residual: best_residual.as_f64() });
    }

    found.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut merged: Vec<[T; 2]> = Vec::new();
    for (p, _) in found {
        let dup = merged.iter().any(|q| {
            let dy = p[0] - q[0];
            let dz = p[1] - q[1];
            (dy * dy + dz * dz).sqrt() <= opts.merge_radius
        });
        if !dup {
            merged.push(p);
        }
    }
    merged.into_iter().map(|p| finish(surface, a, b, p, wavenumber)).collect()
}

fn start_grid<T: Scalar>(surface: &TargetSurface<T>, n: usize) -> Vec<[T; 2]> {
    let (yb, zb) = surface.param_box();
    let shrink = match surface.kind {
        SurfaceKind::Sphere { .. } => T::lit(0.6),
        _ => T::lit(0.8),
    };
    let lerp = |b: [T; 2], i: usize| {
        if n == 1 {
            (b[0] + b[1]) * T::lit(0.5)
        } else {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(n - 1);
            (b[0] + (b[1] - b[0]) * t) * shrink
        }
    };
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let s = [lerp(yb, i), lerp(zb, j)];
            if surface.in_shape_domain(s[0], s[1]) {
                v.push(s);
            }
        }
    }
    v
}

/// Damped Newton descent on the path length, followed by plain Newton polishing of the
/// stationarity system.
fn descend<T: Scalar>(
    surface: &TargetSurface<T>,
    a: Vec3<T>,
    b: Vec3<T>,
    start: [T; 2],
) -> Option<([T; 2], PathJet<T>)> {
    let (yb, zb) = surface.param_box();
    let scale = (yb[1] - yb[0]).max(zb[1] - zb[0]);
    let mut p = start;
    let mut jet = path_length_jet(surface, a, b, p[0], p[1]).ok()?;
    let stop = T::lit(1e-14);
    for _ in 0..200 {
        let g = jet.grad;
        if jet.residual() <= stop {
            break;
        }
        let h = jet.hess;
        let step = if h.det() > T::zero() && h.yy > T::zero() {
            let s = h.solve(g);
            [-s[0], -s[1]]
        } else {
            let lmin = h.eigenvalues()[0];
            let shift = (-lmin).max(T::zero()) + T::one() / scale;
            let damped = Sym2 { yy: h.yy + shift, zz: h.zz + shift, yz: h.yz };
            let s = damped.solve(g);
            [-s[0], -s[1]]
        };
        let slope = g[0] * step[0] + g[1] * step[1];
        let mut t = T::one();
        let mut accepted = false;
        while t > T::lit(1e-12) {
            let c = [p[0] + step[0] * t, p[1] + step[1] * t];
            if let Ok(cj) = path_length_jet(surface, a, b, c[0], c[1]) {
                if cj.total() <= jet.total() + T::lit(1e-4) * t * slope || cj.residual() < jet.residual() * T::lit(1e-3)
                {
                    p = c;
                    jet = cj;
                    accepted = true;
                    break;
                }
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    // polish
    for _ in 0..4 {
        if jet.residual() <= stop || jet.hess.det() == T::zero() {
            break;
        }
        let s = jet.hess.solve(jet.grad);
        let c = [p[0] - s[0], p[1] - s[1]];
        match path_length_jet(surface, a, b, c[0], c[1]) {
            Ok(cj) if cj.residual() < jet.residual() => {
                p = c;
                jet = cj;
            }
            _ => break,
        }
    }
    Some((p, jet))
}

fn finish<T: Scalar>(
    surface: &TargetSurface<T>,
    a: Vec3<T>,
    b: Vec3<T>,
    p: [T; 2],
    k: T,
) -> Result<StationaryPointSolution<T>> {
    let jet = path_length_jet(surface, a, b, p[0], p[1])?;
    let hess_psi = jet.hess.scale(-k);
    let total = jet.total();
    Ok(StationaryPointSolution {
        param: p,
        point: surface.world_point(p[0], p[1])?,
        r_tx: jet.r_tx,
        r_rx: jet.r_rx,
        total_distance: total,
        phase: -k * total,
        hess_psi,
        det: hess_psi.det(),
        signature: hess_psi.signature(),
        on_boundary: surface.near_rim(p[0], p[1]),
        on_surface: surface.contains(p[0], p[1]),
        residual: jet.residual(),
    })
}

/// Analytic Hessian of `psi = -k (r_tx + r_rx)` at the stationary point.
pub fn phase_hessian<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    sp: &StationaryPointSolution<T>,
    k: T,
) -> Result<Sym2<T>> {
    let a = surface.placement.to_local(tx);
    let b = surface.placement.to_local(rx);
    Ok(path_length_jet(surface, a, b, sp.param[0], sp.param[1])?.hess.scale(-k))
}
