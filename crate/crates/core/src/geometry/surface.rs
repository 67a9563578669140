use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::{Placement, Vec3};

/// Points closer than this to the physical rim carry the boundary flag.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Canonical target shapes, each described in its local frame as `x = h(y, z)` with
/// `h(0, 0) = 0` and the illuminated face looking towards `-x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind<T> {
    /// Flat rectangle of extent `dy` x `dz`.
    Plate { dy: T, dz: T },
    /// Antenna-facing hemisphere of radius `radius`, centred at `(radius, 0, 0)`.
    Sphere { radius: T },
    /// Cylinder with its axis along `y`, curved along `z`.
    Cylinder { radius: T, length: T },
}

impl<T: Scalar> SurfaceKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Plate { .. } => "plate",
            SurfaceKind::Sphere { .. } => "sphere",
            SurfaceKind::Cylinder { .. } => "cylinder",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: T, what: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} must be positive, got {v}")))
            }
        };
        match *self {
            SurfaceKind::Plate { dy, dz } => {
                ok(dy, "plate D_y")?;
                ok(dz, "plate D_z")
            }
            SurfaceKind::Sphere { radius } => ok(radius, "sphere radius"),
            SurfaceKind::Cylinder { radius, length } => {
                ok(radius, "cylinder radius")?;
                ok(length, "cylinder length")
            }
        }
    }
}

/// Height, gradient and Hessian of the shape function at one `(y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet<T> {
    pub h: T,
    pub hy: T,
    pub hz: T,
    pub hyy: T,
    pub hzz: T,
    pub hyz: T,
}

impl<T: Scalar> SurfaceJet<T> {
    fn flat() -> Self {
        let z = T::zero();
        Self { h: z, hy: z, hz: z, hyy: z, hzz: z, hyz: z }
    }

    /// Surface-element stretch `sqrt(1 + h_y^2 + h_z^2)`.
    pub fn area_factor(&self) -> T {
        (T::one() + self.hy * self.hy + self.hz * self.hz).sqrt()
    }

    /// Outward unit normal in the local frame.
    pub fn normal(&self) -> Vec3<T> {
        Vec3::new(-T::one(), self.hy, self.hz) * (T::one() / self.area_factor())
    }
}

/// A placed target: shape plus its rigid placement in the world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSurface<T> {
    pub kind: SurfaceKind<T>,
    pub placement: Placement<T>,
}

impl<T: Scalar> TargetSurface<T> {
    pub fn new(kind: SurfaceKind<T>) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, placement: Placement::identity() })
    }

    pub fn plate(dy: T, dz: T) -> Result<Self> {
        Self::new(SurfaceKind::Plate { dy, dz })
    }

    pub fn sphere(radius: T) -> Result<Self> {
        Self::new(SurfaceKind::Sphere { radius })
    }

    pub fn cylinder(radius: T, length: T) -> Result<Self> {
        Self::new(SurfaceKind::Cylinder { radius, length })
    }

    pub fn with_offset(mut self, offset: Vec3<T>) -> Self {
        self.placement = Placement::translation(offset);
        self
    }

    pub fn with_placement(mut self, placement: Placement<T>) -> Self {
        self.placement = placement;
        self
    }

    /// Whether `(y, z)` lies where the shape function itself is defined (ignores the
    /// plate edges and the cylinder length).
    pub fn in_shape_domain(&self, y: T, z: T) -> bool {
        match self.kind {
            SurfaceKind::Plate { .. } => y.is_finite() && z.is_finite(),
            SurfaceKind::Sphere { radius } => y * y + z * z < radius * radius,
            SurfaceKind::Cylinder { radius, .. } => z.abs() < radius && y.is_finite(),
        }
    }

    fn shape_domain_error(&self, y: T, z: T) -> Error {
        let (coordinate, value) = match self.kind {
            SurfaceKind::Sphere { .. } if z == T::zero() => ("y", y),
            SurfaceKind::Sphere { .. } if y.abs() > z.abs() => ("y", y),
            _ => ("z", z),
        };
        Error::Domain { coordinate, value: value.as_f64() }
    }

    /// Signed distance (in parameter space) to the physical rim; positive inside.
    pub fn rim_margin(&self, y: T, z: T) -> T {
        let two = T::lit(2.0);
        match self.kind {
            SurfaceKind::Plate { dy, dz } => (dy / two - y.abs()).min(dz / two - z.abs()),
            SurfaceKind::Sphere { radius } => radius - (y * y + z * z).sqrt(),
            SurfaceKind::Cylinder { radius, length } => (length / two - y.abs()).min(radius - z.abs()),
        }
    }

    /// Whether `(y, z)` lies on the physical (finite) target, rim excluded.
    pub fn contains(&self, y: T, z: T) -> bool {
        self.rim_margin(y, z) > T::zero()
    }

    pub fn near_rim(&self, y: T, z: T) -> bool {
        self.rim_margin(y, z).abs() <= T::lit(BOUNDARY_TOLERANCE)
    }

    /// Parameter box `[y_min, y_max] x [z_min, z_max]` spanned by the physical target.
    pub fn param_box(&self) -> ([T; 2], [T; 2]) {
        let two = T::lit(2.0);
        match self.kind {
            SurfaceKind::Plate { dy, dz } => ([-dy / two, dy / two], [-dz / two, dz / two]),
            SurfaceKind::Sphere { radius } => ([-radius, radius], [-radius, radius]),
            SurfaceKind::Cylinder { radius, length } => ([-length / two, length / two], [-radius, radius]),
        }
    }

    /// Analytic jet of the (unbounded) shape function.
    pub fn shape_jet(&self, y: T, z: T) -> Result<SurfaceJet<T>> {
        if !self.in_shape_domain(y, z) {
            return Err(self.shape_domain_error(y, z));
        }
        Ok(match self.kind {
            SurfaceKind::Plate { .. } => SurfaceJet::flat(),
            SurfaceKind::Sphere { radius } => {
                let s = y * y + z * z;
                let d = (radius * radius - s).sqrt();
                let d3 = d * d * d;
                SurfaceJet {
                    h: s / (radius + d),
                    hy: y / d,
                    hz: z / d,
                    hyy: (radius * radius - z * z) / d3,
                    hzz: (radius * radius - y * y) / d3,
                    hyz: y * z / d3,
                }
            }
            SurfaceKind::Cylinder { radius, .. } => {
                let d = (radius * radius - z * z).sqrt();
                SurfaceJet {
                    h: z * z / (radius + d),
                    hy: T::zero(),
                    hz: z / d,
                    hyy: T::zero(),
                    hzz: radius * radius / (d * d * d),
                    hyz: T::zero(),
                }
            }
        })
    }

    pub fn height(&self, y: T, z: T) -> Result<T> {
        if !self.in_shape_domain(y, z) {
            return Err(self.shape_domain_error(y, z));
        }
        Ok(match self.kind {
            SurfaceKind::Plate { .. } => T::zero(),
            SurfaceKind::Sphere { radius } => {
                let s = y * y + z * z;
                s / (radius + (radius * radius - s).sqrt())
            }
            SurfaceKind::Cylinder { radius, .. } => z * z / (radius + (radius * radius - z * z).sqrt()),
        })
    }

    /// `h(y1, z1) - h(y0, z0)` evaluated without cancellation.
    pub fn height_delta(&self, p0: [T; 2], p1: [T; 2]) -> Result<T> {
        for p in [p0, p1] {
            if !self.in_shape_domain(p[0], p[1]) {
                return Err(self.shape_domain_error(p[0], p[1]));
            }
        }
        Ok(match self.kind {
            SurfaceKind::Plate { .. } => T::zero(),
            SurfaceKind::Sphere { radius } => {
                let s0 = p0[0] * p0[0] + p0[1] * p0[1];
                let s1 = p1[0] * p1[0] + p1[1] * p1[1];
                let d0 = (radius * radius - s0).sqrt();
                let d1 = (radius * radius - s1).sqrt();
                let ds = (p1[0] - p0[0]) * (p1[0] + p0[0]) + (p1[1] - p0[1]) * (p1[1] + p0[1]);
                ds / (d0 + d1)
            }
            SurfaceKind::Cylinder { radius, .. } => {
                let d0 = (radius * radius - p0[1] * p0[1]).sqrt();
                let d1 = (radius * radius - p1[1] * p1[1]).sqrt();
                (p1[1] - p0[1]) * (p1[1] + p0[1]) / (d0 + d1)
            }
        })
    }

    /// Surface point in the local frame.
    pub fn local_point(&self, y: T, z: T) -> Result<Vec3<T>> {
        Ok(Vec3::new(self.height(y, z)?, y, z))
    }

    pub fn world_point(&self, y: T, z: T) -> Result<Vec3<T>> {
        Ok(self.placement.to_world(self.local_point(y, z)?))
    }
}

/// Jet of the shape function at a point of the physical target (open domain).
pub fn surface_jet<T: Scalar>(surface: &TargetSurface<T>, y: T, z: T) -> Result<SurfaceJet<T>> {
    check_physical(surface, y, z)?;
    surface.shape_jet(y, z)
}

/// Outward unit normal at `(y, z)`, in world coordinates.
pub fn surface_normal<T: Scalar>(surface: &TargetSurface<T>, y: T, z: T) -> Result<Vec3<T>> {
    let jet = surface_jet(surface, y, z)?;
    Ok(surface.placement.dir_to_world(jet.normal()))
}

fn check_physical<T: Scalar>(surface: &TargetSurface<T>, y: T, z: T) -> Result<()> {
    if surface.contains(y, z) {
        return Ok(());
    }
    let two = T::lit(2.0);
    let (coordinate, value) = match surface.kind {
        SurfaceKind::Plate { dy, .. } if y.abs() >= dy / two => ("y", y),
        SurfaceKind::Cylinder { length, .. } if y.abs() >= length / two => ("y", y),
        SurfaceKind::Sphere { .. } if y.abs() > z.abs() => ("y", y),
        _ => ("z", z),
    };
    Err(Error::Domain { coordinate, value: value.as_f64() })
}
