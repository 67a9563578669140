use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Ordered set of antenna positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaLayout<T> {
    positions: Vec<Vec3<T>>,
}

/// Layout descriptors. Every layout sits in the `x = -standoff` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayoutSpec<T> {
    /// `count` antennas along `z`, centred on `z = 0`.
    Linear { count: usize, spacing: T, standoff: T },
    /// `count_y` x `count_z` grid in the `y`-`z` plane, centred on the origin.
    Planar { count_y: usize, count_z: usize, spacing: T, standoff: T },
    /// `subarrays` linear sub-arrays along `z`, centres `separation` apart, the middle
    /// one at `z = 0`.
    Distributed { elements: usize, spacing: T, subarrays: usize, separation: T, standoff: T },
}

impl<T: Scalar> AntennaLayout<T> {
    pub fn new(positions: Vec<Vec3<T>>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Config("layout needs at least one antenna".into()));
        }
        for (i, a) in positions.iter().enumerate() {
            if !(a.x.is_finite() && a.y.is_finite() && a.z.is_finite()) {
                return Err(Error::Config(format!("antenna {i} has a non-finite coordinate")));
            }
            for (j, b) in positions.iter().enumerate().skip(i + 1) {
                if a == b {
                    return Err(Error::Config(format!("antennas {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    pub fn position(&self, index: usize) -> Vec3<T> {
        self.positions[index]
    }

    pub fn centroid(&self) -> Vec3<T> {
        let mut c = Vec3::zero();
        for p in &self.positions {
            c += *p;
        }
        c * (T::one() / T::from_usize_lossy(self.positions.len()))
    }

    /// Largest distance between two antennas.
    pub fn aperture(&self) -> T {
        self.extreme_pair().map(|(a, b)| a.distance(b)).unwrap_or_else(T::zero)
    }

    /// Unit direction joining the two most distant antennas, `None` for a single antenna.
    pub fn axis(&self) -> Option<Vec3<T>> {
        self.extreme_pair().map(|(a, b)| (b - a).normalized())
    }

    fn extreme_pair(&self) -> Option<(Vec3<T>, Vec3<T>)> {
        let mut best: Option<(T, Vec3<T>, Vec3<T>)> = None;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                let d = a.distance(*b);
                if best.is_none_or(|(bd, _, _)| d > bd) {
                    best = Some((d, *a, *b));
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }

    /// Moves every antenna by `offset`.
    pub fn translated(&self, offset: Vec3<T>) -> Self {
        Self { positions: self.positions.iter().map(|p| *p + offset).collect() }
    }
}

fn centred<T: Scalar>(count: usize, spacing: T, index: usize) -> T {
    let half = (T::from_usize_lossy(count) - T::one()) / T::lit(2.0);
    (T::from_usize_lossy(index) - half) * spacing
}

fn check_positive<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be positive, got {v}")))
    }
}

fn check_count(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::Config(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

pub fn build_layout<T: Scalar>(spec: &LayoutSpec<T>) -> Result<AntennaLayout<T>> {
    let positions = match *spec {
        LayoutSpec::Linear { count, spacing, standoff } => {
            check_count(count, "antenna count")?;
            check_positive(standoff, "standoff")?;
            if count > 1 {
                check_positive(spacing, "spacing")?;
            }
            (0..count)
                .map(|l| Vec3::new(-standoff, T::zero(), centred(count, spacing, l)))
                .collect()
        }
        LayoutSpec::Planar { count_y, count_z, spacing, standoff } => {
            check_count(count_y, "count_y")?;
            check_count(count_z, "count_z")?;
            check_positive(standoff, "standoff")?;
            if count_y * count_z > 1 {
                check_positive(spacing, "spacing")?;
            }
            let mut v = Vec::with_capacity(count_y * count_z);
            for iy in 0..count_y {
                for iz in 0..count_z {
                    v.push(Vec3::new(-standoff, centred(count_y, spacing, iy), centred(count_z, spacing, iz)));
                }
            }
            v
        }
        LayoutSpec::Distributed { elements, spacing, subarrays, separation, standoff } => {
            check_count(elements, "sub-array element count")?;
            check_count(subarrays, "sub-array count")?;
            check_positive(standoff, "standoff")?;
            if elements > 1 {
                check_positive(spacing, "spacing")?;
            }
            if subarrays > 1 {
                check_positive(separation, "sub-array separation")?;
            }
            let mut v = Vec::with_capacity(elements * subarrays);
            for s in 0..subarrays {
                let centre = centred(subarrays, separation, s);
                for l in 0..elements {
                    v.push(Vec3::new(-standoff, T::zero(), centre + centred(elements, spacing, l)));
                }
            }
            v
        }
    };
    AntennaLayout::new(positions)
}
