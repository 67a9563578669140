use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Cartesian 3-vector in metres (or dimensionless for directions).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Unit vector in the same direction; zero vectors are returned unchanged.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self * (T::one() / n)
        } else {
            self
        }
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn max_abs_diff(self, o: Self) -> T {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }

    pub fn cast<U: Scalar>(self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub rows: [Vec3<T>; 3],
}

impl<T: Scalar> Mat3<T> {
    pub fn identity() -> Self {
        Self::from_rows(Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z())
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self { rows: [r0, r1, r2] }
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    /// `self^T * v`.
    pub fn tmul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        self.rows[0] * v.x + self.rows[1] * v.y + self.rows[2] * v.z
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self::from_rows(
            Vec3::new(r[0].x, r[1].x, r[2].x),
            Vec3::new(r[0].y, r[1].y, r[2].y),
            Vec3::new(r[0].z, r[1].z, r[2].z),
        )
    }

    /// Rotation about the x axis by `angle` radians.
    pub fn rotation_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rows(
            Vec3::unit_x(),
            Vec3::new(T::zero(), c, -s),
            Vec3::new(T::zero(), s, c),
        )
    }
}

/// Rigid placement of a target's local frame in the world: `p_world = rotation * p_local + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Scalar> Default for Placement<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Placement<T> {
    pub fn identity() -> Self {
        Self { rotation: Mat3::identity(), translation: Vec3::zero() }
    }

    pub fn translation(offset: Vec3<T>) -> Self {
        Self { rotation: Mat3::identity(), translation: offset }
    }

    pub fn to_world(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    pub fn to_local(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.tmul_vec(p - self.translation)
    }

    pub fn dir_to_world(&self, d: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(d)
    }

    /// Applies a world-frame rotation about the world origin to the whole placement.
    pub fn rotated(&self, rot: &Mat3<T>) -> Self {
        let r = &self.rotation;
        let cols = [
            rot.mul_vec(Vec3::new(r.rows[0].x, r.rows[1].x, r.rows[2].x)),
            rot.mul_vec(Vec3::new(r.rows[0].y, r.rows[1].y, r.rows[2].y)),
            rot.mul_vec(Vec3::new(r.rows[0].z, r.rows[1].z, r.rows[2].z)),
        ];
        let rotation = Mat3::from_rows(
            Vec3::new(cols[0].x, cols[1].x, cols[2].x),
            Vec3::new(cols[0].y, cols[1].y, cols[2].y),
            Vec3::new(cols[0].z, cols[1].z, cols[2].z),
        );
        Self { rotation, translation: rot.mul_vec(self.translation) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_is_right_handed() {
        let x = Vec3::<f64>::unit_x();
        let y = Vec3::<f64>::unit_y();
        assert_eq!(x.cross(y), Vec3::unit_z());
    }

    #[test]
    fn placement_round_trip() {
        let p = Placement {
            rotation: Mat3::<f64>::rotation_x(0.3),
            translation: Vec3::new(1.0, -2.0, 0.5),
        };
        let v = Vec3::new(0.2, 0.7, -1.1);
        assert!(p.to_local(p.to_world(v)).max_abs_diff(v) < 1e-15);
        let rot = Mat3::rotation_x(-0.8);
        let q = p.rotated(&rot);
        assert!(q.to_world(v).max_abs_diff(rot.mul_vec(p.to_world(v))) < 1e-15);
    }
}
