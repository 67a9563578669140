use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Spherical frame attached to one antenna and one surface point.
///
/// `theta` is the elevation from the horizontal (`x`-`z`) plane and `phi` the azimuth
/// measured from `x`; the dipoles are oriented along `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalView<T> {
    pub distance: T,
    pub sin_theta: T,
    pub cos_theta: T,
    pub sin_phi: T,
    pub cos_phi: T,
    /// Points from the antenna towards the surface point.
    pub e_r: Vec3<T>,
    pub e_theta: Vec3<T>,
    pub e_phi: Vec3<T>,
}

pub fn spherical_view<T: Scalar>(antenna: Vec3<T>, surface_point: Vec3<T>) -> Result<SphericalView<T>> {
    let d = surface_point - antenna;
    let r = d.norm();
    if !(r > T::zero()) {
        return Err(Error::Geometry("antenna coincides with surface point".into()));
    }
    let horiz = (d.x * d.x + d.z * d.z).sqrt();
    let sin_theta = d.y / r;
    let cos_theta = horiz / r;
    let (sin_phi, cos_phi) = if horiz > T::zero() {
        (d.z / horiz, d.x / horiz)
    } else {
        (T::zero(), T::one())
    };
    let e_r = Vec3::new(cos_theta * cos_phi, sin_theta, cos_theta * sin_phi);
    let e_theta = Vec3::new(-sin_theta * cos_phi, cos_theta, -sin_theta * sin_phi);
    let e_phi = Vec3::new(-sin_phi, T::zero(), cos_phi);
    Ok(SphericalView { distance: r, sin_theta, cos_theta, sin_phi, cos_phi, e_r, e_theta, e_phi })
}
