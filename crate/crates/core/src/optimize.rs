//! One-dimensional bracketed minimisation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Vertex abscissa of the parabola through three points, if it opens upwards.
pub fn parabolic_vertex<T: Scalar>(x: [T; 3], f: [T; 3]) -> Option<T> {
    let d1 = (x[1] - x[0]) * (f[1] - f[2]);
    let d2 = (x[1] - x[2]) * (f[1] - f[0]);
    let denom = T::lit(2.0) * (d1 - d2);
    let curvature = ((f[2] - f[1]) / (x[2] - x[1]) - (f[1] - f[0]) / (x[1] - x[0])) / (x[2] - x[0]);
    let convex = curvature > T::zero();
    if denom == T::zero() || !convex {
        return None;
    }
    Some(x[1] - ((x[1] - x[0]) * d1 - (x[1] - x[2]) * d2) / denom)
}

/// Golden-section search on `[lo, hi]` down to a bracket of width `tol`, then one
/// parabolic step through the final three abscissae.
///
/// A minimiser within `tol` of either end is reported as `Error::Boundary`.
pub fn golden_section<T: Scalar, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<Minimum<T>>
where
    F: FnMut(T) -> Result<T>,
{
    if !(hi > lo) || !(tol > T::zero()) {
        return Err(Error::Config(format!("invalid search interval [{lo}, {hi}] with tolerance {tol}")));
    }
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (mut x, mut value) = if fc <= fd { (c, fc) } else { (d, fd) };
    let (fa, fb) = (f(a)?, f(b)?);
    evaluations += 2;
    if let Some(v) = parabolic_vertex([a, x, b], [fa, value, fb]).filter(|v| *v > a && *v < b) {
        let fv = f(v)?;
        evaluations += 1;
        if fv <= value {
            x = v;
            value = fv;
        }
    }
    if x - lo <= tol || hi - x <= tol {
        return Err(Error::Boundary { at: x.as_f64() });
    }
    Ok(Minimum { x, value, evaluations })
}
