use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{spherical_view, AntennaLayout, TargetSurface};
use crate::physics::{Pattern, Physics};
use crate::scalar::Scalar;
use crate::spa::stationary::{solve_stationary_with, specular_guess, SolverOptions, StationaryPointSolution};
use crate::vec3::Vec3;

/// Geometric amplitude of the scattering integrand at surface parameters `param`,
/// per unit `dy dz`: `f(theta_tx) f(theta_rx) / (r_tx r_rx) * e_n . (e_phi_tx x e_theta_rx)`
/// times the surface-element stretch.
pub fn amplitude_factor<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    param: [T; 2],
    pattern: Pattern,
) -> Result<T> {
    let jet = surface.shape_jet(param[0], param[1])?;
    let point = surface.world_point(param[0], param[1])?;
    let normal = surface.placement.dir_to_world(jet.normal());
    let vt = spherical_view(tx, point)?;
    let vr = spherical_view(rx, point)?;
    let triple = normal.dot(vt.e_phi.cross(vr.e_theta));
    let gain = pattern.gain(vt.cos_theta) * pattern.gain(vr.cos_theta);
    Ok(gain / (vt.distance * vr.distance) * triple * jet.area_factor())
}

/// Stationary-phase contribution of one stationary point to the carrier-frequency
/// response of the pair (waveform delay excluded).
pub fn spa_coefficient<T: Scalar>(
    surface: &TargetSurface<T>,
    tx: Vec3<T>,
    rx: Vec3<T>,
    sp: &StationaryPointSolution<T>,
    physics: &Physics<T>,
) -> Result<Complex<T>> {
    if !sp.on_surface {
        return Err(Error::Precondition("stationary point lies off the target".into()));
    }
    let k = physics.wavenumber();
    let threshold = T::lit(1e-12) * k * k;
    if !(sp.det.abs() >= threshold) {
        return Err(Error::DegenerateHessian { det: sp.det.as_f64(), threshold: threshold.as_f64() });
    }
    let g = amplitude_factor(surface, tx, rx, sp.param, physics.pattern)?;
    let two_pi = T::lit(2.0) * T::PI();
    let magnitude = physics.prefactor() * g * two_pi / sp.det.abs().sqrt();
    let quarter = T::FRAC_PI_4() * T::lit(f64::from(sp.signature));
    Ok(Complex::from_polar(magnitude, sp.phase + quarter))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseTerm<T> {
    pub amplitude: Complex<T>,
    /// Propagation delay `(r_tx + r_rx) / c`, s.
    pub delay: T,
}

/// Response of the pair transmitting on `tx_index`, receiving on `rx_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResponse<T> {
    pub tx_index: usize,
    pub rx_index: usize,
    pub terms: Vec<ResponseTerm<T>>,
}

pub fn pair_response<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    tx_index: usize,
    rx_index: usize,
    physics: &Physics<T>,
) -> Result<PairResponse<T>> {
    pair_response_with(surface, layout, tx_index, rx_index, physics, &SolverOptions::default())
}

pub fn pair_response_with<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    tx_index: usize,
    rx_index: usize,
    physics: &Physics<T>,
    opts: &SolverOptions<T>,
) -> Result<PairResponse<T>> {
    let n = layout.len();
    if tx_index >= n || rx_index >= n {
        return Err(Error::Config(format!("pair ({tx_index}, {rx_index}) out of range for {n} antennas")));
    }
    let tx = layout.position(tx_index);
    let rx = layout.position(rx_index);
    let k = physics.wavenumber();
    let c = Physics::<T>::speed_of_light();
    let mut terms = Vec::new();
    for sp in solve_stationary_with(surface, tx, rx, k, opts)? {
        if !sp.on_surface {
            continue;
        }
        terms.push(ResponseTerm {
            amplitude: spa_coefficient(surface, tx, rx, &sp, physics)?,
            delay: sp.total_distance / c,
        });
    }
    Ok(PairResponse { tx_index, rx_index, terms })
}

/// Responses of every ordered pair `(tx, rx)` of the layout, transmitter-major.
///
/// Each pair is warm-started from the geometric specular guess.
pub fn all_pair_responses<T: Scalar>(
    surface: &TargetSurface<T>,
    layout: &AntennaLayout<T>,
    physics: &Physics<T>,
) -> Result<Vec<PairResponse<T>>> {
    let n = layout.len();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (tx, rx) = (idx / n, idx % n);
            let opts = specular_guess(surface, layout.position(tx), layout.position(rx))
                .map(SolverOptions::with_hint)
                .unwrap_or_default();
            pair_response_with(surface, layout, tx, rx, physics, &opts)
        })
        .collect()
}
