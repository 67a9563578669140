//! Carrier, waveform and antenna constants shared across the pipeline.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT};

/// Normalised antenna radiation pattern `f(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pattern {
    #[default]
    Isotropic,
    /// `f(theta) = cos(theta)`, theta being the elevation from the horizontal plane.
    Cosine,
}

impl Pattern {
    #[inline]
    pub fn gain<T: Scalar>(self, cos_theta: T) -> T {
        match self {
            Pattern::Isotropic => T::one(),
            Pattern::Cosine => cos_theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics<T> {
    /// Carrier frequency, Hz.
    pub carrier: T,
    /// Signal bandwidth, Hz.
    pub bandwidth: T,
    /// Antenna length squared times feed current, m^2 A.
    pub l2i0: T,
    /// Free-space impedance, ohm.
    pub impedance: T,
    pub pattern: Pattern,
}

impl<T: Scalar> Physics<T> {
    pub fn new(carrier: T, bandwidth: T) -> Result<Self> {
        let p = Self {
            carrier,
            bandwidth,
            l2i0: T::one(),
            impedance: T::lit(FREE_SPACE_IMPEDANCE),
            pattern: Pattern::Isotropic,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.carrier, "carrier frequency"),
            (self.bandwidth, "bandwidth"),
            (self.l2i0, "L^2 I0"),
            (self.impedance, "impedance"),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Config(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn speed_of_light() -> T {
        T::lit(SPEED_OF_LIGHT)
    }

    pub fn wavelength(&self) -> T {
        Self::speed_of_light() / self.carrier
    }

    pub fn wavenumber(&self) -> T {
        T::lit(2.0) * T::PI() / self.wavelength()
    }

    /// Real prefactor `-k^2 eta L^2 I0 / (8 pi^2)` of the received-signal integral.
    pub fn prefactor(&self) -> T {
        let k = self.wavenumber();
        -(k * k * self.impedance * self.l2i0) / (T::lit(8.0) * T::PI() * T::PI())
    }
}
