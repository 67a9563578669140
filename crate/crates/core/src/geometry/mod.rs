//! Target-surface calculus, antenna layouts and per-antenna spherical frames.

mod layout;
mod surface;
mod view;

pub use layout::{build_layout, AntennaLayout, LayoutSpec};
pub use surface::{surface_jet, surface_normal, SurfaceJet, SurfaceKind, TargetSurface, BOUNDARY_TOLERANCE};
pub use view::{spherical_view, SphericalView};
