//! Stationary points, phase Hessians and stationary-phase evaluation of the
//! physical-optics pair response.

mod response;
mod stationary;

pub use response::{
    all_pair_responses, amplitude_factor, pair_response, pair_response_with, spa_coefficient, PairResponse, ResponseTerm,
};
pub use stationary::{
    fermat_minimize, path_length_jet, phase_hessian, plate_specular_point, solve_stationary, solve_stationary_with,
    specular_guess,
    PathJet, SolverOptions, StationaryPointSolution, Sym2,
};
