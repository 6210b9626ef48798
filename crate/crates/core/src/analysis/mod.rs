//! Success rates of the two-station strategies and numerical searches for
//! perfect cheating with two- and three-level shared resources.
//!
//! The searches give numerical evidence on finite grids of encodings; they
//! are not proofs.

pub mod optimize;
mod rates;
mod resource;

pub use rates::{
    b2_basis_rate, b2_basis_success, half_domain_check, midpoint_average, optimal_b2_basis_search, rate_monte_carlo, rate_quadrature,
    rate_quadrature_teleport, rotation_from_params, sphere_average, theta_sweep, BasisSearchResult, Quadrature, RateReport,
    BASIS_SEARCH_GRID, MIN_SAMPLES, QUADRATURE_TOL,
};
pub use resource::{
    constraint_check, fibonacci_sphere, infer_selections, qutrit_cheat_search, qutrit_constraint_check, resource_search,
    two_qubit_cheat_search, ConstraintResiduals, EncodingGrid, ResourceSearchResult, SearchConfig, WeightModel, MIN_GAP_RESTARTS,
};
