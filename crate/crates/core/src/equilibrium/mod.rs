//! The constrained equilibrium measure `mu_alpha`, its potential and the
//! growth constant `C(alpha)`.

mod constant;
mod functional;
mod measure;
mod potential;

pub use constant::{c_closed, c_integral, c_integrand, c_taylor, dc_dalpha, r_of_alpha};
pub use functional::{energy, j_functional, test_family, JOptions, JValue};
pub use measure::{
    cdf, mu_alpha, mu_alpha_density, mu_alpha_density_arccos, potential, AlphaMeasure, Density,
    Piece, PiecewiseMeasure, SIGMA_DENSITY,
};
pub use potential::{
    equilibrium_data, i_alpha_closed, i_alpha_quadrature, potential_derivative_closed,
    EquilibriumData,
};
