//! Extremal polynomials on the equispaced n-grid.
//!
//! The crate computes, for the grid `E_n` of `n` equally spaced points in
//! `[-1, 1]`:
//!
//! * the monic polynomial of given degree with the smallest maximum on the
//!   grid ([`minmax::solve_monic_min`]),
//! * the polynomial of degree at most `d` that is largest somewhere in
//!   `[-1, 1]` while bounded by one on the grid
//!   ([`ratio_extremal::solve_ratio_extremal`]),
//! * the constrained equilibrium measure `mu_alpha`, its logarithmic
//!   potential and the growth constant `C(alpha)` ([`equilibrium`]),
//! * finite-`n` sweeps that compare the two ([`asymptotics`]).
//!
//! All polynomials are stored in the Chebyshev basis ([`ChebPoly`]).

pub mod asymptotics;
pub mod config;
pub mod equilibrium;
mod error;
pub mod grid_poly;
pub mod json;
pub mod minmax;
pub mod quadrature;
pub mod ratio_extremal;
pub mod verify;

pub use error::{Error, Result};
pub use grid_poly::{
    eval, eval_log_abs, grid_norm, make_grid, roots_in_window, sup_norm_interval, ChebPoly, Grid,
    LogAbs, RootProduct, ZeroSet,
};
pub use minmax::{lp_core, solve_monic_min, solve_pinned_max, LpError, MinMaxProblem, MinMaxSolution};
pub use ratio_extremal::{
    analyze_structure, phi, solve_ratio_extremal, zero_counting_measure, ExtremalSolution,
    StructureReport,
};
