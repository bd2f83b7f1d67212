//! Grids, Chebyshev-basis polynomials, roots and norms.

mod cheb;
mod grid;
mod norms;
mod roots;

pub use cheb::{eval, eval_log_abs, ChebPoly, LogAbs, RootProduct, TRUNCATION_TOL};
pub use grid::{make_grid, Grid};
pub use norms::{grid_norm, sup_norm_interval, GridNorm, SupNorm};
pub use roots::{roots_in_window, roots_in_window_with_spacing, spectrum, RootSpectrum, ZeroSet};
