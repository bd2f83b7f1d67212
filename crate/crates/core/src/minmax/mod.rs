//! Finite linear min-max problems on a point set, solved as linear programs.

mod lp;
mod lu;
mod problem;
mod table;

pub use lp::{lp_core, lp_core_with, LinearProgram, LpError, LpOptions, LpSolution};
pub use problem::{solve_monic_min, solve_pinned_max, solve_pinned_max_bound, MinMaxProblem, MinMaxSolution};
pub use table::ChebTable;

pub(crate) use lu::DenseLu;
pub(crate) use problem::{check_pinned_args, PinnedSolver};
