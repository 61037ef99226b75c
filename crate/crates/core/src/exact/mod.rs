//! Exact scalar and linear-algebra kernel: arbitrary-precision rationals,
//! fraction-free elimination, and an exact-pivoting simplex solver.

mod lp;
mod matrix;
mod rational;

pub use lp::{Feasibility, LpOutcome, LpProblem, LpSense, Optimum, lp_feasible, lp_solve};
pub use matrix::{
    RatMatrix, SolveOutcome, independent_rows, rank, solve_square, solve_square_i128,
    verify_solution,
};
pub use rational::{
    Rational, decimal_string, format_rational, parse_rational, rat, rat_i64,
};
