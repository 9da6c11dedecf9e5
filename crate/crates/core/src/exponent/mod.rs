//! Exact-rational optimization of the exponent of `M` over `(x_P, x_L, θ)`.

mod problem;
mod solve;

pub use problem::{
    evaluate_bound, paper_bound_problem, parse_problem, rat, BoundProblem, Constraint,
    ExponentForm, Point, Rational, Var, POST_HOC_CONSTRAINT,
};
pub use solve::{
    minimize_max, staged_elimination, Certificate, EliminationTrace, OptimizationResult,
    StagedResult,
};
