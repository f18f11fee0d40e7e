//! Exhaustive reference procedures for small inputs.

pub mod abduction;
pub mod coloring;
pub mod grounder;
pub mod qbf;
pub mod solver;

pub use abduction::abduce_bruteforce;
pub use coloring::solve_coloring;
pub use grounder::{ground, GroundingLimits, GroundingResult};
pub use qbf::eval_qbf;
pub use solver::{answer_sets, answer_sets_naive, is_answer_set, SolveLimits};
