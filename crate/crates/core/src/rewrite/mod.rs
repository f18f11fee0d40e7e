//! Encoders that turn problem instances into programs with large,
//! instance-dependent rules.

mod abduction;
mod coloring;
mod qbf;
mod reduct;

pub use abduction::{abduction_encoding, AbductionInstance};
pub use coloring::{threecol_second_level, threecol_single_rule};
pub use qbf::{qbf2_classic, qbf2_large_rule, qbf3_large_rule, MAX_Y_WIDTH};
pub use reduct::{disjunctive_to_normal, ReductRuleBuilder};

use crate::ast::{Atom, Term};

fn var(name: impl Into<String>) -> Term {
    Term::var(name)
}

fn sym(name: impl Into<String>) -> Term {
    Term::sym(name)
}

fn int(i: i64) -> Term {
    Term::Int(i)
}

fn atom(p: &str, args: Vec<Term>) -> Atom {
    Atom::new(p, args)
}
