//! Decomposition of large non-ground logic-program rules along tree
//! decompositions, instance rewriters that produce such rules, and a small
//! grounder and answer-set enumerator used to check every transformation.

pub mod ast;
pub mod decompose;
pub mod error;
pub mod ground;
pub mod oracle;
pub mod parse;
pub mod rewrite;
pub mod treedecomp;

pub use ast::{
    Aggregate, AggregateFunction, ArithOp, Atom, CmpOp, Comparison, FreshSymbols, Literal, Program, Rule, Term, Value,
};
pub use error::{Error, ErrorClass, Result};
pub use ground::{GroundAtom, GroundProgram, GroundRule, Interpretation};
