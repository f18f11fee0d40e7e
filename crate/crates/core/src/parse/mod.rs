//! Text formats: ASP programs, QDIMACS, edge-list graphs, reified programs.

pub mod graph;
pub mod program;
pub mod qdimacs;
pub mod reified;

pub use graph::{emit_graph, parse_graph, InputGraph};
pub use program::{parse_program, parse_program_unchecked, print_program};
pub use qdimacs::{emit_qdimacs, parse_qdimacs, parse_qdimacs_with, Clause, Lit, Qbf, Quantifier};
pub use reified::{atom_ids, emit_reified, parse_atom_list, parse_reified};
