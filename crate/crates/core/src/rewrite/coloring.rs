use crate::ast::{Atom, Program, Rule};
use crate::error::{Error, Result};
use crate::parse::InputGraph;
use crate::rewrite::{atom, sym, var};

const COLORS: [&str; 3] = ["r", "g", "b"];

fn color_facts(p: &mut Program) {
    for c in COLORS {
        p.push_fact(atom("col", vec![sym(c)]));
    }
    for (a, b) in [("r", "g"), ("g", "b"), ("b", "r"), ("g", "r"), ("b", "g"), ("r", "b")] {
        p.push_fact(atom("e", vec![sym(a), sym(b)]));
    }
}

fn vertex_var(v: &str) -> String {
    format!("X_{v}")
}

/// `:- col(X_v) for every vertex, e(X_v,X_w) for every edge.`
fn coloring_constraint(g: &InputGraph) -> Rule {
    let mut body: Vec<Atom> = g
        .vertices
        .iter()
        .map(|v| atom("col", vec![var(vertex_var(v))]))
        .collect();
    body.extend(
        g.edges
            .iter()
            .map(|(v, w)| atom("e", vec![var(vertex_var(v)), var(vertex_var(w))])),
    );
    Rule::constraint(body, Vec::new())
}

/// One constraint whose body is satisfiable iff `g` is 3-colorable, so the
/// program has an answer set iff `g` is not 3-colorable.
pub fn threecol_single_rule(g: &InputGraph) -> Program {
    let mut p = Program::new();
    color_facts(&mut p);
    p.push_rule(coloring_constraint(g));
    p
}

/// Guesses a coloring of `V1`, rejects improper ones, and kills the guess
/// if it extends to a coloring of the whole graph.
pub fn threecol_second_level(g: &InputGraph) -> Result<Program> {
    let v1 = g.v1().ok_or(Error::MissingPartition)?;
    let mut p = Program::new();
    color_facts(&mut p);
    for v in v1 {
        p.push_fact(atom("vertex1", vec![sym(v.as_str())]));
    }
    for (v, w) in &g.edges {
        p.push_fact(atom("edge", vec![sym(v.as_str()), sym(w.as_str())]));
    }
    p.push_rule(Rule::new(
        COLORS.iter().map(|c| atom("c", vec![var("X"), sym(*c)])).collect(),
        vec![atom("vertex1", vec![var("X")])],
        Vec::new(),
    ));
    p.push_rule(Rule::constraint(
        vec![
            atom("edge", vec![var("X1"), var("X2")]),
            atom("c", vec![var("X1"), var("C")]),
            atom("c", vec![var("X2"), var("C")]),
        ],
        Vec::new(),
    ));
    let mut r_col = coloring_constraint(g);
    r_col
        .pos_body
        .extend(v1.iter().map(|v| atom("c", vec![sym(v.as_str()), var(vertex_var(v))])));
    p.push_rule(r_col);
    Ok(p)
}
