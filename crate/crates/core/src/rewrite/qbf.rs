use log::warn;

use crate::ast::{ArithOp, Atom, Program, Rule, Term};
use crate::error::{Error, Result};
use crate::parse::{Clause, Lit, Qbf};
use crate::rewrite::{atom, int, sym, var};

/// Largest number of existential literals per clause accepted by the
/// large-rule encodings; each clause yields up to `2^width` facts.
pub const MAX_Y_WIDTH: usize = 12;

/// Assigns the blocks of `qbf` to the positions of `pattern` (a string over
/// `a`/`e`) by greedy left-to-right matching.
fn match_blocks(qbf: &Qbf, pattern: &str) -> Result<Vec<Vec<u32>>> {
    let pat: Vec<char> = pattern.chars().collect();
    let mut out = vec![Vec::new(); pat.len()];
    let mut pos = 0;
    for (q, block) in &qbf.prefix {
        while pos < pat.len() && pat[pos] != q.letter() {
            pos += 1;
        }
        if pos == pat.len() {
            return Err(Error::PrefixShape {
                expected: pattern.to_owned(),
                found: qbf.shape(),
            });
        }
        out[pos] = block.clone();
        pos += 1;
    }
    Ok(out)
}

fn kept_clauses(qbf: &Qbf) -> Vec<(usize, &Clause)> {
    qbf.clauses
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            if c.tautology {
                warn!("dropping tautological clause {}", i + 1);
            }
            !c.tautology
        })
        .map(|(i, c)| (i + 1, c))
        .collect()
}

fn xconst(v: u32) -> Term {
    sym(format!("x{v}"))
}

/// Fixed-program encoding over `ass/2`, `pos1..pos3/3`, `var/1`,
/// `exists/1` and `sat`. Has an answer set iff the ∀∃ formula is false.
pub fn qbf2_classic(qbf: &Qbf) -> Result<Program> {
    let blocks = match_blocks(qbf, "ae")?;
    let clauses = kept_clauses(qbf);
    let mut p = Program::new();
    for &v in blocks[0].iter().chain(&blocks[1]) {
        p.push_fact(atom("var", vec![xconst(v)]));
    }
    for &v in &blocks[1] {
        p.push_fact(atom("exists", vec![xconst(v)]));
    }
    for &(ci, c) in &clauses {
        if c.literals.len() > 3 {
            return Err(Error::ClauseTooWide {
                clause: ci,
                width: c.literals.len(),
                max: 3,
            });
        }
        let Some(&last) = c.literals.last() else {
            p.push_fact(Atom::prop("sat"));
            continue;
        };
        for pos in 0..3 {
            let l: Lit = c.literals.get(pos).copied().unwrap_or(last);
            p.push_fact(atom(
                &format!("pos{}", pos + 1),
                vec![sym(format!("c{ci}")), xconst(l.var), int(l.positive as i64)],
            ));
        }
    }
    let ass = |x: Term, v: Term| atom("ass", vec![x, v]);
    p.push_rule(Rule::new(
        vec![ass(var("X"), int(1)), ass(var("X"), int(0))],
        vec![atom("var", vec![var("X")])],
        Vec::new(),
    ));
    for v in [0, 1] {
        p.push_rule(Rule::new(
            vec![ass(var("X"), int(v))],
            vec![Atom::prop("sat"), atom("exists", vec![var("X")])],
            Vec::new(),
        ));
    }
    let mut body = Vec::new();
    for i in 1..=3 {
        let (x, a) = (format!("X{i}"), format!("A{i}"));
        body.push(atom(
            &format!("pos{i}"),
            vec![var("C"), var(x.as_str()), var(a.as_str())],
        ));
        body.push(ass(var(x), Term::arith(ArithOp::Sub, int(1), var(a))));
    }
    p.push_rule(Rule::new(vec![Atom::prop("sat")], body, Vec::new()));
    p.push_rule(Rule::constraint(Vec::new(), vec![Atom::prop("sat")]));
    Ok(p)
}

/// All 0/1 tuples of length `n` in lexicographic order.
fn tuples(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..1u64 << n).map(move |m| (0..n).map(|i| (m >> (n - 1 - i) & 1) as i64).collect())
}

struct LargeRule {
    program: Program,
    /// Every `c_i(t)` atom.
    clause_atoms: Vec<Atom>,
    body: Vec<Atom>,
}

/// Shared part of the large-rule encodings: `t(x) | f(x)` for every `x` in
/// `xs`, the `c_i` rules and facts, and the body `c_1(η(c_1)), ...`.
fn large_rule_parts(qbf: &Qbf, xs: &[u32], ys: &[u32]) -> Result<LargeRule> {
    let mut program = Program::new();
    for &x in xs {
        program.push_rule(Rule::new(
            vec![atom("t", vec![xconst(x)]), atom("f", vec![xconst(x)])],
            Vec::new(),
            Vec::new(),
        ));
    }
    let mut clause_atoms = Vec::new();
    let mut body = Vec::new();
    for (ci, c) in kept_clauses(qbf) {
        let (y_lits, x_lits): (Vec<Lit>, Vec<Lit>) = c.literals.iter().partition(|l| ys.contains(&l.var));
        if y_lits.len() > MAX_Y_WIDTH {
            return Err(Error::ClauseTooWide {
                clause: ci,
                width: y_lits.len(),
                max: MAX_Y_WIDTH,
            });
        }
        let pred = format!("c{ci}");
        let falsifying: Vec<i64> = y_lits.iter().map(|l| !l.positive as i64).collect();
        for t in tuples(y_lits.len()) {
            let a = atom(&pred, t.iter().map(|&b| int(b)).collect());
            for l in &x_lits {
                let tf = if l.positive { "t" } else { "f" };
                program.push_rule(Rule::new(
                    vec![a.clone()],
                    vec![atom(tf, vec![xconst(l.var)])],
                    Vec::new(),
                ));
            }
            if t != falsifying {
                program.push_fact(a.clone());
            }
            clause_atoms.push(a);
        }
        body.push(atom(&pred, y_lits.iter().map(|l| var(format!("Y{}", l.var))).collect()));
    }
    Ok(LargeRule {
        program,
        clause_atoms,
        body,
    })
}

/// Large-rule encoding of a ∀∃ formula. Has an answer set iff the formula
/// is false.
pub fn qbf2_large_rule(qbf: &Qbf) -> Result<Program> {
    let blocks = match_blocks(qbf, "ae")?;
    let LargeRule { mut program, body, .. } = large_rule_parts(qbf, &blocks[0], &blocks[1])?;
    program.push_rule(Rule::constraint(body, Vec::new()));
    Ok(program)
}

/// Large-rule encoding of an ∃∀∃ formula with saturation over the
/// universal block. Has an answer set iff the formula is true.
pub fn qbf3_large_rule(qbf: &Qbf) -> Result<Program> {
    let blocks = match_blocks(qbf, "eae")?;
    let xs: Vec<u32> = blocks[0].iter().chain(&blocks[1]).copied().collect();
    let LargeRule {
        mut program,
        clause_atoms,
        body,
    } = large_rule_parts(qbf, &xs, &blocks[2])?;
    let sat = Atom::prop("sat");
    program.push_rule(Rule::new(vec![sat.clone()], body, Vec::new()));
    program.push_rule(Rule::constraint(Vec::new(), vec![sat.clone()]));
    let saturated = blocks[1]
        .iter()
        .flat_map(|&x| [atom("t", vec![xconst(x)]), atom("f", vec![xconst(x)])])
        .chain(clause_atoms);
    for a in saturated {
        program.push_rule(Rule::new(vec![a], vec![sat.clone()], Vec::new()));
    }
    Ok(program)
}
