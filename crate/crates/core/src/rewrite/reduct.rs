use std::collections::BTreeSet;

use crate::ast::{ArithOp, Atom, Comparison, Program, Rule, Term};
use crate::ground::GroundProgram;
use crate::parse::atom_ids;
use crate::rewrite::{atom, int, sym, var};

/// Builds the body of the large rule checking that some proper subset
/// `M'` (variables `Y<i>`) of the guessed model `M` (variables `X<i>`) is a
/// model of the reduct. Atom `i` is the `i`-th atom of the program; chain
/// variables are `N<i>` and `R<r>_<i>`.
pub struct ReductRuleBuilder<'a> {
    gp: &'a GroundProgram,
    ids: &'a [String],
    /// Atoms forced to keep their value in `M'`.
    fixed: BTreeSet<usize>,
}

impl<'a> ReductRuleBuilder<'a> {
    pub fn new(gp: &'a GroundProgram, ids: &'a [String]) -> Self {
        ReductRuleBuilder {
            gp,
            ids,
            fixed: BTreeSet::new(),
        }
    }

    pub fn with_fixed(mut self, fixed: BTreeSet<usize>) -> Self {
        self.fixed = fixed;
        self
    }

    fn x(a: usize) -> Term {
        var(format!("X{a}"))
    }

    fn y(a: usize) -> Term {
        var(format!("Y{a}"))
    }

    fn subset(&self, body: &mut Vec<Atom>, cmps: &mut Vec<Comparison>) {
        for a in 0..self.gp.atoms.len() {
            body.push(atom("assign", vec![sym(self.ids[a].as_str()), Self::x(a)]));
            if self.fixed.contains(&a) {
                cmps.push(Comparison::eq(Self::x(a), Self::y(a)));
            } else {
                body.push(atom("leq", vec![Self::y(a), Self::x(a)]));
            }
        }
    }

    /// `C0 = 0, or(C0, t0, C1), ..., or(Cn-1, tn-1, Cn), Cn = 1`.
    fn chain(name: impl Fn(usize) -> Term, terms: Vec<Term>, body: &mut Vec<Atom>, cmps: &mut Vec<Comparison>) {
        cmps.push(Comparison::eq(name(0), int(0)));
        let n = terms.len();
        for (i, t) in terms.into_iter().enumerate() {
            body.push(atom("or", vec![name(i), t, name(i + 1)]));
        }
        cmps.push(Comparison::eq(name(n), int(1)));
    }

    fn neq(&self, body: &mut Vec<Atom>, cmps: &mut Vec<Comparison>) {
        let terms = (0..self.gp.atoms.len())
            .map(|a| Term::arith(ArithOp::Sub, Self::x(a), Self::y(a)))
            .collect();
        Self::chain(|i| var(format!("N{i}")), terms, body, cmps);
    }

    fn model(&self, body: &mut Vec<Atom>, cmps: &mut Vec<Comparison>) {
        for (ri, r) in self.gp.rules.iter().enumerate() {
            let mut terms: Vec<Term> = r.head.iter().map(|&a| Self::y(a)).collect();
            terms.extend(r.pos.iter().map(|&a| Term::arith(ArithOp::Sub, int(1), Self::y(a))));
            terms.extend(r.neg.iter().map(|&a| Self::x(a)));
            Self::chain(|i| var(format!("R{ri}_{i}")), terms, body, cmps);
        }
    }

    /// The rule `head :- B_subset, B_neq, B_model.`
    pub fn build(&self, head: Vec<Atom>) -> Rule {
        let mut body = Vec::new();
        let mut cmps = Vec::new();
        self.subset(&mut body, &mut cmps);
        self.neq(&mut body, &mut cmps);
        self.model(&mut body, &mut cmps);
        Rule::new(head, body, Vec::new()).with_comparisons(cmps)
    }
}

pub(crate) fn reified_facts(p: &mut Program, gp: &GroundProgram, ids: &[String]) {
    for id in ids {
        p.push_fact(atom("atom", vec![sym(id.as_str())]));
    }
    for ri in 0..gp.rules.len() {
        p.push_fact(atom("rule", vec![sym(format!("r{ri}"))]));
    }
}

pub(crate) fn bool_facts(p: &mut Program) {
    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
        p.push_fact(atom("leq", vec![int(a), int(b)]));
    }
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        p.push_fact(atom("or", vec![int(a), int(b), int(a | b)]));
    }
}

/// A normal program over the reified `gp` whose answer sets, projected to
/// the atoms `a` with `assign(a,1)`, are the answer sets of `gp`. Atom ids
/// follow [`atom_ids`]; rule ids are `r<i>`.
pub fn disjunctive_to_normal(gp: &GroundProgram) -> Program {
    let ids = atom_ids(gp);
    let mut p = Program::new();
    reified_facts(&mut p, gp, &ids);
    bool_facts(&mut p);
    for (ri, r) in gp.rules.iter().enumerate() {
        for (kind, list) in [("head", &r.head), ("pos", &r.pos), ("neg", &r.neg)] {
            for &a in list {
                p.push_fact(atom(kind, vec![sym(format!("r{ri}")), sym(ids[a].as_str())]));
            }
        }
    }
    let (va, vr) = (|| var("A"), || var("R"));
    let assign = |v: i64| atom("assign", vec![va(), int(v)]);
    let sat_r = || atom("sat", vec![vr()]);
    p.push_rule(Rule::new(
        vec![assign(1)],
        vec![atom("atom", vec![va()])],
        vec![assign(0)],
    ));
    p.push_rule(Rule::new(
        vec![assign(0)],
        vec![atom("atom", vec![va()])],
        vec![assign(1)],
    ));
    for (kind, v) in [("head", 1), ("pos", 0), ("neg", 1)] {
        p.push_rule(Rule::new(
            vec![sat_r()],
            vec![atom(kind, vec![vr(), va()]), assign(v)],
            Vec::new(),
        ));
    }
    p.push_rule(Rule::constraint(vec![atom("rule", vec![vr()])], vec![sat_r()]));
    p.push_rule(ReductRuleBuilder::new(gp, &ids).build(Vec::new()));
    p
}
