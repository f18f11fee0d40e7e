//! Propositional programs.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::ast::{Atom, Term, Value};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Value>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        GroundAtom::new(predicate, Vec::new())
    }

    /// `None` if `atom` has a variable or arithmetic argument.
    pub fn from_atom(atom: &Atom) -> Option<Self> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Sym(s) => Some(Value::Sym(s.clone())),
                Term::Int(i) => Some(Value::Int(*i)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom::new(atom.predicate.clone(), args))
    }

    pub fn to_atom(&self) -> Atom {
        Atom::new(
            self.predicate.clone(),
            self.args.iter().cloned().map(Term::from).collect(),
        )
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, v) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A rule over atom indices of the owning [`GroundProgram`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Vec<usize>,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

impl GroundRule {
    pub fn new(head: Vec<usize>, pos: Vec<usize>, neg: Vec<usize>) -> Self {
        GroundRule { head, pos, neg }
    }

    pub fn is_normal(&self) -> bool {
        self.head.len() <= 1
    }

    pub fn body_true(&self, m: &Interpretation) -> bool {
        self.pos.iter().all(|a| m.contains(a)) && self.neg.iter().all(|a| !m.contains(a))
    }

    pub fn satisfied_by(&self, m: &Interpretation) -> bool {
        !self.body_true(m) || self.head.iter().any(|a| m.contains(a))
    }
}

/// A set of true atoms, by index.
pub type Interpretation = BTreeSet<usize>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub atoms: IndexSet<GroundAtom>,
    pub rules: Vec<GroundRule>,
}

impl GroundProgram {
    pub fn new() -> Self {
        GroundProgram::default()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> usize {
        self.atoms.insert_full(atom).0
    }

    /// Interns a 0-ary atom by name.
    pub fn prop(&mut self, name: &str) -> usize {
        self.intern(GroundAtom::prop(name))
    }

    pub fn index_of(&self, atom: &GroundAtom) -> Option<usize> {
        self.atoms.get_index_of(atom)
    }

    pub fn add_rule(&mut self, rule: GroundRule) {
        debug_assert!(rule
            .head
            .iter()
            .chain(&rule.pos)
            .chain(&rule.neg)
            .all(|&a| a < self.atoms.len()));
        self.rules.push(rule);
    }

    /// Convenience for tests: rule over 0-ary atoms given by name.
    pub fn add_named(&mut self, head: &[&str], pos: &[&str], neg: &[&str]) {
        let mut ids = |xs: &[&str]| xs.iter().map(|x| self.prop(x)).collect::<Vec<_>>();
        let h = ids(head);
        let p = ids(pos);
        let n = ids(neg);
        self.add_rule(GroundRule::new(h, p, n));
    }

    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(GroundRule::is_normal)
    }

    pub fn is_model(&self, m: &Interpretation) -> bool {
        self.rules.iter().all(|r| r.satisfied_by(m))
    }

    /// Gelfond-Lifschitz reduct: drops rules blocked by `m`, strips negation.
    pub fn reduct(&self, m: &Interpretation) -> GroundProgram {
        GroundProgram {
            atoms: self.atoms.clone(),
            rules: self
                .rules
                .iter()
                .filter(|r| r.neg.iter().all(|a| !m.contains(a)))
                .map(|r| GroundRule::new(r.head.clone(), r.pos.clone(), Vec::new()))
                .collect(),
        }
    }

    /// Maps an interpretation to atoms.
    pub fn atoms_of(&self, m: &Interpretation) -> BTreeSet<GroundAtom> {
        m.iter().map(|&i| self.atoms[i].clone()).collect()
    }

    /// Head-cycle freedom over the positive dependency graph: fails if two
    /// atoms of one head share a strongly connected component.
    pub fn check_head_cycle_free(&self) -> Result<()> {
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<_> = (0..self.atoms.len()).map(|i| g.add_node(i)).collect();
        for r in &self.rules {
            for &h in &r.head {
                for &b in &r.pos {
                    g.add_edge(nodes[b], nodes[h], ());
                }
            }
        }
        let mut comp = vec![0usize; self.atoms.len()];
        for (ci, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for n in scc {
                comp[g[n]] = ci;
            }
        }
        for r in &self.rules {
            for (i, &a) in r.head.iter().enumerate() {
                for &b in &r.head[i + 1..] {
                    if a != b && comp[a] == comp[b] {
                        return Err(Error::HeadCycleDetected {
                            first: self.atoms[a].to_string(),
                            second: self.atoms[b].to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces each disjunctive rule by its shifted normal rules. With
    /// `check`, refuses programs that are not head-cycle free.
    pub fn shift(&self, check: bool) -> Result<GroundProgram> {
        if check {
            self.check_head_cycle_free()?;
        }
        let mut out = GroundProgram {
            atoms: self.atoms.clone(),
            rules: Vec::new(),
        };
        for r in &self.rules {
            if r.is_normal() {
                out.rules.push(r.clone());
                continue;
            }
            for (i, &a) in r.head.iter().enumerate() {
                let mut neg = r.neg.clone();
                neg.extend(
                    r.head
                        .iter()
                        .enumerate()
                        .filter(|&(j, &b)| j != i && b != a)
                        .map(|(_, &b)| b),
                );
                out.rules.push(GroundRule::new(vec![a], r.pos.clone(), neg));
            }
        }
        Ok(out)
    }

    fn fmt_rule(&self, r: &GroundRule, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = r.head.iter().map(|&a| self.atoms[a].to_string()).collect();
        f.write_str(&names.join(" | "))?;
        let mut body: Vec<String> = r.pos.iter().map(|&a| self.atoms[a].to_string()).collect();
        body.extend(r.neg.iter().map(|&a| format!("not {}", self.atoms[a])));
        match (r.head.is_empty(), body.is_empty()) {
            (false, true) => f.write_str("."),
            (true, true) => f.write_str(":- ."),
            (h, false) => {
                if !h {
                    f.write_str(" ")?;
                }
                write!(f, ":- {}.", body.join(", "))
            }
        }
    }
}

impl fmt::Display for GroundProgram {
    /// One rule per line in ASP syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            self.fmt_rule(r, f)?;
            writeln!(f)?;
        }
        Ok(())
    }
}
