use std::collections::BTreeSet;

use crate::ast::{Atom, Program, Rule};
use crate::error::{Error, Result};
use crate::ground::{GroundAtom, GroundProgram, GroundRule};
use crate::parse::atom_ids;
use crate::rewrite::reduct::{bool_facts, ReductRuleBuilder};
use crate::rewrite::{atom, int, sym, var};

/// A ground program with hypotheses `H` and manifestations `M`, both given
/// as atom indices into `program.atoms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbductionInstance {
    pub program: GroundProgram,
    pub hypotheses: BTreeSet<usize>,
    pub manifestations: BTreeSet<usize>,
}

impl AbductionInstance {
    pub fn new(
        program: GroundProgram,
        hypotheses: impl IntoIterator<Item = usize>,
        manifestations: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let inst = AbductionInstance {
            program,
            hypotheses: hypotheses.into_iter().collect(),
            manifestations: manifestations.into_iter().collect(),
        };
        let n = inst.program.atoms.len();
        if let Some(a) = inst.hypotheses.iter().chain(&inst.manifestations).find(|&&a| a >= n) {
            return Err(Error::InvalidInstance(format!("atom index {a} out of range")));
        }
        Ok(inst)
    }

    /// The program `Π ∪ E`.
    pub fn with_facts(&self, e: &BTreeSet<usize>) -> GroundProgram {
        let mut gp = self.program.clone();
        for &a in e {
            gp.add_rule(GroundRule::new(vec![a], Vec::new(), Vec::new()));
        }
        gp
    }

    /// An equivalent instance in which no hypothesis occurs in a rule head:
    /// each such `h` is replaced as a hypothesis by a fresh atom `h'` and
    /// the rule `h :- h'` is added.
    pub fn route_derivable_hypotheses(&self) -> AbductionInstance {
        let heads: BTreeSet<usize> = self.program.rules.iter().flat_map(|r| r.head.iter().copied()).collect();
        let mut gp = self.program.clone();
        let mut used: BTreeSet<String> = atom_ids(&gp).into_iter().collect();
        let mut hypotheses = BTreeSet::new();
        for &h in &self.hypotheses {
            if !heads.contains(&h) {
                hypotheses.insert(h);
                continue;
            }
            let base = format!("{}_hyp", atom_ids(&self.program)[h]);
            let mut name = base.clone();
            let mut k = 1;
            while used.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            used.insert(name.clone());
            let fresh = gp.intern(GroundAtom::prop(name));
            gp.add_rule(GroundRule::new(vec![h], vec![fresh], Vec::new()));
            hypotheses.insert(fresh);
        }
        AbductionInstance {
            program: gp,
            hypotheses,
            manifestations: self.manifestations.clone(),
        }
    }
}

fn assign(a: &str, v: i64) -> Atom {
    atom("assign", vec![sym(a), int(v)])
}

/// The saturation encoding of the abduction problem over `inst` as given.
/// It is only exact when no hypothesis occurs in a rule head.
pub(crate) fn encode(inst: &AbductionInstance) -> Program {
    let gp = &inst.program;
    let ids = atom_ids(gp);
    let mut p = Program::new();
    for id in &ids {
        p.push_fact(atom("atom", vec![sym(id.as_str())]));
    }
    for &h in &inst.hypotheses {
        p.push_fact(atom("hyp", vec![sym(ids[h].as_str())]));
    }
    bool_facts(&mut p);
    let sat = Atom::prop("sat");
    let va = || var("A");
    let a_is = |v: i64| atom("assign", vec![va(), int(v)]);
    p.push_rule(Rule::new(
        vec![a_is(1), a_is(0)],
        vec![atom("atom", vec![va()])],
        Vec::new(),
    ));
    for v in [1, 0] {
        p.push_rule(Rule::new(
            vec![a_is(v)],
            vec![sat.clone(), atom("atom", vec![va()])],
            vec![atom("hyp", vec![va()])],
        ));
    }
    p.push_rule(Rule::constraint(Vec::new(), vec![sat.clone()]));
    p.push_rule(Rule::new(
        vec![sat.clone()],
        inst.manifestations.iter().map(|&m| assign(&ids[m], 1)).collect(),
        Vec::new(),
    ));
    for r in &gp.rules {
        let mut body: Vec<Atom> = r.head.iter().map(|&a| assign(&ids[a], 0)).collect();
        body.extend(r.pos.iter().map(|&a| assign(&ids[a], 1)));
        body.extend(r.neg.iter().map(|&a| assign(&ids[a], 0)));
        p.push_rule(Rule::new(vec![sat.clone()], body, Vec::new()));
    }
    p.push_rule(
        ReductRuleBuilder::new(gp, &ids)
            .with_fixed(inst.hypotheses.clone())
            .build(vec![sat]),
    );
    p
}

/// A disjunctive program that has an answer set iff some `E ⊆ H` makes
/// every answer set of `Π ∪ E` contain `M`. Hypotheses that occur in rule
/// heads are first routed through fresh atoms, see
/// [`AbductionInstance::route_derivable_hypotheses`].
pub fn abduction_encoding(inst: &AbductionInstance) -> Program {
    encode(&inst.route_derivable_hypotheses())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{abduce_bruteforce, answer_sets, ground, GroundingLimits, SolveLimits};

    fn consistent(p: &Program) -> bool {
        let g = ground(p, &GroundingLimits::default()).unwrap();
        !answer_sets(&g.program, &SolveLimits { max_atoms: 40 })
            .unwrap()
            .is_empty()
    }

    #[test]
    fn encoding_shape() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["m"], &["h"], &[]);
        let (m, h) = (gp.prop("m"), gp.prop("h"));
        let inst = AbductionInstance::new(gp, [h], [m]).unwrap();
        let p = abduction_encoding(&inst);
        let rules: Vec<String> = p.rules.iter().map(Rule::to_string).collect();
        assert_eq!(
            rules[..6],
            [
                "assign(A,1) | assign(A,0) :- atom(A).",
                "assign(A,1) :- sat, atom(A), not hyp(A).",
                "assign(A,0) :- sat, atom(A), not hyp(A).",
                ":- not sat.",
                "sat :- assign(m,1).",
                "sat :- assign(m,0), assign(h,1).",
            ]
        );
        assert!(
            rules[6].starts_with("sat :- assign(m,X0), leq(Y0,X0), assign(h,X1), or("),
            "{}",
            rules[6]
        );
        assert!(rules[6].contains("X1 = Y1"), "{}", rules[6]);
        assert!(p.rules.iter().all(Rule::is_safe));
    }

    #[test]
    fn routing_only_touches_derivable_hypotheses() {
        let mut gp = GroundProgram::new();
        gp.add_named(&["m"], &["h"], &[]);
        gp.add_named(&["h"], &[], &["g"]);
        let (m, h, g) = (gp.prop("m"), gp.prop("h"), gp.prop("g"));
        let inst = AbductionInstance::new(gp, [h, g], [m]).unwrap();
        let routed = inst.route_derivable_hypotheses();
        assert_eq!(routed.program.atoms.len(), 4);
        assert_eq!(routed.program.atoms[3].to_string(), "h_hyp");
        assert_eq!(routed.hypotheses, BTreeSet::from([g, 3]));
        assert_eq!(
            routed.program.rules.last().unwrap(),
            &GroundRule::new(vec![h], vec![3], vec![])
        );
    }

    #[test]
    fn derivable_hypothesis_needs_routing() {
        // Π = {h.}, H = {h}, M = {m}: no E works since m is never derived.
        // Guessing h false makes every candidate violate `h.`, so the
        // unrouted encoding saturates and wrongly reports a solution.
        let mut gp = GroundProgram::new();
        gp.add_named(&["h"], &[], &[]);
        let (h, m) = (gp.prop("h"), gp.prop("m"));
        let inst = AbductionInstance::new(gp, [h], [m]).unwrap();
        assert_eq!(abduce_bruteforce(&inst, false).unwrap(), None);
        assert!(consistent(&encode(&inst)));
        assert!(!consistent(&abduction_encoding(&inst)));
    }

    #[test]
    fn out_of_range_atoms_rejected() {
        assert!(matches!(
            AbductionInstance::new(GroundProgram::new(), [0], []),
            Err(Error::InvalidInstance(_))
        ));
    }
}
