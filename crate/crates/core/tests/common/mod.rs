#![allow(dead_code)]

use std::collections::BTreeSet;

use lpdecomp::oracle::{answer_sets, ground, GroundingLimits, SolveLimits};
use lpdecomp::parse::{Clause, InputGraph, Lit, Qbf, Quantifier};
use lpdecomp::rewrite::AbductionInstance;
use lpdecomp::{Atom, GroundAtom, GroundProgram, GroundRule, Program, Rule, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Answer sets of a non-ground program, as sets of atoms.
pub fn solve(p: &Program) -> Vec<BTreeSet<GroundAtom>> {
    solve_with(p, 24)
}

pub fn solve_with(p: &Program, max_atoms: usize) -> Vec<BTreeSet<GroundAtom>> {
    let g = ground(p, &GroundingLimits::default()).unwrap();
    let sets = answer_sets(&g.program, &SolveLimits { max_atoms }).unwrap();
    sets.iter().map(|m| g.program.atoms_of(m)).collect()
}

pub fn consistent(p: &Program) -> bool {
    !solve_with(p, 40).is_empty()
}

/// Drops atoms whose predicate starts with one of `prefixes`.
pub fn project(sets: &[BTreeSet<GroundAtom>], prefixes: &[&str]) -> BTreeSet<BTreeSet<GroundAtom>> {
    sets.iter()
        .map(|s| {
            s.iter()
                .filter(|a| !prefixes.iter().any(|p| a.predicate.starts_with(p)))
                .cloned()
                .collect()
        })
        .collect()
}

/// Random QBF with the given block sizes (quantifiers alternate starting
/// with `first`) and clauses of 1 to `width` literals.
pub fn random_qbf(r: &mut Rng8, first: Quantifier, blocks: &[u32], max_clauses: usize, width: usize) -> Qbf {
    let mut prefix = Vec::new();
    let mut next = 1;
    let mut q = first;
    for &size in blocks {
        let size = r.gen_range(0..=size);
        prefix.push((q, (next..next + size).collect::<Vec<u32>>()));
        next += size;
        q = match q {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        };
    }
    let n = next - 1;
    let mut clauses = Vec::new();
    if n > 0 {
        for _ in 0..r.gen_range(0..=max_clauses) {
            let w = r.gen_range(1..=width);
            clauses.push(Clause::new(
                (0..w).map(|_| Lit::new(r.gen_range(1..=n), r.gen_bool(0.5))),
            ));
        }
    }
    Qbf::new(prefix, clauses, n)
}

pub const ATOM_NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "k"];

/// Random ground disjunctive program over the first `atoms` names.
pub fn random_ground_program(r: &mut Rng8, atoms: usize, max_rules: usize) -> GroundProgram {
    let mut gp = GroundProgram::new();
    for name in &ATOM_NAMES[..atoms] {
        gp.prop(name);
    }
    let pick = |r: &mut Rng8, max: usize| -> Vec<usize> {
        let k = r.gen_range(0..=max);
        let mut all: Vec<usize> = (0..atoms).collect();
        all.shuffle(r);
        all.truncate(k);
        all
    };
    for _ in 0..r.gen_range(1..=max_rules) {
        let head = pick(r, 2);
        let pos = pick(r, 2);
        let neg = pick(r, 2);
        gp.add_rule(GroundRule::new(head, pos, neg));
    }
    gp
}

pub fn random_graph(r: &mut Rng8, max_vertices: usize, p: f64) -> InputGraph {
    let n = r.gen_range(1..=max_vertices);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut g = InputGraph::new();
    for v in &names {
        g.add_vertex(v);
    }
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(p) {
                g.add_edge(&names[i], &names[j]);
            }
        }
    }
    g
}

/// A random safe rule over `vars` variables with random facts over a domain
/// of `domain` constants. Negative literals range over fact predicates.
pub fn random_rule_program(r: &mut Rng8, max_vars: usize, max_atoms: usize, domain: usize) -> Program {
    let nv = r.gen_range(1..=max_vars);
    let vars: Vec<String> = (0..nv).map(|i| format!("V{i}")).collect();
    let consts: Vec<String> = (0..domain).map(|i| format!("k{i}")).collect();
    let preds = [("p", 2), ("q", 2), ("s", 1), ("t", 1)];
    let mut p = Program::new();
    for &(name, arity) in &preds {
        let tuples: Vec<Vec<&String>> = if arity == 1 {
            consts.iter().map(|c| vec![c]).collect()
        } else {
            consts
                .iter()
                .flat_map(|a| consts.iter().map(move |b| vec![a, b]))
                .collect()
        };
        for t in tuples {
            if r.gen_bool(0.6) {
                p.push_fact(Atom::new(name, t.into_iter().map(|c| Term::sym(c.as_str())).collect()));
            }
        }
    }
    let n_atoms = r.gen_range(1..=max_atoms).max(nv.div_ceil(2));
    let mut pos = Vec::new();
    let mut used = BTreeSet::new();
    for i in 0..n_atoms {
        let &(name, arity) = preds.choose(r).unwrap();
        let mut args = Vec::new();
        for k in 0..arity {
            // Guarantee every variable occurs somewhere.
            let v = if 2 * i + k < nv {
                &vars[2 * i + k]
            } else {
                vars.choose(r).unwrap()
            };
            used.insert(v.clone());
            args.push(Term::var(v.as_str()));
        }
        pos.push(Atom::new(name, args));
    }
    let used: Vec<String> = used.into_iter().collect();
    let mut neg = Vec::new();
    for _ in 0..r.gen_range(0..=2) {
        let &(name, arity) = preds.choose(r).unwrap();
        neg.push(Atom::new(
            name,
            (0..arity)
                .map(|_| Term::var(used.choose(r).unwrap().as_str()))
                .collect(),
        ));
    }
    let head = if r.gen_bool(0.2) {
        Vec::new()
    } else {
        let k = r.gen_range(0..=used.len().min(3));
        let hv: Vec<&String> = used.choose_multiple(r, k).collect();
        vec![Atom::new("h", hv.into_iter().map(|v| Term::var(v.as_str())).collect())]
    };
    p.push_rule(Rule::new(head, pos, neg));
    p
}

/// Random abduction instance with `|H| <= max_hyps` and one or two
/// manifestations.
pub fn random_abduction(r: &mut Rng8, atoms: usize, max_hyps: usize, max_rules: usize) -> AbductionInstance {
    let gp = random_ground_program(r, atoms, max_rules);
    let mut all: Vec<usize> = (0..atoms).collect();
    all.shuffle(r);
    let h = all[..r.gen_range(0..=max_hyps.min(atoms))].to_vec();
    // At least one manifestation, otherwise E = ∅ trivially works.
    let m: Vec<usize> = vec![*all.choose(r).unwrap(), *all.choose(r).unwrap()];
    AbductionInstance::new(gp, h, m).unwrap()
}
