mod common;

use std::collections::BTreeSet;

use common::*;
use lpdecomp::decompose::{decompose_program, DecomposeOptions};
use lpdecomp::oracle::{answer_sets, answer_sets_naive, eval_qbf, ground, GroundingLimits, SolveLimits};
use lpdecomp::parse::*;
use lpdecomp::treedecomp::{decompose_graph, validate_td, GaifmanGraph, Heuristic};
use lpdecomp::{
    Aggregate, AggregateFunction, ArithOp, Atom, CmpOp, Comparison, GroundProgram, GroundRule, Literal, Program, Rule,
    Term,
};
use proptest::prelude::*;

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z", "W1", "U_2"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b", "c_1", "rG"]).prop_map(Term::sym),
        (-20i64..20).prop_map(Term::Int),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        (
            prop::sample::select(vec![ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div]),
            inner.clone(),
            inner,
        )
            .prop_map(|(op, a, b)| Term::arith(op, a, b))
    })
}

fn atom() -> impl Strategy<Value = Atom> {
    (
        prop::sample::select(vec!["p", "q", "edge", "r2"]),
        prop::collection::vec(term(), 0..3),
    )
        .prop_map(|(p, args)| Atom::new(p, args))
}

fn cmp_op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge])
}

fn aggregate() -> impl Strategy<Value = Aggregate> {
    (
        prop::sample::select(vec![
            AggregateFunction::Count,
            AggregateFunction::Sum,
            AggregateFunction::Min,
            AggregateFunction::Max,
        ]),
        prop::collection::vec(prop::sample::select(vec!["X", "V"]), 1..3),
        prop::collection::vec((atom(), any::<bool>()), 1..3),
        cmp_op(),
        term(),
    )
        .prop_map(|(function, vars, cond, guard_op, guard)| Aggregate {
            function,
            tuple_vars: vars.into_iter().map(str::to_owned).collect(),
            condition: cond
                .into_iter()
                .map(|(a, n)| if n { Literal::neg(a) } else { Literal::pos(a) })
                .collect(),
            guard_op,
            guard,
        })
}

fn rule() -> impl Strategy<Value = Rule> {
    (
        prop::collection::vec(atom(), 0..3),
        prop::collection::vec(atom(), 0..4),
        prop::collection::vec(atom(), 0..2),
        prop::collection::vec((term(), cmp_op(), term()), 0..2),
        prop::collection::vec(aggregate(), 0..2),
    )
        .prop_map(|(h, p, n, c, a)| {
            Rule::new(h, p, n)
                .with_comparisons(c.into_iter().map(|(l, o, r)| Comparison::new(l, o, r)).collect())
                .with_aggregates(a)
        })
}

fn program() -> impl Strategy<Value = Program> {
    prop::collection::vec(rule(), 0..5).prop_map(|rules| {
        let mut p = Program::new();
        for r in rules {
            p.push_rule(r);
        }
        p
    })
}

fn qbf() -> impl Strategy<Value = Qbf> {
    (
        prop::collection::vec((any::<bool>(), 1u32..4), 0..4),
        prop::collection::vec(prop::collection::vec((1u32..10, any::<bool>()), 0..4), 0..6),
    )
        .prop_map(|(blocks, clauses)| {
            let mut prefix = Vec::new();
            let mut next = 1;
            for (forall, size) in blocks {
                let q = if forall { Quantifier::Forall } else { Quantifier::Exists };
                prefix.push((q, (next..next + size).collect::<Vec<_>>()));
                next += size;
            }
            let n = next - 1;
            let clauses: Vec<Clause> = clauses
                .into_iter()
                .map(|c| Clause::new(c.into_iter().filter(|&(v, _)| v <= n).map(|(v, s)| Lit::new(v, s))))
                .collect();
            Qbf::new(prefix, clauses, n)
        })
}

fn ground_program() -> impl Strategy<Value = GroundProgram> {
    let lits = || prop::collection::btree_set(0usize..6, 0..3);
    (1usize..=6, prop::collection::vec((lits(), lits(), lits()), 1..8)).prop_map(|(n, rules)| {
        let mut gp = GroundProgram::new();
        for name in &ATOM_NAMES[..n] {
            gp.prop(name);
        }
        for (h, p, ng) in rules {
            let f = |s: BTreeSet<usize>| s.into_iter().filter(|&a| a < n).collect::<Vec<_>>();
            gp.add_rule(GroundRule::new(f(h), f(p), f(ng)));
        }
        gp
    })
}

/// Builds the full ∧/∨ expansion tree of a QBF and evaluates it bottom-up.
enum Tree {
    Leaf(bool),
    And(Vec<Tree>),
    Or(Vec<Tree>),
}

fn expand(q: &Qbf, vars: &[(Quantifier, u32)], assign: &mut Vec<bool>) -> Tree {
    match vars.split_first() {
        None => Tree::And(
            q.clauses
                .iter()
                .map(|c| {
                    Tree::Or(
                        c.literals
                            .iter()
                            .map(|l| Tree::Leaf(assign[l.var as usize] == l.positive))
                            .collect(),
                    )
                })
                .collect(),
        ),
        Some((&(quant, v), rest)) => {
            let mut kids = Vec::new();
            for b in [false, true] {
                assign[v as usize] = b;
                kids.push(expand(q, rest, assign));
            }
            match quant {
                Quantifier::Forall => Tree::And(kids),
                Quantifier::Exists => Tree::Or(kids),
            }
        }
    }
}

fn value(t: &Tree) -> bool {
    match t {
        Tree::Leaf(b) => *b,
        Tree::And(ts) => ts.iter().fold(true, |acc, t| value(t) & acc),
        Tree::Or(ts) => ts.iter().fold(false, |acc, t| value(t) | acc),
    }
}

fn eval_by_expansion(q: &Qbf) -> bool {
    let mut vars: Vec<(Quantifier, u32)> = q
        .prefix
        .iter()
        .flat_map(|(qu, b)| b.iter().map(move |&v| (*qu, v)))
        .collect();
    for c in &q.clauses {
        for l in &c.literals {
            if !vars.iter().any(|&(_, v)| v == l.var) {
                vars.push((Quantifier::Exists, l.var));
            }
        }
    }
    let mut assign = vec![false; q.num_vars as usize + 1];
    value(&expand(q, &vars, &mut assign))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn program_print_parse_roundtrip(p in program()) {
        let text = print_program(&p);
        let back = parse_program_unchecked(&text).unwrap();
        prop_assert_eq!(back, p, "{}", text);
    }

    #[test]
    fn qdimacs_roundtrip(q in qbf()) {
        let text = emit_qdimacs(&q);
        let back = parse_qdimacs(&text).unwrap();
        prop_assert_eq!(emit_qdimacs(&back), text);
        prop_assert_eq!(back.clauses, q.clauses);
    }

    #[test]
    fn reified_roundtrip(gp in ground_program()) {
        let text = emit_reified(&gp);
        let back = parse_reified(&text).unwrap();
        prop_assert_eq!(emit_reified(&back), text);
        prop_assert_eq!(back.rules, gp.rules);
    }

    #[test]
    fn eval_qbf_matches_expansion(q in qbf()) {
        prop_assume!(q.num_vars <= 12);
        prop_assert_eq!(eval_qbf(&q).unwrap(), eval_by_expansion(&q));
    }

    #[test]
    fn answer_sets_are_minimal_models_and_match_naive(gp in ground_program()) {
        let fast = answer_sets(&gp, &SolveLimits::default()).unwrap();
        let mut naive = answer_sets_naive(&gp, 16).unwrap();
        naive.sort();
        prop_assert_eq!(&fast, &naive);
        for m in &fast {
            prop_assert!(gp.is_model(m));
            for other in &fast {
                prop_assert!(m == other || !m.is_subset(other));
            }
        }
    }

    #[test]
    fn shift_preserves_answer_sets_when_head_cycle_free(gp in ground_program()) {
        if let Ok(shifted) = gp.shift(true) {
            prop_assert!(shifted.is_normal());
            prop_assert_eq!(
                answer_sets(&shifted, &SolveLimits::default()).unwrap(),
                answer_sets(&gp, &SolveLimits::default()).unwrap()
            );
        }
    }

    #[test]
    fn heuristic_tds_are_valid(
        n in 0usize..9,
        edges in prop::collection::vec((0usize..9, 0usize..9), 0..20),
        seed in 0u64..4,
        min_degree in any::<bool>(),
    ) {
        let mut g = GaifmanGraph::new();
        for i in 0..n {
            g.add_vertex(&format!("V{i}"));
        }
        for (a, b) in edges {
            if a < n && b < n && a != b {
                g.add_edge(&format!("V{a}"), &format!("V{b}"));
            }
        }
        let h = if min_degree { Heuristic::MinDegree } else { Heuristic::MinFill };
        let td = decompose_graph(&g, h, seed);
        prop_assert!(validate_td(&g, &td).is_ok(), "{}", td);
        prop_assert_eq!(decompose_graph(&g, h, seed), td);
    }

    #[test]
    fn grounding_is_monotone_in_facts(seed in any::<u64>(), extra in 0usize..4) {
        let mut r = rng(seed);
        let p = random_rule_program(&mut r, 4, 4, 3);
        let before = ground(&p, &GroundingLimits::default()).unwrap();
        let mut bigger = p.clone();
        let consts = ["k0", "k1", "k2"];
        bigger.push_fact(Atom::new("s", vec![Term::sym(consts[extra % 3])]));
        bigger.push_fact(Atom::new("p", vec![Term::sym(consts[extra % 3]), Term::sym(consts[(extra + 1) % 3])]));
        let after = ground(&bigger, &GroundingLimits::default()).unwrap();
        let instances = |g: &lpdecomp::oracle::GroundingResult| -> BTreeSet<(usize, Vec<(String, lpdecomp::Value)>)> {
            g.source
                .iter()
                .zip(&g.substitution)
                .filter_map(|(s, sub)| s.map(|s| (s, sub.clone())))
                .collect()
        };
        prop_assert!(instances(&before).is_subset(&instances(&after)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_preserves_answer_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_rule_program(&mut r, 6, 7, 3);
        let opts = DecomposeOptions { threshold: false, ..DecomposeOptions::default() };
        let (d, stats) = decompose_program(&p, &opts).unwrap();
        prop_assert!(d.rules.iter().all(Rule::is_safe));
        for s in &stats.rules {
            for (g, td) in &s.decompositions {
                prop_assert!(validate_td(g, td).is_ok());
            }
        }
        let before = project(&solve(&p), &["temp_", "dom_"]);
        let after = project(&solve(&d), &["temp_", "dom_"]);
        prop_assert_eq!(before, after, "{}\n---\n{}", p, d);
    }
}
