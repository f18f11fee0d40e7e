mod common;

use std::collections::BTreeSet;

use common::*;
use lpdecomp::decompose::{decompose_program, DecomposeOptions};
use lpdecomp::oracle::{abduce_bruteforce, answer_sets, eval_qbf, solve_coloring, SolveLimits};
use lpdecomp::parse::{atom_ids, parse_graph, parse_qdimacs, Quantifier};
use lpdecomp::rewrite::*;
use lpdecomp::{GroundProgram, Rule};

fn projected_assign(p: &lpdecomp::Program, gp: &GroundProgram) -> BTreeSet<BTreeSet<String>> {
    let ids = atom_ids(gp);
    solve(p)
        .into_iter()
        .map(|s| {
            s.iter()
                .filter(|a| a.predicate == "assign" && a.args[1].to_string() == "1")
                .map(|a| a.args[0].to_string())
                .collect()
        })
        .map(|s: BTreeSet<String>| {
            // Map back through ids so the comparison is by original atom.
            s.into_iter()
                .map(|id| gp.atoms[ids.iter().position(|i| *i == id).unwrap()].to_string())
                .collect()
        })
        .collect()
}

fn direct(gp: &GroundProgram) -> BTreeSet<BTreeSet<String>> {
    answer_sets(gp, &SolveLimits::default())
        .unwrap()
        .iter()
        .map(|m| m.iter().map(|&a| gp.atoms[a].to_string()).collect())
        .collect()
}

#[test]
fn coloring_examples() {
    let ex1 = parse_graph("a b\nb c\nc d\na d\nb d\n").unwrap();
    assert!(!consistent(&threecol_single_rule(&ex1)));
    let k4 = parse_graph("a b\na c\na d\nb c\nb d\nc d\n").unwrap();
    assert!(consistent(&threecol_single_rule(&k4)));
    assert!(!consistent(&threecol_single_rule(&lpdecomp::parse::InputGraph::new())));
}

#[test]
fn second_level_examples() {
    let g = parse_graph("a b\n#V1\na\n").unwrap();
    assert!(!consistent(&threecol_second_level(&g).unwrap()));
    let g = parse_graph("a b\nb c\na c\na d\nb d\nc d\n#V1\na\nb\nc\n").unwrap();
    assert!(consistent(&threecol_second_level(&g).unwrap()));
    // V2 empty: the extension always exists for proper V1 colorings.
    let g = parse_graph("a b\n#V1\na\nb\n").unwrap();
    assert!(!consistent(&threecol_second_level(&g).unwrap()));
}

#[test]
fn coloring_agrees_with_brute_force() {
    let mut r = rng(11);
    for _ in 0..20 {
        let g = random_graph(&mut r, 6, 0.6);
        let colorable = solve_coloring(&g, 3).unwrap().is_some();
        assert_eq!(consistent(&threecol_single_rule(&g)), !colorable, "{g:?}");
    }
}

#[test]
fn qbf_examples() {
    let q = parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").unwrap();
    assert!(eval_qbf(&q).unwrap());
    assert!(!consistent(&qbf2_classic(&q).unwrap()));
    assert!(!consistent(&qbf2_large_rule(&q).unwrap()));

    let q = parse_qdimacs("p cnf 1 1\na 1 0\n1 0\n").unwrap();
    assert!(consistent(&qbf2_classic(&q).unwrap()));
    assert!(consistent(&qbf2_large_rule(&q).unwrap()));

    let q = parse_qdimacs("p cnf 1 0\na 1 0\n").unwrap();
    assert!(!consistent(&qbf2_classic(&q).unwrap()));

    let q = parse_qdimacs("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 -2 3 0\n-1 2 -3 0\n").unwrap();
    assert_eq!(consistent(&qbf3_large_rule(&q).unwrap()), eval_qbf(&q).unwrap());
    let q = parse_qdimacs("p cnf 1 2\ne 1 0\n1 0\n-1 0\n").unwrap();
    assert!(!consistent(&qbf3_large_rule(&q).unwrap()));
    let q = parse_qdimacs("p cnf 1 0\ne 1 0\n").unwrap();
    assert!(consistent(&qbf3_large_rule(&q).unwrap()));
}

#[test]
fn qbf2_encodings_agree_with_evaluation() {
    let mut r = rng(5);
    for _ in 0..40 {
        let q = random_qbf(&mut r, Quantifier::Forall, &[3, 3], 6, 3);
        let valid = eval_qbf(&q).unwrap();
        assert_eq!(consistent(&qbf2_classic(&q).unwrap()), !valid, "{q:?}");
        assert_eq!(consistent(&qbf2_large_rule(&q).unwrap()), !valid, "{q:?}");
    }
}

#[test]
fn qbf3_encoding_agrees_with_evaluation() {
    let mut r = rng(6);
    for _ in 0..30 {
        let q = random_qbf(&mut r, Quantifier::Exists, &[2, 2, 2], 5, 3);
        assert_eq!(
            consistent(&qbf3_large_rule(&q).unwrap()),
            eval_qbf(&q).unwrap(),
            "{q:?}"
        );
    }
}

#[test]
fn disjunctive_to_normal_examples() {
    let mut gp = GroundProgram::new();
    gp.add_named(&["a", "b"], &[], &[]);
    let p = disjunctive_to_normal(&gp);
    assert!(p.rules.iter().all(Rule::is_normal));
    assert_eq!(projected_assign(&p, &gp), direct(&gp));
    assert_eq!(direct(&gp).len(), 2);

    let mut gp = GroundProgram::new();
    gp.add_named(&["a"], &[], &["a"]);
    assert!(projected_assign(&disjunctive_to_normal(&gp), &gp).is_empty());
}

#[test]
fn disjunctive_to_normal_random() {
    let mut r = rng(7);
    for _ in 0..25 {
        let gp = random_ground_program(&mut r, 4, 5);
        let p = disjunctive_to_normal(&gp);
        assert!(p.rules.iter().all(Rule::is_normal));
        assert_eq!(projected_assign(&p, &gp), direct(&gp), "{gp}");
    }
}

#[test]
fn abduction_examples() {
    let mut gp = GroundProgram::new();
    gp.add_named(&["m"], &["h"], &[]);
    let (m, h) = (gp.prop("m"), gp.prop("h"));
    let inst = AbductionInstance::new(gp, [h], [m]).unwrap();
    assert!(consistent(&abduction_encoding(&inst)));

    let mut gp = GroundProgram::new();
    let m = gp.prop("m");
    let inst = AbductionInstance::new(gp.clone(), [], [m]).unwrap();
    assert!(!consistent(&abduction_encoding(&inst)));
    let inst = AbductionInstance::new(gp, [], []).unwrap();
    assert!(consistent(&abduction_encoding(&inst)));
}

#[test]
fn abduction_random() {
    let mut r = rng(8);
    for _ in 0..25 {
        let inst = random_abduction(&mut r, 4, 2, 4);
        let truth = abduce_bruteforce(&inst, false).unwrap().is_some();
        assert_eq!(consistent(&abduction_encoding(&inst)), truth, "{inst:?}");
    }
}

#[test]
fn rewriter_outputs_are_safe_and_survive_decomposition() {
    let mut r = rng(9);
    let q = random_qbf(&mut r, Quantifier::Forall, &[2, 3], 4, 3);
    let g = random_graph(&mut r, 5, 0.5);
    let gp = random_ground_program(&mut r, 3, 3);
    let programs = vec![
        qbf2_classic(&q).unwrap(),
        qbf2_large_rule(&q).unwrap(),
        threecol_single_rule(&g),
        disjunctive_to_normal(&gp),
    ];
    for p in programs {
        assert!(p.rules.iter().all(Rule::is_safe), "{p}");
        let (d, _) = decompose_program(&p, &DecomposeOptions::default()).unwrap();
        assert!(d.rules.iter().all(Rule::is_safe), "{d}");
        let before = project(&solve_with(&p, 40), &["temp_", "dom_"]);
        let after = project(&solve_with(&d, 40), &["temp_", "dom_"]);
        assert_eq!(before, after, "{p}\n---\n{d}");
    }
}
