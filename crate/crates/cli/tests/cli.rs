use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const CYCLE_RULE: &str = "e(1,2). e(2,3). e(3,1). e(2,1). e(3,3).\nh(X,W) :- e(X,Y), e(Y,Z), not e(Z,W), e(W,X).\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpdecomp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }
}

#[test]
fn coloring_pipeline_through_stdin() {
    let f = Files::new();
    let g = f.put("chorded_square.graph", "a b\nb c\nc d\na d\nb d\n");
    let prog = run(&["rewrite", "3col", &g]);
    assert_eq!(code(&prog), 0, "{}", stderr(&prog));
    let solved = run_stdin(&["solve", "-"], &prog.stdout);
    assert_eq!(code(&solved), 20, "{}", stderr(&solved));
    assert!(solved.stdout.is_empty());

    let k4 = f.put("k4.graph", "a b\na c\na d\nb c\nb d\nc d\n");
    let prog = run(&["rewrite", "3col", &k4]);
    let solved = run_stdin(&["solve", "-"], &prog.stdout);
    assert_eq!(code(&solved), 10);
    assert_eq!(stdout(&solved).lines().count(), 1);
}

#[test]
fn decompose_cycle_rule() {
    let f = Files::new();
    let p = f.put("big.lp", CYCLE_RULE);
    let o = run(&["decompose", &p]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let rules: Vec<&str> = out.lines().filter(|l| l.contains(":-")).collect();
    assert_eq!(rules.len(), 2, "{out}");
    assert!(rules.iter().any(|r| r.starts_with("h(X,W) :-")), "{out}");
    assert!(rules.iter().all(|r| !r.contains('Y') || !r.contains('W')), "{out}");
    assert!(stderr(&o).contains("rule 0: vars=4 width=2"), "{}", stderr(&o));

    let d = f.put("decomposed.lp", &out);
    let c = run(&["check", &p, &d, "--project-away", "temp_,dom_"]);
    assert_eq!(code(&c), 0, "{}", stdout(&c));
    assert!(stdout(&c).starts_with("equal"));
}

#[test]
fn check_reports_a_witness() {
    let f = Files::new();
    let a = f.put("a.lp", "a :- not b.\nb :- not a.\n");
    let b = f.put("b.lp", "a.\n");
    let o = run(&["check", &a, &b]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o), format!("different\nonly in {a}: {{b}}\n"));
}

#[test]
fn solve_prints_sorted_answer_sets() {
    let o = run_stdin(&["solve", "-"], b"q(2). q(1).\np(X) | r(X) :- q(X).\n:- r(2).\n");
    assert_eq!(code(&o), 10, "{}", stderr(&o));
    assert_eq!(stdout(&o), "{p(1), p(2), q(1), q(2)}\n{p(2), q(1), q(2), r(1)}\n");
}

#[test]
fn input_errors_exit_1() {
    let o = run_stdin(&["ground", "-"], b"p(X) :- q(.\n");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("syntax error"));
    let o = run_stdin(&["ground", "-"], b"p(X) :- not q(X).\n");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unsafe"));
    assert_eq!(code(&run(&["solve", "/nonexistent/file.lp"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn semantic_errors_exit_2() {
    let o = run_stdin(&["rewrite", "qbf2", "-"], b"p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = run_stdin(&["rewrite", "3col2", "-"], b"a b\n");
    assert_eq!(code(&o), 2);
    let o = run_stdin(&["decompose", "-"], b"temp_x(1).\np(X) :- temp_x(X).\n");
    assert_eq!(code(&o), 2);
    let o = run_stdin(
        &["decompose", "--auto-rename", "-"],
        b"temp_x(1).\np(X) :- temp_x(X).\n",
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("u_temp_x(1)."), "{}", stdout(&o));
}

#[test]
fn limits_exit_4() {
    let mut text = String::new();
    for i in 0..12 {
        text.push_str(&format!("d({i}).\n"));
    }
    text.push_str("p(X) | q(X) :- d(X).\n");
    let o = run_stdin(&["solve", "--max-atoms", "8", "-"], text.as_bytes());
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let o = run_stdin(&["ground", "--max-ground-rules", "5", "-"], text.as_bytes());
    assert_eq!(code(&o), 4);
    let o = run_stdin(
        &["ground", "--max-aggregate-width", "1", "-"],
        b"d(1).\nh :- #count{X,Y : d(X), d(Y)} >= 1.\n",
    );
    assert_eq!(code(&o), 4);
    assert_eq!(code(&run(&["solve", "--max-atoms", "0", "-"])), 1);
}

#[test]
fn qbf_rewrites_solve_to_the_expected_verdict() {
    // ∀x1 ∃x2 (x1 ∨ x2) ∧ (¬x1 ∨ ¬x2) is true, so no answer set exists.
    let qbf = b"p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";
    for kind in ["qbf2", "qbf2-classic"] {
        let prog = run_stdin(&["rewrite", kind, "-"], qbf);
        assert_eq!(code(&prog), 0, "{}", stderr(&prog));
        assert_eq!(code(&run_stdin(&["solve", "-"], &prog.stdout)), 20, "{kind}");
    }
    let prog = run_stdin(&["rewrite", "qbf3", "-"], b"p cnf 1 1\ne 1 0\n1 0\n");
    assert_eq!(code(&run_stdin(&["solve", "-"], &prog.stdout)), 10);
}

#[test]
fn shift_and_abduce_from_files() {
    let f = Files::new();
    let reified = f.put("p.facts", "atom(a). atom(b).\nrule(r1). head(r1,a). head(r1,b).\n");
    let o = run(&["rewrite", "shift", &reified]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&run_stdin(&["solve", "-"], &o.stdout)), 10);

    let reified = f.put("abd.facts", "atom(h). atom(m).\nrule(r1). head(r1,m). pos(r1,h).\n");
    let hyp = f.put("h.txt", "h\n");
    let man = f.put("m.txt", "m\n");
    let o = run(&["rewrite", "abduce", &reified, "--hyp", &hyp, "--man", &man]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&run_stdin(&["solve", "-"], &o.stdout)), 10);

    let o = run(&[
        "rewrite",
        "abduce",
        &reified,
        "--hyp",
        &hyp,
        "--man",
        &f.put("x.txt", "zz\n"),
    ]);
    assert_ne!(code(&o), 0);
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let p = f.put(
        "p.lp",
        "e(1,2). e(2,3). e(3,4). e(4,1).\nq(A,E) :- e(A,B), e(B,C), e(C,D), e(D,E), not e(E,A).\n",
    );
    for args in [
        vec!["decompose", p.as_str()],
        vec!["decompose", "--heuristic", "min-degree", "--seed", "7", p.as_str()],
        vec!["ground", p.as_str()],
        vec!["stats", p.as_str()],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_flag_writes_a_file() {
    let f = Files::new();
    let p = f.put("p.lp", CYCLE_RULE);
    let out = f.0.path().join("out.lp");
    let o = run(&["decompose", &p, "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(fs::read_to_string(out).unwrap().contains("temp_0_0"));
}

#[test]
fn stats_table() {
    let o = run_stdin(&["stats", "-"], CYCLE_RULE.as_bytes());
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("domain size 3\n"), "{out}");
    let row: Vec<&str> = out.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(row[..3], ["0", "4", "2"]);
}
