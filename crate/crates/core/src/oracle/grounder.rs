//! A join-based grounder.
//!
//! Predicates are processed stratum by stratum (strongly connected components
//! of the predicate dependency graph, heads of one disjunctive rule counted
//! as mutually dependent). Within a stratum the set of possibly true atoms is
//! computed as a fixpoint ignoring negation; atoms derivable without
//! assumptions are tracked as certain. Aggregates are evaluated during
//! grounding and therefore must depend only on lower strata that are fully
//! determined.

use std::collections::{BTreeSet, HashMap, HashSet};

use indexmap::IndexSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::ast::{Aggregate, AggregateFunction, ArithOp, Atom, CmpOp, Program, Rule, Term, Value};
use crate::error::{Error, Result};
use crate::ground::{GroundAtom, GroundProgram, GroundRule};

#[derive(Clone, Copy, Debug)]
pub struct GroundingLimits {
    pub max_ground_rules: usize,
}

impl Default for GroundingLimits {
    fn default() -> Self {
        GroundingLimits {
            max_ground_rules: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GroundingResult {
    /// Facts come first as body-less rules, then the rule instances.
    pub program: GroundProgram,
    /// Number of ground instances of non-fact rules.
    pub rule_count: usize,
    pub atom_count: usize,
    /// For each ground rule, the index of the rule it instantiates, `None`
    /// for facts.
    pub source: Vec<Option<usize>>,
    /// For each ground rule, the substitution that produced it (variables
    /// outside aggregates, in order of first occurrence).
    pub substitution: Vec<Vec<(String, Value)>>,
}

#[derive(Clone, Debug)]
enum CTerm {
    Var(usize),
    Const(Value),
    Arith(ArithOp, Box<CTerm>, Box<CTerm>),
}

impl CTerm {
    fn eval(&self, b: &[Option<Value>]) -> Result<Option<Value>> {
        match self {
            CTerm::Var(i) => Ok(b[*i].clone()),
            CTerm::Const(v) => Ok(Some(v.clone())),
            CTerm::Arith(op, l, r) => {
                let (Some(x), Some(y)) = (l.eval(b)?, r.eval(b)?) else {
                    return Ok(None);
                };
                match (x, y) {
                    (Value::Int(x), Value::Int(y)) => Ok(Some(Value::Int(op.apply(x, y)?))),
                    (x, y) => Err(Error::Arithmetic(format!(
                        "non-integer operand in arithmetic on {x} and {y}"
                    ))),
                }
            }
        }
    }

    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            CTerm::Var(i) => out.push(*i),
            CTerm::Const(_) => {}
            CTerm::Arith(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    fn bound(&self, b: &[Option<Value>]) -> bool {
        let mut vs = Vec::new();
        self.vars(&mut vs);
        vs.iter().all(|&v| b[v].is_some())
    }
}

#[derive(Clone, Debug)]
struct CAtom {
    pred: String,
    args: Vec<CTerm>,
}

impl CAtom {
    fn instantiate(&self, b: &[Option<Value>]) -> Result<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| t.eval(b).map(|v| v.expect("atom instantiated with unbound variable")))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroundAtom::new(self.pred.clone(), args))
    }

    /// Arithmetic arguments must be evaluable before the atom is matched.
    fn matchable(&self, b: &[Option<Value>]) -> bool {
        self.args
            .iter()
            .all(|t| matches!(t, CTerm::Var(_) | CTerm::Const(_)) || t.bound(b))
    }

    fn bound_args(&self, b: &[Option<Value>]) -> usize {
        self.args.iter().filter(|t| t.bound(b)).count()
    }
}

#[derive(Clone, Debug)]
struct CCmp {
    lhs: CTerm,
    op: CmpOp,
    rhs: CTerm,
}

#[derive(Clone, Debug)]
struct CAgg {
    function: AggregateFunction,
    tuple: Vec<usize>,
    pos: Vec<CAtom>,
    neg: Vec<CAtom>,
    guard_op: CmpOp,
    guard: CTerm,
    globals: Vec<usize>,
    text: String,
}

#[derive(Clone, Debug)]
struct CRule {
    head: Vec<CAtom>,
    pos: Vec<CAtom>,
    neg: Vec<CAtom>,
    cmps: Vec<CCmp>,
    aggs: Vec<CAgg>,
    nvars: usize,
    /// Variables outside aggregates, in first-occurrence order.
    key_vars: Vec<usize>,
    var_names: Vec<String>,
    text: String,
}

struct Compiler {
    vars: Vec<String>,
}

impl Compiler {
    fn var(&mut self, v: &str) -> usize {
        match self.vars.iter().position(|x| x == v) {
            Some(i) => i,
            None => {
                self.vars.push(v.to_owned());
                self.vars.len() - 1
            }
        }
    }

    fn term(&mut self, t: &Term) -> CTerm {
        match t {
            Term::Var(v) => CTerm::Var(self.var(v)),
            Term::Sym(s) => CTerm::Const(Value::Sym(s.clone())),
            Term::Int(i) => CTerm::Const(Value::Int(*i)),
            Term::Arith(op, l, r) => CTerm::Arith(*op, Box::new(self.term(l)), Box::new(self.term(r))),
        }
    }

    fn atom(&mut self, a: &Atom) -> CAtom {
        CAtom {
            pred: a.predicate.clone(),
            args: a.args.iter().map(|t| self.term(t)).collect(),
        }
    }

    fn aggregate(&mut self, rule: &Rule, idx: usize, a: &Aggregate) -> CAgg {
        let globals = rule.aggregate_global_vars(idx).iter().map(|v| self.var(v)).collect();
        CAgg {
            function: a.function,
            tuple: a.tuple_vars.iter().map(|v| self.var(v)).collect(),
            pos: a
                .condition
                .iter()
                .filter(|l| !l.negated)
                .map(|l| self.atom(&l.atom))
                .collect(),
            neg: a
                .condition
                .iter()
                .filter(|l| l.negated)
                .map(|l| self.atom(&l.atom))
                .collect(),
            guard_op: a.guard_op,
            guard: self.term(&a.guard),
            globals,
            text: a.to_string(),
        }
    }
}

fn compile(rule: &Rule) -> CRule {
    let mut c = Compiler { vars: Vec::new() };
    for v in rule.variables_in_order() {
        c.var(&v);
    }
    let locals: BTreeSet<String> = (0..rule.aggregates.len())
        .flat_map(|i| {
            let g = rule.aggregate_global_vars(i);
            rule.aggregates[i]
                .variables()
                .into_iter()
                .filter(move |v| !g.contains(v))
        })
        .collect();
    let key_vars = rule
        .variables_in_order()
        .iter()
        .filter(|v| !locals.contains(*v))
        .map(|v| c.var(v))
        .collect();
    CRule {
        head: rule.head.iter().map(|a| c.atom(a)).collect(),
        pos: rule.pos_body.iter().map(|a| c.atom(a)).collect(),
        neg: rule.neg_body.iter().map(|a| c.atom(a)).collect(),
        cmps: rule
            .comparisons
            .iter()
            .map(|x| CCmp {
                lhs: c.term(&x.lhs),
                op: x.op,
                rhs: c.term(&x.rhs),
            })
            .collect(),
        aggs: rule
            .aggregates
            .iter()
            .enumerate()
            .map(|(i, a)| c.aggregate(rule, i, a))
            .collect(),
        nvars: c.vars.len(),
        key_vars,
        var_names: c.vars.clone(),
        text: rule.to_string(),
    }
}

/// Atoms by predicate.
#[derive(Default)]
struct Store {
    by_pred: HashMap<String, IndexSet<Vec<Value>>>,
}

impl Store {
    fn contains(&self, a: &GroundAtom) -> bool {
        self.by_pred.get(&a.predicate).is_some_and(|s| s.contains(&a.args))
    }

    fn insert(&mut self, a: GroundAtom) -> bool {
        self.by_pred.entry(a.predicate).or_default().insert(a.args)
    }

    fn tuples(&self, pred: &str) -> Option<&IndexSet<Vec<Value>>> {
        self.by_pred.get(pred)
    }
}

struct Ctx<'a> {
    possible: &'a Store,
    certain: &'a Store,
}

fn match_atom(atom: &CAtom, tuple: &[Value], b: &mut [Option<Value>], newly: &mut Vec<usize>) -> Result<bool> {
    for (t, v) in atom.args.iter().zip(tuple) {
        match t {
            CTerm::Var(i) => match &b[*i] {
                Some(x) if x != v => return Ok(false),
                Some(_) => {}
                None => {
                    b[*i] = Some(v.clone());
                    newly.push(*i);
                }
            },
            CTerm::Const(c) => {
                if c != v {
                    return Ok(false);
                }
            }
            t => {
                if t.eval(b)?.as_ref() != Some(v) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AggValue {
    NegInf,
    Val(Value),
    PosInf,
}

fn eval_aggregate(agg: &CAgg, b: &mut Vec<Option<Value>>, ctx: &Ctx) -> Result<bool> {
    let mut tuples: BTreeSet<Vec<Value>> = BTreeSet::new();
    let mut done = vec![false; agg.pos.len()];
    agg_search(agg, b, ctx, &mut done, &mut tuples)?;
    let value = match agg.function {
        AggregateFunction::Count => AggValue::Val(Value::Int(tuples.len() as i64)),
        AggregateFunction::Sum => {
            let mut s: i64 = 0;
            for t in &tuples {
                if let Some(Value::Int(i)) = t.first() {
                    s = s
                        .checked_add(*i)
                        .ok_or_else(|| Error::Arithmetic(format!("overflow in {}", agg.text)))?;
                }
            }
            AggValue::Val(Value::Int(s))
        }
        AggregateFunction::Min => tuples
            .iter()
            .filter_map(|t| t.first().cloned())
            .min()
            .map_or(AggValue::PosInf, AggValue::Val),
        AggregateFunction::Max => tuples
            .iter()
            .filter_map(|t| t.first().cloned())
            .max()
            .map_or(AggValue::NegInf, AggValue::Val),
    };
    let guard = agg.guard.eval(b)?.expect("aggregate guard evaluated before binding");
    Ok(agg.guard_op.holds(&value, &AggValue::Val(guard)))
}

fn agg_search(
    agg: &CAgg,
    b: &mut Vec<Option<Value>>,
    ctx: &Ctx,
    done: &mut [bool],
    out: &mut BTreeSet<Vec<Value>>,
) -> Result<()> {
    let next = (0..agg.pos.len())
        .filter(|&i| !done[i] && agg.pos[i].matchable(b))
        .max_by_key(|&i| (agg.pos[i].bound_args(b), std::cmp::Reverse(i)));
    let Some(i) = next else {
        if done.iter().any(|d| !d) {
            return Err(Error::UnsupportedAggregate(format!(
                "cannot bind the condition of {}",
                agg.text
            )));
        }
        for n in &agg.neg {
            let g = n.instantiate(b)?;
            if ctx.certain.contains(&g) {
                return Ok(());
            }
            if ctx.possible.contains(&g) {
                return Err(Error::UnsupportedAggregate(format!(
                    "{} depends on undetermined atom {g}",
                    agg.text
                )));
            }
        }
        let t = agg
            .tuple
            .iter()
            .map(|&v| b[v].clone().expect("tuple variable bound by condition"))
            .collect();
        out.insert(t);
        return Ok(());
    };
    done[i] = true;
    let atom = &agg.pos[i];
    if let Some(tuples) = ctx.possible.tuples(&atom.pred) {
        for t in tuples {
            let mut newly = Vec::new();
            if match_atom(atom, t, b, &mut newly)? {
                let g = GroundAtom::new(atom.pred.clone(), t.clone());
                if !ctx.certain.contains(&g) {
                    return Err(Error::UnsupportedAggregate(format!(
                        "{} depends on undetermined atom {g}",
                        agg.text
                    )));
                }
                agg_search(agg, b, ctx, done, out)?;
            }
            for v in newly {
                b[v] = None;
            }
        }
    }
    done[i] = false;
    Ok(())
}

/// Enumerates substitutions satisfying the positive body (over possible
/// atoms), comparisons and aggregates.
fn search<F>(rule: &CRule, b: &mut Vec<Option<Value>>, done: &mut Done, ctx: &Ctx, f: &mut F) -> Result<()>
where
    F: FnMut(&[Option<Value>]) -> Result<()>,
{
    // Comparisons that can be decided or that bind a variable.
    for i in 0..rule.cmps.len() {
        if done.cmps[i] {
            continue;
        }
        let c = &rule.cmps[i];
        let (l, r) = (c.lhs.eval(b)?, c.rhs.eval(b)?);
        let bind = match (&l, &r, &c.lhs, &c.rhs, c.op) {
            (Some(l), Some(r), ..) => {
                if !c.op.holds(l, r) {
                    return Ok(());
                }
                None
            }
            (None, Some(v), CTerm::Var(x), _, CmpOp::Eq) => Some((*x, v.clone())),
            (Some(v), None, _, CTerm::Var(x), CmpOp::Eq) => Some((*x, v.clone())),
            _ => continue,
        };
        done.cmps[i] = true;
        let bound = bind.map(|(x, v)| {
            b[x] = Some(v);
            x
        });
        let res = search(rule, b, done, ctx, f);
        if let Some(x) = bound {
            b[x] = None;
        }
        done.cmps[i] = false;
        return res;
    }
    for i in 0..rule.aggs.len() {
        if done.aggs[i] {
            continue;
        }
        let agg = &rule.aggs[i];
        if agg.globals.iter().all(|&v| b[v].is_some()) {
            if !eval_aggregate(agg, b, ctx)? {
                return Ok(());
            }
            done.aggs[i] = true;
            let res = search(rule, b, done, ctx, f);
            done.aggs[i] = false;
            return res;
        }
    }
    let next = (0..rule.pos.len())
        .filter(|&i| !done.pos[i] && rule.pos[i].matchable(b))
        .max_by_key(|&i| (rule.pos[i].bound_args(b), std::cmp::Reverse(i)));
    let Some(i) = next else {
        if done.pos.iter().any(|d| !d) || done.cmps.iter().any(|d| !d) || done.aggs.iter().any(|d| !d) {
            return Err(Error::Unsafe {
                rule: rule.text.clone(),
                variables: Vec::new(),
            });
        }
        return f(b);
    };
    done.pos[i] = true;
    let atom = &rule.pos[i];
    if let Some(tuples) = ctx.possible.tuples(&atom.pred) {
        for t in tuples {
            let mut newly = Vec::new();
            if match_atom(atom, t, b, &mut newly)? {
                search(rule, b, done, ctx, f)?;
            }
            for v in newly {
                b[v] = None;
            }
        }
    }
    done.pos[i] = false;
    Ok(())
}

struct Done {
    pos: Vec<bool>,
    cmps: Vec<bool>,
    aggs: Vec<bool>,
}

fn for_each_instance<F>(rule: &CRule, ctx: &Ctx, mut f: F) -> Result<()>
where
    F: FnMut(&[Option<Value>]) -> Result<()>,
{
    let mut b = vec![None; rule.nvars];
    let mut done = Done {
        pos: vec![false; rule.pos.len()],
        cmps: vec![false; rule.cmps.len()],
        aggs: vec![false; rule.aggs.len()],
    };
    search(rule, &mut b, &mut done, ctx, &mut f)
}

fn limit_check(count: &mut usize, limits: &GroundingLimits) -> Result<()> {
    *count += 1;
    if *count > limits.max_ground_rules {
        Err(Error::GroundingLimitExceeded {
            limit: limits.max_ground_rules,
        })
    } else {
        Ok(())
    }
}

/// Strata of rule indices in dependency order; constraints go last.
fn strata(program: &Program) -> Vec<Vec<usize>> {
    let mut g: DiGraph<String, ()> = DiGraph::new();
    let mut nodes: HashMap<String, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<String, ()>, p: &str| -> NodeIndex {
        *nodes.entry(p.to_owned()).or_insert_with(|| g.add_node(p.to_owned()))
    };
    for r in &program.rules {
        let heads: Vec<NodeIndex> = r.head.iter().map(|a| node(&mut g, &a.predicate)).collect();
        let body: Vec<&Atom> = r
            .pos_body
            .iter()
            .chain(&r.neg_body)
            .chain(r.aggregates.iter().flat_map(|a| a.condition.iter().map(|l| &l.atom)))
            .collect();
        for b in body {
            let bn = node(&mut g, &b.predicate);
            for &h in &heads {
                g.add_edge(bn, h, ());
            }
        }
        for (i, &h) in heads.iter().enumerate() {
            for &k in &heads[i + 1..] {
                g.add_edge(h, k, ());
                g.add_edge(k, h, ());
            }
        }
    }
    let mut sccs = tarjan_scc(&g);
    sccs.reverse();
    let mut out = Vec::new();
    for scc in sccs {
        let preds: HashSet<&str> = scc.iter().map(|&n| g[n].as_str()).collect();
        let rules: Vec<usize> = (0..program.rules.len())
            .filter(|&i| {
                program.rules[i]
                    .head
                    .first()
                    .is_some_and(|a| preds.contains(a.predicate.as_str()))
            })
            .collect();
        if !rules.is_empty() {
            out.push(rules);
        }
    }
    let constraints: Vec<usize> = (0..program.rules.len())
        .filter(|&i| program.rules[i].head.is_empty())
        .collect();
    if !constraints.is_empty() {
        out.push(constraints);
    }
    out
}

fn check_aggregate_strata(program: &Program, strata: &[Vec<usize>]) -> Result<()> {
    let mut level: HashMap<&str, usize> = HashMap::new();
    for (s, rules) in strata.iter().enumerate() {
        for &r in rules {
            for h in &program.rules[r].head {
                level.insert(&h.predicate, s);
            }
        }
    }
    for (s, rules) in strata.iter().enumerate() {
        for &r in rules {
            let rule = &program.rules[r];
            if rule.head.is_empty() {
                continue;
            }
            for agg in &rule.aggregates {
                for l in &agg.condition {
                    if level.get(l.atom.predicate.as_str()).is_some_and(|&ls| ls >= s) {
                        return Err(Error::UnsupportedAggregate(format!(
                            "{agg} is recursive through `{}`",
                            l.atom.predicate
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Grounds a safe program.
pub fn ground(program: &Program, limits: &GroundingLimits) -> Result<GroundingResult> {
    let compiled: Vec<CRule> = program.rules.iter().map(compile).collect();
    let strata = strata(program);
    check_aggregate_strata(program, &strata)?;
    let mut possible = Store::default();
    let mut certain = Store::default();
    for f in &program.facts {
        let g = GroundAtom::from_atom(f).expect("facts are ground");
        possible.insert(g.clone());
        certain.insert(g);
    }
    let mut work = 0usize;
    for stratum in &strata {
        // Possible atoms: least fixpoint ignoring negation.
        loop {
            let mut new_atoms = Vec::new();
            for &ri in stratum {
                let rule = &compiled[ri];
                if rule.head.is_empty() {
                    continue;
                }
                let ctx = Ctx {
                    possible: &possible,
                    certain: &certain,
                };
                let mut count = 0;
                for_each_instance(rule, &ctx, |b| {
                    limit_check(&mut count, limits)?;
                    for h in &rule.head {
                        let g = h.instantiate(b)?;
                        if !possible.contains(&g) {
                            new_atoms.push(g);
                        }
                    }
                    Ok(())
                })?;
            }
            let mut changed = false;
            for g in new_atoms {
                changed |= possible.insert(g);
            }
            if !changed {
                break;
            }
        }
        // Certain atoms: single-head instances whose body holds for sure.
        loop {
            let mut new_atoms = Vec::new();
            for &ri in stratum {
                let rule = &compiled[ri];
                if rule.head.len() != 1 {
                    continue;
                }
                let ctx = Ctx {
                    possible: &possible,
                    certain: &certain,
                };
                for_each_instance(rule, &ctx, |b| {
                    work += 1;
                    for p in &rule.pos {
                        if !certain.contains(&p.instantiate(b)?) {
                            return Ok(());
                        }
                    }
                    for n in &rule.neg {
                        if possible.contains(&n.instantiate(b)?) {
                            return Ok(());
                        }
                    }
                    let g = rule.head[0].instantiate(b)?;
                    if !certain.contains(&g) {
                        new_atoms.push(g);
                    }
                    Ok(())
                })?;
            }
            let mut changed = false;
            for g in new_atoms {
                changed |= certain.insert(g);
            }
            if !changed {
                break;
            }
        }
    }
    log::debug!("grounding: {work} certainty checks");

    let mut result = GroundingResult::default();
    let mut seen_facts: HashSet<GroundAtom> = HashSet::new();
    for f in &program.facts {
        let g = GroundAtom::from_atom(f).expect("facts are ground");
        if seen_facts.insert(g.clone()) {
            let i = result.program.intern(g);
            result.program.add_rule(GroundRule::new(vec![i], vec![], vec![]));
            result.source.push(None);
            result.substitution.push(Vec::new());
        }
    }
    let ctx = Ctx {
        possible: &possible,
        certain: &certain,
    };
    let mut count = 0usize;
    for (ri, rule) in compiled.iter().enumerate() {
        let mut instances: Vec<(Vec<Value>, Vec<GroundAtom>, Vec<GroundAtom>, Vec<GroundAtom>)> = Vec::new();
        for_each_instance(rule, &ctx, |b| {
            limit_check(&mut count, limits)?;
            let mut neg = Vec::new();
            for n in &rule.neg {
                let g = n.instantiate(b)?;
                // A literal over an atom that can never be derived is true.
                if possible.contains(&g) {
                    neg.push(g);
                }
            }
            let head = rule.head.iter().map(|h| h.instantiate(b)).collect::<Result<Vec<_>>>()?;
            let pos = rule.pos.iter().map(|p| p.instantiate(b)).collect::<Result<Vec<_>>>()?;
            let key = rule
                .key_vars
                .iter()
                .map(|&v| b[v].clone().expect("safe rule binds every variable"))
                .collect();
            instances.push((key, head, pos, neg));
            Ok(())
        })?;
        instances.sort_by(|a, b| a.0.cmp(&b.0));
        for (key, head, pos, neg) in instances {
            let mut ids = |xs: Vec<GroundAtom>| -> Vec<usize> {
                let mut out: Vec<usize> = Vec::new();
                for x in xs {
                    let i = result.program.intern(x);
                    if !out.contains(&i) {
                        out.push(i);
                    }
                }
                out
            };
            let r = GroundRule::new(ids(head), ids(pos), ids(neg));
            result.program.add_rule(r);
            result.source.push(Some(ri));
            result.substitution.push(
                rule.key_vars
                    .iter()
                    .map(|&v| rule.var_names[v].clone())
                    .zip(key)
                    .collect(),
            );
            result.rule_count += 1;
        }
    }
    result.atom_count = result.program.atoms.len();
    Ok(result)
}
