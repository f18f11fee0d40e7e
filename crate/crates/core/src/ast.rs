//! Syntax tree for non-ground disjunctive programs.
//!
//! Rule bodies keep positive atoms, negative atoms, comparisons and aggregates
//! in separate lists; rule splitting treats each class differently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Predicate prefixes owned by the decomposer.
pub const RESERVED_PREFIXES: [&str; 2] = ["temp_", "dom_"];

/// A ground domain element.
///
/// Integers order before symbols, integers numerically, symbols lexically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        match v {
            Value::Int(i) => Term::Int(i),
            Value::Sym(s) => Term::Sym(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    /// Integer semantics: wrapping is an error, division truncates toward zero.
    pub fn apply(self, a: i64, b: i64) -> Result<i64> {
        let out = match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => {
                if b == 0 {
                    return Err(Error::Arithmetic(format!("division by zero in {a}/{b}")));
                }
                a.checked_div(b)
            }
        };
        out.ok_or_else(|| Error::Arithmetic(format!("overflow in {a}{}{b}", self.symbol())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Sym(String),
    Int(i64),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Term::Sym(name.into())
    }

    pub fn arith(op: ArithOp, lhs: Term, rhs: Term) -> Self {
        Term::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Sym(_) | Term::Int(_) => true,
            Term::Arith(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::Sym(_) | Term::Int(_) => {}
            Term::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().map(str::to_owned).collect()
    }

    /// Number of syntax nodes; used to pick the "smallest" arithmetic atom.
    pub fn size(&self) -> usize {
        match self {
            Term::Arith(_, l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    /// Evaluates the term under `lookup`. Arithmetic over a symbol is an
    /// error; unbound variables yield `Ok(None)`.
    pub fn eval<'a, F>(&self, lookup: &F) -> Result<Option<Value>>
    where
        F: Fn(&str) -> Option<&'a Value>,
    {
        match self {
            Term::Var(v) => Ok(lookup(v).cloned()),
            Term::Sym(s) => Ok(Some(Value::Sym(s.clone()))),
            Term::Int(i) => Ok(Some(Value::Int(*i))),
            Term::Arith(op, l, r) => {
                let (Some(a), Some(b)) = (l.eval(lookup)?, r.eval(lookup)?) else {
                    return Ok(None);
                };
                match (a, b) {
                    (Value::Int(a), Value::Int(b)) => Ok(Some(Value::Int(op.apply(a, b)?))),
                    (a, b) => Err(Error::Arithmetic(format!(
                        "non-integer operand in {a}{}{b}",
                        op.symbol()
                    ))),
                }
            }
        }
    }

    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Arith(op, l, r) => Term::arith(*op, l.rename_vars(map), r.rename_vars(map)),
            t => t.clone(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Sym(v) => f.write_str(v),
            Term::Int(i) => write!(f, "{i}"),
            Term::Arith(op, l, r) => {
                let prec = op.precedence();
                let paren = prec < parent || (right && prec == parent);
                if paren {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, prec, false)?;
                f.write_str(op.symbol())?;
                r.fmt_prec(f, prec, true)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.into_iter().map(str::to_owned).collect()
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        for t in &self.args {
            t.collect_vars(out);
        }
    }

    /// Variables appearing as a whole argument; only these are bound by
    /// matching the atom against facts.
    pub fn binding_vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Atom {
        Atom::new(
            self.predicate.clone(),
            self.args.iter().map(|t| t.rename_vars(map)).collect(),
        )
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, negated: true }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A builtin atom `lhs op rhs`; with `op = Eq` and a variable on one side it
/// is an arithmetic assignment `X = φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub lhs: Term,
    pub op: CmpOp,
    pub rhs: Term,
}

impl Comparison {
    pub fn new(lhs: Term, op: CmpOp, rhs: Term) -> Self {
        Comparison { lhs, op, rhs }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Comparison::new(lhs, CmpOp::Eq, rhs)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = Vec::new();
        self.lhs.collect_vars(&mut out);
        self.rhs.collect_vars(&mut out);
        out.into_iter().map(str::to_owned).collect()
    }

    /// The ways this comparison defines a variable: `(X, φ)` for `X = φ` or
    /// `φ = X` with `X` not occurring in `φ`. `X = Y` yields both
    /// orientations.
    pub fn definitions(&self) -> Vec<(&str, &Term)> {
        if self.op != CmpOp::Eq {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (side, other) in [(&self.lhs, &self.rhs), (&self.rhs, &self.lhs)] {
            if let Term::Var(x) = side {
                if !other.variables().contains(x) {
                    out.push((x.as_str(), other));
                }
            }
        }
        out
    }

    fn rename_vars(&self, map: &BTreeMap<String, String>) -> Comparison {
        Comparison::new(self.lhs.rename_vars(map), self.op, self.rhs.rename_vars(map))
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggregateFunction {
    Count,
    Sum,
    Min,
    Max,
}

impl AggregateFunction {
    pub fn keyword(self) -> &'static str {
        match self {
            AggregateFunction::Count => "#count",
            AggregateFunction::Sum => "#sum",
            AggregateFunction::Min => "#min",
            AggregateFunction::Max => "#max",
        }
    }
}

/// `#agg{ X : Ψ } op guard`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Aggregate {
    pub function: AggregateFunction,
    pub tuple_vars: Vec<String>,
    pub condition: Vec<Literal>,
    pub guard_op: CmpOp,
    pub guard: Term,
}

impl Aggregate {
    /// All variables, local ones included.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.tuple_vars.iter().cloned().collect();
        for l in &self.condition {
            out.extend(l.atom.variables());
        }
        out.extend(self.guard.variables());
        out
    }

    pub fn condition_variables(&self) -> BTreeSet<String> {
        self.condition.iter().flat_map(|l| l.atom.variables()).collect()
    }

    fn rename_vars(&self, map: &BTreeMap<String, String>) -> Aggregate {
        Aggregate {
            function: self.function,
            tuple_vars: self
                .tuple_vars
                .iter()
                .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
                .collect(),
            condition: self
                .condition
                .iter()
                .map(|l| Literal {
                    atom: l.atom.rename_vars(map),
                    negated: l.negated,
                })
                .collect(),
            guard_op: self.guard_op,
            guard: self.guard.rename_vars(map),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.function.keyword())?;
        f.write_str(&self.tuple_vars.join(","))?;
        f.write_str(" : ")?;
        for (i, l) in self.condition.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}} {} {}", self.guard_op.symbol(), self.guard)
    }
}

/// `h1 | ... | hk :- p1, ..., not n1, ..., comparisons, aggregates.`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub pos_body: Vec<Atom>,
    pub neg_body: Vec<Atom>,
    pub comparisons: Vec<Comparison>,
    pub aggregates: Vec<Aggregate>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, pos_body: Vec<Atom>, neg_body: Vec<Atom>) -> Self {
        Rule {
            head,
            pos_body,
            neg_body,
            ..Rule::default()
        }
    }

    pub fn constraint(pos_body: Vec<Atom>, neg_body: Vec<Atom>) -> Self {
        Rule::new(Vec::new(), pos_body, neg_body)
    }

    pub fn with_comparisons(mut self, comparisons: Vec<Comparison>) -> Self {
        self.comparisons = comparisons;
        self
    }

    pub fn with_aggregates(mut self, aggregates: Vec<Aggregate>) -> Self {
        self.aggregates = aggregates;
        self
    }

    pub fn is_normal(&self) -> bool {
        self.head.len() <= 1
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn body_is_empty(&self) -> bool {
        self.pos_body.is_empty()
            && self.neg_body.is_empty()
            && self.comparisons.is_empty()
            && self.aggregates.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    /// Every variable of the rule, including aggregate-local ones.
    pub fn variables(&self) -> BTreeSet<String> {
        self.variables_in_order().into_iter().collect()
    }

    /// Variables in order of first occurrence: positive body, negative body,
    /// comparisons, aggregates, then head.
    pub fn variables_in_order(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut push = |v: &str| {
            if seen.insert(v.to_owned()) {
                order.push(v.to_owned());
            }
        };
        let mut buf = Vec::new();
        for a in self.pos_body.iter().chain(&self.neg_body) {
            a.collect_vars(&mut buf);
        }
        for c in &self.comparisons {
            c.lhs.collect_vars(&mut buf);
            c.rhs.collect_vars(&mut buf);
        }
        for v in buf.drain(..) {
            push(v);
        }
        for agg in &self.aggregates {
            for v in &agg.tuple_vars {
                push(v);
            }
            for l in &agg.condition {
                l.atom.collect_vars(&mut buf);
            }
            agg.guard.collect_vars(&mut buf);
            for v in buf.drain(..) {
                push(v);
            }
        }
        for a in &self.head {
            a.collect_vars(&mut buf);
        }
        for v in buf.drain(..) {
            push(v);
        }
        order
    }

    pub fn head_variables(&self) -> BTreeSet<String> {
        self.head.iter().flat_map(Atom::variables).collect()
    }

    /// Variables of aggregate `idx` that also occur elsewhere in the rule
    /// (including its guard).
    pub fn aggregate_global_vars(&self, idx: usize) -> BTreeSet<String> {
        let agg = &self.aggregates[idx];
        let mut outside: BTreeSet<String> = BTreeSet::new();
        for a in self.head.iter().chain(&self.pos_body).chain(&self.neg_body) {
            outside.extend(a.variables());
        }
        for c in &self.comparisons {
            outside.extend(c.variables());
        }
        for (j, other) in self.aggregates.iter().enumerate() {
            if j != idx {
                outside.extend(other.variables());
            }
        }
        let mut global: BTreeSet<String> = agg.variables().into_iter().filter(|v| outside.contains(v)).collect();
        global.extend(agg.guard.variables());
        global
    }

    /// Variables made safe by the positive body, closed under `X = φ`
    /// definitions whose right-hand side is already safe.
    pub fn safe_variables(&self) -> BTreeSet<String> {
        let mut safe: BTreeSet<String> = self
            .pos_body
            .iter()
            .flat_map(|a| a.binding_vars().map(str::to_owned))
            .collect();
        loop {
            let mut changed = false;
            for c in &self.comparisons {
                for (x, rhs) in c.definitions() {
                    if !safe.contains(x) && rhs.variables().iter().all(|v| safe.contains(v)) {
                        safe.insert(x.to_owned());
                        changed = true;
                    }
                }
            }
            if !changed {
                return safe;
            }
        }
    }

    /// The safety closure: variables that are neither bound by a positive
    /// atom nor defined from bound variables. Aggregate-local variables must
    /// be bound by a positive literal of their own condition.
    pub fn unsafe_variables(&self) -> BTreeSet<String> {
        let safe = self.safe_variables();
        let mut unsafe_vars = BTreeSet::new();
        for (idx, agg) in self.aggregates.iter().enumerate() {
            let global = self.aggregate_global_vars(idx);
            let local_bound: BTreeSet<String> = agg
                .condition
                .iter()
                .filter(|l| !l.negated)
                .flat_map(|l| l.atom.binding_vars().map(str::to_owned))
                .collect();
            for v in agg.variables() {
                let ok = if global.contains(&v) {
                    safe.contains(&v)
                } else {
                    local_bound.contains(&v)
                };
                if !ok {
                    unsafe_vars.insert(v);
                }
            }
        }
        let mut outer = Vec::new();
        for a in self.head.iter().chain(&self.pos_body).chain(&self.neg_body) {
            a.collect_vars(&mut outer);
        }
        for c in &self.comparisons {
            c.lhs.collect_vars(&mut outer);
            c.rhs.collect_vars(&mut outer);
        }
        for v in outer {
            if !safe.contains(v) {
                unsafe_vars.insert(v.to_owned());
            }
        }
        unsafe_vars
    }

    pub fn is_safe(&self) -> bool {
        self.unsafe_variables().is_empty()
    }

    /// `(is_safe, unsafe variables)`.
    pub fn safety(&self) -> (bool, BTreeSet<String>) {
        let u = self.unsafe_variables();
        (u.is_empty(), u)
    }

    pub fn check_safe(&self) -> Result<()> {
        let u = self.unsafe_variables();
        if u.is_empty() {
            Ok(())
        } else {
            Err(Error::Unsafe {
                rule: self.to_string(),
                variables: u.into_iter().collect(),
            })
        }
    }

    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Rule {
        Rule {
            head: self.head.iter().map(|a| a.rename_vars(map)).collect(),
            pos_body: self.pos_body.iter().map(|a| a.rename_vars(map)).collect(),
            neg_body: self.neg_body.iter().map(|a| a.rename_vars(map)).collect(),
            comparisons: self.comparisons.iter().map(|c| c.rename_vars(map)).collect(),
            aggregates: self.aggregates.iter().map(|a| a.rename_vars(map)).collect(),
        }
    }

    /// Every atom occurring in the rule (head, bodies, aggregate conditions).
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head
            .iter()
            .chain(&self.pos_body)
            .chain(&self.neg_body)
            .chain(self.aggregates.iter().flat_map(|a| a.condition.iter().map(|l| &l.atom)))
    }

    fn atoms_mut(&mut self) -> impl Iterator<Item = &mut Atom> {
        self.head
            .iter_mut()
            .chain(self.pos_body.iter_mut())
            .chain(self.neg_body.iter_mut())
            .chain(
                self.aggregates
                    .iter_mut()
                    .flat_map(|a| a.condition.iter_mut().map(|l| &mut l.atom)),
            )
    }

    fn collect_constants(&self, out: &mut BTreeSet<Value>) {
        fn term(t: &Term, out: &mut BTreeSet<Value>) {
            match t {
                Term::Sym(s) => {
                    out.insert(Value::Sym(s.clone()));
                }
                Term::Int(i) => {
                    out.insert(Value::Int(*i));
                }
                Term::Var(_) => {}
                Term::Arith(_, l, r) => {
                    term(l, out);
                    term(r, out);
                }
            }
        }
        for a in self.atoms() {
            for t in &a.args {
                term(t, out);
            }
        }
        for c in &self.comparisons {
            term(&c.lhs, out);
            term(&c.rhs, out);
        }
        for a in &self.aggregates {
            term(&a.guard, out);
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{h}")?;
        }
        if self.body_is_empty() {
            return if self.head.is_empty() {
                f.write_str(":- .")
            } else {
                f.write_str(".")
            };
        }
        if self.head.is_empty() {
            f.write_str(":- ")?;
        } else {
            f.write_str(" :- ")?;
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            Ok(())
        };
        for a in &self.pos_body {
            sep(f)?;
            write!(f, "{a}")?;
        }
        for a in &self.neg_body {
            sep(f)?;
            write!(f, "not {a}")?;
        }
        for c in &self.comparisons {
            sep(f)?;
            write!(f, "{c}")?;
        }
        for a in &self.aggregates {
            sep(f)?;
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// A non-ground program: ground facts plus rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub facts: Vec<Atom>,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    /// Adds a rule; a body-less rule with one ground head atom is stored as
    /// a fact so that printing and re-parsing yields the same structure.
    pub fn push_rule(&mut self, rule: Rule) {
        if rule.head.len() == 1 && rule.body_is_empty() && rule.head[0].is_ground() {
            self.facts.extend(rule.head);
        } else {
            self.rules.push(rule);
        }
    }

    pub fn push_fact(&mut self, atom: Atom) {
        debug_assert!(atom.is_ground());
        self.facts.push(atom);
    }

    /// The domain Δ: every constant occurring in facts or rules.
    pub fn domain(&self) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            Rule::new(vec![f.clone()], vec![], vec![]).collect_constants(&mut out);
        }
        for r in &self.rules {
            r.collect_constants(&mut out);
        }
        out
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.facts.iter().chain(self.rules.iter().flat_map(Rule::atoms))
    }

    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        self.atoms().map(|a| (a.predicate.clone(), a.arity())).collect()
    }

    /// Fails on the first predicate used with two different arities.
    pub fn check_arities(&self) -> Result<()> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for a in self.atoms() {
            match seen.get(a.predicate.as_str()) {
                Some(&n) if n != a.arity() => {
                    return Err(Error::ArityClash {
                        predicate: a.predicate.clone(),
                        first: n,
                        second: a.arity(),
                    })
                }
                _ => {
                    seen.insert(&a.predicate, a.arity());
                }
            }
        }
        Ok(())
    }

    pub fn check_safe(&self) -> Result<()> {
        self.rules.iter().try_for_each(Rule::check_safe)
    }

    /// First predicate carrying a reserved prefix, if any.
    pub fn reserved_collision(&self) -> Option<(String, &'static str)> {
        self.atoms().find_map(|a| {
            RESERVED_PREFIXES
                .iter()
                .find(|p| a.predicate.starts_with(*p))
                .map(|p| (a.predicate.clone(), *p))
        })
    }

    /// Renames predicates that carry a reserved prefix to `u_<name>` (adding
    /// further `u_` until the name is unused).
    pub fn rename_reserved(&self) -> Program {
        let used: BTreeSet<String> = self.atoms().map(|a| a.predicate.clone()).collect();
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for p in &used {
            if RESERVED_PREFIXES.iter().any(|r| p.starts_with(r)) {
                let mut name = format!("u_{p}");
                while used.contains(&name) || map.values().any(|v| v == &name) {
                    name = format!("u_{name}");
                }
                map.insert(p.clone(), name);
            }
        }
        let mut out = self.clone();
        let rename = |a: &mut Atom| {
            if let Some(n) = map.get(&a.predicate) {
                a.predicate = n.clone();
            }
        };
        out.facts.iter_mut().for_each(rename);
        for r in &mut out.rules {
            r.atoms_mut().for_each(rename);
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.facts {
            writeln!(f, "{a}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Yields `<base>_0`, `<base>_1`, ... for a prefix that the program does not
/// use.
#[derive(Clone, Debug)]
pub struct FreshSymbols {
    base: String,
    next: usize,
}

impl FreshSymbols {
    /// Fails with `ReservedPrefixCollision` if a predicate of `program`
    /// already starts with the prefix.
    pub fn new(program: &Program, prefix: &str) -> Result<Self> {
        let gen = FreshSymbols::unchecked(prefix);
        let full = format!("{}_", gen.base);
        if let Some(a) = program
            .atoms()
            .find(|a| a.predicate.starts_with(&full) || a.predicate.starts_with(prefix))
        {
            return Err(Error::ReservedPrefixCollision {
                predicate: a.predicate.clone(),
                prefix: prefix.to_owned(),
            });
        }
        Ok(gen)
    }

    /// A generator for a namespace known to be clean.
    pub fn unchecked(prefix: &str) -> Self {
        FreshSymbols {
            base: prefix.trim_end_matches('_').to_owned(),
            next: 0,
        }
    }

    pub fn next_symbol(&mut self) -> String {
        let s = format!("{}_{}", self.base, self.next);
        self.next += 1;
        s
    }
}

impl Iterator for FreshSymbols {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        Some(self.next_symbol())
    }
}
