use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn letter(self) -> char {
        match self {
            Quantifier::Forall => 'a',
            Quantifier::Exists => 'e',
        }
    }
}

/// A literal: variable id (1-based) and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: u32,
    pub positive: bool,
}

impl Lit {
    pub fn new(var: u32, positive: bool) -> Self {
        Lit { var, positive }
    }

    pub fn from_dimacs(x: i64) -> Self {
        Lit::new(x.unsigned_abs() as u32, x > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    pub literals: Vec<Lit>,
    /// Set when the clause contains a complementary pair.
    pub tautology: bool,
}

impl Clause {
    /// Removes repeated literals (first occurrence kept) and flags
    /// complementary pairs.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut literals: Vec<Lit> = Vec::new();
        for l in lits {
            if !literals.contains(&l) {
                literals.push(l);
            }
        }
        let tautology = literals
            .iter()
            .any(|l| literals.contains(&Lit::new(l.var, !l.positive)));
        Clause { literals, tautology }
    }

    pub fn from_dimacs(lits: &[i64]) -> Self {
        Clause::new(lits.iter().map(|&x| Lit::from_dimacs(x)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qbf {
    pub prefix: Vec<(Quantifier, Vec<u32>)>,
    pub clauses: Vec<Clause>,
    pub num_vars: u32,
}

impl Qbf {
    /// Builds a QBF, merging adjacent blocks of the same quantifier and
    /// dropping empty ones.
    pub fn new(prefix: Vec<(Quantifier, Vec<u32>)>, clauses: Vec<Clause>, num_vars: u32) -> Self {
        let mut merged: Vec<(Quantifier, Vec<u32>)> = Vec::new();
        for (q, block) in prefix {
            if block.is_empty() {
                continue;
            }
            match merged.last_mut() {
                Some((lq, lb)) if *lq == q => lb.extend(block),
                _ => merged.push((q, block)),
            }
        }
        Qbf {
            prefix: merged,
            clauses,
            num_vars,
        }
    }

    pub fn quantifier_of(&self, var: u32) -> Option<Quantifier> {
        self.prefix.iter().find(|(_, b)| b.contains(&var)).map(|(q, _)| *q)
    }

    /// The prefix shape as a string such as `ae`.
    pub fn shape(&self) -> String {
        self.prefix.iter().map(|(q, _)| q.letter()).collect()
    }
}

/// Parses QDIMACS. Variables used in clauses but absent from the prefix are
/// bound existentially in the innermost block.
pub fn parse_qdimacs(text: &str) -> Result<Qbf> {
    parse_qdimacs_with(text, false)
}

/// As [`parse_qdimacs`]; with `strict`, input without quantifier lines is an
/// error.
pub fn parse_qdimacs_with(text: &str, strict: bool) -> Result<Qbf> {
    let mut header: Option<(u32, usize)> = None;
    let mut prefix: Vec<(Quantifier, Vec<u32>)> = Vec::new();
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut bound = BTreeSet::new();
    for (li, line) in text.lines().enumerate() {
        let ln = li + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let mut words = t.split_whitespace();
        let first = words.next().unwrap();
        if first == "p" {
            if header.is_some() {
                return Err(Error::syntax(ln, 1, "duplicate header"));
            }
            let fmt = words.next();
            let v = words.next().and_then(|w| w.parse().ok());
            let c = words.next().and_then(|w| w.parse().ok());
            match (fmt, v, c, words.next()) {
                (Some("cnf"), Some(v), Some(c), None) => header = Some((v, c)),
                _ => {
                    return Err(Error::syntax(
                        ln,
                        1,
                        "malformed header, expected `p cnf <vars> <clauses>`",
                    ))
                }
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::syntax(ln, 1, "missing `p cnf` header"));
        };
        let parse_num = |w: &str| -> Result<i64> {
            let x: i64 = w
                .parse()
                .map_err(|_| Error::syntax(ln, 1, format!("invalid token `{w}`")))?;
            if x.unsigned_abs() > num_vars as u64 {
                return Err(Error::syntax(
                    ln,
                    1,
                    format!("variable {} exceeds declared {num_vars}", x.abs()),
                ));
            }
            Ok(x)
        };
        if first == "a" || first == "e" {
            if !clauses.is_empty() || !pending.is_empty() {
                return Err(Error::syntax(ln, 1, "quantifier line after clauses"));
            }
            let q = if first == "a" {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let mut block = Vec::new();
            let mut terminated = false;
            for w in words {
                if terminated {
                    return Err(Error::syntax(ln, 1, "tokens after terminating 0"));
                }
                match parse_num(w)? {
                    0 => terminated = true,
                    x if x < 0 => return Err(Error::syntax(ln, 1, "negative variable in prefix")),
                    x => {
                        if !bound.insert(x as u32) {
                            return Err(Error::syntax(ln, 1, format!("variable {x} quantified twice")));
                        }
                        block.push(x as u32);
                    }
                }
            }
            if !terminated {
                return Err(Error::syntax(ln, 1, "quantifier line must end with 0"));
            }
            prefix.push((q, block));
            continue;
        }
        for w in t.split_whitespace() {
            match parse_num(w)? {
                0 => clauses.push(Clause::from_dimacs(&std::mem::take(&mut pending))),
                x => pending.push(x),
            }
        }
    }
    let Some((num_vars, declared)) = header else {
        return Err(Error::syntax(1, 1, "missing `p cnf` header"));
    };
    if !pending.is_empty() {
        return Err(Error::syntax(
            text.lines().count(),
            1,
            "last clause not terminated by 0",
        ));
    }
    if prefix.is_empty() && strict {
        return Err(Error::EmptyPrefix);
    }
    if clauses.len() != declared {
        log::warn!("header declares {declared} clauses, found {}", clauses.len());
    }
    let free: BTreeSet<u32> = clauses
        .iter()
        .flat_map(|c: &Clause| c.literals.iter().map(|l| l.var))
        .filter(|v| !bound.contains(v))
        .collect();
    if !free.is_empty() {
        log::warn!("variables {free:?} are unquantified, binding them existentially");
        prefix.push((Quantifier::Exists, free.into_iter().collect()));
    }
    Ok(Qbf::new(prefix, clauses, num_vars))
}

pub fn emit_qdimacs(qbf: &Qbf) -> String {
    let mut out = format!("p cnf {} {}\n", qbf.num_vars, qbf.clauses.len());
    for (q, block) in &qbf.prefix {
        out.push(q.letter());
        for v in block {
            let _ = write!(out, " {v}");
        }
        out.push_str(" 0\n");
    }
    for c in &qbf.clauses {
        for l in &c.literals {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}
