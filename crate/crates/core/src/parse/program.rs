//! ASP surface syntax: facts, disjunctive rules, constraints, comparisons and
//! `#count/#sum/#min/#max` aggregates.

use crate::ast::{Aggregate, AggregateFunction, ArithOp, Atom, CmpOp, Comparison, Literal, Program, Rule, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(String),
    Ident(String),
    Int(i64),
    Agg(AggregateFunction),
    Not,
    If,
    Dot,
    Comma,
    Colon,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Op(ArithOp),
    Cmp(CmpOp),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (ln, col) = (li + 1, i + 1);
            if c == '%' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let peek = chars.get(i + 1).copied();
            let mut push = |tok: Tok, len: usize| {
                out.push(Spanned { tok, line: ln, col });
                len
            };
            let len = match c {
                '.' => push(Tok::Dot, 1),
                ',' => push(Tok::Comma, 1),
                '|' | ';' => push(Tok::Bar, 1),
                '(' => push(Tok::LParen, 1),
                ')' => push(Tok::RParen, 1),
                '{' => push(Tok::LBrace, 1),
                '}' => push(Tok::RBrace, 1),
                '+' => push(Tok::Op(ArithOp::Add), 1),
                '-' => push(Tok::Op(ArithOp::Sub), 1),
                '*' => push(Tok::Op(ArithOp::Mul), 1),
                '/' => push(Tok::Op(ArithOp::Div), 1),
                ':' if peek == Some('-') => push(Tok::If, 2),
                ':' => push(Tok::Colon, 1),
                '=' if peek == Some('=') => push(Tok::Cmp(CmpOp::Eq), 2),
                '=' => push(Tok::Cmp(CmpOp::Eq), 1),
                '!' if peek == Some('=') => push(Tok::Cmp(CmpOp::Ne), 2),
                '<' if peek == Some('>') => push(Tok::Cmp(CmpOp::Ne), 2),
                '<' if peek == Some('=') => push(Tok::Cmp(CmpOp::Le), 2),
                '<' => push(Tok::Cmp(CmpOp::Lt), 1),
                '>' if peek == Some('=') => push(Tok::Cmp(CmpOp::Ge), 2),
                '>' => push(Tok::Cmp(CmpOp::Gt), 1),
                '#' => {
                    let word: String = chars[i + 1..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric())
                        .collect();
                    let f = match word.as_str() {
                        "count" => AggregateFunction::Count,
                        "sum" => AggregateFunction::Sum,
                        "min" => AggregateFunction::Min,
                        "max" => AggregateFunction::Max,
                        _ => return Err(Error::syntax(ln, col, format!("unknown directive #{word}"))),
                    };
                    push(Tok::Agg(f), 1 + word.len())
                }
                c if c.is_ascii_digit() => {
                    let digits: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                    let v: i64 = digits
                        .parse()
                        .map_err(|_| Error::syntax(ln, col, "integer literal out of range"))?;
                    push(Tok::Int(v), digits.len())
                }
                c if c.is_ascii_alphabetic() => {
                    let word: String = chars[i..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                        .collect();
                    let n = word.len();
                    let tok = if word == "not" {
                        Tok::Not
                    } else if c.is_ascii_uppercase() {
                        Tok::Var(word)
                    } else {
                        Tok::Ident(word)
                    };
                    push(tok, n)
                }
                _ => return Err(Error::syntax(ln, col, format!("unexpected character `{c}`"))),
            };
            i += len;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::syntax(l, c, msg))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn statement(&mut self) -> Result<Rule> {
        let mut rule = Rule::default();
        if self.peek() != Some(&Tok::If) {
            rule.head.push(self.atom()?);
            while self.eat(&Tok::Bar) {
                rule.head.push(self.atom()?);
            }
        }
        if self.eat(&Tok::If) && self.peek() != Some(&Tok::Dot) {
            loop {
                self.body_element(&mut rule)?;
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::Dot, "`.` at end of rule")?;
        Ok(rule)
    }

    fn body_element(&mut self, rule: &mut Rule) -> Result<()> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                rule.neg_body.push(self.atom()?);
            }
            Some(Tok::Agg(_)) => rule.aggregates.push(self.aggregate()?),
            Some(Tok::Ident(_)) if !matches!(self.peek_at(1), Some(Tok::Cmp(_) | Tok::Op(_))) => {
                rule.pos_body.push(self.atom()?)
            }
            _ => {
                let lhs = self.term()?;
                let Some(Tok::Cmp(op)) = self.bump() else {
                    self.pos -= 1;
                    return self.err("expected comparison operator");
                };
                let rhs = self.term()?;
                rule.comparisons.push(Comparison::new(lhs, op, rhs));
            }
        }
        Ok(())
    }

    fn aggregate(&mut self) -> Result<Aggregate> {
        let Some(Tok::Agg(function)) = self.bump() else {
            unreachable!()
        };
        self.expect(&Tok::LBrace, "`{`")?;
        let mut tuple_vars = Vec::new();
        while let Some(Tok::Var(v)) = self.peek().cloned() {
            self.pos += 1;
            tuple_vars.push(v);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Colon, "`:` in aggregate")?;
        let mut condition = Vec::new();
        loop {
            let negated = self.eat(&Tok::Not);
            condition.push(Literal {
                atom: self.atom()?,
                negated,
            });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        let Some(Tok::Cmp(guard_op)) = self.bump() else {
            self.pos -= 1;
            return self.err("expected aggregate guard");
        };
        let guard = self.term()?;
        Ok(Aggregate {
            function,
            tuple_vars,
            condition,
            guard_op,
            guard,
        })
    }

    fn atom(&mut self) -> Result<Atom> {
        let Some(Tok::Ident(name)) = self.peek().cloned() else {
            return self.err("expected atom");
        };
        self.pos += 1;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)`")?;
        }
        Ok(Atom::new(name, args))
    }

    fn term(&mut self) -> Result<Term> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(op @ (ArithOp::Add | ArithOp::Sub))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Term::arith(op, lhs, self.product()?);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Term> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ (ArithOp::Mul | ArithOp::Div))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Term::arith(op, lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term> {
        match self.bump() {
            Some(Tok::Op(ArithOp::Sub)) => match self.unary()? {
                Term::Int(i) => Ok(Term::Int(-i)),
                t => Ok(Term::arith(ArithOp::Sub, Term::Int(0), t)),
            },
            Some(Tok::Var(v)) => Ok(Term::Var(v)),
            Some(Tok::Ident(s)) => Ok(Term::Sym(s)),
            Some(Tok::Int(i)) => Ok(Term::Int(i)),
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => {
                self.pos -= 1;
                self.err("expected term")
            }
        }
    }
}

/// Parses program text without the arity and safety checks.
pub fn parse_program_unchecked(text: &str) -> Result<Program> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let last_len = text.lines().last().map_or(0, |l| l.chars().count());
    let mut p = Parser {
        toks,
        pos: 0,
        end: (lines, last_len + 1),
    };
    let mut program = Program::new();
    while p.peek().is_some() {
        program.push_rule(p.statement()?);
    }
    Ok(program)
}

/// Parses program text; every rule must be safe and every predicate must
/// keep a single arity.
pub fn parse_program(text: &str) -> Result<Program> {
    let program = parse_program_unchecked(text)?;
    program.check_arities()?;
    program.check_safe()?;
    Ok(program)
}

pub fn print_program(program: &Program) -> String {
    program.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facts() {
        let p = parse_program("col(r). col(g). col(b).").unwrap();
        assert_eq!(p.facts.len(), 3);
        assert!(p.rules.is_empty());
    }

    #[test]
    fn chorded_square_constraint() {
        let p = parse_program(":- e(A,B), e(B,C), e(C,D), e(D,A), e(B,D).").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].variables().len(), 4);
        assert!(p.rules[0].is_constraint());
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
    }

    #[test]
    fn unsafe_rule_rejected() {
        match parse_program(":- not p(X).") {
            Err(Error::Unsafe { variables, .. }) => assert_eq!(variables, vec!["X".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_program("p(a).\nq(b :- r.") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_program("p(a)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_program("p(a) & q."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn empty_program_prints_empty() {
        assert_eq!(print_program(&Program::new()), "");
        assert_eq!(parse_program("% only a comment\n").unwrap(), Program::new());
    }

    #[test]
    fn full_syntax_round_trip() {
        let text = "a | b ; c.\n\
                    h(X) :- p(X,Y), not q(Y), Y = X+1, Z = -3, X != Z, #count{V : r(V,X), not s(V)} >= 2.\n\
                    :- .\n\
                    :- p(X,Y), X*(Y-1) < 4/X.\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.rules.len(), 4);
        assert_eq!(p.rules[0].head.len(), 3);
        assert!(p.rules[2].body_is_empty() && p.rules[2].is_constraint());
        let printed = print_program(&p);
        assert!(printed.contains("#count{V : r(V,X), not s(V)} >= 2"));
        assert!(printed.contains("X*(Y-1) < 4/X"));
        assert_eq!(parse_program(&printed).unwrap(), p);
    }

    #[test]
    fn arity_clash_rejected() {
        assert!(matches!(parse_program("p(a). p(a,b)."), Err(Error::ArityClash { .. })));
    }

    #[test]
    fn negative_literals_and_unary_minus() {
        let p = parse_program("p(-3). q(X) :- p(Y), X = -Y.").unwrap();
        assert_eq!(p.facts[0].args, vec![Term::Int(-3)]);
        assert_eq!(
            p.rules[0].comparisons[0].rhs,
            Term::arith(ArithOp::Sub, Term::Int(0), Term::var("Y"))
        );
    }
}
