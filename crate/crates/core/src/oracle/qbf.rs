use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::parse::{Qbf, Quantifier};

pub const MAX_QBF_VARS: usize = 24;

/// Variables in quantification order. Variables that only occur in clauses
/// are treated as innermost existentials.
fn ordered_vars(qbf: &Qbf) -> Vec<(Quantifier, u32)> {
    let mut out: Vec<(Quantifier, u32)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (q, block) in &qbf.prefix {
        for &v in block {
            if seen.insert(v) {
                out.push((*q, v));
            }
        }
    }
    for c in &qbf.clauses {
        for l in &c.literals {
            if seen.insert(l.var) {
                out.push((Quantifier::Exists, l.var));
            }
        }
    }
    out
}

/// Decides a prenex CNF QBF by recursion over the prefix.
pub fn eval_qbf(qbf: &Qbf) -> Result<bool> {
    let vars = ordered_vars(qbf);
    if vars.len() > MAX_QBF_VARS {
        return Err(Error::TooManyVars {
            count: vars.len(),
            limit: MAX_QBF_VARS,
        });
    }
    let max = vars.iter().map(|&(_, v)| v as usize).max().unwrap_or(0);
    let mut assign: Vec<Option<bool>> = vec![None; max + 1];
    Ok(eval(qbf, &vars, &mut assign))
}

fn falsified(qbf: &Qbf, assign: &[Option<bool>]) -> bool {
    qbf.clauses
        .iter()
        .any(|c| c.literals.iter().all(|l| assign[l.var as usize] == Some(!l.positive)))
}

fn eval(qbf: &Qbf, vars: &[(Quantifier, u32)], assign: &mut Vec<Option<bool>>) -> bool {
    if falsified(qbf, assign) {
        return false;
    }
    let Some((&(q, v), rest)) = vars.split_first() else {
        return true;
    };
    let branch = |b: bool, assign: &mut Vec<Option<bool>>| {
        assign[v as usize] = Some(b);
        let r = eval(qbf, rest, assign);
        assign[v as usize] = None;
        r
    };
    match q {
        Quantifier::Forall => branch(false, assign) && branch(true, assign),
        Quantifier::Exists => branch(false, assign) || branch(true, assign),
    }
}
