use std::collections::BTreeSet;

use crate::ast::{Atom, Literal, Rule, Term};
use crate::decompose::{add_dom_atoms, synthesize_dom_rules, RuleNames};
use crate::error::Result;

/// Splits aggregate `idx` of `rule` into a smaller aggregate and a rule
/// `temp_A(X,Y,W) <- (Ψ \ Ψ')` with `dom` atoms for otherwise unsafe
/// variables. `Ψ'` holds the condition literals that share a variable with
/// the aggregated tuple `X` or with the variables `Y` that also occur
/// outside the aggregate; `W` are the remaining variables of `Ψ'`.
///
/// Returns the rewritten rule, `temp_A`'s rule and the `dom` rules it
/// needs, or `None` when every condition literal belongs to `Ψ'`.
pub fn split_aggregate(rule: &Rule, idx: usize, tag: &str) -> Result<Option<(Rule, Rule, Vec<Rule>)>> {
    let agg = &rule.aggregates[idx];
    let global = rule.aggregate_global_vars(idx);
    let order = rule.variables_in_order();
    let mut x: Vec<String> = Vec::new();
    for v in &agg.tuple_vars {
        if !x.contains(v) {
            x.push(v.clone());
        }
    }
    let cond_vars = agg.condition_variables();
    let y: Vec<String> = order
        .iter()
        .filter(|v| global.contains(*v) && cond_vars.contains(*v) && !x.contains(v))
        .cloned()
        .collect();
    let touches = |l: &Literal| l.atom.variables().iter().any(|v| x.contains(v) || y.contains(v));
    let (psi_prime, rest): (Vec<Literal>, Vec<Literal>) = agg.condition.iter().cloned().partition(|l| touches(l));
    if rest.is_empty() {
        return Ok(None);
    }
    let mut w: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for l in &psi_prime {
        let mut vs = Vec::new();
        l.atom.collect_vars(&mut vs);
        for v in vs {
            if !x.iter().any(|a| a == v) && !y.iter().any(|a| a == v) && seen.insert(v) {
                w.push(v.to_owned());
            }
        }
    }
    let names = RuleNames::new(tag);
    let head = Atom::new(
        format!("temp_{tag}"),
        x.iter().chain(&y).chain(&w).map(|v| Term::var(v.as_str())).collect(),
    );

    let mut r_a = Rule::new(vec![head.clone()], Vec::new(), Vec::new());
    for l in rest {
        if l.negated {
            r_a.neg_body.push(l.atom);
        } else {
            r_a.pos_body.push(l.atom);
        }
    }
    let needed = add_dom_atoms(&mut r_a, &names);
    let mut source = Rule::default();
    source
        .pos_body
        .extend(psi_prime.iter().filter(|l| !l.negated).map(|l| l.atom.clone()));
    source.pos_body.extend(rule.pos_body.iter().cloned());
    source.comparisons = rule.comparisons.clone();
    let doms = synthesize_dom_rules(&source, &needed, &names)?;

    let mut rewritten = rule.clone();
    let new_agg = &mut rewritten.aggregates[idx];
    new_agg.condition = psi_prime;
    new_agg.condition.push(Literal::pos(head));
    Ok(Some((rewritten, r_a, doms)))
}
