//! Splitting a rule into small rules along a tree decomposition of its
//! Gaifman graph.

mod aggregate;

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Atom, Comparison, FreshSymbols, Program, Rule, Term};
use crate::error::{Error, Result};
use crate::treedecomp::{
    decompose_graph, gaifman, root_at_head, validate_td, GaifmanGraph, Heuristic, TreeDecomposition,
};

pub use aggregate::split_aggregate;

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub heuristic: Heuristic,
    pub seed: u64,
    /// Keep a rule unchanged unless decomposing lowers its variable count
    /// without raising the grounding estimate.
    pub threshold: bool,
    /// Rename input predicates that use a reserved prefix instead of failing.
    pub auto_rename: bool,
    /// Domain size for grounding estimates; defaults to the program's.
    pub domain_size: Option<u64>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            heuristic: Heuristic::MinFill,
            seed: 0,
            threshold: true,
            auto_rename: false,
            domain_size: None,
        }
    }
}

/// Fresh predicate names for one rule: `temp_<tag>_<k>` and `dom_<tag>_<X>`.
#[derive(Clone, Debug)]
pub struct RuleNames {
    tag: String,
    temps: FreshSymbols,
}

impl RuleNames {
    pub fn new(tag: impl Into<String>) -> Self {
        let tag = tag.into();
        RuleNames {
            temps: FreshSymbols::unchecked(&format!("temp_{tag}")),
            tag,
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn next_temp(&mut self) -> String {
        self.temps.next_symbol()
    }

    pub fn dom(&self, var: &str) -> String {
        format!("dom_{}_{var}", self.tag)
    }

    pub fn dom_atom(&self, var: &str) -> Atom {
        Atom::new(self.dom(var), vec![Term::var(var)])
    }
}

/// `n^vars`, saturating at `u64::MAX`.
pub fn grounding_estimate(rule: &Rule, n: u64) -> u64 {
    let vars = rule.variables().len() as u32;
    n.checked_pow(vars).unwrap_or(u64::MAX)
}

/// Sum of [`grounding_estimate`] over `rules`, saturating.
pub fn grounding_estimate_all(rules: &[Rule], n: u64) -> u64 {
    rules
        .iter()
        .fold(0u64, |acc, r| acc.saturating_add(grounding_estimate(r, n)))
}

/// The element classes of a rule body, addressed by position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Element {
    Pos(usize),
    Neg(usize),
    Cmp(usize),
    Agg(usize),
}

fn elements(rule: &Rule) -> Vec<(Element, BTreeSet<String>)> {
    let mut out = Vec::new();
    out.extend(
        rule.pos_body
            .iter()
            .enumerate()
            .map(|(i, a)| (Element::Pos(i), a.variables())),
    );
    out.extend(
        rule.neg_body
            .iter()
            .enumerate()
            .map(|(i, a)| (Element::Neg(i), a.variables())),
    );
    out.extend(
        rule.comparisons
            .iter()
            .enumerate()
            .map(|(i, c)| (Element::Cmp(i), c.variables())),
    );
    out.extend((0..rule.aggregates.len()).map(|i| (Element::Agg(i), rule.aggregate_global_vars(i))));
    out
}

fn element_text(rule: &Rule, e: Element) -> String {
    match e {
        Element::Pos(i) => rule.pos_body[i].to_string(),
        Element::Neg(i) => format!("not {}", rule.neg_body[i]),
        Element::Cmp(i) => rule.comparisons[i].to_string(),
        Element::Agg(i) => rule.aggregates[i].to_string(),
    }
}

/// Adds `dom` atoms to `rule` until it is safe. Variables defined by an
/// equation of the rule are only given a `dom` atom if the equation cannot
/// make them safe. Returns the variables that received one.
pub(crate) fn add_dom_atoms(rule: &mut Rule, names: &RuleNames) -> BTreeSet<String> {
    let mut added = BTreeSet::new();
    loop {
        let unsafe_vars = rule.unsafe_variables();
        if unsafe_vars.is_empty() {
            return added;
        }
        let defined: BTreeSet<&str> = rule
            .comparisons
            .iter()
            .flat_map(|c| c.definitions())
            .map(|d| d.0)
            .collect();
        let mut pick: Vec<String> = unsafe_vars
            .iter()
            .filter(|v| !defined.contains(v.as_str()))
            .cloned()
            .collect();
        if pick.is_empty() {
            pick = unsafe_vars.into_iter().take(1).collect();
        }
        let order = rule.variables_in_order();
        pick.sort_by_key(|v| order.iter().position(|o| o == v));
        for v in pick {
            if added.insert(v.clone()) {
                rule.pos_body.push(names.dom_atom(&v));
            } else {
                // An aggregate-local variable cannot be repaired from outside.
                return added;
            }
        }
    }
}

/// For each needed variable `X`, a rule `dom_X(X) <- A` where `A` is the
/// first positive atom of `source` having `X` as an argument; failing that,
/// the smallest equation `X = φ` together with atoms securing the variables
/// of `φ`, recursively.
pub fn synthesize_dom_rules(source: &Rule, needed: &BTreeSet<String>, names: &RuleNames) -> Result<Vec<Rule>> {
    let order = source.variables_in_order();
    let mut needed: Vec<&String> = needed.iter().collect();
    needed.sort_by_key(|v| order.iter().position(|o| o == *v).unwrap_or(usize::MAX));
    let mut out = Vec::new();
    for x in needed {
        let mut atoms = Vec::new();
        let mut eqs = Vec::new();
        if !secure(source, x, &mut atoms, &mut eqs, &mut BTreeSet::new()) {
            return Err(Error::UnsecurableVariable(x.clone()));
        }
        let mut pos_body: Vec<Atom> = Vec::new();
        for a in atoms {
            let atom = source.pos_body[a].clone();
            if !pos_body.contains(&atom) {
                pos_body.push(atom);
            }
        }
        let mut eqs: Vec<usize> = eqs;
        eqs.sort_unstable();
        eqs.dedup();
        let comparisons: Vec<Comparison> = eqs.into_iter().map(|i| source.comparisons[i].clone()).collect();
        out.push(Rule::new(vec![names.dom_atom(x)], pos_body, vec![]).with_comparisons(comparisons));
    }
    Ok(out)
}

fn secure(
    source: &Rule,
    x: &str,
    atoms: &mut Vec<usize>,
    eqs: &mut Vec<usize>,
    visiting: &mut BTreeSet<String>,
) -> bool {
    if let Some(i) = source.pos_body.iter().position(|a| a.binding_vars().any(|v| v == x)) {
        atoms.push(i);
        return true;
    }
    if !visiting.insert(x.to_owned()) {
        return false;
    }
    let mut candidates: Vec<(usize, usize, &Term)> = source
        .comparisons
        .iter()
        .enumerate()
        .filter(|(i, _)| !eqs.contains(i))
        .flat_map(|(i, c)| c.definitions().into_iter().map(move |d| (i, d)))
        .filter(|(_, (v, _))| *v == x)
        .map(|(i, (_, phi))| (phi.size(), i, phi))
        .collect();
    candidates.sort_by_key(|&(size, i, _)| (size, i));
    for (_, i, phi) in candidates {
        let (atoms_len, eqs_len) = (atoms.len(), eqs.len());
        eqs.push(i);
        if phi.variables().iter().all(|y| secure(source, y, atoms, eqs, visiting)) {
            visiting.remove(x);
            return true;
        }
        atoms.truncate(atoms_len);
        eqs.truncate(eqs_len);
    }
    visiting.remove(x);
    false
}

/// Rewrites `rule` along `td` (which must be rooted at a bag containing the
/// head variables). Each body element goes to the first node, in post-order,
/// whose bag covers it. Every non-root node `n` yields
/// `temp_n(Y_n) <- elements(n), temp_m(Y_m) for children m, dom atoms` with
/// `Y_n = χ(n) ∩ χ(parent(n))`; the root yields the original head. The
/// needed `dom` rules come first in the result.
pub fn decompose_rule(rule: &Rule, td: &TreeDecomposition, names: &mut RuleNames) -> Result<Vec<Rule>> {
    if td.len() <= 1 {
        return Ok(vec![rule.clone()]);
    }
    let head_vars = rule.head_variables();
    if !head_vars.is_subset(&td.bags[td.root]) {
        return Err(Error::NoCoveringBag(head_vars.into_iter().collect()));
    }
    let post = td.post_order();
    let mut assigned: Vec<Vec<Element>> = vec![Vec::new(); td.len()];
    for (e, vars) in elements(rule) {
        let node = post
            .iter()
            .find(|&&n| vars.is_subset(&td.bags[n]))
            .ok_or_else(|| Error::UncoveredAtom(element_text(rule, e)))?;
        assigned[*node].push(e);
    }
    let order = rule.variables_in_order();
    let mut temp_atoms: Vec<Option<Atom>> = vec![None; td.len()];
    let mut node_rules = Vec::new();
    let mut needed = BTreeSet::new();
    for &n in &post {
        let mut r = Rule::default();
        for &e in &assigned[n] {
            match e {
                Element::Pos(i) => r.pos_body.push(rule.pos_body[i].clone()),
                Element::Neg(i) => r.neg_body.push(rule.neg_body[i].clone()),
                Element::Cmp(i) => r.comparisons.push(rule.comparisons[i].clone()),
                Element::Agg(i) => r.aggregates.push(rule.aggregates[i].clone()),
            }
        }
        for c in td.children(n) {
            r.pos_body
                .push(temp_atoms[c].clone().expect("children precede parents"));
        }
        if n == td.root {
            r.head = rule.head.clone();
        } else {
            let iface = td.interface(n);
            let args = order
                .iter()
                .filter(|v| iface.contains(*v))
                .map(|v| Term::var(v.as_str()))
                .collect();
            let atom = Atom::new(names.next_temp(), args);
            temp_atoms[n] = Some(atom.clone());
            r.head = vec![atom];
        }
        needed.extend(add_dom_atoms(&mut r, names));
        node_rules.push(r);
    }
    // Variables whose dom predicate the rule already uses are defined elsewhere.
    needed.retain(|v| !rule.pos_body.iter().any(|a| a.predicate == names.dom(v)));
    let mut out = synthesize_dom_rules(rule, &needed, names)?;
    out.extend(node_rules);
    Ok(out)
}

/// Per-rule outcome of [`decompose_program`].
#[derive(Clone, Debug)]
pub struct RuleStats {
    pub index: usize,
    pub vars: usize,
    pub width: usize,
    pub emitted: usize,
    pub max_emitted_vars: usize,
    /// Largest arity of a `temp_` predicate introduced for this rule.
    pub max_temp_arity: usize,
    pub est_before: u64,
    pub est_after: u64,
    pub applied: bool,
    /// Every decomposition computed for the rule, including those of split
    /// aggregate rules.
    pub decompositions: Vec<(GaifmanGraph, TreeDecomposition)>,
    pub rules: Vec<Rule>,
}

impl fmt::Display for RuleStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {}: vars={} width={} emitted={} est_before={} est_after={}",
            self.index, self.vars, self.width, self.emitted, self.est_before, self.est_after
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct StatsReport {
    pub domain_size: u64,
    pub rules: Vec<RuleStats>,
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

struct Transformed {
    rules: Vec<Rule>,
    width: usize,
    decompositions: Vec<(GaifmanGraph, TreeDecomposition)>,
}

fn max_vars(rules: &[Rule]) -> usize {
    rules.iter().map(|r| r.variables().len()).max().unwrap_or(0)
}

/// Decomposes one rule (after splitting its aggregates) and applies the
/// threshold policy.
fn transform(rule: &Rule, tag: &str, opts: &DecomposeOptions, n: u64) -> Result<(Transformed, bool)> {
    let mut names = RuleNames::new(tag);
    let mut extra = Vec::new();
    let mut decompositions = Vec::new();
    let mut main = rule.clone();
    for k in 0..rule.aggregates.len() {
        let sub_tag = format!("{tag}a{k}");
        if let Some((rewritten, r_a, doms)) = split_aggregate(&main, k, &sub_tag)? {
            main = rewritten;
            extra.extend(doms);
            let (sub, _) = transform(&r_a, &sub_tag, opts, n)?;
            decompositions.extend(sub.decompositions);
            extra.extend(sub.rules);
        }
    }
    let g = gaifman(&main);
    let td = root_at_head(&decompose_graph(&g, opts.heuristic, opts.seed), &main.head_variables())?;
    debug_assert_eq!(validate_td(&g, &td), Ok(()));
    let width = td.width();
    extra.extend(decompose_rule(&main, &td, &mut names)?);
    decompositions.push((g, td));
    let keep = !opts.threshold
        || (max_vars(&extra) < rule.variables().len()
            && grounding_estimate_all(&extra, n) <= grounding_estimate(rule, n));
    let rules = if keep { extra } else { vec![rule.clone()] };
    Ok((
        Transformed {
            rules,
            width,
            decompositions,
        },
        keep,
    ))
}

/// Decomposes every rule of `program`. Facts are copied unchanged; rules for
/// which decomposition does not pay off (see [`DecomposeOptions::threshold`])
/// are kept as they are.
pub fn decompose_program(program: &Program, opts: &DecomposeOptions) -> Result<(Program, StatsReport)> {
    let renamed;
    let program = match program.reserved_collision() {
        Some(_) if opts.auto_rename => {
            renamed = program.rename_reserved();
            &renamed
        }
        Some((predicate, prefix)) => {
            return Err(Error::ReservedPrefixCollision {
                predicate,
                prefix: prefix.to_owned(),
            })
        }
        None => program,
    };
    program.check_safe()?;
    let n = opts.domain_size.unwrap_or(program.domain().len() as u64);
    let mut out = Program {
        facts: program.facts.clone(),
        rules: Vec::new(),
    };
    let mut report = StatsReport {
        domain_size: n,
        rules: Vec::new(),
    };
    for (i, rule) in program.rules.iter().enumerate() {
        let (t, applied) = transform(rule, &i.to_string(), opts, n)?;
        let max_temp_arity = t
            .rules
            .iter()
            .flat_map(|r| &r.head)
            .filter(|a| a.predicate.starts_with("temp_"))
            .map(Atom::arity)
            .max()
            .unwrap_or(0);
        report.rules.push(RuleStats {
            index: i,
            vars: rule.variables().len(),
            width: t.width,
            emitted: t.rules.len(),
            max_emitted_vars: max_vars(&t.rules),
            max_temp_arity,
            est_before: grounding_estimate(rule, n),
            est_after: grounding_estimate_all(&t.rules, n),
            applied,
            decompositions: t.decompositions,
            rules: t.rules.clone(),
        });
        out.rules.extend(t.rules);
    }
    Ok((out, report))
}
