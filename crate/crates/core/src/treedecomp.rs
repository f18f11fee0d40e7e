//! Gaifman graphs of rules and heuristic tree decompositions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ast::Rule;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaifmanGraph {
    pub vertices: BTreeSet<String>,
    /// Unordered pairs stored with the smaller name first.
    pub edges: BTreeSet<(String, String)>,
}

impl GaifmanGraph {
    pub fn new() -> Self {
        GaifmanGraph::default()
    }

    pub fn add_vertex(&mut self, v: &str) {
        self.vertices.insert(v.to_owned());
    }

    pub fn add_edge(&mut self, u: &str, v: &str) {
        if u == v {
            self.add_vertex(u);
            return;
        }
        self.add_vertex(u);
        self.add_vertex(v);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.insert((a.to_owned(), b.to_owned()));
    }

    pub fn add_clique<'a>(&mut self, vs: impl IntoIterator<Item = &'a str>) {
        let vs: Vec<&str> = vs.into_iter().collect();
        for (i, u) in vs.iter().enumerate() {
            self.add_vertex(u);
            for v in &vs[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.contains(&(a.to_owned(), b.to_owned()))
    }

    fn adjacency(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut adj: BTreeMap<String, BTreeSet<String>> =
            self.vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        for (u, v) in &self.edges {
            adj.get_mut(u).unwrap().insert(v.clone());
            adj.get_mut(v).unwrap().insert(u.clone());
        }
        adj
    }
}

/// The Gaifman graph of a rule. The head is one clique, as is every body
/// atom and every comparison. An aggregate contributes a clique over its
/// global variables only; variables local to an aggregate are not vertices.
pub fn gaifman(rule: &Rule) -> GaifmanGraph {
    let mut g = GaifmanGraph::new();
    let head = rule.head_variables();
    g.add_clique(head.iter().map(String::as_str));
    for a in rule.pos_body.iter().chain(&rule.neg_body) {
        let vs = a.variables();
        g.add_clique(vs.iter().map(String::as_str));
    }
    for c in &rule.comparisons {
        let vs = c.variables();
        g.add_clique(vs.iter().map(String::as_str));
    }
    for i in 0..rule.aggregates.len() {
        let vs = rule.aggregate_global_vars(i);
        g.add_clique(vs.iter().map(String::as_str));
    }
    g
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Heuristic {
    #[default]
    MinFill,
    MinDegree,
}

impl std::str::FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "min-fill" => Ok(Heuristic::MinFill),
            "min-degree" => Ok(Heuristic::MinDegree),
            _ => Err(format!("unknown heuristic `{s}` (expected min-fill or min-degree)")),
        }
    }
}

/// A rooted tree of bags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<String>>,
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and parent links; exactly one node
    /// must have no parent.
    pub fn from_parts(bags: Vec<BTreeSet<String>>, parent: Vec<Option<usize>>) -> Self {
        assert_eq!(bags.len(), parent.len());
        let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
        assert_eq!(roots.len(), 1, "a tree decomposition has exactly one root");
        TreeDecomposition {
            bags,
            parent,
            root: roots[0],
        }
    }

    pub fn single(bag: BTreeSet<String>) -> Self {
        TreeDecomposition::from_parts(vec![bag], vec![None])
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one; 0 for a single empty bag.
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn children(&self, n: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(n)).collect()
    }

    /// Nodes with every child before its parent; children visited in index
    /// order, root last.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                out.push(n);
            } else {
                stack.push((n, true));
                for c in self.children(n).into_iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn depth(&self, mut n: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[n] {
            n = p;
            d += 1;
        }
        d
    }

    /// χ(n) ∩ χ(parent(n)); empty for the root.
    pub fn interface(&self, n: usize) -> BTreeSet<String> {
        match self.parent[n] {
            Some(p) => self.bags[n].intersection(&self.bags[p]).cloned().collect(),
            None => BTreeSet::new(),
        }
    }

    fn neighbours(&self, n: usize) -> Vec<usize> {
        let mut out = self.children(n);
        out.extend(self.parent[n]);
        out
    }
}

impl fmt::Display for TreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in 0..self.len() {
            let bag: Vec<&str> = self.bags[n].iter().map(String::as_str).collect();
            write!(f, "{n}: {{{}}}", bag.join(","))?;
            match self.parent[n] {
                Some(p) => writeln!(f, " -> {p}")?,
                None => writeln!(f, " (root)")?,
            }
        }
        Ok(())
    }
}

struct TieBreak(Option<ChaCha8Rng>);

impl TieBreak {
    fn pick<'a>(&mut self, mut candidates: Vec<&'a String>) -> &'a String {
        candidates.sort();
        match &mut self.0 {
            None => candidates[0],
            Some(rng) => candidates.choose(rng).unwrap(),
        }
    }
}

/// Bucket elimination along a greedy ordering. Ties are broken by the
/// smallest variable name when `seed == 0`, otherwise by a generator seeded
/// with `seed`. Adjacent bags where one contains the other are merged.
pub fn decompose_graph(g: &GaifmanGraph, heuristic: Heuristic, seed: u64) -> TreeDecomposition {
    if g.vertices.is_empty() {
        return TreeDecomposition::single(BTreeSet::new());
    }
    let mut tie = TieBreak((seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed)));
    let mut adj = g.adjacency();
    let mut order: Vec<String> = Vec::new();
    let mut bags: Vec<BTreeSet<String>> = Vec::new();
    while !adj.is_empty() {
        let score = |v: &String, adj: &BTreeMap<String, BTreeSet<String>>| -> usize {
            let ns = &adj[v];
            match heuristic {
                Heuristic::MinDegree => ns.len(),
                Heuristic::MinFill => {
                    let ns: Vec<&String> = ns.iter().collect();
                    let mut fill = 0;
                    for (i, a) in ns.iter().enumerate() {
                        for b in &ns[i + 1..] {
                            if !adj[*a].contains(*b) {
                                fill += 1;
                            }
                        }
                    }
                    fill
                }
            }
        };
        let best = adj.keys().map(|v| score(v, &adj)).min().unwrap();
        let candidates: Vec<&String> = adj.keys().filter(|v| score(v, &adj) == best).collect();
        let v = tie.pick(candidates).clone();
        let ns = adj.remove(&v).unwrap();
        for a in &ns {
            let set = adj.get_mut(a).unwrap();
            set.remove(&v);
            set.extend(ns.iter().filter(|b| *b != a).cloned());
        }
        let mut bag = ns;
        bag.insert(v.clone());
        bags.push(bag);
        order.push(v);
    }
    let pos: BTreeMap<&String, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut parent: Vec<Option<usize>> = (0..bags.len())
        .map(|i| bags[i].iter().filter(|u| **u != order[i]).map(|u| pos[u]).min())
        .collect();
    // Join the trees of a forest under the last root.
    let last = bags.len() - 1;
    for (i, p) in parent.iter_mut().enumerate() {
        if p.is_none() && i != last {
            *p = Some(last);
        }
    }
    merge_contained(TreeDecomposition::from_parts(bags, parent))
}

/// Repeatedly contracts tree edges whose bags are nested.
fn merge_contained(mut td: TreeDecomposition) -> TreeDecomposition {
    loop {
        let found = (0..td.len()).find_map(|c| {
            let p = td.parent[c]?;
            (td.bags[c].is_subset(&td.bags[p]) || td.bags[p].is_subset(&td.bags[c])).then_some((c, p))
        });
        let Some((c, p)) = found else {
            return td;
        };
        let bag = td.bags[c].union(&td.bags[p]).cloned().collect();
        td.bags[p] = bag;
        for q in td.parent.iter_mut() {
            if *q == Some(c) {
                *q = Some(p);
            }
        }
        // Remove node c and shift indices above it.
        td.bags.remove(c);
        td.parent.remove(c);
        for q in td.parent.iter_mut().flatten() {
            if *q > c {
                *q -= 1;
            }
        }
        if td.root > c {
            td.root -= 1;
        }
    }
}

/// The first violated tree-decomposition condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdViolation {
    /// The parent links do not form a single tree.
    NotATree,
    /// Condition (i): a vertex occurs in no bag.
    UncoveredVertex(String),
    /// Condition (ii): no bag contains both endpoints.
    UncoveredEdge(String, String),
    /// Condition (iii): the nodes containing the variable are disconnected;
    /// the two nodes are in different components of that subgraph.
    Disconnected { var: String, first: usize, second: usize },
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => write!(f, "parent links do not form a tree"),
            TdViolation::UncoveredVertex(v) => write!(f, "condition (i): vertex {v} is in no bag"),
            TdViolation::UncoveredEdge(u, v) => write!(f, "condition (ii): edge {u}-{v} is in no bag"),
            TdViolation::Disconnected { var, first, second } => write!(
                f,
                "condition (iii): bags {first} and {second} contain {var} but a bag between them does not"
            ),
        }
    }
}

pub fn validate_td(g: &GaifmanGraph, td: &TreeDecomposition) -> std::result::Result<(), TdViolation> {
    let n = td.len();
    if n == 0 || td.parent[td.root].is_some() {
        return Err(TdViolation::NotATree);
    }
    for i in 0..n {
        let mut seen = 0;
        let mut cur = i;
        while let Some(p) = td.parent[cur] {
            if p >= n || seen > n {
                return Err(TdViolation::NotATree);
            }
            cur = p;
            seen += 1;
        }
        if cur != td.root {
            return Err(TdViolation::NotATree);
        }
    }
    for v in &g.vertices {
        if !td.bags.iter().any(|b| b.contains(v)) {
            return Err(TdViolation::UncoveredVertex(v.clone()));
        }
    }
    for (u, v) in &g.edges {
        if !td.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
            return Err(TdViolation::UncoveredEdge(u.clone(), v.clone()));
        }
    }
    let vars: BTreeSet<&String> = td.bags.iter().flatten().collect();
    for var in vars {
        let tops: Vec<usize> = (0..n)
            .filter(|&i| td.bags[i].contains(var) && td.parent[i].is_none_or(|p| !td.bags[p].contains(var)))
            .collect();
        if tops.len() > 1 {
            return Err(TdViolation::Disconnected {
                var: var.clone(),
                first: tops[0],
                second: tops[1],
            });
        }
    }
    Ok(())
}

/// Re-roots `td` at a node whose bag contains `head_vars`. The current root
/// is kept when it qualifies, otherwise the lowest-numbered covering node is
/// chosen.
pub fn root_at_head(td: &TreeDecomposition, head_vars: &BTreeSet<String>) -> Result<TreeDecomposition> {
    if head_vars.is_subset(&td.bags[td.root]) {
        return Ok(td.clone());
    }
    let Some(new_root) = (0..td.len()).find(|&i| head_vars.is_subset(&td.bags[i])) else {
        return Err(Error::NoCoveringBag(head_vars.iter().cloned().collect()));
    };
    let mut parent = vec![None; td.len()];
    let mut stack = vec![(new_root, None)];
    while let Some((n, from)) = stack.pop() {
        parent[n] = from;
        for m in td.neighbours(n) {
            if Some(m) != from {
                stack.push((m, Some(n)));
            }
        }
    }
    Ok(TreeDecomposition {
        bags: td.bags.clone(),
        parent,
        root: new_root,
    })
}
