use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// An undirected graph with an optional vertex partition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InputGraph {
    pub vertices: BTreeSet<String>,
    /// Each edge stored once with its endpoints in ascending order.
    pub edges: BTreeSet<(String, String)>,
    /// `V1`; `V2` is every other vertex.
    pub partition: Option<BTreeSet<String>>,
}

impl InputGraph {
    pub fn new() -> Self {
        InputGraph::default()
    }

    pub fn add_vertex(&mut self, v: &str) {
        self.vertices.insert(v.to_owned());
    }

    pub fn add_edge(&mut self, u: &str, v: &str) {
        assert_ne!(u, v, "self-loop");
        self.add_vertex(u);
        self.add_vertex(v);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.insert((a.to_owned(), b.to_owned()));
    }

    pub fn v1(&self) -> Option<&BTreeSet<String>> {
        self.partition.as_ref()
    }

    pub fn v2(&self) -> Option<BTreeSet<String>> {
        self.partition
            .as_ref()
            .map(|v1| self.vertices.difference(v1).cloned().collect())
    }
}

fn valid_symbol(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses `u v` edge lines, single-vertex lines, and an optional `#V1`
/// section listing the members of `V1`. `%` starts a comment.
pub fn parse_graph(text: &str) -> Result<InputGraph> {
    let mut g = InputGraph::new();
    let mut v1: Option<Vec<String>> = None;
    for (li, line) in text.lines().enumerate() {
        let ln = li + 1;
        let t = line.split('%').next().unwrap().trim();
        if t.is_empty() {
            continue;
        }
        if t == "#V1" {
            if v1.is_some() {
                return Err(Error::syntax(ln, 1, "duplicate #V1 section"));
            }
            v1 = Some(Vec::new());
            continue;
        }
        let words: Vec<&str> = t.split_whitespace().collect();
        if let Some(bad) = words.iter().find(|w| !valid_symbol(w)) {
            return Err(Error::syntax(ln, 1, format!("invalid vertex name `{bad}`")));
        }
        if let Some(members) = v1.as_mut() {
            members.extend(words.iter().map(|w| w.to_string()));
            continue;
        }
        match words.as_slice() {
            [v] => g.add_vertex(v),
            [u, v] if u == v => return Err(Error::syntax(ln, 1, format!("self-loop on `{u}`"))),
            [u, v] => g.add_edge(u, v),
            _ => return Err(Error::syntax(ln, 1, "expected `u v` or a single vertex")),
        }
    }
    if let Some(members) = v1 {
        let mut set = BTreeSet::new();
        for m in members {
            if !g.vertices.contains(&m) {
                return Err(Error::Partition(format!("V1 member `{m}` is not a vertex")));
            }
            set.insert(m);
        }
        g.partition = Some(set);
    }
    Ok(g)
}

pub fn emit_graph(g: &InputGraph) -> String {
    let mut out = String::new();
    let mut touched = BTreeSet::new();
    for (u, v) in &g.edges {
        out.push_str(&format!("{u} {v}\n"));
        touched.insert(u);
        touched.insert(v);
    }
    for v in &g.vertices {
        if !touched.contains(v) {
            out.push_str(&format!("{v}\n"));
        }
    }
    if let Some(v1) = &g.partition {
        out.push_str("#V1\n");
        for v in v1 {
            out.push_str(&format!("{v}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chorded_square_graph() {
        let g = parse_graph("a b\nb c\nc d\na d\nb d").unwrap();
        assert_eq!(g.vertices.len(), 4);
        assert_eq!(g.edges.len(), 5);
        assert!(g.partition.is_none());
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }

    #[test]
    fn empty_graph() {
        assert_eq!(parse_graph("").unwrap(), InputGraph::new());
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(parse_graph("a a"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn partition_section() {
        let g = parse_graph("a b\nc\n#V1\na\n").unwrap();
        assert_eq!(g.v1().unwrap().len(), 1);
        assert_eq!(g.v2().unwrap(), BTreeSet::from(["b".to_string(), "c".to_string()]));
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
        assert!(matches!(parse_graph("a b\n#V1\nz\n"), Err(Error::Partition(_))));
    }
}
