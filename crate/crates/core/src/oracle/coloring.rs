use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::parse::InputGraph;

pub const MAX_COLORING_VERTICES: usize = 16;

/// A proper coloring with colors `0..colors`, or `None`. Vertices are
/// colored in name order by backtracking.
pub fn solve_coloring(g: &InputGraph, colors: usize) -> Result<Option<BTreeMap<String, usize>>> {
    if g.vertices.len() > MAX_COLORING_VERTICES {
        return Err(Error::TooManyVertices {
            count: g.vertices.len(),
            limit: MAX_COLORING_VERTICES,
        });
    }
    let names: Vec<&String> = g.vertices.iter().collect();
    let index = |v: &String| names.binary_search(&v).unwrap();
    let mut adj = vec![Vec::new(); names.len()];
    for (u, v) in &g.edges {
        let (i, j) = (index(u), index(v));
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut col: Vec<Option<usize>> = vec![None; names.len()];
    if !extend(0, colors, &adj, &mut col) {
        return Ok(None);
    }
    Ok(Some(
        names.iter().zip(col).map(|(n, c)| ((*n).clone(), c.unwrap())).collect(),
    ))
}

fn extend(i: usize, colors: usize, adj: &[Vec<usize>], col: &mut Vec<Option<usize>>) -> bool {
    if i == col.len() {
        return true;
    }
    for c in 0..colors {
        if adj[i].iter().all(|&j| col[j] != Some(c)) {
            col[i] = Some(c);
            if extend(i + 1, colors, adj, col) {
                return true;
            }
        }
    }
    col[i] = None;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_graph;

    fn proper(g: &InputGraph, c: &BTreeMap<String, usize>) -> bool {
        g.edges.iter().all(|(u, v)| c[u] != c[v])
    }

    #[test]
    fn example_graph_is_colorable() {
        let g = parse_graph("a b\nb c\nc d\na d\nb d\n").unwrap();
        let c = solve_coloring(&g, 3).unwrap().unwrap();
        assert_eq!(c.len(), 4);
        assert!(proper(&g, &c));
    }

    #[test]
    fn k4_is_not() {
        let g = parse_graph("a b\na c\na d\nb c\nb d\nc d\n").unwrap();
        assert_eq!(solve_coloring(&g, 3).unwrap(), None);
        assert!(solve_coloring(&g, 4).unwrap().is_some());
    }

    #[test]
    fn empty_graph() {
        assert_eq!(solve_coloring(&InputGraph::new(), 3).unwrap(), Some(BTreeMap::new()));
    }

    #[test]
    fn vertex_limit() {
        let mut g = InputGraph::new();
        for i in 0..17 {
            g.add_vertex(&format!("v{i}"));
        }
        assert!(matches!(solve_coloring(&g, 3), Err(Error::TooManyVertices { .. })));
    }
}
