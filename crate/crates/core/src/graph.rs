//! Simple undirected graphs and vertex colorings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{colors} colors for {vertices} vertices")]
    ColorCount { colors: usize, vertices: usize },
    #[error("color {color} of vertex {vertex} is outside 1..={alphabet}")]
    ColorRange {
        vertex: usize,
        color: u32,
        alphabet: u32,
    },
}

/// Undirected simple graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Loops are dropped and parallel edges merged.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adjacency })
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Parses `u v` pairs, one per line; `#` starts a comment. The vertex
    /// count is one more than the largest index seen.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse().map_err(|_| GraphError::Parse {
                        line: i + 1,
                        reason: format!("'{t}' is not a vertex index"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let [u, v] = nums[..] else {
                return Err(GraphError::Parse {
                    line: i + 1,
                    reason: "expected two vertices".into(),
                });
            };
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v));
        }
        Self::from_edges(n, edges)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Subgraph induced by `keep`, relabeled `0..keep.len()` in order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges()
            .filter_map(|(u, v)| Some((*pos.get(&u)?, *pos.get(&v)?)));
        Graph::from_edges(keep.len(), edges).unwrap()
    }

    pub fn to_edge_list(&self) -> String {
        self.edges().fold(String::new(), |mut s, (u, v)| {
            writeln!(s, "{u} {v}").unwrap();
            s
        })
    }
}

/// A graph whose vertices carry colors in `1..=alphabet_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    graph: Graph,
    alphabet_size: u32,
    colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(graph: Graph, alphabet_size: u32, colors: Vec<u32>) -> Result<Self, GraphError> {
        if colors.len() != graph.len() {
            return Err(GraphError::ColorCount {
                colors: colors.len(),
                vertices: graph.len(),
            });
        }
        if let Some((vertex, &color)) = colors
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c > alphabet_size)
        {
            return Err(GraphError::ColorRange {
                vertex,
                color,
                alphabet: alphabet_size,
            });
        }
        Ok(ColoredGraph {
            graph,
            alphabet_size,
            colors,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    /// The coloring restricted to the subgraph induced by `keep`.
    pub fn induced(&self, keep: &[usize]) -> ColoredGraph {
        ColoredGraph {
            graph: self.graph.induced(keep),
            alphabet_size: self.alphabet_size,
            colors: keep.iter().map(|&v| self.colors[v]).collect(),
        }
    }

    /// `{vertex: color}` with vertex keys as strings.
    pub fn color_map(&self) -> BTreeMap<usize, u32> {
        self.colors.iter().copied().enumerate().collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph coloring {\n");
        for (v, c) in self.colors.iter().enumerate() {
            writeln!(out, "  {v} [label=\"{v}:{c}\"];").unwrap();
        }
        for (u, v) in self.graph.edges() {
            writeln!(out, "  {u} -- {v};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ColoredGraphDoc {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    alphabet_size: u32,
    coloring: BTreeMap<usize, u32>,
}

impl Serialize for ColoredGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ColoredGraphDoc {
            vertices: self.graph.len(),
            edges: self.graph.edges().collect(),
            alphabet_size: self.alphabet_size,
            coloring: self.color_map(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = ColoredGraphDoc::deserialize(d)?;
        let graph = Graph::from_edges(doc.vertices, doc.edges).map_err(D::Error::custom)?;
        let mut colors = vec![0; doc.vertices];
        for (v, c) in doc.coloring {
            *colors
                .get_mut(v)
                .ok_or_else(|| D::Error::custom(format!("colored vertex {v} does not exist")))? = c;
        }
        ColoredGraph::new(graph, doc.alphabet_size, colors).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_parsing() {
        let g = Graph::parse_edge_list("0 1\n# comment\n1 2 # tail\n\n2 0\n1 0\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!(g.has_edge(2, 0));
        assert!(matches!(
            Graph::parse_edge_list("0 1 2"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(Graph::parse_edge_list("0 x").is_err());
    }

    #[test]
    fn colors_validated() {
        assert!(ColoredGraph::new(Graph::path(2), 2, vec![1]).is_err());
        assert!(ColoredGraph::new(Graph::path(2), 2, vec![1, 3]).is_err());
        assert!(ColoredGraph::new(Graph::path(2), 2, vec![0, 1]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = ColoredGraph::new(Graph::cycle(4), 3, vec![1, 2, 3, 2]).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"coloring\":{\"0\":1,\"1\":2,\"2\":3,\"3\":2}"));
        assert_eq!(serde_json::from_str::<ColoredGraph>(&text).unwrap(), c);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = Graph::cycle(5).induced(&[1, 2, 4]);
        assert_eq!(g.len(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
