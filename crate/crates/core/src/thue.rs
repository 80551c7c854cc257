//! Non-repetitive colorings of bounded-degree graphs.
//!
//! A coloring is non-repetitive when no simple path `(x_1, ..., x_2n)` has
//! `c(x_i) = c(x_{n+i})` for every `i`. For `n = 1` this is properness.
//! Repetition events over paths with `2i` vertices form class `i`, with
//! probability `C^-i` under a uniform coloring.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColoredGraph, Graph, GraphError};
use crate::lll::{
    resample_solve, BadEvent, ConstraintSystem, EventKind, LllCertificate, LllError, SolveOutcome,
};

/// `Σ_{j≥1} j 4^-j = x/(1-x)^2` at `x = 1/4`.
pub const SERIES_LIMIT: f64 = 4.0 / 9.0;
pub const DEFAULT_PATH_CAP: usize = 10_000_000;
/// Upper bound on the default half-length truncation.
pub const DEFAULT_MAX_HALF_LENGTH: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThueError {
    #[error("more than {cap} simple paths")]
    TooManyPaths { cap: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("solver gave up after {rounds} rounds with {violated} repetitive paths")]
    SolverFailed { violated: usize, rounds: u64 },
    #[error(transparent)]
    Lll(#[from] LllError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Number of series terms used by [`min_alphabet_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terms {
    Finite(usize),
    Infinite,
}

pub fn series_partial_sum(terms: usize) -> f64 {
    (1..=terms).map(|j| j as f64 * 0.25f64.powi(j as i32)).sum()
}

/// `⌈(2d)^2 exp(8 Σ_{j=1}^{terms} j/4^j)⌉`.
pub fn min_alphabet_bound(d: usize, terms: Terms) -> u64 {
    assert!(d >= 1, "degree bound must be positive");
    let sum = match terms {
        Terms::Finite(t) => series_partial_sum(t),
        Terms::Infinite => SERIES_LIMIT,
    };
    let base = (2 * d) as f64;
    (base * base * (8.0 * sum).exp()).ceil() as u64
}

/// `p_i = C^-i`, `a_i = (2d)^-2i`, `Δ_ij = 4 i j d^2j` for classes `1..=r`.
pub fn build_certificate(d: usize, alphabet: u64, r: usize) -> Result<LllCertificate, ThueError> {
    if d < 1 || alphabet < 2 || r < 1 {
        return Err(ThueError::InvalidInstance(format!(
            "need d >= 1, C >= 2, r >= 1; got d={d}, C={alphabet}, r={r}"
        )));
    }
    let ln_c = (alphabet as f64).ln();
    let ln_2d = ((2 * d) as f64).ln();
    let ln_d = (d as f64).ln();
    Ok(LllCertificate::from_fn(
        r,
        |i| -(i as f64) * ln_c,
        |i| -2.0 * i as f64 * ln_2d,
        |i, j| (4.0 * i as f64 * j as f64).ln() + 2.0 * j as f64 * ln_d,
    )?)
}

/// A path with pairwise-distinct vertices, consecutive ones adjacent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplePath(Vec<usize>);

impl SimplePath {
    pub fn new(graph: &Graph, vertices: Vec<usize>) -> Result<Self, ThueError> {
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vertices.len() {
            return Err(ThueError::InvalidInstance("path repeats a vertex".into()));
        }
        if vertices.iter().any(|&v| v >= graph.len()) {
            return Err(ThueError::InvalidInstance("path leaves the graph".into()));
        }
        if vertices.windows(2).any(|w| !graph.has_edge(w[0], w[1])) {
            return Err(ThueError::InvalidInstance("consecutive vertices not adjacent".into()));
        }
        Ok(SimplePath(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Even length and `c(x_i) = c(x_{n+i})` for all `i`.
    pub fn is_repetitive(&self, colors: &[u32]) -> bool {
        let n = self.0.len();
        n % 2 == 0
            && n > 0
            && (0..n / 2).all(|i| colors[self.0[i]] == colors[self.0[n / 2 + i]])
    }
}

/// Depth-first stream of simple paths with an even number of vertices in
/// `2..=max_vertices`, each undirected path once (smaller endpoint first).
pub struct SimplePaths<'g> {
    graph: &'g Graph,
    max_vertices: usize,
    next_start: usize,
    end_start: usize,
    path: Vec<usize>,
    cursor: Vec<usize>,
    on_path: Vec<bool>,
}

impl<'g> SimplePaths<'g> {
    pub fn new(graph: &'g Graph, max_vertices: usize) -> Self {
        Self::from_starts(graph, max_vertices, 0..graph.len())
    }

    fn from_starts(graph: &'g Graph, max_vertices: usize, starts: std::ops::Range<usize>) -> Self {
        SimplePaths {
            graph,
            max_vertices,
            next_start: starts.start,
            end_start: starts.end,
            path: Vec::new(),
            cursor: Vec::new(),
            on_path: vec![false; graph.len()],
        }
    }
}

impl Iterator for SimplePaths<'_> {
    type Item = SimplePath;

    fn next(&mut self) -> Option<SimplePath> {
        loop {
            let Some(&v) = self.path.last() else {
                if self.next_start >= self.end_start || self.max_vertices < 2 {
                    return None;
                }
                let s = self.next_start;
                self.next_start += 1;
                self.path.push(s);
                self.cursor.push(0);
                self.on_path[s] = true;
                continue;
            };
            let depth = self.path.len() - 1;
            let neighbors = self.graph.neighbors(v);
            let mut advanced = None;
            if self.path.len() < self.max_vertices {
                while self.cursor[depth] < neighbors.len() {
                    let w = neighbors[self.cursor[depth]];
                    self.cursor[depth] += 1;
                    if !self.on_path[w] {
                        advanced = Some(w);
                        break;
                    }
                }
            }
            match advanced {
                Some(w) => {
                    self.path.push(w);
                    self.cursor.push(0);
                    self.on_path[w] = true;
                    if self.path.len() % 2 == 0 && self.path[0] < w {
                        return Some(SimplePath(self.path.clone()));
                    }
                }
                None => {
                    self.on_path[v] = false;
                    self.path.pop();
                    self.cursor.pop();
                }
            }
        }
    }
}

/// All even simple paths up to `max_vertices` vertices, sorted by
/// (length, vertex sequence). Enumeration is split by start vertex.
pub fn enumerate_simple_paths(
    graph: &Graph,
    max_vertices: usize,
    cap: usize,
) -> Result<Vec<SimplePath>, ThueError> {
    let mut paths: Vec<SimplePath> = (0..graph.len())
        .into_par_iter()
        .map(|s| {
            Ok(SimplePaths::from_starts(graph, max_vertices, s..s + 1)
                .take(cap + 1)
                .collect::<Vec<_>>())
        })
        .try_reduce(Vec::new, |mut a, b| {
            a.extend(b);
            if a.len() > cap {
                Err(ThueError::TooManyPaths { cap })
            } else {
                Ok(a)
            }
        })?;
    if paths.len() > cap {
        return Err(ThueError::TooManyPaths { cap });
    }
    paths.sort_unstable_by(|a, b| (a.len(), &a.0).cmp(&(b.len(), &b.0)));
    Ok(paths)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "witness", rename_all = "snake_case")]
pub enum Verification {
    Pass,
    Witness(SimplePath),
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Pass)
    }
}

/// Checks every simple path with at most `2 max_half_length` vertices.
pub fn verify_nonrepetitive(colored: &ColoredGraph, max_half_length: usize) -> Verification {
    SimplePaths::new(colored.graph(), 2 * max_half_length)
        .find(|p| p.is_repetitive(colored.colors()))
        .map_or(Verification::Pass, Verification::Witness)
}

/// `min(|V| / 2, 12)`, at least 1.
pub fn default_max_half_length(vertices: usize) -> usize {
    (vertices / 2).clamp(1, DEFAULT_MAX_HALF_LENGTH)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThueInstance {
    graph: Graph,
    max_degree: usize,
    alphabet_size: u32,
    max_half_length: usize,
}

impl ThueInstance {
    pub fn new(graph: Graph, alphabet_size: u32, max_half_length: usize) -> Result<Self, ThueError> {
        if max_half_length < 1 {
            return Err(ThueError::InvalidInstance("max half-length must be >= 1".into()));
        }
        if alphabet_size < 1 {
            return Err(ThueError::InvalidInstance("alphabet must be nonempty".into()));
        }
        Ok(ThueInstance {
            max_degree: graph.max_degree(),
            graph,
            alphabet_size,
            max_half_length,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn max_half_length(&self) -> usize {
        self.max_half_length
    }

    /// Whether the alphabet meets the certified bound for this degree.
    pub fn is_certified(&self) -> bool {
        self.alphabet_size as u64 >= min_alphabet_bound(self.max_degree.max(1), Terms::Infinite)
    }

    /// Repetition events over all even simple paths of at most `2L`
    /// vertices; a path with `2i` vertices is an event of class `i`.
    pub fn constraint_system(&self) -> Result<ConstraintSystem, ThueError> {
        if self.alphabet_size < 2 {
            return Err(ThueError::InvalidInstance(
                "constraint systems need at least two colors".into(),
            ));
        }
        let paths = enumerate_simple_paths(&self.graph, 2 * self.max_half_length, DEFAULT_PATH_CAP)?;
        let events = paths
            .into_iter()
            .enumerate()
            .map(|(id, p)| BadEvent {
                id,
                class: p.len() / 2,
                support: p.0,
                kind: EventKind::PathRepetition,
            })
            .collect();
        Ok(ConstraintSystem::new(
            vec![self.alphabet_size; self.graph.len()],
            events,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThueColoring {
    pub coloring: ColoredGraph,
    /// False in best-effort mode (alphabet below the certified bound).
    pub certified: bool,
    pub rounds: u64,
}

/// Colors the instance by resampling repetition events.
pub fn nonrepetitive_color(
    instance: &ThueInstance,
    seed: u64,
    max_rounds: u64,
) -> Result<ThueColoring, ThueError> {
    if instance.alphabet_size == 1 {
        let coloring = ColoredGraph::new(instance.graph.clone(), 1, vec![1; instance.graph.len()])?;
        let repetitive = SimplePaths::new(&instance.graph, 2 * instance.max_half_length).count();
        if repetitive > 0 {
            return Err(ThueError::SolverFailed {
                violated: repetitive,
                rounds: 0,
            });
        }
        return Ok(ThueColoring {
            coloring,
            certified: false,
            rounds: 0,
        });
    }
    let system = instance.constraint_system()?;
    match resample_solve(&system, seed, max_rounds) {
        SolveOutcome::Solved { assignment, rounds } => {
            let colors = assignment.into_iter().map(|c| c + 1).collect();
            let coloring = ColoredGraph::new(instance.graph.clone(), instance.alphabet_size, colors)?;
            debug_assert!(verify_nonrepetitive(&coloring, instance.max_half_length).passed());
            Ok(ThueColoring {
                coloring,
                certified: instance.is_certified(),
                rounds,
            })
        }
        SolveOutcome::Failed { violated, rounds } => {
            Err(ThueError::SolverFailed { violated, rounds })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::{check_certificate, DEFAULT_MAX_ROUNDS};

    fn colored(graph: Graph, colors: &[u32]) -> ColoredGraph {
        let c = colors.iter().copied().max().unwrap_or(1);
        ColoredGraph::new(graph, c, colors.to_vec()).unwrap()
    }

    #[test]
    fn path_counts() {
        let edge = Graph::path(2);
        assert_eq!(enumerate_simple_paths(&edge, 2, 10).unwrap().len(), 1);
        let p4 = enumerate_simple_paths(&Graph::path(4), 4, 100).unwrap();
        assert_eq!(p4.len(), 4);
        assert_eq!(p4[3].vertices(), &[0, 1, 2, 3]);
        assert_eq!(enumerate_simple_paths(&Graph::cycle(4), 4, 100).unwrap().len(), 8);
    }

    #[test]
    fn path_cap_overflow() {
        assert_eq!(
            enumerate_simple_paths(&Graph::cycle(6), 6, 5).unwrap_err(),
            ThueError::TooManyPaths { cap: 5 }
        );
    }

    #[test]
    fn canonical_direction() {
        for p in SimplePaths::new(&Graph::cycle(7), 6) {
            assert!(p.vertices()[0] < *p.vertices().last().unwrap());
        }
    }

    #[test]
    fn verify_small_paths() {
        let w = verify_nonrepetitive(&colored(Graph::path(4), &[1, 2, 1, 2]), 2);
        assert_eq!(w, Verification::Witness(SimplePath(vec![0, 1, 2, 3])));
        assert!(verify_nonrepetitive(&colored(Graph::path(4), &[1, 2, 3, 1]), 2).passed());
    }

    #[test]
    fn certificate_examples() {
        let cert = build_certificate(2, 561, 1).unwrap();
        assert!((cert.p()[0].value() - 1.0 / 561.0).abs() < 1e-15);
        assert!((cert.a()[0].value() - 1.0 / 16.0).abs() < 1e-15);
        assert!((cert.delta()[0][0].value() - 16.0).abs() < 1e-12);
        assert!(check_certificate(&cert).holds());
        assert!(!check_certificate(&build_certificate(2, 16, 1).unwrap()).holds());
        assert!(build_certificate(0, 5, 1).is_err());
        assert!(build_certificate(2, 1, 1).is_err());
    }

    #[test]
    fn a_i_at_most_half() {
        for d in 1..=8 {
            let cert = build_certificate(d, 1000, 30).unwrap();
            assert!(cert.a().iter().all(|a| a.value() <= 0.5));
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(min_alphabet_bound(1, Terms::Infinite), 141);
        assert_eq!(min_alphabet_bound(2, Terms::Infinite), 561);
        for t in 0..40 {
            assert!(min_alphabet_bound(3, Terms::Finite(t)) <= min_alphabet_bound(3, Terms::Finite(t + 1)));
        }
        assert_eq!(min_alphabet_bound(2, Terms::Finite(0)), 16);
    }

    #[test]
    fn two_vertices_two_colors() {
        let inst = ThueInstance::new(Graph::path(2), 2, 1).unwrap();
        let out = nonrepetitive_color(&inst, 3, DEFAULT_MAX_ROUNDS).unwrap();
        assert_ne!(out.coloring.color(0), out.coloring.color(1));
        assert!(!out.certified);
    }

    #[test]
    fn one_color_fails_with_an_edge() {
        let inst = ThueInstance::new(Graph::path(3), 1, 1).unwrap();
        assert_eq!(
            nonrepetitive_color(&inst, 0, 10).unwrap_err(),
            ThueError::SolverFailed {
                violated: 2,
                rounds: 0
            }
        );
        let isolated = ThueInstance::new(Graph::empty(3), 1, 1).unwrap();
        assert!(nonrepetitive_color(&isolated, 0, 10).is_ok());
    }

    #[test]
    fn simple_path_validation() {
        let g = Graph::path(3);
        assert!(SimplePath::new(&g, vec![0, 1, 2]).is_ok());
        assert!(SimplePath::new(&g, vec![0, 2]).is_err());
        assert!(SimplePath::new(&g, vec![0, 1, 0]).is_err());
    }
}
