use std::collections::VecDeque;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Group, GroupError};
use crate::graph::Graph;

/// A right action on `0..points`: `perms[s][x] = x · s` for generator `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAction {
    points: usize,
    perms: Vec<Vec<usize>>,
}

impl FiniteAction {
    pub fn new(points: usize, perms: Vec<Vec<usize>>) -> Self {
        FiniteAction { points, perms }
    }

    /// Every generator acts trivially on a single point.
    pub fn trivial<G: Group>(group: &G) -> Self {
        FiniteAction::new(1, vec![vec![0]; group.degree()])
    }

    /// `Z/n` with each generator acting by `+shift_s mod n`.
    pub fn cyclic(n: usize, shifts: &[i64]) -> Self {
        let perms = shifts
            .iter()
            .map(|&k| {
                (0..n)
                    .map(|x| (x as i64 + k).rem_euclid(n as i64) as usize)
                    .collect()
            })
            .collect();
        FiniteAction::new(n, perms)
    }

    /// Right-regular action of a finite group on its elements (sorted by key).
    pub fn regular<G: Group>(group: &G) -> Result<Self, GroupError> {
        let mut elements = group
            .elements()
            .ok_or_else(|| GroupError::InvalidAction("regular action needs a finite group".into()))?;
        elements.sort_by_key(|e| group.sort_key(e));
        let index: std::collections::HashMap<_, _> =
            elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let perms = group
            .generators()
            .iter()
            .map(|s| elements.iter().map(|g| index[&group.mul(g, s)]).collect())
            .collect();
        Ok(FiniteAction::new(elements.len(), perms))
    }

    /// One permutation of `0..points` per lowercase generator letter;
    /// uppercase generators act by the inverse permutation.
    pub fn from_letters<G: Group>(
        group: &G,
        points: usize,
        letters: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        let invalid = |m: String| GroupError::InvalidAction(m);
        let lowercase = group
            .generator_names()
            .iter()
            .filter(|n| n.chars().all(|c| c.is_ascii_lowercase()))
            .count();
        if letters.len() != lowercase {
            return Err(invalid(format!(
                "{} permutations for {lowercase} generator letters",
                letters.len()
            )));
        }
        for p in letters {
            let mut seen = vec![false; points];
            if p.len() != points || !p.iter().all(|&x| x < points && !std::mem::replace(&mut seen[x], true)) {
                return Err(invalid(format!("{p:?} is not a permutation of {points} points")));
            }
        }
        let perms = group
            .generator_names()
            .iter()
            .map(|name| {
                let c = name.chars().next().unwrap_or('a');
                let p = &letters[(c.to_ascii_lowercase() as u8 - b'a') as usize];
                if c.is_ascii_uppercase() {
                    let mut inv = vec![0; points];
                    for (x, &y) in p.iter().enumerate() {
                        inv[y] = x;
                    }
                    inv
                } else {
                    p.clone()
                }
            })
            .collect();
        Ok(FiniteAction::new(points, perms))
    }

    /// `Z/n` with lowercase generator `i` acting by `+shifts[i]`.
    pub fn cyclic_letters<G: Group>(group: &G, n: usize, shifts: &[i64]) -> Result<Self, GroupError> {
        let letters: Vec<Vec<usize>> = shifts
            .iter()
            .map(|&k| (0..n).map(|x| (x as i64 + k).rem_euclid(n as i64) as usize).collect())
            .collect();
        Self::from_letters(group, n, &letters)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    fn validate<G: Group>(&self, group: &G) -> Result<(), GroupError> {
        let invalid = |m: String| Err(GroupError::InvalidAction(m));
        if self.perms.len() != group.degree() {
            return invalid(format!(
                "{} generator permutations for {} generators",
                self.perms.len(),
                group.degree()
            ));
        }
        for (s, p) in self.perms.iter().enumerate() {
            let mut seen = vec![false; self.points];
            let ok = p.len() == self.points
                && p.iter()
                    .all(|&x| x < self.points && !std::mem::replace(&mut seen[x], true));
            if !ok {
                return invalid(format!("generator {s} does not act by a permutation"));
            }
            let t = group.inverse_generator(s);
            if (0..self.points).any(|x| self.perms[t][p[x]] != x) {
                return invalid(format!(
                    "generators {} and {} do not act as mutual inverses",
                    group.generator_names()[s],
                    group.generator_names()[t]
                ));
            }
        }
        group.check_action(&self.perms)
    }
}

/// Orbit graph of a transitive finite action, with labeled edges `(v, s, v·s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreierGraph {
    generator_names: Vec<String>,
    inverse: Vec<usize>,
    targets: Vec<Vec<usize>>,
    root: usize,
    /// Shortest, lexicographically least generator word from the root.
    words: Vec<Vec<usize>>,
}

pub fn schreier_graph<G: Group>(
    group: &G,
    action: &FiniteAction,
    basepoint: usize,
) -> Result<SchreierGraph, GroupError> {
    action.validate(group)?;
    if basepoint >= action.points {
        return Err(GroupError::InvalidAction(format!(
            "basepoint {basepoint} is not one of {} points",
            action.points
        )));
    }
    let targets = (0..action.points)
        .map(|v| action.perms.iter().map(|p| p[v]).collect())
        .collect();
    SchreierGraph::from_parts(
        group.generator_names().to_vec(),
        (0..group.degree()).map(|s| group.inverse_generator(s)).collect(),
        targets,
        basepoint,
    )
}

impl SchreierGraph {
    /// Builds a graph from `targets[v][s] = v·s`, checking that each
    /// generator permutes the vertices, that `inverse` pairs generators
    /// with their inverses, and that every vertex is reachable from `root`.
    pub fn from_parts(
        generator_names: Vec<String>,
        inverse: Vec<usize>,
        targets: Vec<Vec<usize>>,
        root: usize,
    ) -> Result<Self, GroupError> {
        let invalid = |m: String| Err(GroupError::InvalidAction(m));
        let n = targets.len();
        let d = generator_names.len();
        if inverse.len() != d || inverse.iter().enumerate().any(|(s, &t)| t >= d || inverse[t] != s) {
            return invalid("inverse table is not an involution on generators".into());
        }
        if targets.iter().any(|row| row.len() != d || row.iter().any(|&w| w >= n)) {
            return invalid(format!("every vertex needs {d} targets in 0..{n}"));
        }
        for s in 0..d {
            if (0..n).any(|v| targets[targets[v][s]][inverse[s]] != v) {
                return invalid(format!(
                    "generator {} is not undone by {}",
                    generator_names[s], generator_names[inverse[s]]
                ));
            }
        }
        if root >= n {
            return invalid(format!("basepoint {root} is not one of {n} points"));
        }
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for s in 0..d {
                let w = targets[v][s];
                if words[w].is_none() {
                    let mut word = words[v].clone().unwrap();
                    word.push(s);
                    words[w] = Some(word);
                    queue.push_back(w);
                }
            }
        }
        if let Some(unreached) = words.iter().position(Option::is_none) {
            return Err(GroupError::NotTransitive {
                basepoint: root,
                unreached,
            });
        }
        Ok(SchreierGraph {
            generator_names,
            inverse,
            targets,
            root,
            words: words.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.generator_names.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn inverse_generator(&self, s: usize) -> usize {
        self.inverse[s]
    }

    /// `v · s`.
    pub fn target(&self, v: usize, s: usize) -> usize {
        self.targets[v][s]
    }

    /// `v · w` for a generator word `w`.
    pub fn walk(&self, v: usize, word: &[usize]) -> usize {
        word.iter().fold(v, |x, &s| self.targets[x][s])
    }

    /// Word leading from the root to `v`.
    pub fn word_to(&self, v: usize) -> &[usize] {
        &self.words[v]
    }

    pub fn labeled_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.targets
            .iter()
            .enumerate()
            .flat_map(|(v, row)| row.iter().enumerate().map(move |(s, &w)| (v, s, w)))
    }

    /// Undirected simple graph underneath (loops and multi-edges dropped).
    pub fn underlying_graph(&self) -> Graph {
        let edges = self
            .labeled_edges()
            .filter(|&(v, _, w)| v < w)
            .map(|(v, _, w)| (v, w));
        Graph::from_edges(self.len(), edges).expect("vertices in range")
    }

    /// Distances from `source` in the (symmetric) edge relation.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.targets[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn diameter(&self) -> usize {
        (0..self.len())
            .map(|v| self.distances_from(v).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// DOT digraph; one arc per generator/inverse pair, labeled by the
    /// generator; vertices labeled by color when given.
    pub fn to_dot(&self, colors: Option<&[u32]>) -> String {
        let mut out = String::from("digraph schreier {\n");
        for v in 0..self.len() {
            let shape = if v == self.root { ", shape=doublecircle" } else { "" };
            match colors {
                Some(c) => writeln!(out, "  {v} [label=\"{v}:{}\"{shape}];", c[v]),
                None => writeln!(out, "  {v} [label=\"{v}\"{shape}];"),
            }
            .unwrap();
        }
        for (v, s, w) in self.labeled_edges() {
            if s <= self.inverse[s] {
                writeln!(out, "  {v} -> {w} [label=\"{}\"];", self.generator_names[s]).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FreeAbelian, FreeGroup, PermGroup};

    #[test]
    fn free_group_on_z3() {
        let f2 = FreeGroup::new(2).unwrap();
        let action = FiniteAction::cyclic(3, &[1, -1, 1, -1]);
        let g = schreier_graph(&f2, &action, 0).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.labeled_edges().count(), 12);
        for v in 0..3 {
            assert_eq!(g.target(v, 0), (v + 1) % 3);
            assert_eq!(g.target(v, 2), (v + 1) % 3);
        }
    }

    #[test]
    fn trivial_action_gives_loops() {
        let f2 = FreeGroup::new(2).unwrap();
        let g = schreier_graph(&f2, &FiniteAction::trivial(&f2), 0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.labeled_edges().all(|(v, _, w)| v == 0 && w == 0));
        assert_eq!(g.labeled_edges().count(), 4);
    }

    #[test]
    fn regular_s3_is_the_cayley_graph() {
        let s3 = PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let action = FiniteAction::regular(&s3).unwrap();
        let g = schreier_graph(&s3, &action, 0).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.underlying_graph().max_degree(), 3);
    }

    #[test]
    fn non_transitive_names_points() {
        let z = FreeAbelian::new(1).unwrap();
        // two fixed points
        let action = FiniteAction::new(2, vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(
            schreier_graph(&z, &action, 0).unwrap_err(),
            GroupError::NotTransitive {
                basepoint: 0,
                unreached: 1
            }
        );
    }

    #[test]
    fn inverse_pairing_is_checked() {
        let z = FreeAbelian::new(1).unwrap();
        let action = FiniteAction::cyclic(3, &[1, 1]);
        assert!(matches!(
            schreier_graph(&z, &action, 0),
            Err(GroupError::InvalidAction(_))
        ));
    }

    #[test]
    fn dot_output_labels() {
        let z = FreeAbelian::new(1).unwrap();
        let g = schreier_graph(&z, &FiniteAction::cyclic(2, &[1, -1]), 0).unwrap();
        let dot = g.to_dot(Some(&[1, 2]));
        assert!(dot.contains("0 -> 1 [label=\"a\"]"));
        assert!(dot.contains("1 [label=\"1:2\"]"));
    }
}
