//! Colored Schreier graphs as points `(H, ω)`, the automorphisms induced by
//! elements normalizing `H`, and the repetitive path such an automorphism
//! forces when it preserves colors.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColoredGraph, GraphError};
use crate::groups::{Group, GroupError, GroupPatch, SchreierGraph};
use crate::subgroup_space::{
    stability_system, stabilizer_map, FiniteGSystem, FiniteGroup, Subgroup, SubgroupError,
};
use crate::thue::{nonrepetitive_color, SimplePath, ThueError, ThueInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchreierError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error("element does not normalize the root stabilizer: edge ({vertex}, {generator}) is not preserved")]
    NotNormalizing { vertex: usize, generator: String },
    #[error("not a labeled automorphism: {0}")]
    NotAutomorphism(String),
    #[error("automorphism fixes vertex {0}")]
    FixedPoint(usize),
    #[error("automorphism sends vertex {0} to a vertex of another color")]
    NotColorPreserving(usize),
    #[error("subgroup is not a member of the given set")]
    NotInOrbit,
    #[error("set is not a single conjugation orbit")]
    NotAnOrbit,
    #[error("internal check failed: {0}")]
    Invariant(String),
}

/// A rooted Schreier graph with a vertex coloring in `1..=alphabet_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredSchreierPoint {
    graph: SchreierGraph,
    alphabet_size: u32,
    colors: Vec<u32>,
}

impl ColoredSchreierPoint {
    pub fn new(graph: SchreierGraph, alphabet_size: u32, colors: Vec<u32>) -> Result<Self, SchreierError> {
        // validates count and range
        ColoredGraph::new(graph.underlying_graph(), alphabet_size, colors.clone())?;
        Ok(ColoredSchreierPoint {
            graph,
            alphabet_size,
            colors,
        })
    }

    pub fn graph(&self) -> &SchreierGraph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.graph.root()
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// The coloring on the underlying simple graph.
    pub fn colored_graph(&self) -> ColoredGraph {
        ColoredGraph::new(self.graph.underlying_graph(), self.alphabet_size, self.colors.clone())
            .expect("validated on construction")
    }
}

#[derive(Serialize, Deserialize)]
struct PointDoc {
    vertices: usize,
    generators: Vec<String>,
    inverse: Vec<usize>,
    edges: Vec<(usize, String, usize)>,
    alphabet_size: u32,
    colors: Vec<u32>,
    root: usize,
}

impl Serialize for ColoredSchreierPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names = self.graph.generator_names();
        PointDoc {
            vertices: self.graph.len(),
            generators: names.to_vec(),
            inverse: (0..names.len()).map(|t| self.graph.inverse_generator(t)).collect(),
            edges: self
                .graph
                .labeled_edges()
                .map(|(v, t, w)| (v, names[t].clone(), w))
                .collect(),
            alphabet_size: self.alphabet_size,
            colors: self.colors.clone(),
            root: self.root(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredSchreierPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = PointDoc::deserialize(d)?;
        let index: HashMap<&str, usize> = doc
            .generators
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut targets = vec![vec![usize::MAX; doc.generators.len()]; doc.vertices];
        for (v, name, w) in &doc.edges {
            let s = *index
                .get(name.as_str())
                .ok_or_else(|| D::Error::custom(format!("unknown generator '{name}'")))?;
            let slot = targets
                .get_mut(*v)
                .ok_or_else(|| D::Error::custom(format!("vertex {v} out of range")))?;
            if slot[s] != usize::MAX {
                return Err(D::Error::custom(format!("duplicate edge ({v}, {name})")));
            }
            slot[s] = *w;
        }
        if targets.iter().flatten().any(|&w| w == usize::MAX) {
            return Err(D::Error::custom("every vertex needs one edge per generator"));
        }
        let graph = SchreierGraph::from_parts(doc.generators, doc.inverse, targets, doc.root)
            .map_err(D::Error::custom)?;
        ColoredSchreierPoint::new(graph, doc.alphabet_size, doc.colors).map_err(D::Error::custom)
    }
}

/// Colors the underlying graph of a Schreier graph non-repetitively.
pub fn color_schreier_point(
    graph: SchreierGraph,
    alphabet_size: u32,
    max_half_length: usize,
    seed: u64,
    max_rounds: u64,
) -> Result<ColoredSchreierPoint, ThueError> {
    let instance = ThueInstance::new(graph.underlying_graph(), alphabet_size, max_half_length)?;
    let colored = nonrepetitive_color(&instance, seed, max_rounds)?;
    let colors = colored.coloring.colors().to_vec();
    Ok(ColoredSchreierPoint::new(graph, alphabet_size, colors).expect("solver colors are in range"))
}

/// A vertex permutation preserving labeled edges: `θ(v)·s = θ(v·s)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphAutomorphism(Vec<usize>);

impl GraphAutomorphism {
    pub fn new(graph: &SchreierGraph, images: Vec<usize>) -> Result<Self, SchreierError> {
        let theta = GraphAutomorphism(images);
        theta.check(graph)?;
        Ok(theta)
    }

    /// The unique candidate sending the root to `root_image`, if it is an
    /// automorphism. Transitivity makes the root's image determine `θ`.
    pub fn from_root_image(graph: &SchreierGraph, root_image: usize) -> Option<Self> {
        let images = (0..graph.len())
            .map(|v| graph.walk(root_image, graph.word_to(v)))
            .collect();
        Self::new(graph, images).ok()
    }

    fn check(&self, graph: &SchreierGraph) -> Result<(), SchreierError> {
        let n = graph.len();
        if self.0.len() != n {
            return Err(SchreierError::NotAutomorphism(format!(
                "{} images for {n} vertices",
                self.0.len()
            )));
        }
        let mut seen = vec![false; n];
        for &x in &self.0 {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(SchreierError::NotAutomorphism("not a permutation".into()));
            }
        }
        if let Some((v, s, _)) = graph
            .labeled_edges()
            .find(|&(v, s, w)| graph.target(self.0[v], s) != self.0[w])
        {
            return Err(SchreierError::NotAutomorphism(format!(
                "edge ({v}, {}) is not preserved",
                graph.generator_names()[s]
            )));
        }
        Ok(())
    }

    pub fn image(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v] == v).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(v, &x)| v == x)
    }

    pub fn is_color_preserving(&self, colors: &[u32]) -> bool {
        (0..self.0.len()).all(|v| colors[self.0[v]] == colors[v])
    }
}

/// `θ_g : H a ↦ H g⁻¹ a`, defined when `g` normalizes the stabilizer `H` of
/// the root.
pub fn automorphism_from_normalizer<G: Group>(
    group: &G,
    graph: &SchreierGraph,
    g: &G::Elem,
) -> Result<GraphAutomorphism, SchreierError> {
    let root = graph.root();
    let root_image = graph.walk(root, &group.word(&group.inv(g)));
    let images: Vec<usize> = (0..graph.len())
        .map(|v| graph.walk(root_image, graph.word_to(v)))
        .collect();
    if let Some((v, s, _)) = graph
        .labeled_edges()
        .find(|&(v, s, w)| graph.target(images[v], s) != images[w])
    {
        return Err(SchreierError::NotNormalizing {
            vertex: v,
            generator: graph.generator_names()[s].clone(),
        });
    }
    let theta = GraphAutomorphism::new(graph, images)?;
    let in_stabilizer = graph.walk(root, &group.word(g)) == root;
    assert!(
        in_stabilizer || theta.fixed_points().is_empty(),
        "an element outside H moved no coset yet fixed one"
    );
    Ok(theta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitiveWitness {
    pub path: SimplePath,
    /// Generator indices leading from the first vertex to the middle one.
    pub word: Vec<usize>,
}

impl RepetitiveWitness {
    pub fn word_text(&self, graph: &SchreierGraph) -> String {
        self.word
            .iter()
            .map(|&s| graph.generator_names()[s].as_str())
            .collect()
    }
}

/// Builds the simple repetitive path forced by a fixed-point-free,
/// color-preserving automorphism: a vertex `a` minimizing `dist(a, θ(a))`
/// (least index on ties), a shortest path `a → θ(a)` with the
/// lexicographically least generator word, and its image under `θ`.
pub fn repetitive_witness(
    point: &ColoredSchreierPoint,
    theta: &GraphAutomorphism,
) -> Result<RepetitiveWitness, SchreierError> {
    let graph = point.graph();
    theta.check(graph)?;
    if let Some(&v) = theta.fixed_points().first() {
        return Err(SchreierError::FixedPoint(v));
    }
    if let Some(v) = (0..graph.len()).find(|&v| point.colors[theta.image(v)] != point.colors[v]) {
        return Err(SchreierError::NotColorPreserving(v));
    }
    let (a, _) = (0..graph.len())
        .map(|v| (v, graph.distances_from(v)[theta.image(v)]))
        .min_by_key(|&(v, d)| (d, v))
        .ok_or_else(|| SchreierError::NotAutomorphism("empty graph".into()))?;
    let target = theta.image(a);
    let to_target = graph.distances_from(target);
    let mut first_half = vec![a];
    let mut word = Vec::new();
    let mut x = a;
    while x != target {
        let s = (0..graph.degree())
            .find(|&s| to_target[graph.target(x, s)] + 1 == to_target[x])
            .expect("a neighbor closer to the target exists");
        word.push(s);
        x = graph.target(x, s);
        if x != target {
            first_half.push(x);
        }
    }
    let second_half: Vec<usize> = first_half.iter().map(|&v| theta.image(v)).collect();
    let vertices = [first_half, second_half].concat();
    let path = SimplePath::new(&graph.underlying_graph(), vertices)
        .map_err(|e| SchreierError::Invariant(format!("witness is not a simple path: {e}")))?;
    if !path.is_repetitive(&point.colors) {
        return Err(SchreierError::Invariant("witness is not repetitive".into()));
    }
    Ok(RepetitiveWitness { path, word })
}

/// `{g in patch : g·(H, ω) = (H, ω)}`: the elements normalizing `H` whose
/// induced automorphism preserves the coloring, in patch order.
pub fn stabilizer_on_patch<G: Group>(
    group: &G,
    point: &ColoredSchreierPoint,
    patch: &GroupPatch<G>,
) -> Vec<G::Elem> {
    patch
        .elements()
        .par_iter()
        .filter(|g| {
            automorphism_from_normalizer(group, point.graph(), g)
                .is_ok_and(|theta| theta.is_color_preserving(&point.colors))
        })
        .cloned()
        .collect()
}

/// `H ∩ patch`, where `H` is the stabilizer of the root, in patch order.
pub fn root_stabilizer_on_patch<G: Group>(
    group: &G,
    graph: &SchreierGraph,
    patch: &GroupPatch<G>,
) -> Vec<G::Elem> {
    patch
        .elements()
        .iter()
        .filter(|g| graph.walk(graph.root(), &group.word(g)) == graph.root())
        .cloned()
        .collect()
}

/// Every labeled automorphism, found by trying each image of the root.
pub fn labeled_automorphisms(graph: &SchreierGraph) -> Vec<GraphAutomorphism> {
    let mut found: Vec<GraphAutomorphism> = (0..graph.len())
        .into_par_iter()
        .filter_map(|u| GraphAutomorphism::from_root_image(graph, u))
        .collect();
    found.sort();
    found
}

/// Labeled automorphisms that are fixed-point-free and color-preserving.
pub fn forcing_automorphisms(point: &ColoredSchreierPoint) -> Vec<GraphAutomorphism> {
    labeled_automorphisms(point.graph())
        .into_iter()
        .filter(|t| t.fixed_points().is_empty() && t.is_color_preserving(&point.colors))
        .collect()
}

/// The orbit of `(H, H)` in `Z × G/H`, with `G` acting by conjugation on
/// the first factor and by left multiplication on the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub system: FiniteGSystem,
    /// `(index into subgroups, index into cosets)` per point; point 0 is
    /// `(H, H)`.
    pub points: Vec<(usize, usize)>,
    pub subgroups: Vec<Subgroup>,
    pub cosets: Vec<Vec<usize>>,
}

pub fn finite_index_realization(
    group: &FiniteGroup,
    orbit: &[Subgroup],
    h: &Subgroup,
) -> Result<Realization, SchreierError> {
    let mut z = orbit.to_vec();
    z.sort();
    z.dedup();
    let Ok(h_index) = z.binary_search(h) else {
        return Err(SchreierError::NotInOrbit);
    };
    let mut conjugates: Vec<Subgroup> = (0..group.order()).map(|g| h.conjugate(group, g)).collect();
    conjugates.sort();
    conjugates.dedup();
    if conjugates != z {
        return Err(SchreierError::NotAnOrbit);
    }

    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut coset_index = HashMap::new();
    for g in std::iter::once(group.identity()).chain(0..group.order()) {
        let c = h.left_coset(group, g);
        if !coset_index.contains_key(&c) {
            coset_index.insert(c.clone(), cosets.len());
            cosets.push(c);
        }
    }
    let act = |g: usize, (k, c): (usize, usize)| {
        let k2 = z.binary_search(&z[k].conjugate(group, g)).expect("orbit is closed");
        let c2 = coset_index[&h.left_coset(group, group.mul(g, cosets[c][0]))];
        (k2, c2)
    };

    let base = (h_index, 0);
    let mut points = vec![base];
    let mut point_index = HashMap::from([(base, 0)]);
    for g in 0..group.order() {
        let p = act(g, base);
        if !point_index.contains_key(&p) {
            point_index.insert(p, points.len());
            points.push(p);
        }
    }
    let action = (0..group.order())
        .map(|g| points.iter().map(|&p| point_index[&act(g, p)]).collect())
        .collect();
    let system = FiniteGSystem::new(group, action)?;

    if stabilizer_map(&system, group)[0] != *h {
        return Err(SchreierError::Invariant("stabilizer of (H, H) differs from H".into()));
    }
    if stability_system(&system, group) != z {
        return Err(SchreierError::Invariant("stability system differs from Z".into()));
    }
    Ok(Realization {
        system,
        points,
        subgroups: z,
        cosets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{ball, schreier_graph, FiniteAction, FreeAbelian, FreeGroup, PermGroup};
    use crate::lll::DEFAULT_MAX_ROUNDS;
    use crate::subgroup_space::{conjugation_orbits, enumerate_subgroups};
    use crate::thue::verify_nonrepetitive;

    fn cycle_point(n: usize, colors: &[u32]) -> ColoredSchreierPoint {
        let z = FreeAbelian::new(1).unwrap();
        let graph = schreier_graph(&z, &FiniteAction::cyclic(n, &[1, -1]), 0).unwrap();
        let c = *colors.iter().max().unwrap();
        ColoredSchreierPoint::new(graph, c, colors.to_vec()).unwrap()
    }

    fn rotation(n: usize, k: usize) -> Vec<usize> {
        (0..n).map(|v| (v + k) % n).collect()
    }

    #[test]
    fn witness_on_c4() {
        let p = cycle_point(4, &[1, 2, 1, 2]);
        let theta = GraphAutomorphism::new(p.graph(), rotation(4, 2)).unwrap();
        let w = repetitive_witness(&p, &theta).unwrap();
        assert_eq!(w.path.vertices(), &[0, 1, 2, 3]);
        assert_eq!(w.word_text(p.graph()), "aa");
    }

    #[test]
    fn witness_on_c6_and_c2() {
        let p = cycle_point(6, &[1, 2, 3, 1, 2, 3]);
        let theta = GraphAutomorphism::new(p.graph(), rotation(6, 3)).unwrap();
        assert_eq!(repetitive_witness(&p, &theta).unwrap().path.len(), 6);

        let p = cycle_point(2, &[1, 1]);
        let theta = GraphAutomorphism::new(p.graph(), rotation(2, 1)).unwrap();
        assert_eq!(repetitive_witness(&p, &theta).unwrap().path.vertices(), &[0, 1]);
    }

    #[test]
    fn witness_preconditions() {
        let p = cycle_point(4, &[1, 2, 3, 4]);
        let theta = GraphAutomorphism::new(p.graph(), rotation(4, 2)).unwrap();
        assert_eq!(repetitive_witness(&p, &theta), Err(SchreierError::NotColorPreserving(0)));
        let id = GraphAutomorphism::new(p.graph(), rotation(4, 0)).unwrap();
        assert_eq!(repetitive_witness(&p, &id), Err(SchreierError::FixedPoint(0)));
        assert!(GraphAutomorphism::new(p.graph(), vec![1, 0, 2, 3]).is_err());
    }

    #[test]
    fn normalizer_automorphisms() {
        let z = FreeAbelian::new(1).unwrap();
        let graph = schreier_graph(&z, &FiniteAction::cyclic(3, &[1, -1]), 0).unwrap();
        let theta = automorphism_from_normalizer(&z, &graph, &vec![1]).unwrap();
        assert_eq!(theta.images(), &[2, 0, 1]);
        assert!(automorphism_from_normalizer(&z, &graph, &vec![3]).unwrap().is_identity());

        let s3 = PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let regular = schreier_graph(&s3, &FiniteAction::regular(&s3).unwrap(), 0).unwrap();
        let t = automorphism_from_normalizer(&s3, &regular, &vec![1, 0, 2]).unwrap();
        assert!(t.fixed_points().is_empty());
        assert!((0..6).all(|v| t.image(t.image(v)) == v));

        // natural action of S3: H = Stab(0) = <(1 2)> is not normal
        let natural = schreier_graph(&s3, &s3.natural_action(), 0).unwrap();
        assert!(matches!(
            automorphism_from_normalizer(&s3, &natural, &vec![1, 2, 0]),
            Err(SchreierError::NotNormalizing { .. })
        ));
    }

    #[test]
    fn stabilizers_on_patches() {
        let f2 = FreeGroup::new(2).unwrap();
        let graph = schreier_graph(&f2, &FiniteAction::cyclic(3, &[1, -1, 1, -1]), 0).unwrap();
        let patch = ball(&f2, 2).unwrap();
        let colored = ColoredSchreierPoint::new(graph.clone(), 3, vec![1, 2, 3]).unwrap();
        assert_eq!(
            stabilizer_on_patch(&f2, &colored, &patch),
            root_stabilizer_on_patch(&f2, &graph, &patch)
        );
        // constant coloring: H is normal here, so everything in the ball
        let constant = ColoredSchreierPoint::new(graph, 1, vec![1, 1, 1]).unwrap();
        assert_eq!(stabilizer_on_patch(&f2, &constant, &patch).len(), patch.len());
    }

    #[test]
    fn regular_s3_nonrepetitive_has_trivial_stabilizer() {
        let s3 = PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let graph = schreier_graph(&s3, &FiniteAction::regular(&s3).unwrap(), 0).unwrap();
        let point = color_schreier_point(graph, 6, 3, 7, DEFAULT_MAX_ROUNDS).unwrap();
        assert!(verify_nonrepetitive(&point.colored_graph(), 3).passed());
        let patch = ball(&s3, 3).unwrap();
        assert_eq!(stabilizer_on_patch(&s3, &point, &patch), vec![s3.identity()]);
        assert!(forcing_automorphisms(&point).is_empty());
    }

    #[test]
    fn labeled_automorphisms_of_regular_actions() {
        // right-regular: automorphisms are left translations
        let s3 = PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let graph = schreier_graph(&s3, &FiniteAction::regular(&s3).unwrap(), 0).unwrap();
        assert_eq!(labeled_automorphisms(&graph).len(), 6);
    }

    #[test]
    fn realization_of_s3_subgroups() {
        let s3 = FiniteGroup::named("s3").unwrap();
        let subs = enumerate_subgroups(&s3).unwrap();
        for z in conjugation_orbits(&subs, &s3) {
            for h in &z {
                let r = finite_index_realization(&s3, &z, h).unwrap();
                assert_eq!(stability_system(&r.system, &s3), z);
                if h.order() == 2 {
                    assert_eq!(r.system.points(), 3);
                }
                if h.order() == 3 {
                    assert_eq!(r.system.points(), 2);
                }
            }
        }
        let order2 = subs.iter().find(|h| h.order() == 2).unwrap();
        assert_eq!(
            finite_index_realization(&s3, &[Subgroup::trivial(&s3)], order2),
            Err(SchreierError::NotInOrbit)
        );
        assert_eq!(
            finite_index_realization(&s3, &[order2.clone()], order2),
            Err(SchreierError::NotAnOrbit)
        );
    }

    #[test]
    fn point_json_roundtrip() {
        let p = cycle_point(3, &[1, 2, 3]);
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"edges\":[[0,\"a\",1],[0,\"A\",2]"));
        assert_eq!(serde_json::from_str::<ColoredSchreierPoint>(&text).unwrap(), p);
        let broken = text.replace("[0,\"a\",1]", "[0,\"a\",2]");
        assert!(serde_json::from_str::<ColoredSchreierPoint>(&broken).is_err());
    }
}
