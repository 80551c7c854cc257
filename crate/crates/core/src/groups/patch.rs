use std::collections::HashMap;
use std::sync::Arc;

use super::{Group, GroupError};

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// The word-metric ball of radius `r` around the identity.
///
/// Elements are listed by distance, then by the group's lexicographic
/// canonical-form key, so `ball(r)` is a prefix of `ball(r + 1)`.
#[derive(Clone, Debug)]
pub struct GroupPatch<G: Group> {
    radius: usize,
    elements: Vec<G::Elem>,
    dist: Vec<usize>,
    index: HashMap<G::Elem, usize>,
    /// `edges[i][s]` is the index of `elements[i] * s` if it lies in the patch.
    edges: Vec<Vec<Option<usize>>>,
}

pub fn ball<G: Group>(group: &G, radius: usize) -> Result<GroupPatch<G>, GroupError> {
    ball_with_cap(group, radius, DEFAULT_BALL_CAP)
}

pub fn ball_with_cap<G: Group>(
    group: &G,
    radius: usize,
    cap: usize,
) -> Result<GroupPatch<G>, GroupError> {
    let mut elements = vec![group.identity()];
    let mut dist = vec![0];
    let mut index = HashMap::from([(group.identity(), 0usize)]);
    let mut layer_start = 0;
    for d in 1..=radius {
        let mut layer: Vec<G::Elem> = Vec::new();
        for g in &elements[layer_start..] {
            for s in group.generators() {
                let h = group.mul(g, s);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), usize::MAX);
                    layer.push(h);
                }
            }
        }
        if elements.len() + layer.len() > cap {
            return Err(GroupError::BallTooLarge { radius, cap });
        }
        let mut keyed: Vec<(Vec<i64>, G::Elem)> =
            layer.into_iter().map(|h| (group.sort_key(&h), h)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        layer_start = elements.len();
        for (_, h) in keyed {
            index.insert(h.clone(), elements.len());
            elements.push(h);
            dist.push(d);
        }
        if layer_start == elements.len() {
            break; // finite group exhausted
        }
    }
    let edges = elements
        .iter()
        .map(|g| {
            group
                .generators()
                .iter()
                .map(|s| index.get(&group.mul(g, s)).copied())
                .collect()
        })
        .collect();
    Ok(GroupPatch {
        radius,
        elements,
        dist,
        index,
        edges,
    })
}

impl<G: Group> GroupPatch<G> {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[G::Elem] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &G::Elem {
        &self.elements[i]
    }

    pub fn distance(&self, i: usize) -> usize {
        self.dist[i]
    }

    pub fn index_of(&self, e: &G::Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &G::Elem) -> bool {
        self.index.contains_key(e)
    }

    pub fn neighbor(&self, i: usize, s: usize) -> Option<usize> {
        self.edges[i][s]
    }

    /// Labeled Cayley edges `(g, s, g s)` inside the patch.
    pub fn cayley_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(s, t)| t.map(|t| (i, s, t)))
        })
    }
}

/// A coloring of a patch. Cells outside a shifted configuration's valid
/// window are `None`; configurations built with [`Configuration::new`] are full.
#[derive(Clone, Debug)]
pub struct Configuration<G: Group> {
    patch: Arc<GroupPatch<G>>,
    alphabet_size: u32,
    values: Vec<Option<u32>>,
}

impl<G: Group> PartialEq for Configuration<G> {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet_size == other.alphabet_size
            && self.values == other.values
            && self.patch.elements == other.patch.elements
    }
}

impl<G: Group> Configuration<G> {
    /// Full configuration; symbols are `0..alphabet_size`.
    pub fn new(
        patch: Arc<GroupPatch<G>>,
        alphabet_size: u32,
        values: Vec<u32>,
    ) -> Result<Self, GroupError> {
        if values.len() != patch.len() {
            return Err(GroupError::InvalidAction(format!(
                "{} values for a patch of {} elements",
                values.len(),
                patch.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= alphabet_size) {
            return Err(GroupError::InvalidAction(format!(
                "symbol {v} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(Configuration {
            patch,
            alphabet_size,
            values: values.into_iter().map(Some).collect(),
        })
    }

    pub fn patch(&self) -> &Arc<GroupPatch<G>> {
        &self.patch
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn values(&self) -> &[Option<u32>] {
        &self.values
    }

    /// All values, if the configuration is full.
    pub fn full_values(&self) -> Option<Vec<u32>> {
        self.values.iter().copied().collect()
    }

    pub fn get(&self, e: &G::Elem) -> Option<u32> {
        self.patch.index_of(e).and_then(|i| self.values[i])
    }

    pub fn get_index(&self, i: usize) -> Option<u32> {
        self.values[i]
    }

    /// Patch indices where the configuration is defined.
    pub fn valid_window(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_some())
            .collect()
    }
}

/// `(g ω)(h) = ω(g⁻¹ h)` on the cells `h` of ω's patch where `g⁻¹ h` is defined.
pub fn shift<G: Group>(
    group: &G,
    g: &G::Elem,
    omega: &Configuration<G>,
) -> Result<Configuration<G>, GroupError> {
    let g_inv = group.inv(g);
    let values: Vec<Option<u32>> = omega
        .patch
        .elements
        .iter()
        .map(|h| omega.get(&group.mul(&g_inv, h)))
        .collect();
    if values.iter().all(Option::is_none) {
        return Err(GroupError::EmptyWindow);
    }
    Ok(Configuration {
        patch: omega.patch.clone(),
        alphabet_size: omega.alphabet_size,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FreeAbelian, FreeGroup, PermGroup};

    #[test]
    fn free_group_ball_sizes() {
        let f2 = FreeGroup::new(2).unwrap();
        // 2 * 3^r - 1, from the branching count 4 * 3^(k-1) of reduced words
        for r in 0..=5 {
            assert_eq!(ball(&f2, r).unwrap().len(), 2 * 3usize.pow(r as u32) - 1);
        }
    }

    #[test]
    fn abelian_ball_and_order() {
        let z = FreeAbelian::new(1).unwrap();
        let b = ball(&z, 2).unwrap();
        let order: Vec<i64> = b.elements().iter().map(|v| v[0]).collect();
        assert_eq!(order, vec![0, 1, -1, 2, -2]);
        assert_eq!(ball(&FreeAbelian::new(2).unwrap(), 1).unwrap().len(), 5);
    }

    #[test]
    fn finite_group_ball_saturates() {
        let s3 = PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let b = ball(&s3, 10).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.cayley_edges().count(), 18);
    }

    #[test]
    fn cap_is_enforced() {
        let f2 = FreeGroup::new(2).unwrap();
        assert_eq!(
            ball_with_cap(&f2, 3, 40).unwrap_err(),
            GroupError::BallTooLarge { radius: 3, cap: 40 }
        );
    }

    #[test]
    fn shift_on_integers_moves_the_marker() {
        let z = FreeAbelian::new(1).unwrap();
        let patch = Arc::new(ball(&z, 3).unwrap());
        let values = patch
            .elements()
            .iter()
            .map(|v| u32::from(v[0] == 0))
            .collect();
        let omega = Configuration::new(patch.clone(), 2, values).unwrap();
        let moved = shift(&z, &vec![1], &omega).unwrap();
        assert_eq!(moved.get(&vec![1]), Some(1));
        assert_eq!(moved.get(&vec![0]), Some(0));
        // -3 - 1 leaves the patch
        assert_eq!(moved.get(&vec![-3]), None);
        assert_eq!(moved.valid_window().len(), 6);
        let same = shift(&z, &vec![0], &omega).unwrap();
        assert_eq!(same, omega);
    }

    #[test]
    fn shift_out_of_range_is_an_error() {
        let z = FreeAbelian::new(1).unwrap();
        let patch = Arc::new(ball(&z, 1).unwrap());
        let omega = Configuration::new(patch, 2, vec![0, 1, 0]).unwrap();
        assert_eq!(shift(&z, &vec![5], &omega).unwrap_err(), GroupError::EmptyWindow);
    }
}
