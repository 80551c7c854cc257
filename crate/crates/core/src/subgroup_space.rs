//! Finite-scale model of the subgroup space with the conjugation action:
//! subgroup enumeration, conjugation orbits (URSs), stabilizer maps and
//! stability systems.
//!
//! For a finite group every subset of `Sub(G)` is closed, so minimal
//! subsystems are exactly single orbits.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{named_permutation_group, Perm};

pub const DEFAULT_ORDER_CAP: usize = 256;
/// Orders up to this are cross-checked against exhaustive subset closure.
pub const EXHAUSTIVE_CHECK_ORDER: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("group of order {order} exceeds the cap of {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("system is not minimal: {orbits} orbits")]
    NotMinimal { orbits: usize },
    #[error("subgroup enumeration disagrees with exhaustive search ({found} vs {expected})")]
    IncompleteEnumeration { found: usize, expected: usize },
    #[error("unknown group '{0}'")]
    UnknownGroup(String),
}

/// A finite group as a multiplication table over `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    perms: Option<Vec<Perm>>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self, SubgroupError> {
        let n = rows.len();
        let bad = |m: String| Err(SubgroupError::InvalidTable(m));
        if n == 0 {
            return bad("empty table".into());
        }
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad(format!("rows must be {n} entries in 0..{n}"));
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        let mul = |a: usize, b: usize| table[a * n + b];
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
        else {
            return bad("no identity element".into());
        };
        let mut inverse = vec![0; n];
        for (a, slot) in inverse.iter_mut().enumerate() {
            match (0..n).find(|&b| mul(a, b) == identity && mul(b, a) == identity) {
                Some(b) => *slot = b,
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return bad(format!("({a}*{b})*{c} != {a}*({b}*{c})"));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            table,
            identity,
            inverse,
            perms: None,
        })
    }

    /// The group generated by `generators`, elements sorted lexicographically
    /// as image arrays, with `(g h)[p] = h[g[p]]`.
    pub fn from_permutations(degree: usize, generators: &[Perm]) -> Result<Self, SubgroupError> {
        let identity: Perm = (0..degree as u32).collect();
        if generators.iter().any(|g| {
            let mut s = g.clone();
            s.sort_unstable();
            s != identity
        }) {
            return Err(SubgroupError::InvalidTable(
                "generators must be permutations of the same degree".into(),
            ));
        }
        let compose = |g: &Perm, h: &Perm| -> Perm { g.iter().map(|&p| h[p as usize]).collect() };
        let mut seen: HashSet<Perm> = HashSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(g) = queue.pop_front() {
            for s in generators {
                let h = compose(&g, s);
                if seen.insert(h.clone()) {
                    if seen.len() > 1 << 16 {
                        return Err(SubgroupError::CapExceeded {
                            order: seen.len(),
                            cap: 1 << 16,
                        });
                    }
                    queue.push_back(h);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        let index: HashMap<&Perm, usize> = elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elements.len();
        let mut table = vec![0; n * n];
        for (a, g) in elements.iter().enumerate() {
            for (b, h) in elements.iter().enumerate() {
                table[a * n + b] = index[&compose(g, h)];
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).unwrap();
        }
        Ok(FiniteGroup {
            order: n,
            table,
            identity: 0,
            inverse,
            perms: Some(elements),
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(rows).expect("cyclic table")
    }

    /// `sN`, `aN`, `zN`, `dN`, `v4`, `q8`, or `trivial`.
    pub fn named(name: &str) -> Result<Self, SubgroupError> {
        if name == "trivial" || name == "z1" {
            return Ok(Self::cyclic(1));
        }
        let (degree, gens) = named_permutation_group(name)
            .ok_or_else(|| SubgroupError::UnknownGroup(name.to_string()))?;
        Self::from_permutations(degree, &gens)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g a g⁻¹`.
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inverse[g])
    }

    /// Permutation realizing element `a`, for groups built from permutations.
    pub fn permutation(&self, a: usize) -> Option<&Perm> {
        self.perms.as_ref().map(|p| &p[a])
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Closure of `gens` under multiplication (a subgroup, since `G` is finite).
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup { elements: elems }
    }
}

/// A subgroup as a sorted set of element indices. Ordered by
/// (order, element list).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elements.len(), &self.elements).cmp(&(other.elements.len(), &other.elements))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Subgroup {
    /// Checks identity, closure and inverses.
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Option<Self> {
        elements.sort_unstable();
        elements.dedup();
        let mut member = vec![false; group.order()];
        for &e in &elements {
            *member.get_mut(e)? = true;
        }
        let closed = member[group.identity()]
            && elements.iter().all(|&a| {
                member[group.inv(a)] && elements.iter().all(|&b| member[group.mul(a, b)])
            });
        closed.then_some(Subgroup { elements })
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Subgroup {
            elements: vec![group.identity()],
        }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup {
            elements: (0..group.order()).collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Subgroup {
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| group.conjugate(g, h)).collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    pub fn normalizer(&self, group: &FiniteGroup) -> Subgroup {
        let elements = (0..group.order())
            .filter(|&g| self.conjugate(group, g) == *self)
            .collect();
        Subgroup { elements }
    }

    pub fn is_normal(&self, group: &FiniteGroup) -> bool {
        self.normalizer(group).order() == group.order()
    }

    /// The left coset `g H`, sorted.
    pub fn left_coset(&self, group: &FiniteGroup, g: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.elements.iter().map(|&h| group.mul(g, h)).collect();
        c.sort_unstable();
        c
    }
}

pub fn enumerate_subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>, SubgroupError> {
    enumerate_subgroups_with_cap(group, DEFAULT_ORDER_CAP)
}

/// Bottom-up lattice construction: starting from `{e}`, join every found
/// subgroup with every element outside it until no new subgroup appears.
/// Orders up to [`EXHAUSTIVE_CHECK_ORDER`] are cross-checked against
/// [`exhaustive_subgroups`].
pub fn enumerate_subgroups_with_cap(
    group: &FiniteGroup,
    cap: usize,
) -> Result<Vec<Subgroup>, SubgroupError> {
    let n = group.order();
    if n > cap {
        return Err(SubgroupError::CapExceeded { order: n, cap });
    }
    let trivial = Subgroup::trivial(group);
    let mut found: HashSet<Vec<usize>> = HashSet::from([trivial.elements.clone()]);
    let mut queue: VecDeque<(Subgroup, Vec<usize>)> = VecDeque::from([(trivial, Vec::new())]);
    let mut all = Vec::new();
    while let Some((h, gens)) = queue.pop_front() {
        for g in 0..n {
            if h.contains(g) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(g);
            let k = group.generate(&next_gens);
            if found.insert(k.elements.clone()) {
                queue.push_back((k, next_gens));
            }
        }
        all.push(h);
    }
    all.sort();
    if n <= EXHAUSTIVE_CHECK_ORDER {
        let expected = exhaustive_subgroups(group);
        if expected != all {
            return Err(SubgroupError::IncompleteEnumeration {
                found: all.len(),
                expected: expected.len(),
            });
        }
    }
    Ok(all)
}

/// Every subset containing the identity whose size divides `|G|` and that
/// is closed under multiplication. Only for `|G| <= 32`.
pub fn exhaustive_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let n = group.order();
    assert!(n <= 32, "exhaustive search is limited to order 32");
    let e = group.identity();
    let others: Vec<usize> = (0..n).filter(|&x| x != e).collect();
    // left-multiplication images as bit masks over element indices
    let mut out = vec![Subgroup::trivial(group)];
    for size in (2..=n).filter(|k| n % k == 0) {
        let pick = size - 1;
        // Gosper's hack over (n-1)-bit masks with `pick` bits set
        let limit: u64 = 1 << others.len();
        let mut combo: u64 = (1u64 << pick) - 1;
        while combo < limit {
            let mut mask: u64 = 1 << e;
            for (i, &x) in others.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    mask |= 1 << x;
                }
            }
            let closed = (0..n).filter(|&a| mask >> a & 1 == 1).all(|a| {
                (0..n)
                    .filter(|&b| mask >> b & 1 == 1)
                    .all(|b| mask >> group.mul(a, b) & 1 == 1)
            });
            if closed {
                out.push(Subgroup {
                    elements: (0..n).filter(|&a| mask >> a & 1 == 1).collect(),
                });
            }
            let c = combo & combo.wrapping_neg();
            let r = combo + c;
            combo = (((r ^ combo) >> 2) / c) | r;
        }
    }
    out.sort();
    out
}

/// A conjugation orbit of subgroups; for finite `G` each one is a URS.
pub type Urs = Vec<Subgroup>;

/// Partitions `subs` into conjugation orbits, in order of first member.
pub fn conjugation_orbits(subs: &[Subgroup], group: &FiniteGroup) -> Vec<Urs> {
    let index: HashMap<&Subgroup, usize> = subs.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut assigned = vec![false; subs.len()];
    let mut orbits = Vec::new();
    for i in 0..subs.len() {
        if assigned[i] {
            continue;
        }
        let members: BTreeSet<Subgroup> = (0..group.order())
            .map(|g| subs[i].conjugate(group, g))
            .collect();
        for h in &members {
            if let Some(&j) = index.get(h) {
                assigned[j] = true;
            }
        }
        orbits.push(members.into_iter().collect());
    }
    orbits
}

/// A finite left action `g × x → g x` of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGSystem {
    points: usize,
    /// `action[g][x] = g·x`
    action: Vec<Vec<usize>>,
}

impl FiniteGSystem {
    /// Validates `e·x = x` and `(g h)·x = g·(h·x)`.
    pub fn new(group: &FiniteGroup, action: Vec<Vec<usize>>) -> Result<Self, SubgroupError> {
        let bad = |m: String| Err(SubgroupError::InvalidAction(m));
        if action.len() != group.order() {
            return bad(format!("{} rows for a group of order {}", action.len(), group.order()));
        }
        let points = action.first().map_or(0, Vec::len);
        if action.iter().any(|r| r.len() != points || r.iter().any(|&x| x >= points)) {
            return bad(format!("rows must map 0..{points} into itself"));
        }
        if (0..points).any(|x| action[group.identity()][x] != x) {
            return bad("identity does not act trivially".into());
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                if (0..points).any(|x| action[gh][x] != action[g][action[h][x]]) {
                    return bad(format!("(g h)·x != g·(h·x) for g={g}, h={h}"));
                }
            }
        }
        Ok(FiniteGSystem { points, action })
    }

    /// `g·x = g x` on the group itself.
    pub fn regular(group: &FiniteGroup) -> Self {
        let action = (0..group.order())
            .map(|g| (0..group.order()).map(|x| group.mul(g, x)).collect())
            .collect();
        FiniteGSystem {
            points: group.order(),
            action,
        }
    }

    pub fn trivial(group: &FiniteGroup, points: usize) -> Self {
        FiniteGSystem {
            points,
            action: vec![(0..points).collect(); group.order()],
        }
    }

    /// For permutation groups: `g·x = g⁻¹[x]`, a left action under the
    /// right-composition convention.
    pub fn natural(group: &FiniteGroup) -> Option<Self> {
        let degree = group.permutation(group.identity())?.len();
        let action = (0..group.order())
            .map(|g| {
                let p = group.permutation(group.inv(g)).unwrap();
                p.iter().map(|&x| x as usize).collect()
            })
            .collect();
        Some(FiniteGSystem {
            points: degree,
            action,
        })
    }

    /// Left multiplication on the left cosets `G/H`, cosets numbered by
    /// first appearance of their least element.
    pub fn coset_space(group: &FiniteGroup, h: &Subgroup) -> (Self, Vec<Vec<usize>>) {
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        let mut index = HashMap::new();
        for g in 0..group.order() {
            let c = h.left_coset(group, g);
            if !index.contains_key(&c) {
                index.insert(c.clone(), cosets.len());
                cosets.push(c);
            }
        }
        let action = (0..group.order())
            .map(|g| {
                cosets
                    .iter()
                    .map(|c| index[&h.left_coset(group, group.mul(g, c[0]))])
                    .collect()
            })
            .collect();
        (
            FiniteGSystem {
                points: cosets.len(),
                action,
            },
            cosets,
        )
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    /// Orbits as sorted point lists, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.points];
        let mut out = Vec::new();
        for x in 0..self.points {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = self.action.iter().map(|row| row[x]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn is_minimal(&self) -> bool {
        self.orbits().len() == 1
    }
}

/// `x ↦ G_x = {g : g·x = x}`.
pub fn stabilizer_map(system: &FiniteGSystem, group: &FiniteGroup) -> Vec<Subgroup> {
    (0..system.points())
        .map(|x| {
            let elements = (0..group.order()).filter(|&g| system.act(g, x) == x).collect();
            let h = Subgroup { elements };
            debug_assert!(Subgroup::new(group, h.elements.clone()).is_some());
            h
        })
        .collect()
}

/// `Z = {G_x : x ∈ X}`, sorted. For finite discrete systems every point is
/// a continuity point of `x ↦ G_x`, so no closure is taken.
pub fn stability_system(system: &FiniteGSystem, group: &FiniteGroup) -> Vec<Subgroup> {
    let z: BTreeSet<Subgroup> = stabilizer_map(system, group).into_iter().collect();
    let z: Vec<Subgroup> = z.into_iter().collect();
    debug_assert!(z
        .iter()
        .all(|h| (0..group.order()).all(|g| z.binary_search(&h.conjugate(group, g)).is_ok())));
    z
}

pub fn is_essentially_free(system: &FiniteGSystem, group: &FiniteGroup) -> bool {
    let z = stability_system(system, group);
    z.len() == 1 && z[0].is_trivial()
}

/// Finite-scale checks on `X̃ = {(x, G_x)}` for a minimal system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub points: usize,
    pub lifted_points: usize,
    /// `η: X̃ → X`, `(x, G_x) ↦ x`, is a bijection.
    pub projection_bijective: bool,
    /// `X̃` is invariant under `g(x, H) = (g x, g H g⁻¹)` and is a single orbit.
    pub lifted_minimal: bool,
    /// The stability system is a single conjugation orbit.
    pub stability_system_minimal: bool,
    /// The stability system is the only minimal subset of `{G_x}`.
    pub unique_minimal_subset: bool,
    pub stability_system: Vec<Subgroup>,
}

impl StabilityReport {
    pub fn all_hold(&self) -> bool {
        self.projection_bijective
            && self.lifted_minimal
            && self.stability_system_minimal
            && self.unique_minimal_subset
    }
}

pub fn check_proposition_stability(
    system: &FiniteGSystem,
    group: &FiniteGroup,
) -> Result<StabilityReport, SubgroupError> {
    let orbits = system.orbits();
    if orbits.len() != 1 {
        return Err(SubgroupError::NotMinimal {
            orbits: orbits.len(),
        });
    }
    let stab = stabilizer_map(system, group);
    let lifted: Vec<(usize, Subgroup)> = stab.iter().cloned().enumerate().collect();
    let lifted_index: HashMap<&(usize, Subgroup), usize> =
        lifted.iter().enumerate().map(|(i, p)| (p, i)).collect();

    let projected: BTreeSet<usize> = lifted.iter().map(|(x, _)| *x).collect();
    let projection_bijective = projected.len() == lifted.len() && projected.len() == system.points();

    // orbit of the first lifted point under the product action
    let mut reached = vec![false; lifted.len()];
    let mut invariant = true;
    for (x, h) in &lifted {
        for g in 0..group.order() {
            let image = (system.act(g, *x), h.conjugate(group, g));
            match lifted_index.get(&image) {
                Some(&j) if *x == lifted[0].0 => reached[j] = true,
                Some(_) => {}
                None => invariant = false,
            }
        }
    }
    let lifted_minimal = invariant && reached.iter().all(|&r| r);

    let z = stability_system(system, group);
    let z_orbits = conjugation_orbits(&z, group);
    let stability_system_minimal = z_orbits.len() == 1 && z_orbits[0] == z;
    // every orbit in the finite set {G_x} is a minimal subset; unique iff one
    let unique_minimal_subset = z_orbits.len() == 1;

    Ok(StabilityReport {
        points: system.points(),
        lifted_points: lifted.len(),
        projection_bijective,
        lifted_minimal,
        stability_system_minimal,
        unique_minimal_subset,
        stability_system: z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::named("s3").unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 0], vec![0, 0]]).is_err());
        // Z/2 with identity 1
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).is_ok());
        assert_eq!(FiniteGroup::cyclic(5).order(), 5);
    }

    #[test]
    fn cyclic_four_has_three_subgroups() {
        let subs = enumerate_subgroups(&FiniteGroup::cyclic(4)).unwrap();
        let sets: Vec<&[usize]> = subs.iter().map(Subgroup::elements).collect();
        assert_eq!(sets, vec![&[0][..], &[0, 2], &[0, 1, 2, 3]]);
    }

    #[test]
    fn s3_lattice_and_orbits() {
        let g = s3();
        let subs = enumerate_subgroups(&g).unwrap();
        let orders: Vec<usize> = subs.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        let orbits = conjugation_orbits(&subs, &g);
        let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 3, 1, 1]);
    }

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::named("trivial").unwrap();
        assert_eq!(enumerate_subgroups(&g).unwrap().len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_subgroups_with_cap(&FiniteGroup::cyclic(8), 4).unwrap_err(),
            SubgroupError::CapExceeded { order: 8, cap: 4 }
        );
    }

    #[test]
    fn stabilizers_of_basic_actions() {
        let g = s3();
        let regular = FiniteGSystem::regular(&g);
        assert!(stabilizer_map(&regular, &g).iter().all(Subgroup::is_trivial));
        assert!(is_essentially_free(&regular, &g));
        let trivial = FiniteGSystem::trivial(&g, 2);
        assert!(stabilizer_map(&trivial, &g).iter().all(|h| h.order() == 6));
        assert!(!is_essentially_free(&trivial, &g));
        let natural = FiniteGSystem::natural(&g).unwrap();
        let stab = stabilizer_map(&natural, &g);
        assert!(stab.iter().all(|h| h.order() == 2));
        assert_eq!(stability_system(&natural, &g).len(), 3);
        assert!(!is_essentially_free(&natural, &g));
    }

    #[test]
    fn invalid_action_rejected() {
        let g = FiniteGroup::cyclic(2);
        assert!(FiniteGSystem::new(&g, vec![vec![0, 1], vec![0, 0]]).is_err());
        assert!(FiniteGSystem::new(&g, vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(FiniteGSystem::new(&g, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn proposition_reports() {
        let g = s3();
        let natural = FiniteGSystem::natural(&g).unwrap();
        let report = check_proposition_stability(&natural, &g).unwrap();
        assert_eq!(report.lifted_points, 3);
        assert!(report.all_hold());

        let regular = check_proposition_stability(&FiniteGSystem::regular(&g), &g).unwrap();
        assert_eq!(regular.lifted_points, 6);
        assert_eq!(regular.stability_system, vec![Subgroup::trivial(&g)]);

        let point = check_proposition_stability(&FiniteGSystem::trivial(&g, 1), &g).unwrap();
        assert_eq!(point.lifted_points, 1);
        assert_eq!(point.stability_system, vec![Subgroup::whole(&g)]);

        assert_eq!(
            check_proposition_stability(&FiniteGSystem::trivial(&g, 2), &g).unwrap_err(),
            SubgroupError::NotMinimal { orbits: 2 }
        );
    }

    #[test]
    fn coset_space_of_order_two_subgroup() {
        let g = s3();
        let h = enumerate_subgroups(&g).unwrap()[1].clone();
        let (sys, cosets) = FiniteGSystem::coset_space(&g, &h);
        assert_eq!(sys.points(), 3);
        assert_eq!(cosets.len(), 3);
        assert!(FiniteGSystem::new(&g, sys.action.clone()).is_ok());
    }
}
