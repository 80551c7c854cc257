use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use super::{Group, GroupError};
use crate::subgroup_space::FiniteGroup;

/// A permutation as an image array; products act on the right:
/// `(g h)[p] = h[g[p]]`.
pub type Perm = Vec<u32>;

pub(crate) fn compose(g: &[u32], h: &[u32]) -> Perm {
    g.iter().map(|&p| h[p as usize]).collect()
}

pub(crate) fn invert(g: &[u32]) -> Perm {
    let mut out = vec![0u32; g.len()];
    for (i, &p) in g.iter().enumerate() {
        out[p as usize] = i as u32;
    }
    out
}

struct SymmetricGens<E> {
    gens: Vec<E>,
    inverse: Vec<usize>,
    names: Vec<String>,
}

/// Closes a user generator list under inverses. User generator `i` is named
/// by the `i`-th lowercase letter, an appended inverse by its uppercase.
fn symmetrize<E: Clone + Eq>(
    user: &[E],
    identity: &E,
    inv: impl Fn(&E) -> E,
) -> Result<SymmetricGens<E>, GroupError> {
    let mut gens: Vec<E> = Vec::new();
    let mut names = Vec::new();
    let mut letter = 0u8;
    for g in user {
        if g == identity {
            return Err(GroupError::InvalidGroup(
                "the identity cannot be a generator".into(),
            ));
        }
        if gens.contains(g) {
            continue;
        }
        if letter >= 26 {
            return Err(GroupError::InvalidGroup("at most 26 generators".into()));
        }
        let c = (b'a' + letter) as char;
        letter += 1;
        gens.push(g.clone());
        names.push(c.to_string());
        let gi = inv(g);
        if !gens.contains(&gi) {
            gens.push(gi);
            names.push(c.to_ascii_uppercase().to_string());
        }
    }
    if gens.is_empty() {
        return Err(GroupError::InvalidGroup("no generators".into()));
    }
    let inverse = gens
        .iter()
        .map(|g| {
            let gi = inv(g);
            gens.iter().position(|h| *h == gi).expect("symmetric by construction")
        })
        .collect();
    Ok(SymmetricGens {
        gens,
        inverse,
        names,
    })
}

/// Shortest, then lexicographically least, generator words for every
/// element of a finite group.
fn bfs_words<G: Group>(group: &G, limit: usize) -> Result<HashMap<G::Elem, Vec<usize>>, GroupError>
where
    G::Elem: Hash,
{
    let mut words = HashMap::new();
    let mut queue = VecDeque::new();
    words.insert(group.identity(), Vec::new());
    queue.push_back(group.identity());
    while let Some(g) = queue.pop_front() {
        let w = words[&g].clone();
        for (s, gen) in group.generators().iter().enumerate() {
            let h = group.mul(&g, gen);
            if !words.contains_key(&h) {
                if words.len() >= limit {
                    return Err(GroupError::InvalidGroup(format!(
                        "group has more than {limit} elements"
                    )));
                }
                let mut hw = w.clone();
                hw.push(s);
                words.insert(h.clone(), hw);
                queue.push_back(h);
            }
        }
    }
    Ok(words)
}

/// Checks `P(g s) = P(g) then P(s)` for every element `g` and generator `s`,
/// where `P(g)` is read off `g`'s word. This makes `P` a homomorphism.
fn check_finite_action<G: Group>(
    group: &G,
    words: &HashMap<G::Elem, Vec<usize>>,
    perms: &[Vec<usize>],
) -> Result<(), GroupError> {
    let points = perms.first().map_or(0, |p| p.len());
    let perm_of = |w: &[usize]| {
        let mut p: Vec<usize> = (0..points).collect();
        for &s in w {
            for x in p.iter_mut() {
                *x = perms[s][*x];
            }
        }
        p
    };
    let table: HashMap<&G::Elem, Vec<usize>> = words.iter().map(|(g, w)| (g, perm_of(w))).collect();
    for (g, pg) in &table {
        for (s, gen) in group.generators().iter().enumerate() {
            let gs = group.mul(g, gen);
            let expected: Vec<usize> = pg.iter().map(|&x| perms[s][x]).collect();
            if table[&gs] != expected {
                return Err(GroupError::InvalidAction(format!(
                    "generator permutations violate a relation of the group (at {} * {})",
                    group.format(g),
                    group.generator_names()[s]
                )));
            }
        }
    }
    Ok(())
}

const FINITE_WORD_LIMIT: usize = 1 << 20;

/// A permutation group given by generating permutations.
pub struct PermGroup {
    degree: usize,
    gens: SymmetricGens<Perm>,
    words: OnceLock<HashMap<Perm, Vec<usize>>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: &[Perm]) -> Result<Self, GroupError> {
        for g in generators {
            let mut seen = vec![false; degree];
            let ok = g.len() == degree
                && g.iter().all(|&p| {
                    (p as usize) < degree && !std::mem::replace(&mut seen[p as usize], true)
                });
            if !ok {
                return Err(GroupError::InvalidGroup(format!(
                    "{g:?} is not a permutation of {degree} points"
                )));
            }
        }
        let identity: Perm = (0..degree as u32).collect();
        let gens = symmetrize(generators, &identity, |g| invert(g))?;
        Ok(PermGroup {
            degree,
            gens,
            words: OnceLock::new(),
        })
    }

    pub fn permutation_degree(&self) -> usize {
        self.degree
    }

    /// The user-supplied generators (one per letter).
    pub fn user_generators(&self) -> Vec<Perm> {
        self.gens
            .gens
            .iter()
            .zip(&self.gens.names)
            .filter(|(_, n)| n.chars().all(|c| c.is_ascii_lowercase()))
            .map(|(g, _)| g.clone())
            .collect()
    }

    fn words(&self) -> &HashMap<Perm, Vec<usize>> {
        self.words
            .get_or_init(|| bfs_words(self, FINITE_WORD_LIMIT).expect("permutation group too large"))
    }

    /// The natural right action `p · g = g[p]` on `0..degree`.
    pub fn natural_action(&self) -> super::FiniteAction {
        super::FiniteAction::new(
            self.degree,
            self.gens
                .gens
                .iter()
                .map(|g| g.iter().map(|&p| p as usize).collect())
                .collect(),
        )
    }

    /// The table representation of the generated group.
    pub fn to_finite_group(&self) -> Result<FiniteGroup, GroupError> {
        FiniteGroup::from_permutations(self.degree, &self.user_generators())
            .map_err(|e| GroupError::InvalidGroup(e.to_string()))
    }
}

impl Group for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        (0..self.degree as u32).collect()
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        compose(a, b)
    }

    fn inv(&self, a: &Perm) -> Perm {
        invert(a)
    }

    fn generators(&self) -> &[Perm] {
        &self.gens.gens
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.gens.inverse[s]
    }

    fn generator_names(&self) -> &[String] {
        &self.gens.names
    }

    fn sort_key(&self, e: &Perm) -> Vec<i64> {
        e.iter().map(|&p| p as i64).collect()
    }

    fn word(&self, e: &Perm) -> Vec<usize> {
        self.words()
            .get(e)
            .cloned()
            .expect("element does not belong to the group")
    }

    fn elements(&self) -> Option<Vec<Perm>> {
        let mut all: Vec<Perm> = self.words().keys().cloned().collect();
        all.sort();
        Some(all)
    }

    fn check_action(&self, perms: &[Vec<usize>]) -> Result<(), GroupError> {
        check_finite_action(self, self.words(), perms)
    }
}

/// A finite group given by its multiplication table and generating elements.
pub struct TableGroup {
    table: Arc<FiniteGroup>,
    gens: SymmetricGens<usize>,
    words: OnceLock<HashMap<usize, Vec<usize>>>,
}

impl TableGroup {
    pub fn new(table: Arc<FiniteGroup>, generators: &[usize]) -> Result<Self, GroupError> {
        if let Some(&g) = generators.iter().find(|&&g| g >= table.order()) {
            return Err(GroupError::InvalidGroup(format!(
                "generator {g} is not an element of a group of order {}",
                table.order()
            )));
        }
        let gens = symmetrize(generators, &table.identity(), |&g| table.inv(g))?;
        let out = TableGroup {
            table,
            gens,
            words: OnceLock::new(),
        };
        let reached = bfs_words(&out, usize::MAX)?.len();
        if reached != out.table.order() {
            return Err(GroupError::InvalidGroup(format!(
                "generators span {reached} of {} elements",
                out.table.order()
            )));
        }
        Ok(out)
    }

    pub fn table(&self) -> &Arc<FiniteGroup> {
        &self.table
    }

    fn words(&self) -> &HashMap<usize, Vec<usize>> {
        self.words
            .get_or_init(|| bfs_words(self, usize::MAX).expect("finite table"))
    }
}

impl Group for TableGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.table.identity()
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.table.mul(*a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        self.table.inv(*a)
    }

    fn generators(&self) -> &[usize] {
        &self.gens.gens
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.gens.inverse[s]
    }

    fn generator_names(&self) -> &[String] {
        &self.gens.names
    }

    fn sort_key(&self, e: &usize) -> Vec<i64> {
        vec![*e as i64]
    }

    fn word(&self, e: &usize) -> Vec<usize> {
        self.words()[e].clone()
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.table.order()).collect())
    }

    fn check_action(&self, perms: &[Vec<usize>]) -> Result<(), GroupError> {
        check_finite_action(self, self.words(), perms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> PermGroup {
        PermGroup::new(3, &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    #[test]
    fn involutions_are_not_doubled() {
        let g = s3();
        assert_eq!(g.generator_names(), &["a", "b", "B"]);
        assert_eq!(g.inverse_generator(0), 0);
        assert_eq!(g.inverse_generator(1), 2);
        assert_eq!(g.elements().unwrap().len(), 6);
    }

    #[test]
    fn words_evaluate_back() {
        let g = s3();
        for e in g.elements().unwrap() {
            assert_eq!(g.from_word(&g.word(&e)), e);
        }
    }

    #[test]
    fn rejects_identity_and_non_permutations() {
        assert!(PermGroup::new(3, &[vec![0, 1, 2]]).is_err());
        assert!(PermGroup::new(3, &[vec![0, 0, 2]]).is_err());
        assert!(PermGroup::new(3, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn finite_action_relations_checked() {
        let g = s3();
        assert!(g.check_action(&g.natural_action().perms().to_vec()).is_ok());
        // a 3-cycle for `a` breaks a^2 = 1
        let bad = vec![vec![1, 2, 0], vec![1, 2, 0], vec![2, 0, 1]];
        assert!(g.check_action(&bad).is_err());
    }

    #[test]
    fn table_group_must_be_generated() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        assert!(TableGroup::new(z4.clone(), &[2]).is_err());
        let g = TableGroup::new(z4, &[1]).unwrap();
        assert_eq!(g.generator_names(), &["a", "A"]);
        assert_eq!(g.word(&2), vec![0, 0]);
    }
}
