//! Finitely generated groups through finite windows: word-metric balls,
//! the shift action on configurations, and Cayley/Schreier graphs.

mod abelian;
mod finite;
mod free;
mod patch;
mod schreier_graph;
mod spec;

use std::fmt::Debug;
use std::hash::Hash;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub use abelian::FreeAbelian;
pub use finite::{Perm, PermGroup, TableGroup};
pub use free::{FreeGroup, FreeWord};
pub use patch::{ball, ball_with_cap, shift, Configuration, GroupPatch, DEFAULT_BALL_CAP};
pub use schreier_graph::{schreier_graph, FiniteAction, SchreierGraph};
pub use spec::{named_permutation_group, FamilySpec, FamilyVisitor};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("ball of radius {radius} exceeds {cap} elements")]
    BallTooLarge { radius: usize, cap: usize },
    #[error("shifted configuration has an empty valid window")]
    EmptyWindow,
    #[error("action is not transitive: point {unreached} is unreachable from {basepoint}")]
    NotTransitive { basepoint: usize, unreached: usize },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("cannot parse '{text}': {reason}")]
    Parse { text: String, reason: String },
}

/// A finitely generated group with a symmetric generating list.
///
/// Generators are indexed `0..d`; `inverse_generator(s)` is the index of
/// `s^-1` (equal to `s` for involutions). Elements are canonical forms, so
/// `==` decides equality in the group.
pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync + Serialize + DeserializeOwned;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn generators(&self) -> &[Self::Elem];
    fn inverse_generator(&self, s: usize) -> usize;
    /// Single-character names, one per generator.
    fn generator_names(&self) -> &[String];

    /// Lexicographic key of the canonical form; orders elements within a
    /// BFS layer.
    fn sort_key(&self, e: &Self::Elem) -> Vec<i64>;

    /// A word over generator indices whose product is `e`.
    fn word(&self, e: &Self::Elem) -> Vec<usize>;

    /// All elements, for finite groups.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// Checks that per-generator permutations satisfy the group's relations.
    fn check_action(&self, _perms: &[Vec<usize>]) -> Result<(), GroupError> {
        Ok(())
    }

    fn degree(&self) -> usize {
        self.generators().len()
    }

    fn from_word(&self, word: &[usize]) -> Self::Elem {
        let gens = self.generators();
        word.iter()
            .fold(self.identity(), |acc, &s| self.mul(&acc, &gens[s]))
    }

    /// Parses a word of generator names; `1` denotes the identity.
    fn parse_word(&self, text: &str) -> Result<Self::Elem, GroupError> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(self.identity());
        }
        let names = self.generator_names();
        let word = text
            .chars()
            .map(|c| {
                names
                    .iter()
                    .position(|n| n.chars().eq(std::iter::once(c)))
                    .ok_or_else(|| GroupError::Parse {
                        text: text.to_string(),
                        reason: format!("unknown generator '{c}'"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.from_word(&word))
    }

    /// Formats `e` as a word of generator names (`1` for the identity).
    fn format(&self, e: &Self::Elem) -> String {
        let names = self.generator_names();
        let w = self.word(e);
        if w.is_empty() {
            "1".to_string()
        } else {
            w.iter().map(|&s| names[s].as_str()).collect()
        }
    }
}

/// Letter names `a, A, b, B, ...` for families with paired generators.
fn paired_names(rank: usize) -> Vec<String> {
    (0..rank)
        .flat_map(|i| {
            let c = (b'a' + i as u8) as char;
            [c.to_string(), c.to_ascii_uppercase().to_string()]
        })
        .collect()
}
