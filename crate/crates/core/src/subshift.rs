//! Binary configurations on group patches avoiding every block equality
//! `ω|gT_k = ω|g s_k T_k`: block families, constraint compilation, the
//! matching certificate, patch solving and Pestov's 2-coloring check.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{ball_with_cap, Configuration, Group, GroupError, GroupPatch, DEFAULT_BALL_CAP};
use crate::lll::{
    check_certificate, resample_solve, BadEvent, ConstraintSystem, EventKind, LllCertificate,
    LllError, SolveOutcome,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubshiftError {
    #[error("patch exhausted while building block {block}: {achieved} of {needed} elements")]
    PatchExhausted {
        block: usize,
        achieved: usize,
        needed: usize,
    },
    #[error("invalid block family: {0}")]
    InvalidBlocks(String),
    #[error("A ∩ g⁻¹A is empty")]
    EmptyIntersection,
    #[error("solver gave up after {rounds} rounds with {violated} violated constraints")]
    SolverFailed { violated: usize, rounds: u64 },
    #[error("configuration violates the constraint of block {block} at patch element {element}")]
    Violated { block: usize, element: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lll(#[from] LllError),
}

/// `16 C x / (1 - x)` with `x = 2^{-C/2}`; the constant works when this is
/// at most 1.
pub fn block_condition(constant: usize) -> f64 {
    let x = 2f64.powf(-(constant as f64) / 2.0);
    16.0 * constant as f64 * x / (1.0 - x)
}

/// Least `C >= 2` with `block_condition(C) <= 1` and `2^{-C/2} <= 1/2`
/// (the range where `2^{-2x} <= 1 - x`).
pub fn min_block_constant() -> usize {
    (2..=64)
        .find(|&c| block_condition(c) <= 1.0 && 2f64.powf(-(c as f64) / 2.0) <= 0.5)
        .expect("the condition holds well before 64")
}

/// `p_k = 2^{-Ck}`, `a_k = 2^{-Ck/2}`, `Δ_kl = 4 C^2 l k` for classes `1..=n`.
pub fn build_subshift_certificate(constant: usize, n: usize) -> Result<LllCertificate, SubshiftError> {
    if constant < 2 || n < 1 {
        return Err(SubshiftError::InvalidBlocks(format!(
            "need C >= 2 and n >= 1; got C={constant}, n={n}"
        )));
    }
    let c = constant as f64;
    let ln2 = std::f64::consts::LN_2;
    Ok(LllCertificate::from_fn(
        n,
        |k| -c * k as f64 * ln2,
        |k| -c * k as f64 / 2.0 * ln2,
        |k, l| (4.0 * c * c * l as f64 * k as f64).ln(),
    )?)
}

/// Blocks `T_1..T_N` with `|T_n| = C n` and `s_n T_n ∩ T_n = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockFamily<E> {
    constant: usize,
    blocks: Vec<Vec<E>>,
    separators: Vec<E>,
}

impl<E: Clone + Eq + std::hash::Hash> BlockFamily<E> {
    pub fn new<G: Group<Elem = E>>(
        group: &G,
        constant: usize,
        blocks: Vec<Vec<E>>,
        separators: Vec<E>,
    ) -> Result<Self, SubshiftError> {
        let bad = |m: String| Err(SubshiftError::InvalidBlocks(m));
        if blocks.len() != separators.len() {
            return bad(format!("{} blocks but {} separators", blocks.len(), separators.len()));
        }
        for (i, (block, s)) in blocks.iter().zip(&separators).enumerate() {
            let n = i + 1;
            let set: HashSet<&E> = block.iter().collect();
            if block.len() != constant * n || set.len() != block.len() {
                return bad(format!("block {n} needs {} distinct elements", constant * n));
            }
            if *s == group.identity() {
                return bad(format!("separator {n} is the identity"));
            }
            if block.iter().any(|t| set.contains(&group.mul(s, t))) {
                return bad(format!("s_{n} T_{n} meets T_{n}"));
            }
        }
        Ok(BlockFamily {
            constant,
            blocks,
            separators,
        })
    }

    pub fn constant(&self) -> usize {
        self.constant
    }

    pub fn blocks(&self) -> &[Vec<E>] {
        &self.blocks
    }

    pub fn separators(&self) -> &[E] {
        &self.separators
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The sub-family `T_1..T_n`.
    pub fn truncated(&self, n: usize) -> Self {
        BlockFamily {
            constant: self.constant,
            blocks: self.blocks[..n.min(self.len())].to_vec(),
            separators: self.separators[..n.min(self.len())].to_vec(),
        }
    }
}

/// Greedy blocks from `patch`: separators are the first `n` non-identity
/// elements; `T_k` takes patch elements in order whenever `t ∉ s_k T_k` and
/// `s_k t ∉ T_k`.
pub fn choose_blocks<G: Group>(
    group: &G,
    patch: &GroupPatch<G>,
    constant: usize,
    n: usize,
) -> Result<BlockFamily<G::Elem>, SubshiftError> {
    let e = group.identity();
    let separators: Vec<G::Elem> = patch.elements().iter().filter(|g| **g != e).take(n).cloned().collect();
    if separators.len() < n {
        return Err(SubshiftError::PatchExhausted {
            block: separators.len() + 1,
            achieved: 0,
            needed: constant * (separators.len() + 1),
        });
    }
    let mut blocks = Vec::with_capacity(n);
    for (i, s) in separators.iter().enumerate() {
        let needed = constant * (i + 1);
        let mut block = Vec::with_capacity(needed);
        let mut members = HashSet::new();
        let mut shifted = HashSet::new();
        for t in patch.elements() {
            if block.len() == needed {
                break;
            }
            let st = group.mul(s, t);
            if !shifted.contains(t) && !members.contains(&st) {
                members.insert(t.clone());
                shifted.insert(st);
                block.push(t.clone());
            }
        }
        if block.len() < needed {
            return Err(SubshiftError::PatchExhausted {
                block: i + 1,
                achieved: block.len(),
                needed,
            });
        }
        blocks.push(block);
    }
    BlockFamily::new(group, constant, blocks, separators)
}

/// [`choose_blocks`] on the smallest ball that can host the family. Balls
/// are nested prefixes, so the result agrees with any larger host.
pub fn choose_blocks_auto<G: Group>(
    group: &G,
    constant: usize,
    n: usize,
) -> Result<(BlockFamily<G::Elem>, usize), SubshiftError> {
    let mut previous = 0;
    for radius in 0.. {
        let patch = ball_with_cap(group, radius, DEFAULT_BALL_CAP)?;
        match choose_blocks(group, &patch, constant, n) {
            Ok(blocks) => return Ok((blocks, radius)),
            Err(err @ SubshiftError::PatchExhausted { .. }) if patch.len() == previous => {
                return Err(err)
            }
            Err(SubshiftError::PatchExhausted { .. }) => previous = patch.len(),
            Err(other) => return Err(other),
        }
    }
    unreachable!()
}

/// The event that `ω` agrees on `g T_k` and `g s_k T_k` under `t ↦ s_k t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubshiftConstraint {
    /// Block index `k`, 1-based.
    pub block: usize,
    /// Patch index of `g`.
    pub element: usize,
    /// Patch indices of `g t`, `t ∈ T_k` in block order.
    pub left: Vec<usize>,
    /// Patch indices of `g s_k t`, matched with `left`.
    pub right: Vec<usize>,
}

impl SubshiftConstraint {
    pub fn is_violated(&self, values: &[Option<u32>]) -> bool {
        self.left
            .iter()
            .zip(&self.right)
            .all(|(&l, &r)| values[l].is_some() && values[l] == values[r])
    }
}

/// One constraint per `(k, g)` with both windows inside `patch`, ordered by
/// block then by the patch position of `g`.
pub fn build_constraints<G: Group>(
    group: &G,
    blocks: &BlockFamily<G::Elem>,
    patch: &GroupPatch<G>,
) -> Vec<SubshiftConstraint> {
    let pairs: Vec<(usize, usize)> = (0..blocks.len())
        .flat_map(|k| (0..patch.len()).map(move |g| (k, g)))
        .collect();
    pairs
        .into_par_iter()
        .filter_map(|(k, gi)| {
            let g = patch.element(gi);
            let gs = group.mul(g, &blocks.separators[k]);
            let window = |base: &G::Elem| -> Option<Vec<usize>> {
                blocks.blocks[k]
                    .iter()
                    .map(|t| patch.index_of(&group.mul(base, t)))
                    .collect()
            };
            Some(SubshiftConstraint {
                block: k + 1,
                element: gi,
                left: window(g)?,
                right: window(&gs)?,
            })
        })
        .collect()
}

/// Binary variables on the patch, one block-equality event per constraint.
pub fn compile_constraints(
    patch_len: usize,
    constraints: &[SubshiftConstraint],
) -> Result<ConstraintSystem, SubshiftError> {
    let events = constraints
        .iter()
        .enumerate()
        .map(|(id, c)| BadEvent {
            id,
            class: c.block,
            support: [c.left.as_slice(), c.right.as_slice()].concat(),
            kind: EventKind::BlockEquality,
        })
        .collect();
    Ok(ConstraintSystem::new(vec![2; patch_len], events)?)
}

#[derive(Clone, Debug)]
pub struct SubshiftSolution<G: Group> {
    pub configuration: Configuration<G>,
    pub constraints: usize,
    pub rounds: u64,
    /// Whether the certificate for `(C, N)` holds.
    pub certified: bool,
}

/// Solves every constraint on `patch` at once; smaller families are
/// sub-families, so the result avoids them too. Verified before return.
pub fn solve_patch<G: Group>(
    group: &G,
    patch: Arc<GroupPatch<G>>,
    blocks: &BlockFamily<G::Elem>,
    seed: u64,
    max_rounds: u64,
) -> Result<SubshiftSolution<G>, SubshiftError> {
    let constraints = build_constraints(group, blocks, &patch);
    let system = compile_constraints(patch.len(), &constraints)?;
    let (assignment, rounds) = match resample_solve(&system, seed, max_rounds) {
        SolveOutcome::Solved { assignment, rounds } => (assignment, rounds),
        SolveOutcome::Failed { violated, rounds } => {
            return Err(SubshiftError::SolverFailed { violated, rounds })
        }
    };
    let configuration = Configuration::new(patch, 2, assignment)?;
    if let FreenessCheck::Witness { block, element } =
        verify_free_patch(group, &configuration, blocks)
    {
        return Err(SubshiftError::Violated { block, element });
    }
    let certified = !blocks.is_empty()
        && check_certificate(&build_subshift_certificate(blocks.constant(), blocks.len())?).holds();
    Ok(SubshiftSolution {
        configuration,
        constraints: constraints.len(),
        rounds,
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum FreenessCheck {
    Pass,
    /// Block `k` and the patch index of `g`.
    Witness { block: usize, element: usize },
}

impl FreenessCheck {
    pub fn passed(&self) -> bool {
        matches!(self, FreenessCheck::Pass)
    }
}

/// Pass iff every in-patch constraint has some `t ∈ T_k` with
/// `ω(g t) != ω(g s_k t)`; otherwise the first violated `(k, g)`.
pub fn verify_free_patch<G: Group>(
    group: &G,
    omega: &Configuration<G>,
    blocks: &BlockFamily<G::Elem>,
) -> FreenessCheck {
    build_constraints(group, blocks, omega.patch())
        .into_iter()
        .find(|c| c.is_violated(omega.values()))
        .map_or(FreenessCheck::Pass, |c| FreenessCheck::Witness {
            block: c.block,
            element: c.element,
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PestovReport<E> {
    /// First tested `h` with `ω(h a) = ω(h g a)` for every `a ∈ A ∩ g⁻¹A`.
    pub failing: Option<E>,
    pub tested: usize,
    /// Elements of the ball whose translates leave the configuration's window.
    pub untested: Vec<E>,
}

impl<E> PestovReport<E> {
    pub fn passed(&self) -> bool {
        self.failing.is_none()
    }
}

/// Checks `∃ a ∈ A ∩ g⁻¹A : ω(h a) != ω(h g a)` for each `h` in `h_ball`
/// whose translates all lie where `ω` is defined.
pub fn verify_pestov<G: Group>(
    group: &G,
    omega: &Configuration<G>,
    g: &G::Elem,
    a_set: &[G::Elem],
    h_ball: &GroupPatch<G>,
) -> Result<PestovReport<G::Elem>, SubshiftError> {
    let members: HashSet<&G::Elem> = a_set.iter().collect();
    let common: Vec<&G::Elem> = a_set
        .iter()
        .filter(|a| members.contains(&group.mul(g, a)))
        .collect();
    if common.is_empty() {
        return Err(SubshiftError::EmptyIntersection);
    }
    let mut report = PestovReport {
        failing: None,
        tested: 0,
        untested: Vec::new(),
    };
    for h in h_ball.elements() {
        let hg = group.mul(h, g);
        let pairs: Option<Vec<(u32, u32)>> = common
            .iter()
            .map(|a| Some((omega.get(&group.mul(h, a))?, omega.get(&group.mul(&hg, a))?)))
            .collect();
        match pairs {
            None => report.untested.push(h.clone()),
            Some(pairs) => {
                report.tested += 1;
                if report.failing.is_none() && pairs.iter().all(|(x, y)| x == y) {
                    report.failing = Some(h.clone());
                }
            }
        }
    }
    Ok(report)
}

/// `A = T_k ∪ s_k T_k`, the witness set used with `g = s_k`.
pub fn block_witness_set<G: Group>(group: &G, blocks: &BlockFamily<G::Elem>, k: usize) -> Vec<G::Elem> {
    let s = &blocks.separators()[k - 1];
    let block = &blocks.blocks()[k - 1];
    block
        .iter()
        .cloned()
        .chain(block.iter().map(|t| group.mul(s, t)))
        .collect()
}

/// Words naming the blocks and separators, for artifacts.
pub fn block_words<G: Group>(group: &G, blocks: &BlockFamily<G::Elem>) -> (Vec<Vec<String>>, Vec<String>) {
    (
        blocks
            .blocks()
            .iter()
            .map(|b| b.iter().map(|t| group.format(t)).collect())
            .collect(),
        blocks.separators().iter().map(|s| group.format(s)).collect(),
    )
}

/// Inverse of [`block_words`], revalidating the family.
pub fn blocks_from_words<G: Group>(
    group: &G,
    constant: usize,
    blocks: &[Vec<String>],
    separators: &[String],
) -> Result<BlockFamily<G::Elem>, SubshiftError> {
    let parse = |w: &String| group.parse_word(w);
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(parse).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let separators = separators.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
    BlockFamily::new(group, constant, blocks, separators)
}
