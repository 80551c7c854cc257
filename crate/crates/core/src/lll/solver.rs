use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ConstraintSystem;

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcome {
    Solved { assignment: Vec<u32>, rounds: u64 },
    Failed { violated: usize, rounds: u64 },
}

impl SolveOutcome {
    pub fn assignment(&self) -> Option<&[u32]> {
        match self {
            SolveOutcome::Solved { assignment, .. } => Some(assignment),
            SolveOutcome::Failed { .. } => None,
        }
    }

    pub fn rounds(&self) -> u64 {
        match self {
            SolveOutcome::Solved { rounds, .. } | SolveOutcome::Failed { rounds, .. } => *rounds,
        }
    }
}

/// Moser–Tardos resampling.
///
/// Draws a uniform assignment from a ChaCha stream seeded by `seed`, then
/// repeatedly redraws the support of the smallest-id occurring event. Every
/// predicate is re-evaluated before a solution is returned.
pub fn resample_solve(system: &ConstraintSystem, seed: u64, max_rounds: u64) -> SolveOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domains = system.domains();
    let mut assignment: Vec<u32> = domains.iter().map(|&d| rng.gen_range(0..d)).collect();
    let mut violated: BTreeSet<usize> = system.violated(&assignment).into_iter().collect();
    let mut rounds = 0u64;
    let mut touched = Vec::new();

    loop {
        let Some(&event) = violated.iter().next() else {
            let remaining = system.violated(&assignment);
            if remaining.is_empty() {
                return SolveOutcome::Solved { assignment, rounds };
            }
            violated.extend(remaining);
            continue;
        };
        if rounds >= max_rounds {
            return SolveOutcome::Failed {
                violated: violated.len(),
                rounds,
            };
        }
        rounds += 1;

        touched.clear();
        for &v in &system.events()[event].support {
            assignment[v] = rng.gen_range(0..domains[v]);
            touched.extend_from_slice(system.events_on(v));
        }
        touched.sort_unstable();
        touched.dedup();
        for &e in &touched {
            if system.occurs(e, &assignment) {
                violated.insert(e);
            } else {
                violated.remove(&e);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::{BadEvent, EventKind};

    fn all_zero_event() -> BadEvent {
        let mut table = vec![false; 8];
        table[0] = true;
        BadEvent {
            id: 0,
            class: 1,
            support: vec![0, 1, 2],
            kind: EventKind::CustomTable(table),
        }
    }

    #[test]
    fn no_events_returns_initial_draw() {
        let sys = ConstraintSystem::new(vec![3; 6], vec![]).unwrap();
        let out = resample_solve(&sys, 7, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let expected: Vec<u32> = (0..6).map(|_| rng.gen_range(0..3)).collect();
        assert_eq!(
            out,
            SolveOutcome::Solved {
                assignment: expected,
                rounds: 0
            }
        );
    }

    #[test]
    fn avoids_all_zero_triple() {
        let sys = ConstraintSystem::new(vec![2; 3], vec![all_zero_event()]).unwrap();
        for seed in 0..64 {
            let out = resample_solve(&sys, seed, DEFAULT_MAX_ROUNDS);
            let a = out.assignment().expect("solvable");
            assert!(a.iter().any(|&x| x == 1));
        }
    }

    #[test]
    fn unsatisfiable_reports_failure() {
        let ev = BadEvent {
            id: 0,
            class: 1,
            support: vec![0],
            kind: EventKind::CustomTable(vec![true, true]),
        };
        let sys = ConstraintSystem::new(vec![2], vec![ev]).unwrap();
        assert_eq!(
            resample_solve(&sys, 1, 25),
            SolveOutcome::Failed {
                violated: 1,
                rounds: 25
            }
        );
    }

    #[test]
    fn deterministic_per_seed() {
        let sys = ConstraintSystem::new(vec![2; 3], vec![all_zero_event()]).unwrap();
        for seed in 0..16 {
            assert_eq!(resample_solve(&sys, seed, 100), resample_solve(&sys, seed, 100));
        }
    }
}
