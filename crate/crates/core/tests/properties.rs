use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use locallemma::graph::{ColoredGraph, Graph};
use locallemma::groups::{
    ball, schreier_graph, shift, Configuration, FiniteAction, FreeAbelian, FreeGroup, Group,
};
use locallemma::lll::{
    check_certificate, event_probability, resample_solve, BadEvent, ConstraintSystem, EventKind,
    DEFAULT_ENUMERATION_CAP,
};
use locallemma::schreier::{
    finite_index_realization, root_stabilizer_on_patch, stabilizer_on_patch, ColoredSchreierPoint,
};
use locallemma::subgroup_space::{
    conjugation_orbits, enumerate_subgroups, exhaustive_subgroups, FiniteGroup,
};
use locallemma::subshift::{
    build_subshift_certificate, choose_blocks_auto, solve_patch, verify_free_patch,
};
use locallemma::thue::{build_certificate, verify_nonrepetitive};

const GROUPS: [&str; 12] = ["trivial", "z2", "z3", "z4", "v4", "s3", "z6", "d4", "q8", "a4", "d6", "s4"];

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..2 * n).prop_map(move |pairs| {
            let mut edges: Vec<(usize, usize)> = pairs
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            edges.sort();
            edges.dedup();
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

/// Domains plus equality events over distinct variable pairs.
fn system_strategy() -> impl Strategy<Value = ConstraintSystem> {
    (3usize..10).prop_flat_map(|n| {
        (
            proptest::collection::vec(2u32..5, n),
            proptest::collection::vec((0..n, 0..n), 1..n),
        )
            .prop_map(|(domains, pairs)| {
                let events = pairs
                    .into_iter()
                    .filter(|(u, v)| u != v)
                    .enumerate()
                    .map(|(id, (u, v))| BadEvent {
                        id,
                        class: 1,
                        support: vec![u, v],
                        kind: EventKind::BlockEquality,
                    })
                    .collect();
                ConstraintSystem::new(domains, events).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_alphabets_keep_certificates(d in 1usize..4, c in 2u64..3000, extra in 0u64..5000, r in 1usize..30) {
        if check_certificate(&build_certificate(d, c, r).unwrap()).holds() {
            prop_assert!(check_certificate(&build_certificate(d, c + extra, r).unwrap()).holds());
        }
    }

    #[test]
    fn larger_block_constants_keep_certificates(c in 2usize..40, extra in 0usize..40, n in 1usize..50) {
        if check_certificate(&build_subshift_certificate(c, n).unwrap()).holds() {
            prop_assert!(check_certificate(&build_subshift_certificate(c + extra, n).unwrap()).holds());
        }
    }

    #[test]
    fn solver_is_valid_and_deterministic(system in system_strategy(), seed in any::<u64>()) {
        let first = resample_solve(&system, seed, 10_000);
        prop_assert_eq!(&first, &resample_solve(&system, seed, 10_000));
        if let Some(assignment) = first.assignment() {
            prop_assert!(system.violated(assignment).is_empty());
            prop_assert!(assignment.iter().zip(system.domains()).all(|(v, d)| v < d));
        }
    }

    #[test]
    fn probability_matches_count(
        domains in proptest::collection::vec(2u32..5, 2..7),
        table_bits in any::<u64>(),
        use_table in any::<bool>(),
    ) {
        let n = domains.len() - domains.len() % 2;
        let support: Vec<usize> = (0..n).collect();
        let total: u64 = domains[..n].iter().map(|&d| d as u64).product();
        let kind = if use_table {
            EventKind::CustomTable((0..total).map(|k| table_bits >> (k % 64) & 1 == 1).collect())
        } else {
            EventKind::PathRepetition
        };
        let event = BadEvent { id: 0, class: n / 2, support, kind: kind.clone() };
        let system = ConstraintSystem::new(domains.clone(), vec![event.clone()]).unwrap();
        let p = event_probability(&event, &system, DEFAULT_ENUMERATION_CAP).unwrap();
        let hits = (0..total)
            .filter(|&code| {
                let mut rest = code;
                let values: Vec<u32> = domains[..n]
                    .iter()
                    .map(|&d| {
                        let v = (rest % d as u64) as u32;
                        rest /= d as u64;
                        v
                    })
                    .collect();
                match &kind {
                    EventKind::CustomTable(t) => t[code as usize],
                    _ => (0..n / 2).all(|i| values[i] == values[n / 2 + i]),
                }
            })
            .count();
        prop_assert_eq!(p, BigRational::new(BigInt::from(hits), BigInt::from(total)));
    }

    #[test]
    fn nonrepetitive_survives_restriction(graph in graph_strategy(7), seed in any::<u64>(), keep_bits in any::<u8>()) {
        let n = graph.len();
        let colors: Vec<u32> = (0..n).map(|v| ((seed >> (2 * v)) % 4) as u32 + 1).collect();
        let colored = ColoredGraph::new(graph, 4, colors).unwrap();
        if verify_nonrepetitive(&colored, n).passed() {
            let keep: Vec<usize> = (0..n).filter(|v| keep_bits >> v & 1 == 1).collect();
            if !keep.is_empty() {
                prop_assert!(verify_nonrepetitive(&colored.induced(&keep), n).passed());
            }
        }
    }

    #[test]
    fn balls_are_nested(radius in 0usize..4) {
        let f2 = FreeGroup::new(2).unwrap();
        let (small, big) = (ball(&f2, radius).unwrap(), ball(&f2, radius + 1).unwrap());
        prop_assert_eq!(small.elements(), &big.elements()[..small.len()]);
        let z = FreeAbelian::new(2).unwrap();
        let (small, big) = (ball(&z, radius).unwrap(), ball(&z, radius + 1).unwrap());
        prop_assert_eq!(small.elements(), &big.elements()[..small.len()]);
    }

    #[test]
    fn shifts_compose(values in proptest::collection::vec(0u32..3, 53), g in 0usize..17, h in 0usize..17) {
        let f2 = FreeGroup::new(2).unwrap();
        let patch = Arc::new(ball(&f2, 3).unwrap());
        let omega = Configuration::new(patch.clone(), 3, values).unwrap();
        let (g, h) = (patch.element(g).clone(), patch.element(h).clone());
        if let (Ok(inner), Ok(direct)) = (shift(&f2, &h, &omega), shift(&f2, &f2.mul(&g, &h), &omega)) {
            if let Ok(outer) = shift(&f2, &g, &inner) {
                for ((a, b), x) in outer.values().iter().zip(direct.values()).zip(patch.elements()) {
                    if let Some(a) = a {
                        prop_assert_eq!(Some(*a), *b, "cell {:?}", x);
                    }
                }
            }
        }
    }

    #[test]
    fn stabilizer_contains_root_stabilizer(
        n in 1usize..6,
        seeds in (any::<u64>(), any::<u64>(), any::<u64>()),
    ) {
        let f2 = FreeGroup::new(2).unwrap();
        let shuffle = |mut s: u64| {
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, (s % (i as u64 + 1)) as usize);
                s /= i as u64 + 1;
            }
            p
        };
        let action = FiniteAction::from_letters(&f2, n, &[shuffle(seeds.0), shuffle(seeds.1)]).unwrap();
        if let Ok(graph) = schreier_graph(&f2, &action, 0) {
            let colors: Vec<u32> = (0..graph.len()).map(|v| ((seeds.2 >> v) % 2) as u32 + 1).collect();
            let point = ColoredSchreierPoint::new(graph.clone(), 2, colors).unwrap();
            let patch = ball(&f2, 3).unwrap();
            let stab: HashSet<_> = stabilizer_on_patch(&f2, &point, &patch).into_iter().collect();
            for h in root_stabilizer_on_patch(&f2, &graph, &patch) {
                prop_assert!(stab.contains(&h), "{:?}", h);
            }
        }
    }

    #[test]
    fn blocks_are_disjoint_from_their_translates(c in 2usize..6, n in 1usize..4, free in any::<bool>()) {
        fn check<G: Group>(group: &G, c: usize, n: usize) -> Result<(), TestCaseError> {
            let (blocks, _) = choose_blocks_auto(group, c, n).unwrap();
            for k in 0..n {
                let block: HashSet<_> = blocks.blocks()[k].iter().cloned().collect();
                prop_assert_eq!(block.len(), c * (k + 1));
                let s = &blocks.separators()[k];
                prop_assert!(blocks.blocks()[k].iter().all(|t| !block.contains(&group.mul(s, t))));
            }
            Ok(())
        }
        if free {
            check(&FreeGroup::new(2).unwrap(), c, n)?;
        } else {
            check(&FreeAbelian::new(1).unwrap(), c, n)?;
        }
    }

    #[test]
    fn solutions_are_free_for_sub_families(c in 2usize..5, n in 1usize..4, seed in any::<u64>()) {
        let z = FreeAbelian::new(1).unwrap();
        let (blocks, _) = choose_blocks_auto(&z, c, n).unwrap();
        let patch = Arc::new(ball(&z, 40).unwrap());
        if let Ok(sol) = solve_patch(&z, patch, &blocks, seed, 100_000) {
            for m in 1..=n {
                prop_assert!(verify_free_patch(&z, &sol.configuration, &blocks.truncated(m)).passed());
            }
        }
    }

    #[test]
    fn realizations_are_surjective(name in proptest::sample::select(GROUPS.to_vec()), pick in any::<usize>()) {
        let group = FiniteGroup::named(name).unwrap();
        let subs = enumerate_subgroups(&group).unwrap();
        let orbits = conjugation_orbits(&subs, &group);
        let orbit = &orbits[pick % orbits.len()];
        let h = &orbit[pick / orbits.len() % orbit.len()];
        let r = finite_index_realization(&group, orbit, h).unwrap();
        let mut stabs: Vec<Vec<usize>> = (0..r.system.points())
            .map(|x| (0..group.order()).filter(|&g| r.system.act(g, x) == x).collect())
            .collect();
        stabs.sort();
        stabs.dedup();
        let mut expected: Vec<Vec<usize>> = orbit.iter().map(|k| k.elements().to_vec()).collect();
        expected.sort();
        prop_assert_eq!(stabs, expected);
    }
}

#[test]
fn enumeration_matches_exhaustive_search() {
    for name in GROUPS {
        let group = FiniteGroup::named(name).unwrap();
        let mut fast = enumerate_subgroups(&group).unwrap();
        fast.sort();
        assert_eq!(fast, exhaustive_subgroups(&group), "{name}");
    }
}
