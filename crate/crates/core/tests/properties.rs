//! Property tests for the structural invariants: local-label bijections,
//! the rewriting-code contract under randomized parameters, update-vector
//! identities for arbitrary parameter tables, and band monotonicity.

use std::sync::Arc;

use proptest::prelude::*;

use flashcodes::cell::CellState;
use flashcodes::code::{CodeError, RewritingCode};
use flashcodes::graph::DataGraph;
use flashcodes::harness::rng::SplitMix64;
use flashcodes::harness::sequence::random_walk_sequence;
use flashcodes::harness::{measure, StopReason};
use flashcodes::parametric::{ParametricCode, RobustCode};
use flashcodes::registers::{BaseRepCode, ModularCode, SplitCode};
use flashcodes::trajectory::TrajectoryCode;

fn arb_graph() -> impl Strategy<Value = DataGraph> {
    prop_oneof![
        (2usize..=24).prop_map(|count| DataGraph::complete(count).unwrap()),
        (1u32..=4, 2usize..=3)
            .prop_filter("size cap", |(k, ell)| ell.pow(*k) <= 81)
            .prop_map(|(k, ell)| DataGraph::hypercube(k, ell).unwrap()),
        (1u32..=4, 2usize..=3)
            .prop_filter("size cap", |(k, ell)| ell.pow(*k) <= 81)
            .prop_map(|(k, ell)| DataGraph::debruijn(k, ell).unwrap()),
        (2usize..=5, 2usize..=40)
            .prop_map(|(delta, count)| { DataGraph::bidirected_tree(delta, count).unwrap() }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn labels_are_bijective_and_round_trip(graph in arb_graph()) {
        for u in 0..graph.vertex_count() {
            let outdeg = graph.out_degree(u);
            let mut seen = vec![false; outdeg];
            for &v in graph.out_neighbors(u) {
                let label = graph.edge_label(u, v).unwrap();
                prop_assert!(label < outdeg);
                prop_assert!(!seen[label], "label {label} reused at {u}");
                seen[label] = true;
                prop_assert_eq!(graph.follow(u, label).unwrap(), v);
            }
            let contiguous = seen.into_iter().all(|s| s);
            prop_assert!(contiguous, "labels not contiguous at {}", u);
            prop_assert!(graph.follow(u, outdeg).is_err());
        }
        // Generators only produce graphs the model allows.
        prop_assert!(graph.max_out_degree() < graph.vertex_count());
    }

    #[test]
    fn raise_adds_exactly_its_amount(
        levels in prop::collection::vec(0u32..4, 1..20),
        index in 0usize..20,
        amount in 1u32..3,
    ) {
        let q = 8;
        let s = CellState::from_levels(levels, q).unwrap();
        let index = index % s.n();
        let s2 = s.raise(index, amount).unwrap();
        prop_assert_eq!(s2.weight(), s.weight() + u64::from(amount));
        prop_assert!(s2.is_above(&s).unwrap());
        prop_assert!(!s.is_above(&s2).unwrap());
    }

    /// The rewriting-code contract under a clairvoyant random driver: the
    /// harness asserts decode-after-update and monotonicity on every
    /// supported rewrite, and the run must end either with the sequence or
    /// with a legitimate exhaustion.
    #[test]
    fn complete_graph_codes_honor_the_contract(
        params in (2usize..=20, 2u32..=6, 0u64..1000),
    ) {
        let (alphabet, q, seed) = params;
        let n = alphabet * 2;
        let graph = DataGraph::complete(alphabet).unwrap();
        let cap = n as u64 * u64::from(q - 1);
        let seq = random_walk_sequence(&graph, seed, cap).unwrap();

        let mut codes: Vec<Box<dyn RewritingCode>> = vec![
            Box::new(ModularCode::new(n, q, alphabet).unwrap()),
            Box::new(SplitCode::new(n, q, alphabet).unwrap()),
            Box::new(RobustCode::sample(n, q, alphabet, seed, true).unwrap()),
            Box::new(RobustCode::sample(n, q, alphabet, seed, false).unwrap()),
        ];
        if let Ok(code) = BaseRepCode::new(n, q, alphabet) {
            codes.push(Box::new(code));
        }
        if n <= 12 {
            codes.push(Box::new(ParametricCode::identity(n, q, alphabet).unwrap()));
        }
        for code in codes {
            let m = measure(code.as_ref(), &graph, &seq);
            prop_assert!(
                matches!(
                    m.stop_reason,
                    StopReason::SequenceEnded
                        | StopReason::Exhausted { .. }
                        | StopReason::Unreachable { .. }
                ),
                "{}: {:?}",
                code.spec_string(),
                m.stop_reason
            );
        }
    }

    #[test]
    fn trajectory_honors_the_contract_on_any_graph(
        graph in arb_graph(),
        n in 24usize..=64,
        q in 2u32..=8,
        seed in 0u64..1000,
    ) {
        let graph = Arc::new(graph);
        let cap = n as u64 * u64::from(q - 1);
        let code = match TrajectoryCode::plan(n, q, Arc::clone(&graph), cap) {
            Ok(code) => code,
            // Small n over a large alphabet can be legitimately infeasible.
            Err(CodeError::InfeasibleLayout(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("plan: {e}"))),
        };
        let seq = random_walk_sequence(&graph, seed, cap).unwrap();
        let m = measure(&code, &graph, &seq);
        let clean_stop = matches!(
            m.stop_reason,
            StopReason::SequenceEnded | StopReason::Exhausted { .. }
        );
        prop_assert!(clean_stop, "unexpected stop: {:?}", m.stop_reason);
    }

    /// Update diversity equals the number of distinct entries in the
    /// current theta row, whatever the table holds.
    #[test]
    fn update_diversity_matches_theta_row(
        n in 2usize..=8,
        q in 2u32..=4,
        alphabet in 2usize..=8,
        table_seed in 0u64..10_000,
        state_seed in 0u64..10_000,
    ) {
        let rows = n * (q as usize - 1);
        let mut rng = SplitMix64::new(table_seed);
        let theta: Vec<Vec<usize>> =
            (0..rows).map(|_| (0..n).map(|_| rng.gen_range(alphabet)).collect()).collect();
        let a: Vec<usize> = (0..rows).map(|_| rng.gen_range(alphabet)).collect();
        let code = ParametricCode::new(n, q, alphabet, theta.clone(), a).unwrap();

        let mut rng = SplitMix64::new(state_seed);
        let levels: Vec<u32> = (0..n).map(|_| rng.gen_range(q as usize - 1) as u32).collect();
        let state = CellState::from_levels(levels, q).unwrap();
        let w = state.weight() as usize;

        let u = code.update_vector(&state).unwrap();
        let mut expected: Vec<usize> = theta[w].clone();
        expected.sort_unstable();
        expected.dedup();
        prop_assert_eq!(u.diversity(), expected.len());
    }

    /// While every super cell is short of the uniform-class capacity, the
    /// robust super-cell update vector is ((1+a_w) .. (L+a_w)) mod L with
    /// all L entries distinct.
    #[test]
    fn robust_super_update_vector_identity(
        groups in 1usize..=4,
        alphabet in 2usize..=6,
        q in 2u32..=5,
        seed in 0u64..10_000,
        state_seed in 0u64..10_000,
    ) {
        let n = groups * alphabet;
        let code = RobustCode::sample(n, q, alphabet, seed, true).unwrap();
        let mut rng = SplitMix64::new(state_seed);
        let levels: Vec<u32> = (0..n).map(|_| rng.gen_range(q as usize - 1) as u32).collect();
        let state = CellState::from_levels(levels, q).unwrap();
        let w = state.weight() as usize;
        let a_w = code.a_sequence()[w];

        let u = code.super_update_vector(&state).unwrap();
        let expected: Vec<usize> =
            (1..=alphabet).map(|i| (i + a_w) % alphabet).collect();
        prop_assert_eq!(&u, &expected);
        let mut distinct = u.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), alphabet, "diversity must be L");
    }

    /// Each base-representation rewrite moves every cell up by at least
    /// one level (a whole band advance).
    #[test]
    fn base_rep_band_advance_is_strict(
        n in 2usize..=6,
        q in 4u32..=12,
        seed in 0u64..1000,
    ) {
        let alphabet = 2usize.pow(n as u32); // radix 2
        let code = BaseRepCode::new(n, q, alphabet).unwrap();
        let mut rng = SplitMix64::new(seed);
        let mut s = code.initial_state();
        let mut value = 0usize;
        // First write fills band 0; later writes must strictly raise all.
        for step in 0..q {
            let mut next = rng.gen_range(alphabet);
            if next == value {
                next = (next + 1) % alphabet;
            }
            match code.update(&s, next) {
                Ok(s2) => {
                    if step > 0 {
                        for i in 0..n {
                            prop_assert!(s2.level(i) > s.level(i), "cell {i} did not rise");
                        }
                    }
                    s = s2;
                    value = next;
                }
                Err(CodeError::Exhausted { .. }) => break,
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
    }
}
