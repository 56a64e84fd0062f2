//! Randomized invariants across modules.

use bsreach::*;
use proptest::prelude::*;

/// Graph on `n` vertices from an edge mask over vertex pairs and a loop mask.
fn graph(n: usize, edges: u32, loops: u32) -> Graph {
    let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let v: Vec<&str> = names.iter().map(String::as_str).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let e: Vec<(&str, &str)> =
        pairs.iter().enumerate().filter(|(b, _)| edges >> b & 1 == 1).map(|(_, &(i, j))| (v[i], v[j])).collect();
    let l: Vec<&str> = (0..n).filter(|i| loops >> i & 1 == 1).map(|i| v[i]).collect();
    Graph::new(&v, &e, &l).unwrap()
}

fn word(n: usize, letters: &[u8]) -> Word {
    letters.iter().map(|&x| {
        let v = (x as usize / 2) % n;
        if x & 1 == 0 { Op::plus(v) } else { Op::minus(v) }
    }).collect()
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=3, 0u32..8, 0u32..8).prop_map(|(n, e, l)| graph(n, e, l))
}

fn label(sys: &ValenceSystem, k: usize, opts: &SolverOptions) -> &'static str {
    decide(sys, k, opts).unwrap().verdict.label()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn scope_is_finite_exactly_on_identities(g in small_graph(), letters in prop::collection::vec(0u8..6, 0..9)) {
        let w = word(g.len(), &letters);
        let finite = matches!(scope(&g, &w, 1_000_000).unwrap(), Scope::Finite(_));
        prop_assert_eq!(finite, is_identity(&g, &w).unwrap());
    }

    #[test]
    fn greedy_reductions_exist_for_identities(g in small_graph(), letters in prop::collection::vec(0u8..6, 0..9)) {
        let w = word(g.len(), &letters);
        let traces = greedy_reductions(&g, &w, 1_000_000).unwrap();
        prop_assert_eq!(!traces.is_empty(), is_identity(&g, &w).unwrap());
    }

    #[test]
    fn cancel_and_swap_are_consistent(g in small_graph(), a in 0u8..6, b in 0u8..6) {
        let w = word(g.len(), &[a, b]);
        let (x, y) = (w[0], w[1]);
        // A cancelling pair is an identity; swapping letters keeps identity status.
        if words::cancels(&g, x, y) {
            prop_assert!(is_identity(&g, &w).unwrap());
        }
        if ops_independent(&g, x, y) {
            prop_assert_eq!(is_identity(&g, &[x, y]).unwrap(), is_identity(&g, &[y, x]).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn fast_paths_agree_with_generic(seed in 0u64..10_000, vertices in 1usize..=3, k in 1usize..=2) {
        let (_, sys) = gen_random(seed, vertices, 3, 4, 3).unwrap();
        let generic = SolverOptions { fast_path: false, ..SolverOptions::default() };
        prop_assert_eq!(label(&sys, k, &SolverOptions::default()), label(&sys, k, &generic));
    }

    #[test]
    fn workers_do_not_change_verdicts(seed in 0u64..10_000, k in 1usize..=2) {
        let (_, sys) = gen_random(seed, 3, 3, 4, 3).unwrap();
        let opts = |workers| SolverOptions { fast_path: false, workers, ..SolverOptions::default() };
        prop_assert_eq!(label(&sys, k, &opts(1)), label(&sys, k, &opts(3)));
    }

    #[test]
    fn reachability_is_monotone_in_k(seed in 0u64..10_000) {
        let (_, sys) = gen_random(seed, 3, 3, 4, 3).unwrap();
        let opts = SolverOptions { fast_path: false, ..SolverOptions::default() };
        if label(&sys, 1, &opts) == "REACHABLE" {
            prop_assert_eq!(label(&sys, 2, &opts), "REACHABLE");
        }
    }

    #[test]
    fn oracle_witnesses_are_found_by_solver(seed in 0u64..10_000, k in 1usize..=2) {
        let (_, sys) = gen_random(seed, 3, 3, 4, 2).unwrap();
        if oracle_bsreach(&sys, Scope::Finite(k), 6).unwrap().is_some() {
            prop_assert_eq!(label(&sys, k, &SolverOptions::default()), "REACHABLE");
        }
    }

    #[test]
    fn instances_round_trip(seed in 0u64..10_000, k in 1usize..=4) {
        let (_, sys) = gen_random(seed, 3, 3, 4, 3).unwrap();
        let inst = Instance::new(sys, Some(k)).unwrap();
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}
