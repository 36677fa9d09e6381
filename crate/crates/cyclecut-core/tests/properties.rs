//! Randomized cross-module invariants: graph transformations, engine
//! audits, policy independence and the composition laws of the cycle
//! number.

use cyclecut_core::reduce::init_state_with_policy;
use cyclecut_core::{
    apply_script, brute_force_c, cycle_number, is_double_ear_decomposable, lift_cycles,
    parse_graph, random_script, run, run_with_policy, validate_decomposition, ChoicePolicy,
    DecompositionResult, Multigraph, NodeId,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// Even multigraph from the half-edge pairing model: every degree is 2
/// or 4 by construction, but connectivity and treewidth are arbitrary.
fn random_even_graph(rng: &mut StdRng, max_nodes: usize) -> Multigraph {
    let n = rng.random_range(1..=max_nodes);
    let mut stubs = Vec::new();
    for v in 0..n as u32 {
        let d = if rng.random_bool(0.5) { 2 } else { 4 };
        for _ in 0..d {
            stubs.push(v);
        }
    }
    stubs.shuffle(rng);
    let mut g = Multigraph::new(n);
    for pair in stubs.chunks(2) {
        g.add_edge(NodeId(pair[0]), NodeId(pair[1]));
    }
    g
}

fn arb_graph() -> impl Strategy<Value = Multigraph> {
    // node count, then edges as endpoint index pairs
    (1usize..8).prop_flat_map(|n| {
        let edge = (0..n as u32, 0..n as u32);
        proptest::collection::vec(edge, 0..16)
            .prop_map(move |edges| Multigraph::from_edges(n, &edges))
    })
}

proptest! {
    #[test]
    fn serialize_parse_identity(g in arb_graph()) {
        let back = parse_graph(&g.serialize()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn degree_sum_is_twice_edge_count(g in arb_graph()) {
        let sum: u32 = g.nodes().map(|v| g.degree(v)).sum();
        prop_assert_eq!(sum as usize, 2 * g.edge_count());
    }

    #[test]
    fn components_partition_nodes_and_edges(g in arb_graph()) {
        let comps = g.connected_components();
        let nodes: usize = comps.iter().map(|(c, _, _)| c.node_count()).sum();
        let edges: usize = comps.iter().map(|(c, _, _)| c.edge_count()).sum();
        prop_assert_eq!(nodes, g.node_count());
        prop_assert_eq!(edges, g.edge_count());
    }

    #[test]
    fn subdivide_then_resolve_restores_shape(g in arb_graph(), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.edge_count() > 0);
        let e = g.edge_ids().nth(pick.index(g.edge_count())).unwrap();
        let h = g.subdivide(e).unwrap();
        prop_assert_eq!(h.edge_count(), g.edge_count() + 1);
        prop_assert_eq!(h.node_count(), g.node_count() + 1);
        let x = NodeId(g.node_count() as u32);
        prop_assert_eq!(h.degree(x), 2);
        let back = h.resolve(x).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.degree_multiset(), g.degree_multiset());
    }
}

/// Drives the engine step by step with a full state audit in between,
/// mirroring the priority order of `run`.
fn run_audited(g: &Multigraph, policy: ChoicePolicy) -> Result<usize, String> {
    let mut st = init_state_with_policy(g, policy);
    while !st.finished() {
        st.audit()?;
        if st.step_loop() || st.step_resolve() {
            continue;
        }
        if st.step_quadruple()? {
            continue;
        }
        if st.step_triple() {
            continue;
        }
        if !st.step_double()? {
            return Err(String::from("stuck"));
        }
    }
    st.audit()?;
    Ok(st.c())
}

#[test]
fn audited_runs_on_generated_instances() {
    for seed in 0..60u64 {
        let script = random_script(seed, (seed % 6) as usize, (seed % 5) as usize);
        let (g, expected) = apply_script(&script).unwrap();
        let c = run_audited(&g, ChoicePolicy::FirstEntry).unwrap();
        assert_eq!(c, expected, "seed {seed}");
        assert_eq!(run_audited(&g, ChoicePolicy::LastEntry).unwrap(), c, "seed {seed}");
    }
}

#[test]
fn step_budget_is_linear() {
    for seed in 0..40u64 {
        let script = random_script(seed, (seed % 8) as usize, (seed % 7) as usize);
        let (g, _) = apply_script(&script).unwrap();
        let DecompositionResult::Decomposable { trace, .. } = run(&g) else {
            panic!("generated instance must decompose");
        };
        assert!(trace.steps_applied <= g.node_count() + g.edge_count());
    }
}

#[test]
fn engine_matches_oracle_on_random_even_graphs() {
    let mut rng = StdRng::seed_from_u64(42);
    let mut decomposable = 0;
    for _ in 0..300 {
        let g = random_even_graph(&mut rng, 6);
        let report = is_double_ear_decomposable(&g);
        if !g.is_connected() {
            continue;
        }
        match run(&g) {
            DecompositionResult::Decomposable { c, trace } => {
                assert!(report.verdict, "engine succeeded outside the class:\n{}", g.serialize());
                let oracle = brute_force_c(&g, 16).unwrap();
                assert_eq!(c, oracle.c_min, "c mismatch on\n{}", g.serialize());
                let d = lift_cycles(&g, &trace);
                validate_decomposition(&g, &d).unwrap();
                decomposable += 1;
            }
            DecompositionResult::NotDecomposable { .. } => {
                assert!(!report.verdict, "engine failed inside the class:\n{}", g.serialize());
            }
        }
    }
    assert!(decomposable > 20, "sampling produced too few decomposable graphs");
}

#[test]
fn subdivision_keeps_cycle_number() {
    let mut rng = StdRng::seed_from_u64(7);
    for seed in 0..40u64 {
        let script = random_script(seed, (seed % 5) as usize, (seed % 3) as usize);
        let (g, _) = apply_script(&script).unwrap();
        let c = cycle_number(&g).unwrap();
        let e = g.edge_ids().nth(rng.random_range(0..g.edge_count())).unwrap();
        assert_eq!(cycle_number(&g.subdivide(e).unwrap()).unwrap(), c, "seed {seed}");
    }
}

#[test]
fn loops_add_one_cycle_each() {
    let mut rng = StdRng::seed_from_u64(11);
    for seed in 0..40u64 {
        let script = random_script(seed, (seed % 5) as usize, (seed % 3) as usize);
        let (g, _) = apply_script(&script).unwrap();
        let c = cycle_number(&g).unwrap();
        // a loop is only legal at a degree-2 node
        let candidates: Vec<_> = g.nodes().filter(|&v| g.degree(v) == 2).collect();
        if candidates.is_empty() {
            continue;
        }
        let v = candidates[rng.random_range(0..candidates.len())];
        let mut h = g.clone();
        h.add_edge(v, v);
        assert_eq!(cycle_number(&h).unwrap(), c + 1, "seed {seed}");
    }
}

#[test]
fn disjoint_union_adds_cycle_numbers() {
    for seed in 0..20u64 {
        let (g1, _) = apply_script(&random_script(seed, (seed % 4) as usize, 1)).unwrap();
        let (g2, _) = apply_script(&random_script(seed + 1000, (seed % 3) as usize, 2)).unwrap();
        let mut both = Multigraph::new(g1.node_count() + g2.node_count());
        for e in g1.edge_ids() {
            let (u, v) = g1.endpoints(e);
            both.add_edge(u, v);
        }
        let off = g1.node_count() as u32;
        for e in g2.edge_ids() {
            let (u, v) = g2.endpoints(e);
            both.add_edge(NodeId(u.0 + off), NodeId(v.0 + off));
        }
        let expected = cycle_number(&g1).unwrap() + cycle_number(&g2).unwrap();
        assert_eq!(cycle_number(&both).unwrap(), expected, "seed {seed}");
        // the single-component entry point refuses the union
        assert!(!run(&both).is_decomposable());
    }
}

#[test]
fn policy_choice_never_changes_c() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..200 {
        let g = random_even_graph(&mut rng, 6);
        let a = run_with_policy(&g, ChoicePolicy::FirstEntry).cycle_count();
        let b = run_with_policy(&g, ChoicePolicy::LastEntry).cycle_count();
        assert_eq!(a, b, "policies disagree on\n{}", g.serialize());
    }
}
