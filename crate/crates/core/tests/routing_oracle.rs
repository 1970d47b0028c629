//! Path search checked against exhaustive simple-path enumeration.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satq::link_state::edge_key;
use satq::routing::{
    second_path_counted, shortest_path, AlternateMode, OpCounter, Path, WeightedGraph,
};

/// Every simple s→d path, cost summed from the source outward.
fn enumerate(g: &WeightedGraph, s: usize, d: usize) -> Vec<Path> {
    fn dfs(g: &WeightedGraph, d: usize, stack: &mut Vec<usize>, cost: f64, out: &mut Vec<Path>) {
        let u = *stack.last().unwrap();
        if u == d {
            out.push(Path {
                nodes: stack.clone(),
                cost,
            });
            return;
        }
        for &(v, w) in g.neighbors(u) {
            if !stack.contains(&v) {
                stack.push(v);
                dfs(g, d, stack, cost + w, out);
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(g, d, &mut vec![s], 0.0, &mut out);
    out.sort_by(Path::rank_cmp);
    out
}

fn random_graph(rng: &mut ChaCha8Rng, integer_costs: bool) -> WeightedGraph {
    let n = rng.gen_range(2..=10);
    let p = rng.gen_range(0.2..0.9);
    let mut g = WeightedGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                let c = if integer_costs {
                    rng.gen_range(0..=4) as f64
                } else {
                    rng.gen_range(0.0..3.0)
                };
                g.add_edge(i, j, c).unwrap();
            }
        }
    }
    g
}

fn check_graph(g: &WeightedGraph, s: usize, d: usize) {
    let all = enumerate(g, s, d);
    let primary = shortest_path(g, s, d).unwrap();
    assert_eq!(primary.as_ref(), all.first(), "primary mismatch s={s} d={d} g={:?}", g.edges().collect::<Vec<_>>());
    let Some(primary) = primary else { return };

    let mut ops = OpCounter::default();
    let alt = second_path_counted(g, s, d, &primary, AlternateMode::NextBest, &mut ops).unwrap();
    assert_eq!(alt.as_ref(), all.get(1), "alternate mismatch s={s} d={d} g={:?}", g.edges().collect::<Vec<_>>());
    if let Some(a) = &alt {
        assert_ne!(a.nodes, primary.nodes);
        assert!(a.cost >= primary.cost);
    }

    let used: BTreeSet<_> = primary.edges().collect();
    let disjoint = second_path_counted(g, s, d, &primary, AlternateMode::EdgeDisjoint, &mut ops).unwrap();
    let expected = all.iter().find(|p| !p.uses_any(&used));
    assert_eq!(disjoint.as_ref(), expected, "edge-disjoint mismatch");
}

fn run(seed: u64, integer_costs: bool, graphs: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..graphs {
        let g = random_graph(&mut rng, integer_costs);
        let n = g.node_count();
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        if s == d {
            let p = shortest_path(&g, s, d).unwrap().unwrap();
            assert_eq!((p.nodes.as_slice(), p.cost), (&[s][..], 0.0));
            continue;
        }
        check_graph(&g, s, d);
    }
}

#[test]
fn integer_costs_match_enumeration() {
    run(11, true, 1500);
}

#[test]
fn float_costs_match_enumeration() {
    run(12, false, 1500);
}

#[test]
fn all_pairs_on_dense_tied_graph() {
    // Unit costs on K6 maximise ties; every ordered pair must agree.
    let mut g = WeightedGraph::new(6);
    for i in 0..6 {
        for j in i + 1..6 {
            g.add_edge(i, j, 1.0).unwrap();
        }
    }
    for s in 0..6 {
        for d in 0..6 {
            if s != d {
                check_graph(&g, s, d);
            }
        }
    }
}

#[test]
fn rank_order_is_cost_then_hops_then_nodes() {
    let a = Path { nodes: vec![0, 2], cost: 2.0 };
    let b = Path { nodes: vec![0, 1, 2], cost: 2.0 };
    let c = Path { nodes: vec![0, 1, 3], cost: 2.0 };
    assert_eq!(a.rank_cmp(&b), Ordering::Less);
    assert_eq!(b.rank_cmp(&c), Ordering::Less);
    assert_eq!(edge_key(3, 1), (1, 3));
}
