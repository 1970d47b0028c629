//! Minimum-cost simple paths over an undirected graph with non-negative
//! edge costs.
//!
//! Paths are ordered by total cost, then hop count, then the node sequence
//! compared lexicographically. Path costs are always summed from the source
//! outward, so two routes to the same path produce bit-identical costs.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::link_state::{edge_key, EdgeKey};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl WeightedGraph {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n_nodes],
            edge_count: 0,
        }
    }

    pub fn from_edges(
        n_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut g = Self::new(n_nodes);
        for (i, j, c) in edges {
            g.add_edge(i, j, c)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Insert or overwrite the undirected edge `i–j`.
    pub fn add_edge(&mut self, i: usize, j: usize, cost: f64) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        ensure(i != j, "edge", "self-loops are not allowed")?;
        ensure(
            cost >= 0.0 && cost.is_finite(),
            "cost",
            format!("edge cost must be finite and non-negative, got {cost}"),
        )?;
        let fresh = Self::upsert(&mut self.adj[i], j, cost);
        Self::upsert(&mut self.adj[j], i, cost);
        if fresh {
            self.edge_count += 1;
        }
        Ok(())
    }

    fn upsert(list: &mut Vec<(usize, f64)>, to: usize, cost: f64) -> bool {
        match list.binary_search_by(|&(n, _)| n.cmp(&to)) {
            Ok(k) => {
                list[k].1 = cost;
                false
            }
            Err(k) => {
                list.insert(k, (to, cost));
                true
            }
        }
    }

    pub fn cost(&self, i: usize, j: usize) -> Option<f64> {
        let list = self.adj.get(i)?;
        list.binary_search_by(|&(n, _)| n.cmp(&j))
            .ok()
            .map(|k| list[k].1)
    }

    /// Neighbours of `i` in ascending id order.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, c)| (i, j, c))
        })
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    /// Cost of `nodes` summed from the first node outward.
    pub fn path_cost(&self, nodes: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for w in nodes.windows(2) {
            total += self.cost(w[0], w[1])?;
        }
        Some(total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub cost: f64,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.nodes.windows(2).map(|w| edge_key(w[0], w[1]))
    }

    pub fn uses_any(&self, edges: &BTreeSet<EdgeKey>) -> bool {
        self.edges().any(|e| edges.contains(&e))
    }

    /// Total order used for every path selection.
    pub fn rank_cmp(&self, other: &Path) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.hops().cmp(&other.hops()))
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

/// Priority-queue and relaxation tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub pushes: u64,
    pub pops: u64,
    pub edge_scans: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.pushes + self.pops + self.edge_scans
    }

    pub fn add(&mut self, o: &OpCounter) {
        self.pushes += o.pushes;
        self.pops += o.pops;
        self.edge_scans += o.edge_scans;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    hops: usize,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    graph: &'a WeightedGraph,
    source: usize,
    start_cost: f64,
    start_hops: usize,
    blocked_nodes: &'a [bool],
    blocked_edges: &'a BTreeSet<EdgeKey>,
}

/// Single-source labels: best (cost, hops) and predecessor per node.
pub struct Labels {
    source: usize,
    best: Vec<Option<(f64, usize)>>,
    pred: Vec<usize>,
}

impl Labels {
    pub fn cost(&self, v: usize) -> Option<f64> {
        self.best[v].map(|b| b.0)
    }

    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        self.best[v]?;
        let mut nodes = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.pred[cur];
            nodes.push(cur);
        }
        nodes.reverse();
        Some(nodes)
    }
}

fn lex_less_via(labels: &Labels, via: usize, current_pred: usize) -> bool {
    // Both candidate paths have equal length; compare their prefixes.
    let a = labels.path_to(via).expect("settled node");
    let b = labels.path_to(current_pred).expect("settled node");
    a < b
}

impl Search<'_> {
    fn run(&self, target: Option<usize>, ops: &mut OpCounter) -> Labels {
        let n = self.graph.node_count();
        let mut labels = Labels {
            source: self.source,
            best: vec![None; n],
            pred: vec![usize::MAX; n],
        };
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        labels.best[self.source] = Some((self.start_cost, self.start_hops));
        heap.push(Entry {
            cost: self.start_cost,
            hops: self.start_hops,
            node: self.source,
        });
        ops.pushes += 1;

        while let Some(Entry { cost, hops, node: u }) = heap.pop() {
            ops.pops += 1;
            if settled[u] || labels.best[u] != Some((cost, hops)) {
                continue;
            }
            settled[u] = true;
            if Some(u) == target {
                break;
            }
            for &(w, c) in self.graph.neighbors(u) {
                ops.edge_scans += 1;
                if settled[w] || self.blocked_nodes[w] || self.blocked_edges.contains(&edge_key(u, w)) {
                    continue;
                }
                let cand = (cost + c, hops + 1);
                let better = match labels.best[w] {
                    None => true,
                    Some(cur) => match cand.0.total_cmp(&cur.0).then(cand.1.cmp(&cur.1)) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => lex_less_via(&labels, u, labels.pred[w]),
                    },
                };
                if better {
                    let changed_key = labels.best[w] != Some(cand);
                    labels.best[w] = Some(cand);
                    labels.pred[w] = u;
                    if changed_key {
                        heap.push(Entry {
                            cost: cand.0,
                            hops: cand.1,
                            node: w,
                        });
                        ops.pushes += 1;
                    }
                }
            }
        }
        labels
    }
}

/// Full single-source run from `source` (no early exit).
pub fn single_source(graph: &WeightedGraph, source: usize, ops: &mut OpCounter) -> Result<Labels> {
    graph.check(source)?;
    let blocked = vec![false; graph.node_count()];
    let none = BTreeSet::new();
    Ok(Search {
        graph,
        source,
        start_cost: 0.0,
        start_hops: 0,
        blocked_nodes: &blocked,
        blocked_edges: &none,
    }
    .run(None, ops))
}

pub fn shortest_path(graph: &WeightedGraph, s: usize, d: usize) -> Result<Option<Path>> {
    shortest_path_counted(graph, s, d, &mut OpCounter::default())
}

pub fn shortest_path_counted(
    graph: &WeightedGraph,
    s: usize,
    d: usize,
    ops: &mut OpCounter,
) -> Result<Option<Path>> {
    shortest_path_avoiding(graph, s, d, &BTreeSet::new(), ops)
}

fn shortest_path_avoiding(
    graph: &WeightedGraph,
    s: usize,
    d: usize,
    avoid: &BTreeSet<EdgeKey>,
    ops: &mut OpCounter,
) -> Result<Option<Path>> {
    graph.check(s)?;
    graph.check(d)?;
    if s == d {
        return Ok(Some(Path {
            nodes: vec![s],
            cost: 0.0,
        }));
    }
    let blocked = vec![false; graph.node_count()];
    let labels = Search {
        graph,
        source: s,
        start_cost: 0.0,
        start_hops: 0,
        blocked_nodes: &blocked,
        blocked_edges: avoid,
    }
    .run(Some(d), ops);
    Ok(labels.path_to(d).map(|nodes| Path {
        cost: labels.cost(d).unwrap(),
        nodes,
    }))
}

/// How the alternate path is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlternateMode {
    /// Next-best simple path distinct from the primary.
    #[default]
    NextBest,
    /// Best path sharing no edge with the primary.
    EdgeDisjoint,
}

pub fn second_path(
    graph: &WeightedGraph,
    s: usize,
    d: usize,
    primary: &Path,
) -> Result<Option<Path>> {
    second_path_counted(graph, s, d, primary, AlternateMode::NextBest, &mut OpCounter::default())
}

/// Alternate to `primary` via spur searches from each primary node.
pub fn second_path_counted(
    graph: &WeightedGraph,
    s: usize,
    d: usize,
    primary: &Path,
    mode: AlternateMode,
    ops: &mut OpCounter,
) -> Result<Option<Path>> {
    graph.check(s)?;
    graph.check(d)?;
    ensure(
        primary.nodes.first() == Some(&s) && primary.nodes.last() == Some(&d),
        "primary",
        "endpoints do not match the requested pair",
    )?;
    if s == d {
        return Ok(None);
    }
    if mode == AlternateMode::EdgeDisjoint {
        let avoid: BTreeSet<EdgeKey> = primary.edges().collect();
        return shortest_path_avoiding(graph, s, d, &avoid, ops);
    }

    let p = &primary.nodes;
    let mut blocked = vec![false; graph.node_count()];
    let mut root_cost = 0.0;
    let mut best: Option<Path> = None;
    for k in 0..p.len() - 1 {
        let spur = p[k];
        let cut: BTreeSet<EdgeKey> = std::iter::once(edge_key(spur, p[k + 1])).collect();
        let labels = Search {
            graph,
            source: spur,
            start_cost: root_cost,
            start_hops: k,
            blocked_nodes: &blocked,
            blocked_edges: &cut,
        }
        .run(Some(d), ops);
        if let Some(tail) = labels.path_to(d) {
            let mut nodes = p[..k].to_vec();
            nodes.extend(tail);
            let cand = Path {
                cost: labels.cost(d).unwrap(),
                nodes,
            };
            if best.as_ref().is_none_or(|b| cand.rank_cmp(b) == Ordering::Less) {
                best = Some(cand);
            }
        }
        blocked[spur] = true;
        root_cost += graph
            .cost(spur, p[k + 1])
            .ok_or(Error::MissingLink(spur, p[k + 1]))?;
    }
    Ok(best)
}

/// Primary and alternate routes for one source–destination pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePair {
    pub primary: Path,
    pub alternate: Option<Path>,
}

impl RoutePair {
    pub fn compute(
        graph: &WeightedGraph,
        s: usize,
        d: usize,
        mode: AlternateMode,
        ops: &mut OpCounter,
    ) -> Result<Option<RoutePair>> {
        let Some(primary) = shortest_path_counted(graph, s, d, ops)? else {
            return Ok(None);
        };
        let alternate = second_path_counted(graph, s, d, &primary, mode, ops)?;
        Ok(Some(RoutePair { primary, alternate }))
    }
}

/// Route to use given a set of broken edges: the primary if intact, else the
/// alternate if intact, else nothing.
pub fn failover<'a>(route: &'a RoutePair, broken: &BTreeSet<EdgeKey>) -> Option<&'a Path> {
    if !route.primary.uses_any(broken) {
        return Some(&route.primary);
    }
    route.alternate.as_ref().filter(|p| !p.uses_any(broken))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        // s=0, m=1, d=2
        WeightedGraph::from_edges(3, [(0, 2, 1.5), (0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_graph() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 0.7)]).unwrap();
        let p = shortest_path(&g, 0, 1).unwrap().unwrap();
        assert_eq!(p.nodes, vec![0, 1]);
        assert_eq!(p.cost, 0.7);
        assert_eq!(second_path(&g, 0, 1, &p).unwrap(), None);
    }

    #[test]
    fn triangle_primary_and_alternate() {
        let g = triangle();
        let p1 = shortest_path(&g, 0, 2).unwrap().unwrap();
        assert_eq!(p1.nodes, vec![0, 2]);
        assert_eq!(p1.cost, 1.5);
        let p2 = second_path(&g, 0, 2, &p1).unwrap().unwrap();
        assert_eq!(p2.nodes, vec![0, 1, 2]);
        assert_eq!(p2.cost, 2.0);
    }

    #[test]
    fn chain_has_no_alternate() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p1 = shortest_path(&g, 0, 2).unwrap().unwrap();
        assert_eq!(second_path(&g, 0, 2, &p1).unwrap(), None);
    }

    #[test]
    fn disconnected_and_degenerate_queries() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), None);
        let same = shortest_path(&g, 2, 2).unwrap().unwrap();
        assert_eq!((same.nodes.clone(), same.cost), (vec![2], 0.0));
        assert_eq!(shortest_path(&g, 0, 9), Err(Error::UnknownNode(9)));
        assert!(WeightedGraph::from_edges(2, [(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn ties_prefer_fewer_hops_then_lexicographic() {
        // 0-1-3 and 0-2-3 both cost 2, 0-3 also costs 2
        let g = WeightedGraph::from_edges(
            4,
            [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0), (0, 3, 2.0)],
        )
        .unwrap();
        let p1 = shortest_path(&g, 0, 3).unwrap().unwrap();
        assert_eq!(p1.nodes, vec![0, 3]);
        let p2 = second_path(&g, 0, 3, &p1).unwrap().unwrap();
        assert_eq!(p2.nodes, vec![0, 1, 3]);
        // reversed labelling must still pick the lexicographically smaller
        let p = shortest_path(&g, 3, 0).unwrap().unwrap();
        assert_eq!(p.nodes, vec![3, 0]);
    }

    #[test]
    fn edge_disjoint_mode() {
        let g = WeightedGraph::from_edges(
            4,
            [(0, 1, 1.0), (1, 3, 1.0), (1, 2, 0.1), (2, 3, 0.1), (0, 2, 5.0), (0, 3, 9.0)],
        )
        .unwrap();
        let mut ops = OpCounter::default();
        let p1 = shortest_path(&g, 0, 3).unwrap().unwrap();
        assert_eq!(p1.nodes, vec![0, 1, 2, 3]);
        let next = second_path_counted(&g, 0, 3, &p1, AlternateMode::NextBest, &mut ops)
            .unwrap()
            .unwrap();
        assert_eq!(next.nodes, vec![0, 1, 3]);
        let disjoint = second_path_counted(&g, 0, 3, &p1, AlternateMode::EdgeDisjoint, &mut ops)
            .unwrap()
            .unwrap();
        assert!(!disjoint.edges().any(|e| p1.edges().any(|f| f == e)));
        assert_eq!(disjoint.nodes, vec![0, 3]);
    }

    #[test]
    fn failover_cases() {
        let g = triangle();
        let route = RoutePair::compute(&g, 0, 2, AlternateMode::NextBest, &mut OpCounter::default())
            .unwrap()
            .unwrap();
        let none = BTreeSet::new();
        assert_eq!(failover(&route, &none), Some(&route.primary));
        let direct: BTreeSet<_> = [edge_key(0, 2)].into();
        assert_eq!(failover(&route, &direct).unwrap().nodes, vec![0, 1, 2]);
        let both: BTreeSet<_> = [edge_key(0, 2), edge_key(1, 2)].into();
        assert_eq!(failover(&route, &both), None);
    }

    #[test]
    fn path_cost_sums_from_source() {
        let g = triangle();
        assert_eq!(g.path_cost(&[0, 1, 2]), Some(2.0));
        assert_eq!(g.path_cost(&[0, 1, 0, 2]), Some(3.5));
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edges().count(), 3);
    }
}
