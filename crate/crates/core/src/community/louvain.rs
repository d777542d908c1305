//! Two-phase Louvain: greedy local moves, then aggregation of communities
//! into super-nodes, repeated until a pass moves nothing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{densify, Partition};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Gains must beat the incumbent by more than this to trigger a move.
const GAIN_EPS: f64 = 1e-12;

/// Weighted undirected graph used between aggregation levels.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of edges folded inside each super-node.
    self_weight: Vec<f64>,
    degree: Vec<f64>,
    total_weight: f64,
}

impl Level {
    fn from_graph(graph: &Graph) -> Self {
        let n = graph.node_count();
        let adj: Vec<Vec<(usize, f64)>> = (0..n as NodeId)
            .map(|v| graph.neighbors(v).iter().map(|&u| (u as usize, 1.0)).collect())
            .collect();
        let degree = adj.iter().map(|a| a.len() as f64).collect();
        Level {
            adj,
            self_weight: vec![0.0; n],
            degree,
            total_weight: graph.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, community: &[usize], resolution: f64) -> f64 {
        let k = community.iter().max().map_or(0, |&c| c + 1);
        let mut inner = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for v in 0..self.len() {
            let c = community[v];
            tot[c] += self.degree[v];
            inner[c] += self.self_weight[v];
            for &(u, w) in &self.adj[v] {
                if u > v && community[u] == c {
                    inner[c] += w;
                }
            }
        }
        let m = self.total_weight;
        inner
            .iter()
            .zip(&tot)
            .map(|(&i, &t)| i / m - resolution * (t / (2.0 * m)).powi(2))
            .sum()
    }

    /// Sweep nodes in `order` until no node moves. Returns whether anything
    /// moved at all.
    fn local_moves(&self, community: &mut [usize], order: &[usize], resolution: f64) -> bool {
        let two_m = 2.0 * self.total_weight;
        let mut tot: Vec<f64> = vec![0.0; self.len()];
        for v in 0..self.len() {
            tot[community[v]] += self.degree[v];
        }
        // scratch: weight from the current node into each community
        let mut link = vec![0.0f64; self.len()];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &v in order {
                let own = community[v];
                let k = self.degree[v];
                touched.clear();
                for &(u, w) in &self.adj[v] {
                    let c = community[u];
                    // edge weights are positive, so zero means unseen
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= k;
                let gain = |c: usize, link_c: f64| link_c - resolution * tot[c] * k / two_m;
                let mut best = own;
                let mut best_gain = gain(own, link[own]);
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k;
                if best != own {
                    community[v] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                link[own] = 0.0;
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        moved_any
    }

    /// Collapse each community to a super-node.
    fn aggregate(&self, community: &[usize], k: usize) -> Level {
        let mut self_weight = vec![0.0; k];
        let mut degree = vec![0.0; k];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for v in 0..self.len() {
            let c = community[v];
            self_weight[c] += self.self_weight[v];
            degree[c] += self.degree[v];
            for &(u, w) in &self.adj[v] {
                let d = community[u];
                if d == c {
                    if u > v {
                        self_weight[c] += w;
                    }
                } else {
                    *weights[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: weights.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_weight,
            degree,
            total_weight: self.total_weight,
        }
    }
}

/// Per-pass modularity values (at the requested resolution), starting with
/// the all-singletons partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainTrace {
    pub pass_modularity: Vec<f64>,
}

/// Louvain clustering. Within a pass, nodes are visited in a permutation
/// drawn from `seed`; only strictly improving moves are taken.
pub fn louvain_cluster(graph: &Graph, seed: u64, resolution: f64) -> Result<Partition> {
    louvain_with_trace(graph, seed, resolution).map(|(p, _)| p)
}

pub fn louvain_with_trace(
    graph: &Graph,
    seed: u64,
    resolution: f64,
) -> Result<(Partition, LouvainTrace)> {
    if graph.is_directed() {
        return Err(Error::precondition("Louvain needs an undirected graph"));
    }
    if graph.edge_count() == 0 {
        return Err(Error::UndefinedModularity);
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::invalid(format!("resolution must be positive, got {resolution}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(graph);
    // community of each original node, in terms of the current level's nodes
    let mut membership: Vec<usize> = (0..graph.node_count()).collect();
    let singletons: Vec<usize> = (0..level.len()).collect();
    let mut trace = vec![level.modularity(&singletons, resolution)];

    loop {
        let mut order: Vec<usize> = (0..level.len()).collect();
        order.shuffle(&mut rng);
        let mut community: Vec<usize> = (0..level.len()).collect();
        if !level.local_moves(&mut community, &order, resolution) {
            break;
        }
        let labels: Vec<u32> = community.iter().map(|&c| c as u32).collect();
        let (dense, k) = densify(&labels);
        let dense: Vec<usize> = dense.into_iter().map(|c| c as usize).collect();
        trace.push(level.modularity(&dense, resolution));
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        level = level.aggregate(&dense, k);
    }

    let labels: Vec<u32> = membership.iter().map(|&c| c as u32).collect();
    let partition = Partition::new(graph, &labels)?;
    Ok((
        partition,
        LouvainTrace {
            pass_modularity: trace,
        },
    ))
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::community::modularity;

    /// Q = 1/2m * sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j), from the
    /// dense adjacency matrix.
    fn matrix_modularity(graph: &Graph, labels: &[usize]) -> f64 {
        let n = graph.node_count();
        let two_m = 2.0 * graph.edge_count() as f64;
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] != labels[j] {
                    continue;
                }
                let a = if graph.has_edge(i as NodeId, j as NodeId) { 1.0 } else { 0.0 };
                let ki = graph.degree(i as NodeId) as f64;
                let kj = graph.degree(j as NodeId) as f64;
                q += a - ki * kj / two_m;
            }
        }
        q / two_m
    }

    /// Maximum modularity over every set partition (restricted growth strings).
    fn brute_force_max(graph: &Graph) -> f64 {
        fn rec(graph: &Graph, labels: &mut Vec<usize>, max_label: usize, best: &mut f64) {
            if labels.len() == graph.node_count() {
                *best = best.max(matrix_modularity(graph, labels));
                return;
            }
            for l in 0..=max_label + 1 {
                labels.push(l);
                rec(graph, labels, max_label.max(l), best);
                labels.pop();
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut labels = vec![0];
        rec(graph, &mut labels, 0, &mut best);
        best
    }

    fn g(edges: &[(&str, &str)]) -> Graph {
        Graph::from_named_edges(false, Vec::<&str>::new(), edges.iter().copied())
    }

    fn curated() -> Vec<(&'static str, Graph)> {
        vec![
            (
                "barbell",
                g(&[
                    ("a1", "a2"), ("a1", "a3"), ("a1", "a4"), ("a2", "a3"), ("a2", "a4"), ("a3", "a4"),
                    ("b1", "b2"), ("b1", "b3"), ("b1", "b4"), ("b2", "b3"), ("b2", "b4"), ("b3", "b4"),
                    ("a4", "b1"),
                ]),
            ),
            ("k4", g(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")])),
            ("two edges", g(&[("a", "b"), ("c", "d")])),
            (
                "two triangles",
                g(&[("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f"), ("c", "d")]),
            ),
        ]
    }

    #[test]
    fn brute_force_oracle_values() {
        let graphs = curated();
        // two triangles + bridge: 2 * (3/7 - (7/14)^2) = 5/14
        assert!((brute_force_max(&graphs[3].1) - 5.0 / 14.0).abs() < 1e-12);
        assert!(brute_force_max(&graphs[1].1).abs() < 1e-12);
        assert!((brute_force_max(&graphs[2].1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn attains_optimum_on_curated_graphs() {
        for (name, graph) in curated() {
            let best = brute_force_max(&graph);
            for seed in 0..16 {
                let p = louvain_cluster(&graph, seed, 1.0).unwrap();
                assert!(
                    (p.modularity() - best).abs() < 1e-9,
                    "{name} seed {seed}: {} vs {best}",
                    p.modularity()
                );
            }
        }
    }

    #[test]
    fn curated_community_counts() {
        let graphs = curated();
        let p = louvain_cluster(&graphs[3].1, 1, 1.0).unwrap();
        assert_eq!(p.num_communities(), 2);
        assert_eq!(p.community_of(), [0, 0, 0, 1, 1, 1]);
        assert_eq!(louvain_cluster(&graphs[1].1, 1, 1.0).unwrap().num_communities(), 1);
        assert_eq!(louvain_cluster(&graphs[2].1, 1, 1.0).unwrap().num_communities(), 2);
    }

    #[test]
    fn matrix_and_edge_scan_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let graph = random_graph(&mut rng, 12, 0.3);
            if graph.edge_count() == 0 {
                continue;
            }
            let labels: Vec<usize> = (0..12).map(|_| rng.random_range(0..4)).collect();
            let as_u32: Vec<u32> = labels.iter().map(|&l| l as u32).collect();
            let p = Partition::new(&graph, &as_u32).unwrap();
            assert!((modularity(&graph, &p).unwrap() - matrix_modularity(&graph, &labels)).abs() < 1e-12);
        }
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let names: Vec<String> = (0..n).map(|i| format!("v{i:03}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((names[i].clone(), names[j].clone()));
                }
            }
        }
        Graph::from_named_edges(false, names.clone(), edges)
    }

    #[test]
    fn monotone_and_consistent_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..100 {
            let n = rng.random_range(5..60);
            let p = rng.random_range(0.05..0.5);
            let graph = random_graph(&mut rng, n, p);
            if graph.edge_count() == 0 {
                continue;
            }
            let (part, trace) = louvain_with_trace(&graph, i, 1.0).unwrap();
            for w in trace.pass_modularity.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "graph {i}: {:?}", trace.pass_modularity);
            }
            let last = *trace.pass_modularity.last().unwrap();
            assert!((part.modularity() - last).abs() < 1e-9);
            assert!((modularity(&graph, &part).unwrap() - part.modularity()).abs() < 1e-9);
            assert_eq!(louvain_cluster(&graph, i, 1.0).unwrap(), part);
        }
    }

    #[test]
    fn resolution_changes_granularity() {
        let graph = curated().remove(0).1;
        let coarse = louvain_cluster(&graph, 0, 0.01).unwrap();
        assert_eq!(coarse.num_communities(), 1);
        assert!(louvain_cluster(&graph, 0, 0.0).is_err());
    }

    #[test]
    fn rejects_edgeless_graph() {
        let graph = Graph::from_named_edges(false, ["a"], Vec::<(&str, &str)>::new());
        assert!(matches!(louvain_cluster(&graph, 0, 1.0), Err(Error::UndefinedModularity)));
    }
}
