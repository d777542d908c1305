//! Second-order biased random walks.
//!
//! The bias for stepping from `cur` to a neighbor `x`, having arrived from
//! `prev`, is 1/p when `x == prev`, 1 when `x` is adjacent to `prev` and 1/q
//! otherwise. Weights are computed on the fly with a binary search over the
//! sorted adjacency of `prev`, so memory stays linear in the edge count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Node2vecParams;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Walks over node indices; walk `k * node_count + n` starts at node `n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<NodeId>>,
}

impl WalkCorpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }
}

/// Unnormalized bias of every neighbor of `cur`, written into `out`.
#[inline]
fn fill_bias(graph: &Graph, prev: Option<NodeId>, cur: NodeId, inv_p: f64, inv_q: f64, out: &mut Vec<f64>) {
    out.clear();
    let neighbors = graph.neighbors(cur);
    match prev {
        None => out.resize(neighbors.len(), 1.0),
        Some(prev) => out.extend(neighbors.iter().map(|&x| {
            if x == prev {
                inv_p
            } else if graph.has_edge(prev, x) {
                1.0
            } else {
                inv_q
            }
        })),
    }
}

/// Normalized transition probabilities out of `cur`. `prev` is `None` on the
/// first step, which is uniform.
pub fn transition_weights(
    graph: &Graph,
    prev: Option<NodeId>,
    cur: NodeId,
    params: &Node2vecParams,
) -> Result<Vec<(NodeId, f64)>> {
    if graph.degree(cur) == 0 {
        return Err(Error::precondition(format!(
            "node {} has no neighbors to step to",
            graph.name(cur)
        )));
    }
    if let Some(p) = prev {
        if !graph.has_edge(cur, p) {
            return Err(Error::precondition(format!(
                "previous node {} is not adjacent to {}",
                graph.name(p),
                graph.name(cur)
            )));
        }
    }
    let mut bias = Vec::new();
    fill_bias(graph, prev, cur, 1.0 / params.p, 1.0 / params.q, &mut bias);
    let total: f64 = bias.iter().sum();
    Ok(graph
        .neighbors(cur)
        .iter()
        .zip(bias)
        .map(|(&x, w)| (x, w / total))
        .collect())
}

fn sample_step<R: Rng>(
    graph: &Graph,
    prev: Option<NodeId>,
    cur: NodeId,
    inv_p: f64,
    inv_q: f64,
    rng: &mut R,
    scratch: &mut Vec<f64>,
) -> NodeId {
    let neighbors = graph.neighbors(cur);
    if prev.is_none() || (inv_p == 1.0 && inv_q == 1.0) {
        return neighbors[rng.random_range(0..neighbors.len())];
    }
    fill_bias(graph, prev, cur, inv_p, inv_q, scratch);
    let total: f64 = scratch.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, &w) in scratch.iter().enumerate() {
        r -= w;
        if r < 0.0 {
            return neighbors[i];
        }
    }
    neighbors[neighbors.len() - 1]
}

/// The RNG for walk `k` from `node` depends only on `(seed, node, k)`.
fn walk_rng(seed: u64, node: NodeId, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | node as u64);
    rng
}

pub(crate) fn single_walk(graph: &Graph, start: NodeId, params: &Node2vecParams, k: usize) -> Vec<NodeId> {
    let mut rng = walk_rng(params.seed, start, k);
    let (inv_p, inv_q) = (1.0 / params.p, 1.0 / params.q);
    let mut scratch = Vec::new();
    let mut walk = Vec::with_capacity(params.walk_length);
    walk.push(start);
    while walk.len() < params.walk_length {
        let cur = walk[walk.len() - 1];
        if graph.degree(cur) == 0 {
            break;
        }
        let prev = (walk.len() >= 2).then(|| walk[walk.len() - 2]);
        walk.push(sample_step(graph, prev, cur, inv_p, inv_q, &mut rng, &mut scratch));
    }
    walk
}

/// `walks_per_node` walks from every node, generated in parallel. Output is
/// deterministic regardless of thread count.
pub fn generate_walks(graph: &Graph, params: &Node2vecParams) -> WalkCorpus {
    let n = graph.node_count();
    let walks = (0..params.walks_per_node * n)
        .into_par_iter()
        .map(|i| single_walk(graph, (i % n) as NodeId, params, i / n))
        .collect();
    WalkCorpus { walks }
}
