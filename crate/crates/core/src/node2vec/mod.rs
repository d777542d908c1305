//! node2vec: second-order biased random walks followed by skip-gram with
//! negative sampling.

mod io;
mod sgns;
mod walk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use sgns::{sgns_loss, sgns_step, train_sgns, EmbeddingMatrix, NEGATIVE_TABLE_SIZE};
pub use walk::{generate_walks, transition_weights, WalkCorpus};

/// How SGNS updates are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingMode {
    /// One thread, one RNG stream: bit-reproducible.
    #[default]
    Deterministic,
    /// Lock-free updates from all rayon threads; not reproducible.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Node2vecParams {
    /// Return parameter: weight 1/p for stepping back to the previous node.
    pub p: f64,
    /// In-out parameter: weight 1/q for moving away from the previous node.
    pub q: f64,
    pub dim: usize,
    /// Maximum number of nodes per walk.
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub seed: u64,
    /// Use the full window at every position instead of shrinking it
    /// uniformly in `[1, window]`.
    pub fixed_window: bool,
    pub mode: TrainingMode,
}

impl Default for Node2vecParams {
    fn default() -> Self {
        Node2vecParams {
            p: 1.0,
            q: 1.0,
            dim: 128,
            walk_length: 80,
            walks_per_node: 10,
            window: 10,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            seed: 1,
            fixed_window: false,
            mode: TrainingMode::Deterministic,
        }
    }
}

impl Node2vecParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let checks = [
            (positive(self.p), "p must be > 0"),
            (positive(self.q), "q must be > 0"),
            (self.dim >= 2, "dim must be >= 2"),
            (self.walk_length >= 2, "walk_length must be >= 2"),
            (self.walks_per_node >= 1, "walks_per_node must be >= 1"),
            (self.window >= 1, "window must be >= 1"),
            (self.negatives >= 1, "negatives must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (positive(self.initial_lr), "initial_lr must be > 0"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::invalid(*msg)),
            None => Ok(()),
        }
    }
}

/// Walks followed by SGNS; returns one vector per graph node.
pub fn embed(graph: &Graph, params: &Node2vecParams) -> Result<EmbeddingMatrix> {
    params.validate()?;
    if graph.is_empty() {
        return Err(Error::EmptyGraph("cannot embed a graph without nodes".into()));
    }
    let corpus = generate_walks(graph, params);
    train_sgns(&corpus, graph.vocab(), params)
}
