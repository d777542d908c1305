//! Index-mapped adjacency structures for the three network kinds: domain
//! co-occurrence, hashtag co-occurrence and retweet.

mod build;
mod io;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub use build::{
    build_domain_cooccurrence, build_hashtag_cooccurrence, build_retweet_network,
    BuildOptions, CooccurrenceAccumulator,
};

/// Node index into [`Graph::vocab`].
pub type NodeId = u32;

/// Per-user list of node indices, most frequent item first (ties broken by
/// node name).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserItemMap(BTreeMap<String, Vec<NodeId>>);

impl UserItemMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, user: String, items: Vec<NodeId>) {
        self.0.insert(user, items);
    }

    pub fn get(&self, user: &str) -> Option<&[NodeId]> {
        self.0.get(user).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[NodeId])> {
        self.0.iter().map(|(u, v)| (u.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Compressed adjacency graph with a sorted string vocabulary.
///
/// Canonical form: the vocabulary is sorted, each adjacency list is sorted
/// and duplicate-free, and there are no self-loops. Undirected edges appear in
/// both endpoint lists.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    vocab: Vec<String>,
    index: HashMap<String, NodeId>,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    user_items: Option<UserItemMap>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.vocab == other.vocab
            && self.offsets == other.offsets
            && self.neighbors == other.neighbors
            && self.user_items == other.user_items
    }
}

impl Graph {
    /// Build a graph from node names and name pairs. Nodes referenced by
    /// edges are added automatically; duplicate edges and self-loops are
    /// dropped.
    pub fn from_named_edges<S: AsRef<str>>(
        directed: bool,
        nodes: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Self {
        let edges: Vec<(S, S)> = edges.into_iter().collect();
        let mut vocab: Vec<String> = nodes.into_iter().map(|s| s.as_ref().to_string()).collect();
        for (a, b) in &edges {
            vocab.push(a.as_ref().to_string());
            vocab.push(b.as_ref().to_string());
        }
        vocab.sort_unstable();
        vocab.dedup();
        let index: HashMap<String, NodeId> = vocab
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as NodeId))
            .collect();
        let pairs: Vec<(NodeId, NodeId)> = edges
            .iter()
            .map(|(a, b)| (index[a.as_ref()], index[b.as_ref()]))
            .collect();
        Self::assemble(directed, vocab, index, pairs)
    }

    /// Build from an already sorted, duplicate-free vocabulary and index pairs.
    pub fn from_index_edges(
        directed: bool,
        vocab: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        if vocab.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Consistency("vocabulary must be sorted and unique".into()));
        }
        let n = vocab.len();
        let edges: Vec<(NodeId, NodeId)> = edges.into_iter().collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a as usize >= n || b as usize >= n) {
            return Err(Error::Consistency(format!(
                "edge ({a}, {b}) references a node outside 0..{n}"
            )));
        }
        let index = vocab
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as NodeId))
            .collect();
        Ok(Self::assemble(directed, vocab, index, edges))
    }

    fn assemble(
        directed: bool,
        vocab: Vec<String>,
        index: HashMap<String, NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let n = vocab.len();
        let mut arcs: Vec<(NodeId, NodeId)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                continue;
            }
            arcs.push((a, b));
            if !directed {
                arcs.push((b, a));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in &arcs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = arcs.into_iter().map(|(_, b)| b).collect();
        Graph {
            directed,
            vocab,
            index,
            offsets,
            neighbors,
            user_items: None,
        }
    }

    pub fn with_user_items(mut self, items: UserItemMap) -> Result<Self> {
        let n = self.node_count();
        for (user, ids) in items.iter() {
            if let Some(bad) = ids.iter().find(|&&i| i as usize >= n) {
                return Err(Error::Consistency(format!(
                    "user {user} maps to node {bad} outside 0..{n}"
                )));
            }
        }
        self.user_items = Some(items);
        Ok(self)
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.vocab.len()
    }

    /// Number of edges; undirected edges are counted once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.neighbors.len()
        } else {
            self.neighbors.len() / 2
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.vocab[node as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    /// O(log deg) adjacency test on the sorted neighbor list.
    #[inline]
    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.neighbors(from).binary_search(&to).is_ok()
    }

    /// Edges as index pairs; undirected edges once, with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| self.directed || a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn user_items(&self) -> Option<&UserItemMap> {
        self.user_items.as_ref()
    }

    /// Map each node to itself, for graphs whose nodes are the users.
    pub fn self_item_map(&self) -> UserItemMap {
        let mut map = UserItemMap::new();
        for (i, name) in self.vocab.iter().enumerate() {
            map.insert(name.clone(), vec![i as NodeId]);
        }
        map
    }
}
