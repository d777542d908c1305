//! Reference labels: Louvain modularity clustering of the retweet network,
//! reduced to its two largest communities.

mod louvain;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub use louvain::{louvain_cluster, louvain_with_trace, LouvainTrace};

/// Assignment of every node to a community, with dense community indices
/// numbered by first appearance in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    community_of: Vec<u32>,
    num_communities: usize,
    modularity: f64,
}

impl Partition {
    /// Build a partition from arbitrary community labels; labels are
    /// renumbered densely and modularity is computed for `graph`.
    pub fn new(graph: &Graph, labels: &[u32]) -> Result<Self> {
        if labels.len() != graph.node_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.node_count(),
                got: labels.len(),
            });
        }
        let (community_of, num_communities) = densify(labels);
        let modularity = modularity_of(graph, &community_of, 1.0)?;
        Ok(Partition {
            community_of,
            num_communities,
            modularity,
        })
    }

    pub fn community_of(&self) -> &[u32] {
        &self.community_of
    }

    pub fn community(&self, node: NodeId) -> u32 {
        self.community_of[node as usize]
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    /// Node count per community.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &c in &self.community_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn write_tsv<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        for (v, &c) in self.community_of.iter().enumerate() {
            writeln!(out, "{}\t{c}", graph.name(v as NodeId))?;
        }
        Ok(())
    }
}

pub(crate) fn densify(labels: &[u32]) -> (Vec<u32>, usize) {
    let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next = 0u32;
    let dense = labels
        .iter()
        .map(|&l| {
            *remap.entry(l).or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    (dense, next as usize)
}

fn modularity_of(graph: &Graph, community_of: &[u32], resolution: f64) -> Result<f64> {
    if graph.is_directed() {
        return Err(Error::precondition("modularity is defined here for undirected graphs"));
    }
    let m = graph.edge_count() as f64;
    if m == 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let k = community_of.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut intra = vec![0.0f64; k];
    let mut total_degree = vec![0.0f64; k];
    for v in 0..graph.node_count() as NodeId {
        total_degree[community_of[v as usize] as usize] += graph.degree(v) as f64;
    }
    for (a, b) in graph.edges() {
        if community_of[a as usize] == community_of[b as usize] {
            intra[community_of[a as usize] as usize] += 1.0;
        }
    }
    Ok(intra
        .iter()
        .zip(&total_degree)
        .map(|(&e, &d)| e / m - resolution * (d / (2.0 * m)).powi(2))
        .sum())
}

/// Q = sum over communities of e_c/m - (d_c/2m)^2, recomputed by an edge scan.
pub fn modularity(graph: &Graph, partition: &Partition) -> Result<f64> {
    if partition.community_of.len() != graph.node_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.node_count(),
            got: partition.community_of.len(),
        });
    }
    modularity_of(graph, &partition.community_of, 1.0)
}

/// Two-class labels over users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLabels {
    pub label_of: BTreeMap<String, u8>,
    pub class_names: [String; 2],
    /// Users outside the two largest communities.
    pub dropped: usize,
}

impl BinaryLabels {
    pub fn get(&self, user: &str) -> Option<u8> {
        self.label_of.get(user).copied()
    }

    pub fn len(&self) -> usize {
        self.label_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label_of.is_empty()
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (user, label) in &self.label_of {
            writeln!(out, "{user}\t{label}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut label_of = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let parsed = line.split_once('\t').and_then(|(u, l)| match l {
                "0" => Some((u, 0u8)),
                "1" => Some((u, 1u8)),
                _ => None,
            });
            let (user, label) = parsed
                .ok_or_else(|| Error::format(format!("labels line {}: expected user<TAB>0|1", i + 1)))?;
            label_of.insert(user.to_string(), label);
        }
        Ok(BinaryLabels {
            label_of,
            class_names: default_class_names(),
            dropped: 0,
        })
    }
}

pub fn default_class_names() -> [String; 2] {
    ["community-0".to_string(), "community-1".to_string()]
}

/// Keep the nodes of the two largest communities: label 0 for the larger,
/// 1 for the smaller, ties going to the lower community index.
pub fn to_binary_labels(
    partition: &Partition,
    graph: &Graph,
    class_names: [String; 2],
) -> Result<BinaryLabels> {
    if partition.num_communities < 2 {
        return Err(Error::precondition(format!(
            "need at least two communities, found {}",
            partition.num_communities
        )));
    }
    let sizes = partition.sizes();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let (first, second) = (order[0] as u32, order[1] as u32);
    let mut label_of = BTreeMap::new();
    let mut dropped = 0;
    for (v, &c) in partition.community_of.iter().enumerate() {
        let name = graph.name(v as NodeId).to_string();
        if c == first {
            label_of.insert(name, 0);
        } else if c == second {
            label_of.insert(name, 1);
        } else {
            dropped += 1;
        }
    }
    Ok(BinaryLabels {
        label_of,
        class_names,
        dropped,
    })
}
