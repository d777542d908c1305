//! Per-user feature vectors, labelled train/val/test splits and the
//! two-layer classifier.

mod mlp;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::community::BinaryLabels;
use crate::error::{Error, Result};
use crate::graph::UserItemMap;
use crate::node2vec::EmbeddingMatrix;

pub use mlp::{
    cross_entropy, dropout_mask, loss_and_gradient, mlp_forward, predict, predict_one, train_classifier, Adam,
    EpochLoss, ForwardCache, MlpModel, MlpParams, TrainedClassifier,
};

pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct UserVector {
    pub user_id: String,
    pub features: Vec<f64>,
}

/// How a user's item vectors become one feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AssemblyMode {
    /// Top-K items by the user's frequency, concatenated and zero-padded.
    ConcatTopK(usize),
    Mean,
}

impl Default for AssemblyMode {
    fn default() -> Self {
        AssemblyMode::ConcatTopK(DEFAULT_TOP_K)
    }
}

impl AssemblyMode {
    pub fn output_dim(self, dim: usize) -> usize {
        match self {
            AssemblyMode::ConcatTopK(k) => k * dim,
            AssemblyMode::Mean => dim,
        }
    }
}

impl fmt::Display for AssemblyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssemblyMode::ConcatTopK(k) => write!(f, "concat_topk:{k}"),
            AssemblyMode::Mean => f.write_str("mean"),
        }
    }
}

impl FromStr for AssemblyMode {
    type Err = Error;

    /// `mean`, `concat_topk` (K = 5) or `concat_topk:K`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "mean" => Ok(AssemblyMode::Mean),
            None if s == "concat_topk" => Ok(AssemblyMode::default()),
            Some(("concat_topk", k)) => match k.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(AssemblyMode::ConcatTopK(k)),
                _ => Err(Error::invalid(format!("bad top-K in assembly mode {s:?}"))),
            },
            _ => Err(Error::invalid(format!(
                "unknown assembly mode {s:?} (expected mean, concat_topk or concat_topk:K)"
            ))),
        }
    }
}

impl TryFrom<String> for AssemblyMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AssemblyMode> for String {
    fn from(m: AssemblyMode) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledVectors {
    /// Sorted by user id.
    pub vectors: Vec<UserVector>,
    /// Users with no items.
    pub excluded: usize,
}

/// Build one vector per user. Item lists in `items` are in rank order
/// (frequency descending, ties by name) and index rows of `embeddings`.
pub fn assemble_user_vectors(
    embeddings: &EmbeddingMatrix,
    items: &UserItemMap,
    mode: AssemblyMode,
) -> Result<AssembledVectors> {
    let dim = embeddings.dim();
    let mut vectors = Vec::with_capacity(items.len());
    let mut excluded = 0;
    for (user, list) in items.iter() {
        if list.is_empty() {
            excluded += 1;
            continue;
        }
        if let Some(&bad) = list.iter().find(|&&i| i as usize >= embeddings.len()) {
            return Err(Error::Consistency(format!(
                "user {user} maps to item {bad}, but the embedding has {} rows",
                embeddings.len()
            )));
        }
        let mut features = vec![0.0; mode.output_dim(dim)];
        match mode {
            AssemblyMode::ConcatTopK(k) => {
                for (slot, &item) in list.iter().take(k).enumerate() {
                    features[slot * dim..(slot + 1) * dim].copy_from_slice(embeddings.vector(item as usize));
                }
            }
            AssemblyMode::Mean => {
                for &item in list {
                    for (f, v) in features.iter_mut().zip(embeddings.vector(item as usize)) {
                        *f += v;
                    }
                }
                let n = list.len() as f64;
                features.iter_mut().for_each(|f| *f /= n);
            }
        }
        vectors.push(UserVector {
            user_id: user.to_string(),
            features,
        });
    }
    Ok(AssembledVectors { vectors, excluded })
}

/// Keep the users that have a label; returns the vectors, their labels and
/// the number of unlabelled users dropped.
pub fn attach_labels(vectors: Vec<UserVector>, labels: &BinaryLabels) -> (Vec<UserVector>, Vec<u8>, usize) {
    let mut kept = Vec::with_capacity(vectors.len());
    let mut ys = Vec::with_capacity(vectors.len());
    let mut unlabelled = 0;
    for v in vectors {
        match labels.get(&v.user_id) {
            Some(y) => {
                ys.push(y);
                kept.push(v);
            }
            None => unlabelled += 1,
        }
    }
    (kept, ys, unlabelled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(Error::format(format!("unknown split {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub vectors: Vec<UserVector>,
    pub labels: Vec<u8>,
    pub split_of: Vec<Split>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.features.len())
    }

    /// Row indices of one split, in dataset order.
    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.split_of[i] == split).collect()
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        let mut sizes = [0; 3];
        for s in &self.split_of {
            sizes[*s as usize] += 1;
        }
        sizes
    }

    /// One `user<TAB>label<TAB>split<TAB>f1,f2,...` line per user.
    /// Features use the shortest round-trip representation.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.len() {
            let v = &self.vectors[i];
            let features: Vec<String> = v.features.iter().map(f64::to_string).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                v.user_id,
                self.labels[i],
                self.split_of[i].as_str(),
                features.join(",")
            )?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut ds = LabeledDataset {
            vectors: Vec::new(),
            labels: Vec::new(),
            split_of: Vec::new(),
        };
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::format(format!("dataset line {}: {what}", i + 1));
            let cols: Vec<&str> = line.split('\t').collect();
            let [user, label, split, features] = cols[..] else {
                return Err(bad("expected 4 tab-separated columns"));
            };
            let label = match label {
                "0" => 0,
                "1" => 1,
                _ => return Err(bad("label must be 0 or 1")),
            };
            let features = features
                .split(',')
                .map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("bad feature value"))?;
            if let Some(first) = ds.vectors.first() {
                if first.features.len() != features.len() {
                    return Err(Error::DimensionMismatch {
                        expected: first.features.len(),
                        got: features.len(),
                    });
                }
            }
            ds.vectors.push(UserVector {
                user_id: user.to_string(),
                features,
            });
            ds.labels.push(label);
            ds.split_of.push(split.parse()?);
        }
        Ok(ds)
    }
}

/// Seeded shuffle, then a contiguous cut: floor(n/10) users each to
/// validation and test, the rest to training.
pub fn split_dataset(vectors: Vec<UserVector>, labels: Vec<u8>, seed: u64) -> Result<LabeledDataset> {
    let n = vectors.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if n < 10 {
        return Err(Error::precondition(format!("need at least 10 labelled users, got {n}")));
    }
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(Error::precondition("both classes must be present"));
    }
    if let Some(v) = vectors.iter().find(|v| v.features.len() != vectors[0].features.len()) {
        return Err(Error::DimensionMismatch {
            expected: vectors[0].features.len(),
            got: v.features.len(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let held = n / 10;
    let n_train = n - 2 * held;
    let mut split_of = vec![Split::Train; n];
    for (rank, &i) in order.iter().enumerate() {
        split_of[i] = if rank < n_train {
            Split::Train
        } else if rank < n_train + held {
            Split::Val
        } else {
            Split::Test
        };
    }
    let train_classes: Vec<u8> = (0..n).filter(|&i| split_of[i] == Split::Train).map(|i| labels[i]).collect();
    if !(train_classes.contains(&0) && train_classes.contains(&1)) {
        return Err(Error::precondition("training split contains a single class"));
    }
    Ok(LabeledDataset {
        vectors,
        labels,
        split_of,
    })
}
