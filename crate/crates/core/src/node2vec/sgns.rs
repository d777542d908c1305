//! Skip-gram with negative sampling over walk corpora.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Node2vecParams, TrainingMode, WalkCorpus};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::linalg::{axpy, dot, log_sigmoid, sigmoid};

/// Slots in the unigram^0.75 negative-sampling table.
pub const NEGATIVE_TABLE_SIZE: usize = 10_000_000;

/// Stream id reserved for the trainer; walk streams use `(k << 32) | node`.
const TRAIN_STREAM: u64 = u64::MAX;
const INIT_STREAM: u64 = u64::MAX - 1;

/// Input ("in") vectors per node plus the output vectors used in training.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vec<String>,
    dim: usize,
    vectors: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Wrap row-major vectors; `vectors.len()` must be `vocab.len() * dim`.
    pub fn new(vocab: Vec<String>, dim: usize, vectors: Vec<f64>) -> Result<Self> {
        if vectors.len() != vocab.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: vocab.len() * dim,
                got: vectors.len(),
            });
        }
        Ok(EmbeddingMatrix {
            vocab,
            dim,
            vectors,
            context: Vec::new(),
        })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Output vector of a node; empty when loaded from a file.
    pub fn context_vector(&self, i: usize) -> Option<&[f64]> {
        self.context.get(i * self.dim..(i + 1) * self.dim)
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.vocab.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
    }

    /// Drop the training-only output vectors.
    pub fn without_context(mut self) -> Self {
        self.context = Vec::new();
        self
    }
}

/// Row access to the output matrix, so the same update code runs on a plain
/// slice and on the lock-free shared matrix.
trait ContextRows {
    fn dot_row(&self, row: usize, v: &[f64]) -> f64;
    /// acc += alpha * row
    fn accumulate(&self, row: usize, alpha: f64, acc: &mut [f64]);
    /// row += alpha * v
    fn update(&mut self, row: usize, alpha: f64, v: &[f64]);
}

struct DenseRows<'a> {
    data: &'a mut [f64],
    dim: usize,
}

impl ContextRows for DenseRows<'_> {
    #[inline]
    fn dot_row(&self, row: usize, v: &[f64]) -> f64 {
        dot(&self.data[row * self.dim..(row + 1) * self.dim], v)
    }

    #[inline]
    fn accumulate(&self, row: usize, alpha: f64, acc: &mut [f64]) {
        axpy(alpha, &self.data[row * self.dim..(row + 1) * self.dim], acc);
    }

    #[inline]
    fn update(&mut self, row: usize, alpha: f64, v: &[f64]) {
        axpy(alpha, v, &mut self.data[row * self.dim..(row + 1) * self.dim]);
    }
}

/// f64 bits in relaxed atomics: concurrent updates may be lost, never torn.
struct AtomicRows<'a> {
    data: &'a [AtomicU64],
    dim: usize,
}

impl AtomicRows<'_> {
    #[inline]
    fn load(&self, i: usize) -> f64 {
        f64::from_bits(self.data[i].load(Ordering::Relaxed))
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.load(row * self.dim + k);
        }
    }

    fn add_row(&self, row: usize, delta: &[f64]) {
        for (k, &d) in delta.iter().enumerate() {
            let i = row * self.dim + k;
            self.data[i].store((self.load(i) + d).to_bits(), Ordering::Relaxed);
        }
    }
}

impl ContextRows for AtomicRows<'_> {
    #[inline]
    fn dot_row(&self, row: usize, v: &[f64]) -> f64 {
        v.iter().enumerate().map(|(k, &x)| x * self.load(row * self.dim + k)).sum()
    }

    #[inline]
    fn accumulate(&self, row: usize, alpha: f64, acc: &mut [f64]) {
        for (k, a) in acc.iter_mut().enumerate() {
            *a += alpha * self.load(row * self.dim + k);
        }
    }

    #[inline]
    fn update(&mut self, row: usize, alpha: f64, v: &[f64]) {
        for (k, &x) in v.iter().enumerate() {
            let i = row * self.dim + k;
            self.data[i].store((self.load(i) + alpha * x).to_bits(), Ordering::Relaxed);
        }
    }
}

/// One SGD step on `-log σ(u_ctx·v) - Σ log σ(-u_neg·v)`. Targets are
/// `(row, is_positive)`. Output rows are updated with the pre-step center
/// vector, and the center receives the gradient accumulated against the
/// pre-step output rows. Returns `false` if a score was not finite.
#[inline]
fn step_inner<C: ContextRows>(
    center: &mut [f64],
    context: &mut C,
    targets: &[(usize, bool)],
    lr: f64,
    grad: &mut [f64],
) -> bool {
    grad.fill(0.0);
    for &(row, positive) in targets {
        let score = context.dot_row(row, center);
        if !score.is_finite() {
            return false;
        }
        let label = if positive { 1.0 } else { 0.0 };
        let g = lr * (label - sigmoid(score));
        context.accumulate(row, g, grad);
        context.update(row, g, center);
    }
    axpy(1.0, grad, center);
    true
}

/// Pairwise SGNS loss for one center vector against rows of the flat,
/// row-major output matrix `context`.
pub fn sgns_loss(center: &[f64], context: &[f64], targets: &[(usize, bool)]) -> f64 {
    let dim = center.len();
    targets
        .iter()
        .map(|&(row, positive)| {
            let s = dot(&context[row * dim..(row + 1) * dim], center);
            -log_sigmoid(if positive { s } else { -s })
        })
        .sum()
}

/// Apply one SGD step of learning rate `lr` in place, exactly as training
/// does. Errors if a score is not finite.
pub fn sgns_step(center: &mut [f64], context: &mut [f64], targets: &[(usize, bool)], lr: f64) -> Result<()> {
    let dim = center.len();
    let mut grad = vec![0.0; dim];
    let mut rows = DenseRows { data: context, dim };
    if step_inner(center, &mut rows, targets, lr, &mut grad) {
        Ok(())
    } else {
        Err(Error::Divergence {
            step: 0,
            what: "non-finite score".into(),
        })
    }
}

struct NegativeTable(Vec<u32>);

impl NegativeTable {
    fn new(counts: &[u64]) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let total: f64 = weights.iter().sum();
        let mut table = Vec::with_capacity(NEGATIVE_TABLE_SIZE);
        let mut node = 0usize;
        let mut cumulative = weights[0] / total;
        for slot in 0..NEGATIVE_TABLE_SIZE {
            table.push(node as u32);
            if (slot + 1) as f64 / NEGATIVE_TABLE_SIZE as f64 > cumulative && node + 1 < weights.len() {
                node += 1;
                cumulative += weights[node] / total;
                while weights[node] == 0.0 && node + 1 < weights.len() {
                    node += 1;
                    cumulative += weights[node] / total;
                }
            }
        }
        NegativeTable(table)
    }

    #[inline]
    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.0[rng.random_range(0..self.0.len())] as usize
    }
}

struct Schedule {
    initial_lr: f64,
    total_tokens: f64,
}

impl Schedule {
    /// Linear decay from the initial rate to a tenth of it.
    #[inline]
    fn lr(&self, processed: usize) -> f64 {
        let progress = (processed as f64 / self.total_tokens).min(1.0);
        self.initial_lr * (1.0 - 0.9 * progress)
    }
}

struct WalkTrainer<'a> {
    params: &'a Node2vecParams,
    table: &'a NegativeTable,
    schedule: &'a Schedule,
    targets: Vec<(usize, bool)>,
    grad: Vec<f64>,
}

impl WalkTrainer<'_> {
    /// Train on every (center, context) pair of one walk. `center_row`
    /// yields the mutable input vector of a node. Returns the number of
    /// pairs on success, or the pair offset where a score diverged.
    fn train_walk<R: Rng, C: ContextRows>(
        &mut self,
        walk: &[NodeId],
        processed: usize,
        rng: &mut R,
        center_row: &mut dyn FnMut(usize, &mut dyn FnMut(&mut [f64]) -> bool) -> bool,
        context: &mut C,
    ) -> std::result::Result<u64, u64> {
        let mut pairs = 0u64;
        let window = self.params.window;
        for (i, &center) in walk.iter().enumerate() {
            let lr = self.schedule.lr(processed + i);
            let b = if self.params.fixed_window {
                window
            } else {
                rng.random_range(1..=window)
            };
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(walk.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let ctx = walk[j] as usize;
                self.targets.clear();
                self.targets.push((ctx, true));
                for _ in 0..self.params.negatives {
                    let neg = self.table.sample(rng);
                    if neg != ctx {
                        self.targets.push((neg, false));
                    }
                }
                let targets = &self.targets;
                let grad = &mut self.grad;
                let ok = center_row(center as usize, &mut |v| step_inner(v, context, targets, lr, grad));
                if !ok {
                    return Err(pairs);
                }
                pairs += 1;
            }
        }
        Ok(pairs)
    }
}

fn node_counts(corpus: &WalkCorpus, n: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; n];
    for &v in corpus.walks.iter().flatten() {
        let slot = counts
            .get_mut(v as usize)
            .ok_or_else(|| Error::Consistency(format!("walk node {v} outside vocabulary of {n}")))?;
        *slot += 1;
    }
    Ok(counts)
}

/// Train SGNS embeddings for `vocab` from a walk corpus.
pub fn train_sgns(corpus: &WalkCorpus, vocab: &[String], params: &Node2vecParams) -> Result<EmbeddingMatrix> {
    params.validate()?;
    if corpus.token_count() == 0 {
        return Err(Error::precondition("walk corpus is empty"));
    }
    let n = vocab.len();
    let dim = params.dim;
    let counts = node_counts(corpus, n)?;
    let table = NegativeTable::new(&counts);

    let mut init_rng = ChaCha8Rng::seed_from_u64(params.seed);
    init_rng.set_stream(INIT_STREAM);
    let half = 0.5 / dim as f64;
    let mut input: Vec<f64> = (0..n * dim).map(|_| init_rng.random_range(-half..half)).collect();
    let mut context = vec![0.0; n * dim];

    let tokens = corpus.token_count();
    let schedule = Schedule {
        initial_lr: params.initial_lr,
        total_tokens: (tokens * params.epochs) as f64,
    };
    let diverged = |step: u64| Error::Divergence {
        step,
        what: "non-finite SGNS score".into(),
    };

    match params.mode {
        TrainingMode::Deterministic => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(TRAIN_STREAM);
            let mut trainer = WalkTrainer {
                params,
                table: &table,
                schedule: &schedule,
                targets: Vec::with_capacity(params.negatives + 1),
                grad: vec![0.0; dim],
            };
            let mut rows = DenseRows { data: &mut context, dim };
            let mut processed = 0usize;
            let mut steps = 0u64;
            for _epoch in 0..params.epochs {
                for walk in &corpus.walks {
                    let mut center_row = |c: usize, f: &mut dyn FnMut(&mut [f64]) -> bool| {
                        f(&mut input[c * dim..(c + 1) * dim])
                    };
                    match trainer.train_walk(walk, processed, &mut rng, &mut center_row, &mut rows) {
                        Ok(pairs) => steps += pairs,
                        Err(offset) => return Err(diverged(steps + offset)),
                    }
                    processed += walk.len();
                }
            }
        }
        TrainingMode::Parallel => {
            let shared_in: Vec<AtomicU64> = input.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
            let shared_ctx: Vec<AtomicU64> = context.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
            let chunk = 64usize;
            let offsets: Vec<usize> = corpus
                .walks
                .chunks(chunk)
                .scan(0usize, |acc, c| {
                    let start = *acc;
                    *acc += c.iter().map(Vec::len).sum::<usize>();
                    Some(start)
                })
                .collect();
            for epoch in 0..params.epochs {
                corpus
                    .walks
                    .par_chunks(chunk)
                    .zip(offsets.par_iter())
                    .enumerate()
                    .try_for_each(|(ci, (walks, &offset))| {
                        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ ((epoch as u64) << 40));
                        rng.set_stream(ci as u64);
                        let mut trainer = WalkTrainer {
                            params,
                            table: &table,
                            schedule: &schedule,
                            targets: Vec::with_capacity(params.negatives + 1),
                            grad: vec![0.0; dim],
                        };
                        let inputs = AtomicRows { data: &shared_in, dim };
                        let mut rows = AtomicRows { data: &shared_ctx, dim };
                        let mut local = vec![0.0; dim];
                        let mut before = vec![0.0; dim];
                        let mut processed = epoch * tokens + offset;
                        for walk in walks {
                            let mut center_row = |c: usize, f: &mut dyn FnMut(&mut [f64]) -> bool| {
                                inputs.read_row(c, &mut local);
                                before.copy_from_slice(&local);
                                let ok = f(&mut local);
                                for (l, b) in local.iter_mut().zip(&before) {
                                    *l -= b;
                                }
                                inputs.add_row(c, &local);
                                ok
                            };
                            trainer
                                .train_walk(walk, processed, &mut rng, &mut center_row, &mut rows)
                                .map_err(|offset| diverged(offset))?;
                            processed += walk.len();
                        }
                        Ok::<(), Error>(())
                    })?;
            }
            input = shared_in.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
            context = shared_ctx.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
        }
    }

    if let Some(bad) = input.iter().position(|x| !x.is_finite()) {
        return Err(Error::Divergence {
            step: 0,
            what: format!("non-finite embedding entry at row {}", bad / dim),
        });
    }
    Ok(EmbeddingMatrix {
        vocab: vocab.to_vec(),
        dim,
        vectors: input,
        context,
    })
}
