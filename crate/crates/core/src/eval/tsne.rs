//! Exact t-SNE.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::UserVector;

const EXAGGERATION: f64 = 12.0;
const EXAGGERATION_ITERS: usize = 250;
const MOMENTUM_SWITCH: usize = 250;
const ENTROPY_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsneParams {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TsneParams {
    fn default() -> Self {
        TsneParams {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub user_ids: Vec<String>,
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<u8>,
}

impl Projection2D {
    /// `user<TAB>x<TAB>y<TAB>label` per point.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for ((u, p), l) in self.user_ids.iter().zip(&self.points).zip(&self.labels) {
            writeln!(out, "{u}\t{}\t{}\t{l}", p[0], p[1])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TsneResult {
    pub projection: Projection2D,
    /// Entropy (nats) of each point's conditional distribution.
    pub entropies: Vec<f64>,
    /// ln(perplexity)
    pub target_entropy: f64,
    pub kl_initial: f64,
    pub kl_final: f64,
}

fn squared_distances(x: &[&[f64]]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = x[i].iter().zip(x[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            d[i * n + j] = s;
            d[j * n + i] = s;
        }
    }
    d
}

/// Conditional probabilities of row `i` for precision `beta`, written into
/// `p`; returns the entropy.
fn conditional_row(d: &[f64], i: usize, beta: f64, p: &mut [f64]) -> f64 {
    let n = p.len();
    let dmin = (0..n).filter(|&j| j != i).map(|j| d[j]).fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    let mut weighted = 0.0;
    for j in 0..n {
        if j == i {
            p[j] = 0.0;
            continue;
        }
        let shifted = d[j] - dmin;
        p[j] = (-beta * shifted).exp();
        sum += p[j];
        weighted += shifted * p[j];
    }
    p.iter_mut().for_each(|v| *v /= sum);
    sum.ln() + beta * weighted / sum
}

/// Binary search each point's Gaussian precision so its conditional
/// entropy equals ln(perplexity). Returns P (row-conditional) and the
/// entropies reached.
fn calibrate(d: &[f64], n: usize, perplexity: f64) -> (Vec<f64>, Vec<f64>) {
    let target = perplexity.ln();
    let mut p = vec![0.0; n * n];
    let mut entropies = vec![0.0; n];
    for i in 0..n {
        let row_d = &d[i * n..(i + 1) * n];
        let row = &mut p[i * n..(i + 1) * n];
        let (mut beta, mut lo, mut hi) = (1.0, 0.0, f64::INFINITY);
        let mut h = conditional_row(row_d, i, beta, row);
        for _ in 0..500 {
            if (h - target).abs() < ENTROPY_TOL {
                break;
            }
            if h > target {
                lo = beta;
                beta = if hi.is_infinite() { beta * 2.0 } else { (beta + hi) / 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
            h = conditional_row(row_d, i, beta, row);
        }
        entropies[i] = h;
    }
    (p, entropies)
}

fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
                sum += num[i * n + j];
            }
        }
    }
    let mut kl = 0.0;
    for k in 0..n * n {
        if p[k] > 0.0 && k / n != k % n {
            kl += p[k] * (p[k] / (num[k] / sum).max(1e-300)).ln();
        }
    }
    kl
}

/// Project feature vectors to 2-D. Needs at least 3 × perplexity points.
pub fn tsne_project(vectors: &[UserVector], labels: &[u8], params: &TsneParams) -> Result<TsneResult> {
    let n = vectors.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if !(params.perplexity > 0.0) || !(params.learning_rate > 0.0) {
        return Err(Error::invalid("perplexity and learning rate must be positive"));
    }
    if (n as f64) < 3.0 * params.perplexity {
        return Err(Error::precondition(format!(
            "t-SNE with perplexity {} needs at least {} points, got {n}",
            params.perplexity,
            (3.0 * params.perplexity).ceil()
        )));
    }
    if vectors.iter().any(|v| v.features.iter().any(|x| !x.is_finite())) {
        return Err(Error::precondition("t-SNE input has non-finite features"));
    }
    let x: Vec<&[f64]> = vectors.iter().map(|v| v.features.as_slice()).collect();
    let d = squared_distances(&x);
    let (cond, entropies) = calibrate(&d, n, params.perplexity);
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / (2.0 * n as f64)).max(1e-12);
        }
        p[i * n + i] = 0.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
    let kl_initial = kl_divergence(&p, &y);

    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut num = vec![0.0; n * n];
    let mut grad = vec![[0.0; 2]; n];
    for iter in 0..params.iterations {
        let exaggeration = if iter < EXAGGERATION_ITERS { EXAGGERATION } else { 1.0 };
        let momentum = if iter < MOMENTUM_SWITCH { 0.5 } else { 0.8 };
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                let q = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = q;
                num[j * n + i] = q;
                sum += 2.0 * q;
            }
        }
        for i in 0..n {
            let mut g = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = num[i * n + j];
                let mult = (exaggeration * p[i * n + j] - q / sum) * q;
                g[0] += mult * (y[i][0] - y[j][0]);
                g[1] += mult * (y[i][1] - y[j][1]);
            }
            grad[i] = [4.0 * g[0], 4.0 * g[1]];
        }
        for i in 0..n {
            for k in 0..2 {
                gains[i][k] = if (grad[i][k] > 0.0) != (update[i][k] > 0.0) {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(0.01)
                };
                update[i][k] = momentum * update[i][k] - params.learning_rate * gains[i][k] * grad[i][k];
                y[i][k] += update[i][k];
            }
        }
        let mean = y.iter().fold([0.0; 2], |m, v| [m[0] + v[0], m[1] + v[1]]);
        for v in y.iter_mut() {
            v[0] -= mean[0] / n as f64;
            v[1] -= mean[1] / n as f64;
        }
    }
    if y.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            step: params.iterations as u64,
            what: "t-SNE coordinates are not finite".into(),
        });
    }
    let kl_final = kl_divergence(&p, &y);
    Ok(TsneResult {
        projection: Projection2D {
            user_ids: vectors.iter().map(|v| v.user_id.clone()).collect(),
            points: y,
            labels: labels.to_vec(),
        },
        entropies,
        target_entropy: params.perplexity.ln(),
        kl_initial,
        kl_final,
    })
}
