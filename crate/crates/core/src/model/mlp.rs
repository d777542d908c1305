//! input → hidden (ReLU, inverted dropout) → 2 logits, trained with Adam on
//! softmax cross-entropy.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, Split, UserVector};
use crate::error::{Error, Result};
use crate::linalg::dot;

const CHECKPOINT_MAGIC: &[u8; 8] = b"DVMLP\0\0\0";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub lr: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_dim: 64,
            dropout_rate: 0.5,
            batch_size: 32,
            epochs: 100,
            lr: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 1,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::invalid(msg)) };
        check(self.hidden_dim >= 1, "hidden_dim must be at least 1")?;
        check((0.0..1.0).contains(&self.dropout_rate), "dropout_rate must be in [0, 1)")?;
        check(self.batch_size >= 1, "batch_size must be at least 1")?;
        check(self.lr > 0.0 && self.lr.is_finite(), "lr must be positive")?;
        check((0.0..1.0).contains(&self.adam_beta1), "adam_beta1 must be in [0, 1)")?;
        check((0.0..1.0).contains(&self.adam_beta2), "adam_beta2 must be in [0, 1)")?;
        check(self.adam_eps > 0.0, "adam_eps must be positive")
    }
}

/// Parameters stored flat: W1 (hidden × input, row-major), b1, W2
/// (2 × hidden), b2.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    input_dim: usize,
    hidden_dim: usize,
    params: Vec<f64>,
}

impl MlpModel {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        MlpModel {
            input_dim,
            hidden_dim,
            params: vec![0.0; hidden_dim * input_dim + hidden_dim + 2 * hidden_dim + 2],
        }
    }

    /// Weights uniform in ±1/sqrt(fan_in), biases zero.
    pub fn init<R: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(input_dim, hidden_dim);
        let a1 = 1.0 / (input_dim.max(1) as f64).sqrt();
        let a2 = 1.0 / (hidden_dim as f64).sqrt();
        m.w1_mut().iter_mut().for_each(|w| *w = rng.random_range(-a1..a1));
        m.w2_mut().iter_mut().for_each(|w| *w = rng.random_range(-a2..a2));
        m
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offsets(&self) -> [usize; 4] {
        let w1 = self.hidden_dim * self.input_dim;
        [w1, w1 + self.hidden_dim, w1 + 3 * self.hidden_dim, self.params.len()]
    }

    pub fn w1(&self) -> &[f64] {
        &self.params[..self.offsets()[0]]
    }

    pub fn b1(&self) -> &[f64] {
        let o = self.offsets();
        &self.params[o[0]..o[1]]
    }

    pub fn w2(&self) -> &[f64] {
        let o = self.offsets();
        &self.params[o[1]..o[2]]
    }

    pub fn b2(&self) -> &[f64] {
        let o = self.offsets();
        &self.params[o[2]..]
    }

    pub fn w1_mut(&mut self) -> &mut [f64] {
        let o = self.offsets();
        &mut self.params[..o[0]]
    }

    pub fn b1_mut(&mut self) -> &mut [f64] {
        let o = self.offsets();
        &mut self.params[o[0]..o[1]]
    }

    pub fn w2_mut(&mut self) -> &mut [f64] {
        let o = self.offsets();
        &mut self.params[o[1]..o[2]]
    }

    pub fn b2_mut(&mut self) -> &mut [f64] {
        let o = self.offsets();
        &mut self.params[o[2]..]
    }

    /// Little-endian binary: magic, version, input and hidden dims, then
    /// every parameter as f64 bits.
    pub fn write_checkpoint<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(CHECKPOINT_MAGIC)?;
        out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        out.write_all(&(self.input_dim as u64).to_le_bytes())?;
        out.write_all(&(self.hidden_dim as u64).to_le_bytes())?;
        for p in &self.params {
            out.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut reader: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::format("not a classifier checkpoint"));
        }
        let mut b4 = [0u8; 4];
        reader.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != CHECKPOINT_VERSION {
            return Err(Error::format(format!("unsupported checkpoint version {version}")));
        }
        let mut b8 = [0u8; 8];
        reader.read_exact(&mut b8)?;
        let input_dim = u64::from_le_bytes(b8) as usize;
        reader.read_exact(&mut b8)?;
        let hidden_dim = u64::from_le_bytes(b8) as usize;
        let mut model = MlpModel::zeros(input_dim, hidden_dim);
        for p in model.params.iter_mut() {
            reader.read_exact(&mut b8)?;
            *p = f64::from_le_bytes(b8);
        }
        if reader.read(&mut b8)? != 0 {
            return Err(Error::format("trailing bytes after checkpoint"));
        }
        if model.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::format("checkpoint holds non-finite weights"));
        }
        Ok(model)
    }
}

/// Activations kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// W1·x + b1
    pub pre: Vec<f64>,
    /// ReLU(pre), times the mask when one was given.
    pub hidden: Vec<f64>,
}

/// Inverted-dropout mask: each unit is kept with probability 1 − rate and
/// scaled by 1/(1 − rate).
pub fn dropout_mask<R: Rng>(rng: &mut R, hidden_dim: usize, rate: f64) -> Vec<f64> {
    let keep = 1.0 - rate;
    (0..hidden_dim)
        .map(|_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
        .collect()
}

pub fn mlp_forward(model: &MlpModel, x: &[f64], mask: Option<&[f64]>) -> Result<([f64; 2], ForwardCache)> {
    if x.len() != model.input_dim {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim,
            got: x.len(),
        });
    }
    let (h, d) = (model.hidden_dim, model.input_dim);
    let w1 = model.w1();
    let pre: Vec<f64> = (0..h).map(|j| dot(&w1[j * d..(j + 1) * d], x) + model.b1()[j]).collect();
    let mut hidden: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
    if let Some(mask) = mask {
        for (a, m) in hidden.iter_mut().zip(mask) {
            *a *= m;
        }
    }
    let w2 = model.w2();
    let b2 = model.b2();
    let logits = [dot(&w2[..h], &hidden) + b2[0], dot(&w2[h..], &hidden) + b2[1]];
    Ok((logits, ForwardCache { pre, hidden }))
}

/// −log softmax(logits)[label], via log-sum-exp.
pub fn cross_entropy(logits: [f64; 2], label: u8) -> f64 {
    let m = logits[0].max(logits[1]);
    let lse = m + ((logits[0] - m).exp() + (logits[1] - m).exp()).ln();
    lse - logits[label as usize]
}

fn softmax(logits: [f64; 2]) -> [f64; 2] {
    let m = logits[0].max(logits[1]);
    let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
    let s = e[0] + e[1];
    [e[0] / s, e[1] / s]
}

/// Add d(loss)/d(params) × scale for one example into `grad` (same layout
/// as the model parameters).
fn backward(model: &MlpModel, x: &[f64], cache: &ForwardCache, logits: [f64; 2], label: u8, mask: Option<&[f64]>, scale: f64, grad: &mut [f64]) {
    let (h, d) = (model.hidden_dim, model.input_dim);
    let o = model.offsets();
    let p = softmax(logits);
    let dz = [scale * (p[0] - f64::from(label == 0)), scale * (p[1] - f64::from(label == 1))];
    let (gw1, rest) = grad.split_at_mut(o[0]);
    let (gb1, rest) = rest.split_at_mut(h);
    let (gw2, gb2) = rest.split_at_mut(2 * h);
    gb2[0] += dz[0];
    gb2[1] += dz[1];
    let w2 = model.w2();
    for j in 0..h {
        gw2[j] += dz[0] * cache.hidden[j];
        gw2[h + j] += dz[1] * cache.hidden[j];
        if cache.pre[j] <= 0.0 {
            continue;
        }
        let mut dh = dz[0] * w2[j] + dz[1] * w2[h + j];
        if let Some(mask) = mask {
            dh *= mask[j];
        }
        if dh == 0.0 {
            continue;
        }
        gb1[j] += dh;
        for (g, &xi) in gw1[j * d..(j + 1) * d].iter_mut().zip(x) {
            *g += dh * xi;
        }
    }
}

/// Mean cross-entropy over the examples and its gradient. `masks` gives one
/// dropout mask per example, or none for inference mode.
pub fn loss_and_gradient(model: &MlpModel, xs: &[&[f64]], labels: &[u8], masks: Option<&[Vec<f64>]>) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; model.params.len()];
    let scale = 1.0 / xs.len() as f64;
    let mut loss = 0.0;
    for (i, (&x, &y)) in xs.iter().zip(labels).enumerate() {
        let mask = masks.map(|m| m[i].as_slice());
        let (logits, cache) = mlp_forward(model, x, mask)?;
        loss += cross_entropy(logits, y);
        backward(model, x, &cache, logits, y, mask, scale, &mut grad);
    }
    Ok((loss * scale, grad))
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    pub fn new(n: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1,
            beta2,
            eps,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Mean training loss over the epoch's mini-batches (dropout active).
    pub train_loss: f64,
    /// Validation loss in inference mode after the epoch.
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    /// Snapshot with the lowest validation loss.
    pub model: MlpModel,
    pub curve: Vec<EpochLoss>,
    /// 1-based epoch of the snapshot; 0 when no epoch ran.
    pub best_epoch: usize,
}

fn mean_loss(model: &MlpModel, ds: &LabeledDataset, idx: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    for &i in idx {
        let (logits, _) = mlp_forward(model, &ds.vectors[i].features, None)?;
        total += cross_entropy(logits, ds.labels[i]);
    }
    Ok(total / idx.len() as f64)
}

pub fn train_classifier(ds: &LabeledDataset, params: &MlpParams) -> Result<TrainedClassifier> {
    params.validate()?;
    let train = ds.indices(Split::Train);
    let val = ds.indices(Split::Val);
    if train.is_empty() || val.is_empty() {
        return Err(Error::precondition("training and validation splits must be non-empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = MlpModel::init(ds.input_dim(), params.hidden_dim, &mut rng);
    let mut adam = Adam::new(model.params.len(), params.adam_beta1, params.adam_beta2, params.adam_eps);
    let mut best = (f64::INFINITY, model.clone(), 0);
    let mut curve = Vec::with_capacity(params.epochs);
    let mut order = train.clone();
    let mut grad = vec![0.0; model.params.len()];
    for epoch in 1..=params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            grad.fill(0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let x = &ds.vectors[i].features;
                let mask = (params.dropout_rate > 0.0).then(|| dropout_mask(&mut rng, model.hidden_dim, params.dropout_rate));
                let (logits, cache) = mlp_forward(&model, x, mask.as_deref())?;
                epoch_loss += cross_entropy(logits, ds.labels[i]);
                backward(&model, x, &cache, logits, ds.labels[i], mask.as_deref(), scale, &mut grad);
            }
            adam.step(&mut model.params, &grad, params.lr);
        }
        let train_loss = epoch_loss / train.len() as f64;
        let val_loss = mean_loss(&model, ds, &val)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Divergence {
                step: epoch as u64,
                what: "classifier loss is not finite".into(),
            });
        }
        log::debug!("epoch {epoch}: train {train_loss:.5} val {val_loss:.5}");
        curve.push(EpochLoss { epoch, train_loss, val_loss });
        if val_loss < best.0 {
            best = (val_loss, model.clone(), epoch);
        }
    }
    if params.epochs == 0 {
        return Ok(TrainedClassifier { model, curve, best_epoch: 0 });
    }
    Ok(TrainedClassifier {
        model: best.1,
        curve,
        best_epoch: best.2,
    })
}

/// Argmax of the logits; an exact tie goes to label 0.
pub fn predict_one(model: &MlpModel, x: &[f64]) -> Result<u8> {
    let (logits, _) = mlp_forward(model, x, None)?;
    Ok(u8::from(logits[1] > logits[0]))
}

pub fn predict(model: &MlpModel, vectors: &[UserVector]) -> Result<Vec<u8>> {
    vectors.iter().map(|v| predict_one(model, &v.features)).collect()
}

#[cfg(test)]
mod tests {
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_model(rng: &mut ChaCha8Rng, d: usize, h: usize) -> MlpModel {
        let mut m = MlpModel::zeros(d, h);
        m.params.iter_mut().for_each(|p| *p = rng.random_range(-1.0..1.0));
        m
    }

    #[test]
    fn zero_model_gives_even_odds() {
        let m = MlpModel::zeros(3, 4);
        let (logits, _) = mlp_forward(&m, &[1.0, 2.0, 3.0], None).unwrap();
        assert_eq!(logits, [0.0, 0.0]);
        assert_eq!(softmax(logits), [0.5, 0.5]);
        assert_eq!(cross_entropy(logits, 0), std::f64::consts::LN_2);
        assert_eq!(cross_entropy(logits, 1), std::f64::consts::LN_2);
    }

    #[test]
    fn hand_set_forward() {
        // W1 = [[1,-1],[0.5,2],[-1,-1]], b1 = [0,-1,0.5]
        // W2 = [[1,2,3],[-1,0,1]], b2 = [0.1,-0.2]
        let mut m = MlpModel::zeros(2, 3);
        m.w1_mut().copy_from_slice(&[1.0, -1.0, 0.5, 2.0, -1.0, -1.0]);
        m.b1_mut().copy_from_slice(&[0.0, -1.0, 0.5]);
        m.w2_mut().copy_from_slice(&[1.0, 2.0, 3.0, -1.0, 0.0, 1.0]);
        m.b2_mut().copy_from_slice(&[0.1, -0.2]);
        let x = [2.0, 0.5];
        // pre = [1.5, 1.0, -2.0] → h = [1.5, 1.0, 0.0]
        let (logits, cache) = mlp_forward(&m, &x, None).unwrap();
        assert_eq!(cache.pre, vec![1.5, 1.0, -2.0]);
        assert_eq!(logits, [1.5 + 2.0 + 0.1, -1.5 - 0.2]);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        assert!(matches!(
            mlp_forward(&MlpModel::zeros(3, 2), &[1.0], None),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn all_ones_mask_matches_inference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_model(&mut rng, 4, 6);
        let x = [0.3, -0.2, 0.9, 1.1];
        let mask = dropout_mask(&mut rng, 6, 0.0);
        assert_eq!(mlp_forward(&m, &x, Some(&mask)).unwrap(), mlp_forward(&m, &x, None).unwrap());
    }

    #[test]
    fn dropout_preserves_expected_activation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut m = random_model(&mut rng, 3, 8);
        m.b1_mut().iter_mut().for_each(|b| *b = b.abs() + 1.0);
        let x = [0.5, 0.5, 0.5];
        let (_, clean) = mlp_forward(&m, &x, None).unwrap();
        let trials = 20_000;
        let mut mean = vec![0.0; 8];
        for _ in 0..trials {
            let mask = dropout_mask(&mut rng, 8, 0.5);
            let (_, c) = mlp_forward(&m, &x, Some(&mask)).unwrap();
            for (a, h) in mean.iter_mut().zip(&c.hidden) {
                *a += h / trials as f64;
            }
        }
        for (a, h) in mean.iter().zip(&clean.hidden) {
            if *h > 0.0 {
                assert!((a - h).abs() / h < 0.02, "{a} vs {h}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (d, h) = (4, 5);
            let model = random_model(&mut rng, d, h);
            let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
            let xr: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
            let ys: Vec<u8> = (0..3).map(|_| rng.random_range(0..2)).collect();
            let (_, grad) = loss_and_gradient(&model, &xr, &ys, None).unwrap();
            let eps = 1e-5;
            for k in 0..model.params.len() {
                let mut plus = model.clone();
                let mut minus = model.clone();
                plus.params[k] += eps;
                minus.params[k] -= eps;
                let fd = (loss_and_gradient(&plus, &xr, &ys, None).unwrap().0
                    - loss_and_gradient(&minus, &xr, &ys, None).unwrap().0)
                    / (2.0 * eps);
                let denom = fd.abs().max(grad[k].abs());
                if denom < 1e-9 {
                    continue;
                }
                assert!((fd - grad[k]).abs() / denom < 1e-5, "param {k}: {fd} vs {}", grad[k]);
            }
        }
    }

    #[test]
    fn zero_gradient_adam_step_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_model(&mut rng, 3, 3);
        let mut params = m.params.clone();
        let mut adam = Adam::new(params.len(), 0.9, 0.999, 1e-8);
        let zero = vec![0.0; params.len()];
        adam.step(&mut params, &zero, 1e-3);
        assert_eq!(params, m.params);
    }

    #[test]
    fn predict_ties_go_to_zero() {
        let mut m = MlpModel::zeros(1, 1);
        assert_eq!(predict_one(&m, &[1.0]).unwrap(), 0);
        m.b2_mut().copy_from_slice(&[2.0, -1.0]);
        assert_eq!(predict_one(&m, &[1.0]).unwrap(), 0);
        m.b2_mut().copy_from_slice(&[-1.0, 2.0]);
        assert_eq!(predict_one(&m, &[1.0]).unwrap(), 1);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_model(&mut rng, 7, 3);
        let mut buf = Vec::new();
        m.write_checkpoint(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 16 + 8 * m.params.len());
        let back = MlpModel::read_checkpoint(&buf[..]).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        back.write_checkpoint(&mut again).unwrap();
        assert_eq!(again, buf);
        assert!(MlpModel::read_checkpoint(&buf[..buf.len() - 1]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(MlpModel::read_checkpoint(&long[..]).is_err());
        assert!(MlpModel::read_checkpoint(&b"garbage-garbage"[..]).is_err());
    }

    pub(crate) fn blobs(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let y = (i % 2) as u8;
            let c = if y == 0 { -2.0 } else { 2.0 };
            vectors.push(UserVector {
                user_id: format!("u{i}"),
                features: vec![c + rng.random_range(-1.0..1.0), c + rng.random_range(-1.0..1.0)],
            });
            labels.push(y);
        }
        super::super::split_dataset(vectors, labels, seed).unwrap()
    }

    #[test]
    fn separable_blobs_are_learned() {
        let ds = blobs(200, 6);
        let params = MlpParams { epochs: 50, ..Default::default() };
        let trained = train_classifier(&ds, &params).unwrap();
        let train = ds.indices(Split::Train);
        let correct = train
            .iter()
            .filter(|&&i| predict_one(&trained.model, &ds.vectors[i].features).unwrap() == ds.labels[i])
            .count();
        assert!(correct as f64 / train.len() as f64 >= 0.99);
        assert_eq!(trained.curve.len(), 50);
        let best_val = mean_loss(&trained.model, &ds, &ds.indices(Split::Val)).unwrap();
        assert!(trained.curve.iter().all(|e| best_val <= e.val_loss));
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let ds = blobs(40, 7);
        let params = MlpParams { epochs: 0, ..Default::default() };
        let trained = train_classifier(&ds, &params).unwrap();
        let init = MlpModel::init(2, 64, &mut ChaCha8Rng::seed_from_u64(params.seed));
        assert_eq!(trained.model, init);
        assert!(trained.curve.is_empty());
    }

    #[test]
    fn batch_prediction_matches_single() {
        let ds = blobs(60, 8);
        let trained = train_classifier(&ds, &MlpParams { epochs: 3, ..Default::default() }).unwrap();
        let batch = predict(&trained.model, &ds.vectors).unwrap();
        for (v, p) in ds.vectors.iter().zip(batch) {
            assert_eq!(predict_one(&trained.model, &v.features).unwrap(), p);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let ds = blobs(60, 9);
        let params = MlpParams { epochs: 5, ..Default::default() };
        let a = train_classifier(&ds, &params).unwrap();
        let b = train_classifier(&ds, &params).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.curve, b.curve);
    }
}
