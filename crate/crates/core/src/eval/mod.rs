//! Classification metrics, evaluation reports and 2-D projections.

mod tsne;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{predict_one, LabeledDataset, MlpModel, Split};

pub use tsne::{tsne_project, Projection2D, TsneParams, TsneResult};

/// Counts with label 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn from_predictions(predicted: &[u8], actual: &[u8]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::DimensionMismatch {
                expected: actual.len(),
                got: predicted.len(),
            });
        }
        let mut cm = ConfusionMatrix::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (1, 1) => cm.tp += 1,
                (0, 0) => cm.tn += 1,
                (1, 0) => cm.fp += 1,
                (0, 1) => cm.fn_ += 1,
                _ => return Err(Error::precondition(format!("labels must be 0 or 1, got ({p}, {a})"))),
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total() == 0 {
        return Err(Error::precondition("confusion matrix is empty"));
    }
    Ok(ratio(cm.tp + cm.tn, cm.total()))
}

/// Per-class scores, index = class label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: [f64; 2],
    pub recall: [f64; 2],
    pub f1: [f64; 2],
}

/// Precision, recall and F1 for each class taken as positive, and their
/// unweighted F1 mean. Zero denominators give 0.
pub fn macro_f1(cm: &ConfusionMatrix) -> Result<(ClassScores, f64)> {
    if cm.total() == 0 {
        return Err(Error::precondition("confusion matrix is empty"));
    }
    // (true positives, predicted positives, actual positives) per class
    let counts = [(cm.tn, cm.tn + cm.fn_, cm.tn + cm.fp), (cm.tp, cm.tp + cm.fp, cm.tp + cm.fn_)];
    let mut scores = ClassScores {
        precision: [0.0; 2],
        recall: [0.0; 2],
        f1: [0.0; 2],
    };
    for (c, &(hit, predicted, actual)) in counts.iter().enumerate() {
        let p = ratio(hit, predicted);
        let r = ratio(hit, actual);
        scores.precision[c] = p;
        scores.recall[c] = r;
        scores.f1[c] = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    }
    let macro_f1 = (scores.f1[0] + scores.f1[1]) / 2.0;
    Ok((scores, macro_f1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub per_class: ClassScores,
    pub macro_f1: f64,
    pub timings_seconds: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        let accuracy = accuracy(&confusion)?;
        let (per_class, macro_f1) = macro_f1(&confusion)?;
        Ok(EvalReport {
            confusion,
            accuracy,
            per_class,
            macro_f1,
            timings_seconds: BTreeMap::new(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::format(format!("bad evaluation report: {e}")))
    }
}

/// Predict one split of the dataset and score it.
pub fn evaluate(model: &MlpModel, ds: &LabeledDataset, split: Split) -> Result<EvalReport> {
    let idx = ds.indices(split);
    if idx.is_empty() {
        return Err(Error::precondition(format!("{} split is empty", split.as_str())));
    }
    let mut predicted = Vec::with_capacity(idx.len());
    let mut actual = Vec::with_capacity(idx.len());
    for &i in &idx {
        predicted.push(predict_one(model, &ds.vectors[i].features)?);
        actual.push(ds.labels[i]);
    }
    EvalReport::from_confusion(ConfusionMatrix::from_predictions(&predicted, &actual)?)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{split_dataset, UserVector};

    /// Scores straight from (prediction, label) pairs.
    fn brute(pred: &[u8], gold: &[u8]) -> (f64, f64) {
        let n = pred.len() as f64;
        let acc = pred.iter().zip(gold).filter(|(p, g)| p == g).count() as f64 / n;
        let mut f1s = Vec::new();
        for c in [0u8, 1] {
            let hit = pred.iter().zip(gold).filter(|&(&p, &g)| p == c && g == c).count() as f64;
            let pp = pred.iter().filter(|&&p| p == c).count() as f64;
            let ap = gold.iter().filter(|&&g| g == c).count() as f64;
            let prec = if pp > 0.0 { hit / pp } else { 0.0 };
            let rec = if ap > 0.0 { hit / ap } else { 0.0 };
            f1s.push(if prec + rec > 0.0 { 2.0 * prec * rec / (prec + rec) } else { 0.0 });
        }
        (acc, (f1s[0] + f1s[1]) / 2.0)
    }

    #[test]
    fn worked_example() {
        let cm = ConfusionMatrix { tp: 3, tn: 4, fp: 2, fn_: 1 };
        assert_eq!(accuracy(&cm).unwrap(), 0.7);
        let (scores, m) = macro_f1(&cm).unwrap();
        assert!((scores.f1[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((scores.f1[0] - 8.0 / 11.0).abs() < 1e-12);
        assert!((m - 0.6970).abs() < 5e-5);
    }

    #[test]
    fn edge_cases() {
        assert_eq!(accuracy(&ConfusionMatrix { tp: 5, tn: 5, fp: 0, fn_: 0 }).unwrap(), 1.0);
        assert_eq!(accuracy(&ConfusionMatrix { tp: 0, tn: 0, fp: 5, fn_: 5 }).unwrap(), 0.0);
        assert!(accuracy(&ConfusionMatrix::default()).is_err());
        assert!(macro_f1(&ConfusionMatrix::default()).is_err());
        let (_, m) = macro_f1(&ConfusionMatrix { tp: 4, tn: 6, fp: 0, fn_: 0 }).unwrap();
        assert_eq!(m, 1.0);
    }

    #[test]
    fn constant_predictor_scores_one_third() {
        for n in [1u64, 5, 50] {
            let (_, m) = macro_f1(&ConfusionMatrix { tp: 0, tn: n, fp: 0, fn_: n }).unwrap();
            assert!((m - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..60);
            let bias = rng.random_range(0.0..1.0);
            let pred: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(bias))).collect();
            let gold: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let report = EvalReport::from_confusion(ConfusionMatrix::from_predictions(&pred, &gold).unwrap()).unwrap();
            let (acc, m) = brute(&pred, &gold);
            assert!((report.accuracy - acc).abs() <= 1e-12);
            assert!((report.macro_f1 - m).abs() <= 1e-12);
        }
    }

    #[test]
    fn swapped_predictor_complements_accuracy() {
        let gold: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pred: Vec<u8> = (0..40).map(|_| rng.random_range(0..2)).collect();
        let swapped: Vec<u8> = pred.iter().map(|p| 1 - p).collect();
        let a = accuracy(&ConfusionMatrix::from_predictions(&pred, &gold).unwrap()).unwrap();
        let b = accuracy(&ConfusionMatrix::from_predictions(&swapped, &gold).unwrap()).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_json_field_names() {
        let report = EvalReport::from_confusion(ConfusionMatrix { tp: 3, tn: 4, fp: 2, fn_: 1 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        for key in ["tp", "tn", "fp", "fn"] {
            assert!(v["confusion"][key].is_u64());
        }
        for key in ["precision", "recall", "f1"] {
            assert_eq!(v["per_class"][key].as_array().unwrap().len(), 2);
        }
        assert!(v["accuracy"].is_f64() && v["macro_f1"].is_f64() && v["timings_seconds"].is_object());
        assert_eq!(EvalReport::from_json(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn evaluate_with_oracle_model() {
        // A model whose second logit is x and first is 0 predicts 1 iff x > 0.
        let mut model = MlpModel::zeros(1, 1);
        model.w1_mut()[0] = 1.0;
        model.w2_mut().copy_from_slice(&[-1.0, 1.0]);
        let vectors: Vec<UserVector> = (0..40)
            .map(|i| UserVector {
                user_id: format!("u{i}"),
                features: vec![if i % 2 == 0 { 0.0 } else { 1.0 }],
            })
            .collect();
        let labels = (0..40).map(|i| (i % 2) as u8).collect();
        let ds = split_dataset(vectors, labels, 1).unwrap();
        let a = evaluate(&model, &ds, Split::Test).unwrap();
        assert_eq!(a.accuracy, 1.0);
        assert_eq!(a.macro_f1, 1.0);
        assert_eq!(a, evaluate(&model, &ds, Split::Test).unwrap());
        assert_eq!(a.accuracy, accuracy(&a.confusion).unwrap());
    }
}
