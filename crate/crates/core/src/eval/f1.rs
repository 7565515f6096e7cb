//! Multi-class F1 over the three ternary answer classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::data::Answer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Unweighted mean of per-class F1 over classes present in either the
    /// prediction or the truth.
    Macro,
    /// Global counts; equals accuracy for single-label data.
    Micro,
    /// Per-class F1 weighted by true support.
    Weighted,
}

/// 3×3 confusion matrix, `counts[truth][pred]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub counts: [[u64; 3]; 3],
}

impl Confusion {
    pub fn from_pairs<I: IntoIterator<Item = (Answer, Answer)>>(pairs: I) -> Self {
        let mut c = Confusion::default();
        for (pred, truth) in pairs {
            c.add(pred, truth);
        }
        c
    }

    pub fn add(&mut self, pred: Answer, truth: Answer) {
        self.counts[truth as usize][pred as usize] += 1;
    }

    pub fn merge(&mut self, other: &Confusion) {
        for t in 0..3 {
            for p in 0..3 {
                self.counts[t][p] += other.counts[t][p];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn tp(&self, k: usize) -> u64 {
        self.counts[k][k]
    }

    fn support(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    fn predicted(&self, k: usize) -> u64 {
        (0..3).map(|t| self.counts[t][k]).sum()
    }

    /// F1 of class `k`: `2 tp / (2 tp + fp + fn)`, zero when undefined.
    pub fn class_f1(&self, k: usize) -> f64 {
        let denom = self.support(k) + self.predicted(k);
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp(k) as f64 / denom as f64
        }
    }

    pub fn f1(&self, averaging: Averaging) -> Result<f64, EvalError> {
        let total = self.total();
        if total == 0 {
            return Err(EvalError::EmptyIntersection);
        }
        Ok(match averaging {
            Averaging::Micro => (0..3).map(|k| self.tp(k)).sum::<u64>() as f64 / total as f64,
            Averaging::Macro => {
                let present: Vec<usize> = (0..3).filter(|&k| self.support(k) + self.predicted(k) > 0).collect();
                present.iter().map(|&k| self.class_f1(k)).sum::<f64>() / present.len() as f64
            }
            Averaging::Weighted => {
                (0..3).map(|k| self.class_f1(k) * self.support(k) as f64).sum::<f64>() / total as f64
            }
        })
    }
}

/// F1 over agents present in both maps.
pub fn f1_score<K: Ord>(
    pred: &BTreeMap<K, Answer>,
    truth: &BTreeMap<K, Answer>,
    averaging: Averaging,
) -> Result<f64, EvalError> {
    let pairs = truth.iter().filter_map(|(k, t)| pred.get(k).map(|p| (*p, *t)));
    Confusion::from_pairs(pairs).f1(averaging)
}
