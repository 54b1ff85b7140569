use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Accuracy, macro-F1 and the confusion matrix (`confusion[true][predicted]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub confusion: Vec<Vec<usize>>,
    pub mean_loss: f64,
}

/// Confusion matrix of `labels` against `predictions`.
pub fn confusion_matrix(
    labels: &[usize],
    predictions: &[usize],
    classes: usize,
) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; classes]; classes];
    for (&l, &p) in labels.iter().zip(predictions) {
        m[l][p] += 1;
    }
    m
}

/// Unweighted mean of the per-class F1 scores. Classes that neither occur nor
/// are predicted are left out; a class that occurs but is never predicted
/// scores zero.
pub fn macro_f1(confusion: &[Vec<usize>]) -> f64 {
    let k = confusion.len();
    let mut total = 0.0;
    let mut counted = 0;
    for c in 0..k {
        let tp = confusion[c][c];
        let actual: usize = confusion[c].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[c]).sum();
        if actual == 0 && predicted == 0 {
            continue;
        }
        counted += 1;
        // F1 = 2TP / (2TP + FP + FN) = 2TP / (actual + predicted)
        total += 2.0 * tp as f64 / (actual + predicted) as f64;
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

pub fn accuracy(confusion: &[Vec<usize>]) -> f64 {
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..confusion.len()).map(|c| confusion[c][c]).sum();
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}
