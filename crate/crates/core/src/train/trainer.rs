use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, update_average, AdamConfig, AdamState};
use super::data::{balanced_batches, Split};
use super::descriptor::Selection;
use super::metrics::{accuracy, confusion_matrix, macro_f1, Evaluation};
use super::model::{argmax, forward_cached, sample_gradient, PreparedGraph};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::graph::FeatureGraph;
use crate::layers::cross_entropy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    /// Seeds batch shuffling.
    pub seed: u64,
    pub selection: Selection,
    /// Rate of the running parameter average; when set, the averaged
    /// parameters are the ones evaluated and returned.
    pub average_rate: Option<f64>,
    /// Finite-difference step for the non-head parameters.
    pub fd_step: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 60,
            batch_size: 3,
            adam: AdamConfig::default(),
            seed: 0,
            selection: Selection::LastBest,
            average_rate: None,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean loss over the training set after the epoch's updates.
    pub train_loss: f64,
    pub validation_f1: f64,
    pub validation_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    /// Parameters of the selected epoch (the initial ones when `epochs == 0`).
    pub best: ModelParams,
    pub best_epoch: usize,
    pub best_score: f64,
    pub initial_train_loss: f64,
    pub history: Vec<EpochRecord>,
}

fn prepare_all(
    params: &ModelParams,
    data: &[FeatureGraph],
    indices: &[usize],
) -> Result<Vec<(usize, PreparedGraph)>> {
    indices
        .iter()
        .map(|&i| {
            let g = data.get(i).ok_or(Error::ShapeMismatch {
                expected: data.len(),
                found: i + 1,
            })?;
            PreparedGraph::new(&params.descriptor, g)
                .map(|p| (i, p))
                .map_err(|e| e.in_sample(i))
        })
        .collect()
}

fn evaluate_prepared(
    params: &ModelParams,
    samples: &[(usize, PreparedGraph)],
) -> Result<Evaluation> {
    let classes = params.descriptor.classes;
    let mut labels = Vec::with_capacity(samples.len());
    let mut preds = Vec::with_capacity(samples.len());
    let mut loss = 0.0;
    for (i, s) in samples {
        let label = s
            .label()
            .ok_or_else(|| Error::InvalidParams("sample has no label".into()).in_sample(*i))?;
        if label >= classes {
            return Err(Error::LabelOutOfRange { label, classes }.in_sample(*i));
        }
        let lp = forward_cached(params, s)
            .map_err(|e| e.in_sample(*i))?
            .log_probs;
        loss += cross_entropy(&lp, label)?;
        labels.push(label);
        preds.push(argmax(&lp));
    }
    let confusion = confusion_matrix(&labels, &preds, classes);
    Ok(Evaluation {
        accuracy: accuracy(&confusion),
        macro_f1: macro_f1(&confusion),
        confusion,
        mean_loss: loss / samples.len().max(1) as f64,
    })
}

/// Accuracy, macro-F1, confusion matrix and mean loss on `data[indices]`.
pub fn evaluate(
    params: &ModelParams,
    data: &[FeatureGraph],
    indices: &[usize],
) -> Result<Evaluation> {
    if indices.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    evaluate_prepared(params, &prepare_all(params, data, indices)?)
}

/// Trains with ADAM on balanced mini-batches, scoring the validation set
/// by macro-F1 after every epoch and keeping the selected epoch's parameters.
pub fn train(
    initial: ModelParams,
    data: &[FeatureGraph],
    split: &Split,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with_callback(initial, data, split, cfg, |_| {})
}

pub fn train_with_callback(
    initial: ModelParams,
    data: &[FeatureGraph],
    split: &Split,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    if split.train.is_empty() || split.validation.is_empty() {
        return Err(Error::Empty("training or validation split"));
    }
    let train_set = prepare_all(&initial, data, &split.train)?;
    let val_set = prepare_all(&initial, data, &split.validation)?;
    let labels: Vec<usize> = data.iter().map(|g| g.label.unwrap_or(usize::MAX)).collect();
    if let Some(&(i, _)) = train_set.iter().find(|(i, _)| labels[*i] == usize::MAX) {
        return Err(Error::InvalidParams("training sample has no label".into()).in_sample(i));
    }
    let position: alloc::collections::BTreeMap<usize, usize> = train_set
        .iter()
        .enumerate()
        .map(|(k, (i, _))| (*i, k))
        .collect();

    let mut params = initial.clone();
    let mut state = AdamState::new(params.len());
    if let Some(rate) = cfg.average_rate {
        state = state.with_averaging(params.values(), rate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial_train_loss = evaluate_prepared(&params, &train_set)?.mean_loss;
    let mut outcome = TrainOutcome {
        best: initial,
        best_epoch: 0,
        best_score: f64::NEG_INFINITY,
        initial_train_loss,
        history: Vec::with_capacity(cfg.epochs),
    };

    for epoch in 1..=cfg.epochs {
        for batch in balanced_batches(&split.train, &labels, cfg.batch_size, &mut rng) {
            let mut grad = vec![0.0; params.len()];
            for i in &batch {
                let sample = &train_set[position[i]].1;
                let (_, g) =
                    sample_gradient(&params, sample, cfg.fd_step).map_err(|e| e.in_sample(*i))?;
                grad.iter_mut()
                    .zip(&g)
                    .for_each(|(a, b)| *a += b / batch.len() as f64);
            }
            adam_step(&mut state, params.values_mut(), &grad, &cfg.adam);
            params.project();
            update_average(&mut state, params.values());
        }
        let current = match &state.average {
            Some(avg) => ModelParams::unflatten(params.descriptor.clone(), avg.clone())?,
            None => params.clone(),
        };
        let train_eval = evaluate_prepared(&current, &train_set)?;
        let val = evaluate_prepared(&current, &val_set)?;
        let record = EpochRecord {
            epoch,
            train_loss: train_eval.mean_loss,
            validation_f1: val.macro_f1,
            validation_accuracy: val.accuracy,
        };
        on_epoch(&record);
        let better = match cfg.selection {
            Selection::LastBest => val.macro_f1 >= outcome.best_score,
            Selection::FirstBest => val.macro_f1 > outcome.best_score,
        };
        if better {
            outcome.best = current;
            outcome.best_epoch = epoch;
            outcome.best_score = val.macro_f1;
        }
        outcome.history.push(record);
    }
    Ok(outcome)
}
