use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::PredictorError;
use crate::lstm::{argmax, batch_gradients, DropoutMask, LstmGradients, LstmModel};
use crate::metrics::{evaluate_levels, PredictionReport};
use crate::pipeline::SlotDataset;
use crate::quantizer::LevelDictionary;
use crate::window::Standardizer;

/// Optimizer and protocol settings. Defaults follow the bench setup: batch
/// 32, cross-entropy, Adam(0.9, 0.999, 1e-8), 128 hidden units, dropout 0.5,
/// 10 folds.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub folds: usize,
    /// Contiguous (blocked) folds by default; shuffled folds optionally.
    pub shuffled_folds: bool,
    pub hidden: usize,
    pub dropout: f64,
    pub seed: u64,
    /// Train fraction for the holdout protocol.
    pub holdout_train_frac: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 20,
            folds: 10,
            shuffled_folds: false,
            hidden: 128,
            dropout: 0.5,
            seed: 0,
            holdout_train_frac: 0.7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PredictorError> {
        if self.batch_size == 0 || self.epochs == 0 || self.hidden == 0 {
            return Err(PredictorError::BadConfig(
                "batch_size, epochs and hidden must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(PredictorError::BadConfig("learning rate must be positive".into()));
        }
        if self.folds < 2 {
            return Err(PredictorError::BadConfig("need at least 2 folds".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(PredictorError::BadConfig("dropout must lie in [0, 1)".into()));
        }
        if !(self.holdout_train_frac > 0.0 && self.holdout_train_frac < 1.0) {
            return Err(PredictorError::BadConfig("train fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, cfg: &TrainConfig, params: &mut [&mut Vec<f64>], grads: &[&Vec<f64>]) {
        self.t += 1;
        let lr_t = cfg.learning_rate * (1.0 - cfg.beta2.powi(self.t)).sqrt()
            / (1.0 - cfg.beta1.powi(self.t));
        let mut offset = 0;
        for (p, g) in params.iter_mut().zip(grads) {
            for (i, (pv, gv)) in p.iter_mut().zip(g.iter()).enumerate() {
                let k = offset + i;
                self.m[k] = cfg.beta1 * self.m[k] + (1.0 - cfg.beta1) * gv;
                self.v[k] = cfg.beta2 * self.v[k] + (1.0 - cfg.beta2) * gv * gv;
                *pv -= lr_t * self.m[k] / (self.v[k].sqrt() + cfg.epsilon);
            }
            offset += p.len();
        }
    }
}

fn apply_adam(model: &mut LstmModel, opt: &mut Adam, cfg: &TrainConfig, grads: &LstmGradients) {
    let LstmModel {
        w_ih,
        w_hh,
        b,
        w_out,
        b_out,
        ..
    } = model;
    opt.step(
        cfg,
        &mut [w_ih, w_hh, b, w_out, b_out],
        &[&grads.w_ih, &grads.w_hh, &grads.b, &grads.w_out, &grads.b_out],
    );
}

/// Trains one LSTM classifier on pre-standardized blocks. Deterministic
/// given `config.seed`: initialization, epoch shuffles and dropout masks all
/// derive from it.
pub fn train_classifier(
    blocks: &[Vec<f64>],
    labels: &[usize],
    input_dim: usize,
    window: usize,
    n_classes: usize,
    config: &TrainConfig,
) -> Result<LstmModel, PredictorError> {
    config.validate()?;
    if blocks.is_empty() {
        return Err(PredictorError::EmptyTraining);
    }
    if blocks.len() != labels.len() {
        return Err(PredictorError::LengthMismatch(blocks.len(), labels.len()));
    }
    let mut model = LstmModel::init(
        input_dim,
        window,
        config.hidden,
        n_classes,
        config.dropout,
        config.seed,
    );
    let mut opt = Adam::new(model.n_parameters());
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5u64));
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0xDu64));

    for _epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(config.batch_size) {
            let batch_blocks: Vec<&[f64]> = chunk.iter().map(|&i| blocks[i].as_slice()).collect();
            let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let mask = if config.dropout > 0.0 {
                Some(DropoutMask::draw(
                    chunk.len(),
                    config.hidden,
                    config.dropout,
                    &mut dropout_rng,
                ))
            } else {
                None
            };
            let (_, grads) =
                batch_gradients(&model, &batch_blocks, &batch_labels, mask.as_ref())?;
            apply_adam(&mut model, &mut opt, config, &grads);
        }
    }
    Ok(model)
}

/// Out-of-sample predictions of one slot, window-aligned.
#[derive(Debug, Clone)]
pub struct SlotPredictions {
    /// Window indices (into the truth series) of the evaluated windows.
    pub window_indices: Vec<usize>,
    pub predicted_levels: Vec<usize>,
    pub true_levels: Vec<usize>,
}

/// One trained slot: the model plus everything needed to reproduce its
/// inputs and decode its outputs.
#[derive(Debug, Clone)]
pub struct TrainedSlot {
    pub dataset_meta: crate::pipeline::SlotSpec,
    pub model: LstmModel,
    pub standardizer: Standardizer,
    pub dictionary: LevelDictionary,
    pub report: PredictionReport,
    pub predictions: SlotPredictions,
}

/// Blocked or shuffled fold assignment.
fn fold_assignment(n: usize, folds: usize, shuffled: bool, seed: u64) -> Vec<usize> {
    let mut assign: Vec<usize> = (0..n).map(|i| i * folds / n).collect();
    if shuffled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0xF0));
        assign.shuffle(&mut rng);
    }
    assign
}

/// Per-fold evaluation report of a cross-validated slot.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub fold_reports: Vec<PredictionReport>,
    pub mean_tpr: f64,
    pub mean_rmse: f64,
    pub predictions: SlotPredictions,
}

/// K-fold cross-validation of one slot. Quantizer and standardizer are
/// refitted on each fold's training part; every window receives exactly one
/// out-of-fold prediction.
pub fn cross_validate(slot: &SlotDataset, config: &TrainConfig) -> Result<CvReport, PredictorError> {
    config.validate()?;
    let n = slot.blocks.len();
    if n < config.folds {
        return Err(PredictorError::BadConfig(format!(
            "{n} windows cannot fill {} folds",
            config.folds
        )));
    }
    let assign = fold_assignment(n, config.folds, config.shuffled_folds, config.seed);
    let mut fold_reports = Vec::with_capacity(config.folds);
    let mut all = SlotPredictions {
        window_indices: Vec::with_capacity(n),
        predicted_levels: Vec::with_capacity(n),
        true_levels: Vec::with_capacity(n),
    };
    for fold in 0..config.folds {
        let train_idx: Vec<usize> = (0..n).filter(|&i| assign[i] != fold).collect();
        let test_idx: Vec<usize> = (0..n).filter(|&i| assign[i] == fold).collect();
        let trained = fit_split(slot, config, &train_idx, &test_idx, fold as u64)?;
        fold_reports.push(trained.report.clone());
        all.window_indices.extend(&trained.predictions.window_indices);
        all.predicted_levels.extend(&trained.predictions.predicted_levels);
        all.true_levels.extend(&trained.predictions.true_levels);
    }
    let mean_tpr =
        fold_reports.iter().map(|r| r.tpr).sum::<f64>() / fold_reports.len() as f64;
    let mean_rmse =
        fold_reports.iter().map(|r| r.rmse).sum::<f64>() / fold_reports.len() as f64;
    Ok(CvReport {
        fold_reports,
        mean_tpr,
        mean_rmse,
        predictions: all,
    })
}

/// Trains on a temporally contiguous leading split and evaluates on the
/// held-out tail.
pub fn train_holdout(slot: &SlotDataset, config: &TrainConfig) -> Result<TrainedSlot, PredictorError> {
    config.validate()?;
    let n = slot.blocks.len();
    let n_train = ((n as f64) * config.holdout_train_frac).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(PredictorError::BadConfig(format!(
            "holdout split {}/{} is degenerate",
            n_train,
            n - n_train
        )));
    }
    let train_idx: Vec<usize> = (0..n_train).collect();
    let test_idx: Vec<usize> = (n_train..n).collect();
    fit_split(slot, config, &train_idx, &test_idx, 0)
}

fn fit_split(
    slot: &SlotDataset,
    config: &TrainConfig,
    train_idx: &[usize],
    test_idx: &[usize],
    salt: u64,
) -> Result<TrainedSlot, PredictorError> {
    let dictionary = slot.fit_dictionary(train_idx)?;
    let standardizer = Standardizer::fit(&slot.blocks, slot.n_axes, train_idx)?;
    let labels: Vec<usize> = slot
        .raw_values
        .iter()
        .map(|&v| dictionary.quantize(v))
        .collect();

    let train_blocks: Vec<Vec<f64>> = train_idx
        .iter()
        .map(|&i| standardizer.apply(&slot.blocks[i]))
        .collect();
    let train_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();

    let mut sub = config.clone();
    sub.seed = config
        .seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(salt);
    let model = train_classifier(
        &train_blocks,
        &train_labels,
        slot.n_axes,
        slot.window,
        dictionary.len(),
        &sub,
    )?;

    let mut predictions = SlotPredictions {
        window_indices: Vec::with_capacity(test_idx.len()),
        predicted_levels: Vec::with_capacity(test_idx.len()),
        true_levels: Vec::with_capacity(test_idx.len()),
    };
    for &i in test_idx {
        let block = standardizer.apply(&slot.blocks[i]);
        let probs = model.forward(&block)?;
        predictions.window_indices.push(slot.window_indices[i]);
        predictions.predicted_levels.push(argmax(&probs));
        predictions.true_levels.push(labels[i]);
    }
    let report = evaluate_levels(
        &predictions.predicted_levels,
        &predictions.true_levels,
        &dictionary,
        slot.spec.target,
    )?;
    Ok(TrainedSlot {
        dataset_meta: slot.spec.clone(),
        model,
        standardizer,
        dictionary,
        report,
        predictions,
    })
}

/// Trains every slot with the holdout protocol, in parallel across slots
/// with per-slot seeds derived from the config seed and slot order, so the
/// result does not depend on scheduling.
pub fn train_slots_holdout(
    slots: &[SlotDataset],
    config: &TrainConfig,
) -> Result<Vec<TrainedSlot>, PredictorError> {
    slots
        .par_iter()
        .enumerate()
        .map(|(i, slot)| {
            let mut cfg = config.clone();
            cfg.seed = config.seed.wrapping_add(1 + i as u64);
            train_holdout(slot, &cfg)
        })
        .collect()
}
