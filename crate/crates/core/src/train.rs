//! The shared training contract: epoch loop, validation-loss early stopping
//! with patience, and best-checkpoint restoration.
//!
//! Every trainable model in the pipeline (text classifier, image head,
//! fusion network) runs through [`run_training`], so the stopping rule has
//! exactly one implementation.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::LanguageCode;
use crate::nn::{softmax_cross_entropy, Adam, Mlp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("empty {0} split")]
    EmptySplit(&'static str),
    #[error("feature dimension {got} does not match expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("invalid training config: {0}")]
    InvalidConfig(&'static str),
    #[error("encoder for {expected} cannot be fine-tuned on {found} data")]
    LanguageMismatch {
        expected: LanguageCode,
        found: LanguageCode,
    },
    #[error("unimodal models disagree on the task: `{0}` vs `{1}`")]
    TaskMismatch(alloc::string::String, alloc::string::String),
}

/// Hyper-parameters shared by all training runs. The learning rate default
/// is 1e-4 with Adam; patience is 5 epochs for text and fusion models and
/// 10 for the image head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    /// Stop when validation loss has not improved for this many consecutive
    /// epochs.
    pub patience: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainingConfig {
    /// Defaults for text and fusion classifiers (patience 5).
    pub fn text(seed: u64) -> Self {
        TrainingConfig {
            learning_rate: 1e-4,
            patience: 5,
            max_epochs: 50,
            batch_size: 32,
            seed,
        }
    }

    /// Defaults for the image head (patience 10).
    pub fn image(seed: u64) -> Self {
        TrainingConfig {
            patience: 10,
            ..TrainingConfig::text(seed)
        }
    }

    /// Defaults for the fusion network (patience 5, like text).
    pub fn fusion(seed: u64) -> Self {
        TrainingConfig::text(seed)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.learning_rate <= 0.0 {
            return Err(TrainError::InvalidConfig("learning rate must be positive"));
        }
        if self.patience == 0 {
            return Err(TrainError::InvalidConfig("patience must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(TrainError::InvalidConfig("max_epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("batch size must be at least 1"));
        }
        Ok(())
    }
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig::text(0)
    }
}

/// What [`EarlyStopping::observe`] decided about the newest epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    /// Validation loss strictly improved; snapshot the model.
    Improved,
    /// No improvement yet, keep training.
    Wait,
    /// Patience exhausted: stop after this epoch.
    Stop,
}

/// Validation-loss early stopping: training stops once the loss has not
/// strictly improved for `patience` consecutive epochs. Epochs are numbered
/// from 1.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    epoch: usize,
    best_epoch: usize,
    best_loss: f64,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        assert!(patience >= 1, "patience must be at least 1");
        EarlyStopping {
            patience,
            epoch: 0,
            best_epoch: 0,
            best_loss: f64::INFINITY,
        }
    }

    pub fn observe(&mut self, val_loss: f64) -> StopDecision {
        self.epoch += 1;
        if val_loss < self.best_loss {
            self.best_loss = val_loss;
            self.best_epoch = self.epoch;
            StopDecision::Improved
        } else if self.epoch - self.best_epoch >= self.patience {
            StopDecision::Stop
        } else {
            StopDecision::Wait
        }
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best_loss
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Epoch (1-based) after which training stopped.
    pub stopped_epoch: usize,
    /// Epoch whose checkpoint was restored.
    pub best_epoch: usize,
    pub best_val_loss: f64,
    /// Validation loss after each epoch.
    pub val_losses: Vec<f64>,
}

/// A model the generic training loop can drive.
pub trait Trainable {
    /// Run one epoch of optimization over the training split.
    fn train_epoch(&mut self, epoch: usize);
    /// Current loss over the validation split.
    fn validation_loss(&mut self) -> f64;
    /// Flat copy of all trainable parameters.
    fn snapshot(&self) -> Vec<f32>;
    /// Restore parameters from a snapshot.
    fn restore(&mut self, snapshot: &[f32]);
}

/// Drive a [`Trainable`] for up to `max_epochs`, stopping early on the
/// patience rule and restoring the best-validation-loss checkpoint.
pub fn run_training<M: Trainable>(model: &mut M, cfg: &TrainingConfig) -> Result<FitReport, TrainError> {
    cfg.validate()?;
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut best = model.snapshot();
    let mut val_losses = Vec::new();
    let mut stopped_epoch = cfg.max_epochs;
    for epoch in 1..=cfg.max_epochs {
        model.train_epoch(epoch);
        let val_loss = model.validation_loss();
        val_losses.push(val_loss);
        match stopper.observe(val_loss) {
            StopDecision::Improved => best = model.snapshot(),
            StopDecision::Wait => {}
            StopDecision::Stop => {
                stopped_epoch = epoch;
                break;
            }
        }
    }
    model.restore(&best);
    Ok(FitReport {
        stopped_epoch,
        best_epoch: stopper.best_epoch(),
        best_val_loss: stopper.best_loss(),
        val_losses,
    })
}

/// A dense feature matrix with labels: the common currency between feature
/// extraction and classifier training.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    dim: usize,
    features: Vec<f32>,
    labels: Vec<usize>,
}

impl FeatureSet {
    pub fn new(dim: usize) -> Self {
        FeatureSet {
            dim,
            features: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, features: &[f32], label: usize) -> Result<(), TrainError> {
        if features.len() != self.dim {
            return Err(TrainError::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        self.features.extend_from_slice(features);
        self.labels.push(label);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, index: usize) -> &[f32] {
        &self.features[index * self.dim..(index + 1) * self.dim]
    }
}

/// Adapter that trains an [`Mlp`] classifier on a [`FeatureSet`] with Adam
/// and minibatch shuffling.
pub struct MlpClassifierTrainer<'a> {
    net: &'a mut Mlp,
    train: &'a FeatureSet,
    val: &'a FeatureSet,
    batch_size: usize,
    adams: Vec<Adam>,
    rng: ChaCha8Rng,
    order: Vec<usize>,
}

impl<'a> MlpClassifierTrainer<'a> {
    pub fn new(
        net: &'a mut Mlp,
        train: &'a FeatureSet,
        val: &'a FeatureSet,
        cfg: &TrainingConfig,
    ) -> Result<Self, TrainError> {
        if train.is_empty() {
            return Err(TrainError::EmptySplit("train"));
        }
        if val.is_empty() {
            return Err(TrainError::EmptySplit("validation"));
        }
        for set in [train, val] {
            if set.dim() != net.in_dim() {
                return Err(TrainError::DimensionMismatch {
                    expected: net.in_dim(),
                    got: set.dim(),
                });
            }
            if let Some(&label) = set.labels().iter().find(|&&l| l >= net.out_dim()) {
                return Err(TrainError::LabelOutOfRange {
                    label,
                    num_classes: net.out_dim(),
                });
            }
        }
        let adams = net
            .widths()
            .windows(2)
            .map(|w| Adam::new(w[0] * w[1] + w[1], cfg.learning_rate as f32))
            .collect();
        let order: Vec<usize> = (0..train.len()).collect();
        Ok(MlpClassifierTrainer {
            net,
            train,
            val,
            batch_size: cfg.batch_size,
            adams,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            order,
        })
    }

    fn batch_loss(net: &Mlp, set: &FeatureSet, indices: &[usize]) -> f64 {
        let rows = indices.len();
        let mut x = Vec::with_capacity(rows * set.dim());
        let mut labels = Vec::with_capacity(rows);
        for &i in indices {
            x.extend_from_slice(set.row(i));
            labels.push(set.labels()[i]);
        }
        let logits = net.logits(&x, rows);
        softmax_cross_entropy(&logits, rows, net.out_dim(), &labels).0
    }
}

impl Trainable for MlpClassifierTrainer<'_> {
    fn train_epoch(&mut self, _epoch: usize) {
        self.order.shuffle(&mut self.rng);
        let classes = self.net.out_dim();
        for chunk in self.order.chunks(self.batch_size) {
            let rows = chunk.len();
            let mut x = Vec::with_capacity(rows * self.train.dim());
            let mut labels = Vec::with_capacity(rows);
            for &i in chunk {
                x.extend_from_slice(self.train.row(i));
                labels.push(self.train.labels()[i]);
            }
            let acts = self.net.forward(&x, rows);
            let (_, dlogits) = softmax_cross_entropy(acts.logits(), rows, classes, &labels);
            let grads = self.net.backward(&acts, &dlogits);
            for ((layer, adam), grad) in self
                .net
                .layers_mut()
                .iter_mut()
                .zip(&mut self.adams)
                .zip(&grads)
            {
                adam.step(layer.params_mut(), grad);
            }
        }
    }

    fn validation_loss(&mut self) -> f64 {
        // Chunked so large validation splits stay within a bounded buffer.
        let mut total = 0.0f64;
        let mut count = 0usize;
        let indices: Vec<usize> = (0..self.val.len()).collect();
        for chunk in indices.chunks(256) {
            total += Self::batch_loss(self.net, self.val, chunk) * chunk.len() as f64;
            count += chunk.len();
        }
        total / count as f64
    }

    fn snapshot(&self) -> Vec<f32> {
        self.net.flatten_params()
    }

    fn restore(&mut self, snapshot: &[f32]) {
        self.net.load_params(snapshot);
    }
}

/// Train an MLP classifier end to end: minibatch Adam with cross-entropy,
/// early stopping on validation loss, best checkpoint restored.
pub fn fit_classifier(
    net: &mut Mlp,
    train: &FeatureSet,
    val: &FeatureSet,
    cfg: &TrainingConfig,
) -> Result<FitReport, TrainError> {
    cfg.validate()?;
    let mut trainer = MlpClassifierTrainer::new(net, train, val, cfg)?;
    run_training(&mut trainer, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A "model" whose validation losses follow a script; training is a
    /// no-op and the snapshot records the epoch, so checkpoint restoration
    /// is observable.
    struct Scripted {
        losses: Vec<f64>,
        epoch: usize,
    }

    impl Trainable for Scripted {
        fn train_epoch(&mut self, epoch: usize) {
            self.epoch = epoch;
        }
        fn validation_loss(&mut self) -> f64 {
            self.losses[self.epoch - 1]
        }
        fn snapshot(&self) -> Vec<f32> {
            vec![self.epoch as f32]
        }
        fn restore(&mut self, snapshot: &[f32]) {
            self.epoch = snapshot[0] as usize;
        }
    }

    fn run_scripted(losses: &[f64], patience: usize) -> (FitReport, usize) {
        let mut model = Scripted {
            losses: losses.to_vec(),
            epoch: 0,
        };
        let cfg = TrainingConfig {
            patience,
            max_epochs: losses.len(),
            ..TrainingConfig::text(0)
        };
        let report = run_training(&mut model, &cfg).unwrap();
        (report, model.epoch)
    }

    #[test]
    fn stops_patience_epochs_after_the_best() {
        let losses = [1.00, 0.90, 0.91, 0.92, 0.93, 0.94, 0.95];
        let (report, restored_epoch) = run_scripted(&losses, 5);
        assert_eq!(report.stopped_epoch, 7);
        assert_eq!(report.best_epoch, 2);
        assert_eq!(report.best_val_loss, 0.90);
        // The restored checkpoint is the best epoch's snapshot.
        assert_eq!(restored_epoch, 2);
    }

    #[test]
    fn strictly_decreasing_losses_run_to_the_cap() {
        let losses: Vec<f64> = (0..12).map(|e| 1.0 - 0.05 * e as f64).collect();
        let (report, restored_epoch) = run_scripted(&losses, 5);
        assert_eq!(report.stopped_epoch, 12);
        assert_eq!(report.best_epoch, 12);
        assert_eq!(restored_epoch, 12);
    }

    #[test]
    fn plateau_counts_as_no_improvement() {
        // Equal loss is not a strict improvement.
        let losses = [1.0, 1.0, 1.0, 1.0];
        let (report, _) = run_scripted(&losses, 3);
        assert_eq!(report.best_epoch, 1);
        assert_eq!(report.stopped_epoch, 4);
    }

    #[test]
    fn stopped_minus_best_equals_patience_when_cap_not_hit() {
        let cases: [(&[f64], usize); 3] = [
            (&[1.0, 0.5, 0.6, 0.7, 0.8], 3),
            (&[0.9, 0.8, 0.85, 0.84, 0.83, 0.82, 0.9], 5),
            (&[2.0, 1.9, 2.1, 2.2], 2),
        ];
        for (losses, patience) in cases {
            let (report, _) = run_scripted(losses, patience);
            assert_eq!(report.stopped_epoch - report.best_epoch, patience);
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainingConfig::text(0).validate().is_ok());
        assert_eq!(TrainingConfig::image(0).patience, 10);
        assert_eq!(TrainingConfig::fusion(0).patience, 5);
        let bad = TrainingConfig {
            learning_rate: 0.0,
            ..TrainingConfig::text(0)
        };
        assert!(bad.validate().is_err());
        let bad = TrainingConfig {
            patience: 0,
            ..TrainingConfig::text(0)
        };
        assert!(bad.validate().is_err());
    }

    fn blob_features(seed: u64, n_per_class: usize) -> FeatureSet {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = FeatureSet::new(8);
        let centers = [[2.0f32; 8], [-2.0f32; 8]];
        for class in 0..2 {
            for _ in 0..n_per_class {
                let row: Vec<f32> = centers[class]
                    .iter()
                    .map(|&c| c + rng.gen_range(-0.5..0.5))
                    .collect();
                set.push(&row, class).unwrap();
            }
        }
        set
    }

    #[test]
    fn fit_classifier_learns_separable_blobs() {
        let train = blob_features(1, 40);
        let val = blob_features(2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Mlp::new(&[8, 2], &mut rng);
        let cfg = TrainingConfig {
            learning_rate: 1e-2,
            max_epochs: 30,
            ..TrainingConfig::text(0)
        };
        let report = fit_classifier(&mut net, &train, &val, &cfg).unwrap();
        assert!(report.best_val_loss < 0.2, "loss {}", report.best_val_loss);

        let test = blob_features(3, 20);
        let mut correct = 0;
        for i in 0..test.len() {
            let logits = net.logits(test.row(i), 1);
            if crate::nn::argmax_lowest(&logits) == test.labels()[i] {
                correct += 1;
            }
        }
        assert!(correct as f64 / test.len() as f64 >= 0.95);
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Mlp::new(&[8, 2], &mut rng);
        let empty = FeatureSet::new(8);
        let ok = blob_features(1, 5);
        let cfg = TrainingConfig::text(0);
        assert!(matches!(
            fit_classifier(&mut net, &empty, &ok, &cfg),
            Err(TrainError::EmptySplit("train"))
        ));
        assert!(matches!(
            fit_classifier(&mut net, &ok, &empty, &cfg),
            Err(TrainError::EmptySplit("validation"))
        ));
        let mut wrong_dim = FeatureSet::new(4);
        wrong_dim.push(&[0.0; 4], 0).unwrap();
        assert!(matches!(
            fit_classifier(&mut net, &wrong_dim, &ok, &cfg),
            Err(TrainError::DimensionMismatch { .. })
        ));
        let mut bad_label = FeatureSet::new(8);
        bad_label.push(&[0.0; 8], 7).unwrap();
        assert!(matches!(
            fit_classifier(&mut net, &bad_label, &ok, &cfg),
            Err(TrainError::LabelOutOfRange { label: 7, .. })
        ));
    }

    #[test]
    fn training_is_deterministic_given_a_seed() {
        let train = blob_features(1, 20);
        let val = blob_features(2, 8);
        let cfg = TrainingConfig {
            learning_rate: 1e-2,
            max_epochs: 5,
            ..TrainingConfig::text(9)
        };
        let mut run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let mut net = Mlp::new(&[8, 2], &mut rng);
            fit_classifier(&mut net, &train, &val, &cfg).unwrap();
            net.checksum()
        };
        assert_eq!(run(), run());
    }
}
