//! Session configuration and its field-level validation.

use qplay_core::datasets::{DatasetKind, DEFAULT_SAMPLES, DEFAULT_TEST_FRACTION};
use qplay_core::geometry::{DEFAULT_GRID_RESOLUTION, MAX_GRID_RESOLUTION, MIN_GRID_RESOLUTION};
use qplay_core::model::ModelConfig;
use qplay_core::train::{AdamHyper, DEFAULT_BATCH_SIZE};
use serde::{Deserialize, Serialize};

pub const MAX_SAMPLES: usize = 5000;
pub const MAX_NOISE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    pub n: usize,
    pub seed: u64,
    /// Fraction of labels flipped to another class.
    pub noise: f64,
    pub test_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            kind: DatasetKind::Circle,
            n: DEFAULT_SAMPLES,
            seed: 0,
            noise: 0.0,
            test_fraction: DEFAULT_TEST_FRACTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    /// Seeds parameter initialisation, batch shuffling and display subsampling.
    pub seed: u64,
    pub lr: f64,
    pub batch_size: usize,
    pub grid_resolution: usize,
    pub frames_per_epoch: usize,
    /// Training stops in the `finished` state after this many epochs.
    pub max_epochs: Option<usize>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            dataset: DatasetConfig::default(),
            model: ModelConfig::default(),
            seed: 0,
            lr: AdamHyper::default().lr,
            batch_size: DEFAULT_BATCH_SIZE,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            frames_per_epoch: 1,
            max_epochs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub fn check_lr(lr: f64) -> Option<FieldError> {
    (!(lr.is_finite() && lr >= 0.0)).then(|| FieldError::new("lr", format!("must be finite and >= 0, got {lr}")))
}

pub fn check_batch_size(batch_size: usize) -> Option<FieldError> {
    (batch_size == 0).then(|| FieldError::new("batch_size", "must be >= 1"))
}

impl SessionConfig {
    /// Every violated constraint; empty when the config is usable.
    pub fn violations(&self) -> Vec<FieldError> {
        let mut out: Vec<FieldError> = self
            .model
            .violations()
            .into_iter()
            .map(|(field, m)| FieldError::new(format!("model.{field}"), m))
            .collect();

        let d = &self.dataset;
        if !d.kind.allowed_classes().contains(&self.model.n_classes) {
            out.push(FieldError::new(
                "model.n_classes",
                format!(
                    "dataset {:?} has {:?} classes, got {}",
                    d.kind,
                    d.kind.allowed_classes(),
                    self.model.n_classes
                ),
            ));
        }
        if !(8..=MAX_SAMPLES).contains(&d.n) {
            out.push(FieldError::new("dataset.n", format!("must be in 8..={MAX_SAMPLES}, got {}", d.n)));
        }
        if !(0.0..=MAX_NOISE).contains(&d.noise) {
            out.push(FieldError::new("dataset.noise", format!("must be in [0, {MAX_NOISE}], got {}", d.noise)));
        }
        if !(d.test_fraction > 0.0 && d.test_fraction <= 0.5) {
            out.push(FieldError::new(
                "dataset.test_fraction",
                format!("must be in (0, 0.5], got {}", d.test_fraction),
            ));
        }
        out.extend(check_lr(self.lr));
        out.extend(check_batch_size(self.batch_size));
        if !(MIN_GRID_RESOLUTION..=MAX_GRID_RESOLUTION).contains(&self.grid_resolution) {
            out.push(FieldError::new(
                "grid_resolution",
                format!(
                    "must be in {MIN_GRID_RESOLUTION}..={MAX_GRID_RESOLUTION}, got {}",
                    self.grid_resolution
                ),
            ));
        }
        if self.frames_per_epoch == 0 {
            out.push(FieldError::new("frames_per_epoch", "must be >= 1"));
        }
        if self.max_epochs == Some(0) {
            out.push(FieldError::new("max_epochs", "must be >= 1 when set"));
        }
        out
    }
}
