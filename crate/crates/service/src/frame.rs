//! Wire format of a streamed training snapshot.

use qplay_core::geometry::{CloudPoint, DecisionGrid};
use serde::{Deserialize, Serialize};

use crate::config::SessionConfig;
use crate::session::SessionState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub session_id: String,
    /// Bumped by every reset; `(generation, epoch, step)` orders all frames of a session.
    pub generation: u64,
    pub epoch: usize,
    pub step: u64,
    pub state: SessionState,
    pub metrics: FrameMetrics,
    /// One cloud per layer, in circuit order.
    pub layers: Vec<Cloud>,
    #[serde(rename = "final")]
    pub final_cloud: Cloud,
    /// Bloch vectors of the class targets (one qubit) or the simplex vertices (two qubits).
    pub targets: Vec<[f64; 3]>,
    pub grid: DecisionGrid,
    pub class_summary: Vec<ClassSummary>,
    pub config_echo: SessionConfig,
}

impl Frame {
    pub fn order_key(&self) -> (u64, usize, u64) {
        (self.generation, self.epoch, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    /// Per-sample average.
    pub train_loss: f64,
    pub train_loss_total: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    /// Loss of the batch that produced this frame; absent before the first step.
    pub batch_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cloud {
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub xyz: [f64; 3],
    pub label: usize,
    pub pred: usize,
    pub correct: bool,
    /// Input coordinates of the sample.
    pub input: [f64; 2],
    pub test: bool,
    /// Score of the predicted class.
    pub score: f64,
    /// Concurrence (two qubits only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<f64>,
    /// Relative phase in `[0, 2 pi)` (two qubits only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hue: Option<f64>,
    /// State amplitudes as `[re, im]` pairs.
    pub amps: Vec<[f64; 2]>,
}

impl Point {
    pub(crate) fn from_cloud(p: &CloudPoint) -> Self {
        let (size, hue) = match p {
            CloudPoint::Bloch(_) => (None, None),
            CloudPoint::Simplex(s) => (Some(s.coords.concurrence), Some(s.coords.phase_hue)),
        };
        Point {
            xyz: p.xyz(),
            label: p.class_label(),
            pred: p.class_label(),
            correct: p.correct(),
            input: [0.0, 0.0],
            test: false,
            score: 0.0,
            size,
            hue,
            amps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: usize,
    /// Samples of this class in the whole dataset.
    pub count: usize,
    /// Samples predicted as this class.
    pub predicted: usize,
    /// Mean class scores over samples of this class.
    pub mean_scores: Vec<f64>,
}
