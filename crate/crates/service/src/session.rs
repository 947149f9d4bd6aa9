//! Synchronous session core: one dataset, one trainer and a state machine
//! driven by control commands. Frames produced by a command or a training
//! step queue up in an outbox until the owner drains them.

use qplay_core::datasets::{generate_with_noise, split, Sample};
use qplay_core::geometry::{decision_grid, layer_point_clouds, subsample_indices, Tetrahedron, DISPLAY_LIMIT};
use qplay_core::model::{argmax, build_model, single_qubit_target_vectors, FeatureVector, ForwardTrace};
use qplay_core::train::{AdamHyper, EpochMetrics, Trainer};
use serde::{Deserialize, Serialize};

use crate::config::{check_batch_size, check_lr, FieldError, SessionConfig};
use crate::frame::{ClassSummary, Cloud, Frame, FrameMetrics, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Paused,
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ControlCommand {
    Start,
    Pause,
    StepEpoch,
    StepBatch,
    Reset {
        #[serde(default)]
        seed: Option<u64>,
    },
    UpdateHyper {
        #[serde(default)]
        lr: Option<f64>,
        #[serde(default)]
        batch_size: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    Invalid(Vec<FieldError>),
    /// Training failed; the session is left `finished`.
    Runtime(String),
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::Invalid(errors) => {
                let parts: Vec<String> = errors.iter().map(ToString::to_string).collect();
                write!(f, "invalid configuration: {}", parts.join("; "))
            }
            SessionError::Runtime(m) => write!(f, "training failed: {m}"),
        }
    }
}

impl std::error::Error for SessionError {}

impl From<qplay_core::Error> for SessionError {
    fn from(e: qplay_core::Error) -> Self {
        SessionError::Runtime(e.to_string())
    }
}

pub type SessionResult<T> = Result<T, SessionError>;

#[derive(Debug, Clone, Copy)]
struct Shown {
    sample: Sample,
    test: bool,
}

pub struct Session {
    id: String,
    config: SessionConfig,
    samples: Vec<Shown>,
    display: Vec<usize>,
    trainer: Trainer,
    state: SessionState,
    generation: u64,
    last_batch_loss: Option<f64>,
    outbox: Vec<Frame>,
}

fn build_trainer(config: &SessionConfig, train: Vec<Sample>, test: Vec<Sample>) -> SessionResult<Trainer> {
    let (model, params) = build_model(config.model, config.seed)?;
    let hyper = AdamHyper {
        lr: config.lr,
        ..AdamHyper::default()
    };
    Ok(Trainer::new(model, params, train, test, hyper, config.batch_size, config.seed)?)
}

impl Session {
    /// Builds the dataset and model; the epoch-0 frame is waiting in the outbox.
    pub fn new(id: impl Into<String>, config: SessionConfig) -> SessionResult<Self> {
        let errors = config.violations();
        if !errors.is_empty() {
            return Err(SessionError::Invalid(errors));
        }
        let d = config.dataset;
        let dataset = generate_with_noise(d.kind, d.n, d.seed, config.model.n_classes, d.noise)
            .map_err(|e| SessionError::Invalid(vec![FieldError::new("dataset", e.to_string())]))?;
        let (train, test) = split(&dataset, d.test_fraction, d.seed)
            .map_err(|e| SessionError::Invalid(vec![FieldError::new("dataset.test_fraction", e.to_string())]))?;
        let samples: Vec<Shown> = train
            .iter()
            .map(|&sample| Shown { sample, test: false })
            .chain(test.iter().map(|&sample| Shown { sample, test: true }))
            .collect();
        let display = subsample_indices(samples.len(), DISPLAY_LIMIT, d.seed);
        let trainer = build_trainer(&config, train, test)?;
        let mut session = Session {
            id: id.into(),
            config,
            samples,
            display,
            trainer,
            state: SessionState::Paused,
            generation: 0,
            last_batch_loss: None,
            outbox: Vec::new(),
        };
        session.emit()?;
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    /// The config as currently in force (seed, lr and batch size follow commands).
    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn trainer(&self) -> &Trainer {
        &self.trainer
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn history(&self) -> &[EpochMetrics] {
        self.trainer.history()
    }

    /// Frames produced since the last call, oldest first.
    pub fn take_frames(&mut self) -> Vec<Frame> {
        std::mem::take(&mut self.outbox)
    }

    pub fn apply(&mut self, command: ControlCommand) -> SessionResult<SessionState> {
        use ControlCommand::*;
        use SessionState::*;
        match (command, self.state) {
            (Start, Paused) => self.state = Running,
            (Pause, Running) => self.state = Paused,
            (Start | Pause | StepEpoch | StepBatch, _) if self.state == Finished => {}
            (Start, _) | (Pause, _) => {}
            (StepEpoch, _) => {
                self.state = Paused;
                while self.state == Paused && !self.step(false)? {}
            }
            (StepBatch, _) => {
                self.state = Paused;
                self.step(true)?;
            }
            (Reset { seed }, _) => self.reset(seed)?,
            (UpdateHyper { lr, batch_size }, _) => {
                let errors: Vec<FieldError> = lr
                    .and_then(check_lr)
                    .into_iter()
                    .chain(batch_size.and_then(check_batch_size))
                    .collect();
                if !errors.is_empty() {
                    return Err(SessionError::Invalid(errors));
                }
                if let Some(lr) = lr {
                    self.trainer.set_learning_rate(lr)?;
                    self.config.lr = lr;
                }
                if let Some(b) = batch_size {
                    self.trainer.set_batch_size(b)?;
                    self.config.batch_size = b;
                }
            }
        }
        Ok(self.state)
    }

    /// Advances one batch when running. Returns whether training progressed.
    pub fn tick(&mut self) -> SessionResult<bool> {
        if self.state != SessionState::Running {
            return Ok(false);
        }
        self.step(false)?;
        Ok(true)
    }

    fn reset(&mut self, seed: Option<u64>) -> SessionResult<()> {
        if let Some(seed) = seed {
            self.config.seed = seed;
        }
        let train = self.trainer.train_set().to_vec();
        let test = self.trainer.test_set().to_vec();
        self.trainer = build_trainer(&self.config, train, test)?;
        self.generation += 1;
        self.state = SessionState::Paused;
        self.last_batch_loss = None;
        self.emit()
    }

    /// One optimizer step; returns true when it closed an epoch.
    fn step(&mut self, force_frame: bool) -> SessionResult<bool> {
        let len = self.trainer.train_set().len();
        let before = self.trainer.epoch_position();
        let outcome = match self.trainer.step_batch() {
            Ok(o) => o,
            Err(e) => {
                self.state = SessionState::Finished;
                return Err(e.into());
            }
        };
        self.last_batch_loss = Some(outcome.batch_loss);
        if outcome.epoch_end.is_some() {
            if self.config.max_epochs.is_some_and(|m| self.trainer.epoch() >= m) {
                self.state = SessionState::Finished;
            }
            self.emit()?;
            return Ok(true);
        }
        let f = self.config.frames_per_epoch;
        let after = self.trainer.epoch_position();
        if force_frame || after * f / len > before * f / len {
            self.emit()?;
        }
        Ok(false)
    }

    fn emit(&mut self) -> SessionResult<()> {
        let frame = self.build_frame()?;
        self.outbox.push(frame);
        Ok(())
    }

    /// Current frame, computed from scratch.
    pub fn build_frame(&self) -> SessionResult<Frame> {
        let trainer = &self.trainer;
        let model = trainer.model();
        let params = trainer.params();
        let m = trainer.evaluate()?;

        let traces: Vec<(ForwardTrace, usize)> = self
            .samples
            .iter()
            .map(|s| {
                let t = model.forward(params, &FeatureVector::from_point(s.sample.x, s.sample.y))?;
                let pred = argmax(&t.class_scores);
                Ok((t, pred))
            })
            .collect::<qplay_core::Result<_>>()?;

        let shown: Vec<ForwardTrace> = self.display.iter().map(|&i| traces[i].0.clone()).collect();
        let labels: Vec<usize> = self.display.iter().map(|&i| self.samples[i].sample.label).collect();
        let preds: Vec<usize> = self.display.iter().map(|&i| traces[i].1).collect();
        let clouds = layer_point_clouds(&shown, &labels, &preds, usize::MAX, 0)?;
        let layers: Vec<Cloud> = clouds
            .iter()
            .enumerate()
            .map(|(layer, cloud)| Cloud {
                points: cloud
                    .points
                    .iter()
                    .zip(&self.display)
                    .map(|(p, &i)| {
                        let (trace, pred) = &traces[i];
                        let s = self.samples[i];
                        let mut point = Point::from_cloud(p);
                        point.pred = *pred;
                        point.input = [s.sample.x, s.sample.y];
                        point.test = s.test;
                        point.score = trace.class_scores[*pred];
                        point.amps = trace.per_layer_states[layer]
                            .amplitudes()
                            .iter()
                            .map(|z| [z.re, z.im])
                            .collect();
                        point
                    })
                    .collect(),
            })
            .collect();

        let n_classes = model.n_classes();
        let mut class_summary: Vec<ClassSummary> = (0..n_classes)
            .map(|class| ClassSummary {
                class,
                count: 0,
                predicted: 0,
                mean_scores: vec![0.0; n_classes],
            })
            .collect();
        for (s, (trace, pred)) in self.samples.iter().zip(&traces) {
            let row = &mut class_summary[s.sample.label];
            row.count += 1;
            for (acc, v) in row.mean_scores.iter_mut().zip(&trace.class_scores) {
                *acc += v;
            }
            class_summary[*pred].predicted += 1;
        }
        for row in &mut class_summary {
            if row.count > 0 {
                row.mean_scores.iter_mut().for_each(|v| *v /= row.count as f64);
            }
        }

        let targets = if self.config.model.n_qubits == 1 {
            single_qubit_target_vectors(n_classes)
        } else {
            Tetrahedron::regular().vertices()[..n_classes].to_vec()
        };

        Ok(Frame {
            session_id: self.id.clone(),
            generation: self.generation,
            epoch: trainer.epoch(),
            step: trainer.step(),
            state: self.state,
            metrics: FrameMetrics {
                train_loss: m.train_loss,
                train_loss_total: m.train_loss_total,
                train_acc: m.train_accuracy,
                test_acc: m.test_accuracy,
                batch_loss: self.last_batch_loss,
            },
            final_cloud: layers.last().cloned().unwrap_or(Cloud { points: Vec::new() }),
            layers,
            targets,
            grid: decision_grid(model, params, self.config.grid_resolution)?,
            class_summary,
            config_echo: self.config,
        })
    }
}
