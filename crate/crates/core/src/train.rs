//! Losses, exact gradients, Adam and the mini-batch training loop.
//!
//! Gradients are computed by reverse-mode accumulation through the unrolled
//! circuit. With `lambda = dL/d(conj psi)` at the output, each gate `G(p)`
//! acting on `psi` contributes `dL/dp = 2 Re <lambda, (dG/dp) psi>` and passes
//! `G^dagger lambda` back to the previous step.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::Sample;
use crate::error::{Error, Result};
use crate::model::{apply_op, argmax, CircuitOp, FeatureVector, ForwardTrace, Model, ParameterSet, Readout, TargetStateSet};
use crate::qstate::{apply_matrix_in_place, mat_adjoint, StateVector};

/// Added to the true-class probability before the logarithm.
pub const CROSS_ENTROPY_CLIP: f64 = 1e-12;

pub const DEFAULT_BATCH_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `sum_m (1 - F(target(y_m), psi(x_m)))`
    FidelityChi2,
    /// `mean_m -ln(score_m[y_m] + clip)`
    CrossEntropy,
}

impl LossKind {
    /// The loss matching the model's readout.
    pub fn for_model(model: &Model) -> Self {
        match model.config().readout() {
            Readout::TargetFidelity => LossKind::FidelityChi2,
            Readout::BasisProbability => LossKind::CrossEntropy,
        }
    }

    fn check(self, model: &Model) -> Result<()> {
        if self == Self::for_model(model) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{self:?} does not match the model's {:?} readout",
                model.config().readout()
            )))
        }
    }
}

fn check_batch(len: usize, labels: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::Domain("empty batch".into()));
    }
    if len != labels {
        return Err(Error::Domain(format!("{len} inputs but {labels} labels")));
    }
    Ok(())
}

/// Summed infidelity of each final state with its class target.
pub fn fidelity_loss(traces: &[ForwardTrace], labels: &[usize], targets: &TargetStateSet) -> Result<f64> {
    check_batch(traces.len(), labels.len())?;
    let mut total = 0.0;
    for (trace, &label) in traces.iter().zip(labels) {
        let target = targets
            .get(label)
            .ok_or_else(|| Error::Domain(format!("label {label} has no target state")))?;
        total += 1.0 - target.fidelity(trace.final_state())?;
    }
    Ok(total)
}

/// Mean negative log-score of the true class.
pub fn cross_entropy_loss(score_sets: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    check_batch(score_sets.len(), labels.len())?;
    let mut total = 0.0;
    for (scores, &label) in score_sets.iter().zip(labels) {
        let p = scores
            .get(label)
            .ok_or_else(|| Error::Domain(format!("label {label} out of range")))?;
        total -= (p + CROSS_ENTROPY_CLIP).ln();
    }
    Ok(total / score_sets.len() as f64)
}

fn feature(s: &Sample) -> FeatureVector {
    FeatureVector::from_point(s.x, s.y)
}

/// Loss of `params` on `batch` from forward passes only.
pub fn batch_loss(model: &Model, params: &ParameterSet, batch: &[Sample], kind: LossKind) -> Result<f64> {
    kind.check(model)?;
    check_batch(batch.len(), batch.len())?;
    let traces = batch
        .iter()
        .map(|s| model.forward(params, &feature(s)))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<usize> = batch.iter().map(|s| s.label).collect();
    match kind {
        LossKind::FidelityChi2 => fidelity_loss(&traces, &labels, model.targets()),
        LossKind::CrossEntropy => {
            let scores: Vec<Vec<f64>> = traces.into_iter().map(|t| t.class_scores).collect();
            cross_entropy_loss(&scores, &labels)
        }
    }
}

/// `dL/d(conj psi)` and the loss for one sample's final state.
fn output_cotangent(
    model: &Model,
    kind: LossKind,
    psi: &[Complex64],
    label: usize,
    batch_len: usize,
) -> Result<(f64, Vec<Complex64>)> {
    match kind {
        LossKind::FidelityChi2 => {
            let target = model
                .targets()
                .get(label)
                .ok_or_else(|| Error::Domain(format!("label {label} has no target state")))?
                .amplitudes();
            let overlap: Complex64 = target.iter().zip(psi).map(|(t, p)| t.conj() * p).sum();
            let loss = 1.0 - overlap.norm_sqr();
            Ok((loss, target.iter().map(|t| -overlap * t).collect()))
        }
        LossKind::CrossEntropy => {
            let k = model.n_classes();
            if label >= k {
                return Err(Error::Domain(format!("label {label} out of range")));
            }
            let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            let total: f64 = probs[..k].iter().sum();
            let scale = 1.0 / batch_len as f64;
            let mut lambda = vec![Complex64::new(0.0, 0.0); psi.len()];
            if total < 1e-12 {
                let loss = -(1.0 / k as f64 + CROSS_ENTROPY_CLIP).ln() * scale;
                return Ok((loss, lambda));
            }
            let score = probs[label] / total;
            let loss = -(score + CROSS_ENTROPY_CLIP).ln() * scale;
            let outer = -scale / (score + CROSS_ENTROPY_CLIP);
            for c in 0..k {
                let d_score = (if c == label { total } else { 0.0 } - probs[label]) / (total * total);
                lambda[c] = psi[c] * (outer * d_score);
            }
            Ok((loss, lambda))
        }
    }
}

/// Loss and its exact gradient with respect to every parameter.
pub fn loss_and_gradients(
    model: &Model,
    params: &ParameterSet,
    batch: &[Sample],
    kind: LossKind,
) -> Result<(f64, Vec<f64>)> {
    kind.check(model)?;
    params.check_shape(model.config())?;
    check_batch(batch.len(), batch.len())?;
    let n = model.config().n_qubits;
    let mut grads = vec![0.0; params.len()];
    let mut loss = 0.0;
    let zero = StateVector::zero(n)?;

    for sample in batch {
        let ops = model.circuit(params, &feature(sample), true);
        // states[i] is the state entering ops[i]
        let mut states = Vec::with_capacity(ops.len() + 1);
        let mut amps = zero.amplitudes().to_vec();
        for op in &ops {
            states.push(amps.clone());
            apply_op(&mut amps, n, op);
        }
        let (sample_loss, mut lambda) = output_cotangent(model, kind, &amps, sample.label, batch.len())?;
        loss += sample_loss;

        for (op, before) in ops.iter().zip(&states).rev() {
            match op {
                CircuitOp::Gate {
                    qubit,
                    matrix,
                    derivatives,
                } => {
                    for (index, d) in derivatives {
                        let mut moved = before.clone();
                        apply_matrix_in_place(&mut moved, n, d, *qubit);
                        let inner: Complex64 =
                            lambda.iter().zip(&moved).map(|(l, m)| l.conj() * m).sum();
                        grads[*index] += 2.0 * inner.re;
                    }
                    apply_matrix_in_place(&mut lambda, n, &mat_adjoint(matrix), *qubit);
                }
                // CX and CZ are their own adjoints
                CircuitOp::Entangle(_) => apply_op(&mut lambda, n, op),
                CircuitOp::LayerEnd => {}
            }
        }
    }
    Ok((loss, grads))
}

/// Exact gradient of the batch loss.
pub fn gradients(model: &Model, params: &ParameterSet, batch: &[Sample], kind: LossKind) -> Result<Vec<f64>> {
    loss_and_gradients(model, params, batch, kind).map(|(_, g)| g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            lr: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moments with bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(n_params: usize, hyper: AdamHyper) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            hyper,
        }
    }

    /// One in-place update of `params`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Domain(format!(
                "adam state has {} entries, got {} params and {} gradients",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        let AdamHyper { lr, beta1, beta2, eps } = self.hyper;
        self.t += 1;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(state: &AdamState, params: &[f64], grads: &[f64]) -> Result<(Vec<f64>, AdamState)> {
    let mut next = state.clone();
    let mut p = params.to_vec();
    next.step(&mut p, grads)?;
    Ok((p, next))
}

/// Fraction of samples whose predicted class equals the label.
pub fn accuracy(model: &Model, params: &ParameterSet, samples: &[Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("accuracy of an empty slice".into()));
    }
    let mut correct = 0usize;
    for s in samples {
        if model.predict(params, &feature(s))?.0 == s.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / samples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Per-sample average loss over the training slice.
    pub train_loss: f64,
    /// Loss as reduced by its definition (sum for fidelity, mean for cross-entropy).
    pub train_loss_total: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Result of a single optimizer step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchOutcome {
    pub batch_loss: f64,
    /// Set when this batch completed an epoch.
    pub epoch_end: Option<EpochMetrics>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shuffle seed for `epoch`, derived from the run's base seed.
pub fn epoch_seed(base: u64, epoch: usize) -> u64 {
    splitmix64(base ^ splitmix64(epoch as u64))
}

#[derive(Debug, Clone)]
struct EpochCursor {
    order: Vec<usize>,
    position: usize,
}

/// Owns a model, its parameters and optimizer, and a train/test split.
#[derive(Debug, Clone)]
pub struct Trainer {
    model: Model,
    params: ParameterSet,
    optimizer: AdamState,
    loss: LossKind,
    train: Vec<Sample>,
    test: Vec<Sample>,
    batch_size: usize,
    seed: u64,
    epoch: usize,
    step: u64,
    cursor: Option<EpochCursor>,
    history: Vec<EpochMetrics>,
}

impl Trainer {
    pub fn new(
        model: Model,
        params: ParameterSet,
        train: Vec<Sample>,
        test: Vec<Sample>,
        hyper: AdamHyper,
        batch_size: usize,
        seed: u64,
    ) -> Result<Self> {
        params.check_shape(model.config())?;
        if train.is_empty() || test.is_empty() {
            return Err(Error::Config("train and test slices must be nonempty".into()));
        }
        if batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if let Some(s) = train.iter().chain(&test).find(|s| s.label >= model.n_classes()) {
            return Err(Error::Config(format!(
                "sample label {} exceeds the model's {} classes",
                s.label,
                model.n_classes()
            )));
        }
        let loss = LossKind::for_model(&model);
        let optimizer = AdamState::new(params.len(), hyper);
        Ok(Trainer {
            model,
            params,
            optimizer,
            loss,
            train,
            test,
            batch_size,
            seed,
            epoch: 0,
            step: 0,
            cursor: None,
            history: Vec::new(),
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn optimizer(&self) -> &AdamState {
        &self.optimizer
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss
    }

    pub fn train_set(&self) -> &[Sample] {
        &self.train
    }

    pub fn test_set(&self) -> &[Sample] {
        &self.test
    }

    /// Completed epochs.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Optimizer steps taken so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn history(&self) -> &[EpochMetrics] {
        &self.history
    }

    /// True while an epoch is partially done.
    pub fn mid_epoch(&self) -> bool {
        self.cursor.is_some()
    }

    /// Training samples already consumed in the current epoch.
    pub fn epoch_position(&self) -> usize {
        self.cursor.as_ref().map_or(0, |c| c.position)
    }

    pub fn batches_per_epoch(&self) -> usize {
        self.train.len().div_ceil(self.batch_size)
    }

    /// Takes effect from the next step.
    pub fn set_learning_rate(&mut self, lr: f64) -> Result<()> {
        if !(lr.is_finite() && lr >= 0.0) {
            return Err(Error::Config(format!("learning rate must be finite and >= 0, got {lr}")));
        }
        self.optimizer.hyper.lr = lr;
        Ok(())
    }

    /// Takes effect from the next batch; the current shuffle order is kept.
    pub fn set_batch_size(&mut self, batch_size: usize) -> Result<()> {
        if batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        self.batch_size = batch_size;
        Ok(())
    }

    /// Current metrics without training.
    pub fn evaluate(&self) -> Result<EpochMetrics> {
        let total = batch_loss(&self.model, &self.params, &self.train, self.loss)?;
        let train_loss = match self.loss {
            LossKind::FidelityChi2 => total / self.train.len() as f64,
            LossKind::CrossEntropy => total,
        };
        Ok(EpochMetrics {
            epoch: self.epoch,
            train_loss,
            train_loss_total: total,
            train_accuracy: accuracy(&self.model, &self.params, &self.train)?,
            test_accuracy: accuracy(&self.model, &self.params, &self.test)?,
        })
    }

    /// Runs one mini-batch update, starting a freshly shuffled epoch if needed.
    pub fn step_batch(&mut self) -> Result<BatchOutcome> {
        let cursor = self.cursor.get_or_insert_with(|| {
            let mut order: Vec<usize> = (0..self.train.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(epoch_seed(self.seed, self.epoch + 1));
            order.shuffle(&mut rng);
            EpochCursor { order, position: 0 }
        });
        let end = (cursor.position + self.batch_size).min(cursor.order.len());
        let batch: Vec<Sample> = cursor.order[cursor.position..end]
            .iter()
            .map(|&i| self.train[i])
            .collect();
        cursor.position = end;
        let finished = end == cursor.order.len();

        let (batch_loss, grads) = loss_and_gradients(&self.model, &self.params, &batch, self.loss)?;
        self.optimizer.step(&mut self.params.values, &grads)?;
        self.step += 1;

        let epoch_end = if finished {
            self.cursor = None;
            self.epoch += 1;
            let metrics = self.evaluate()?;
            self.history.push(metrics);
            Some(metrics)
        } else {
            None
        };
        Ok(BatchOutcome {
            batch_loss,
            epoch_end,
        })
    }

    /// Finishes the current epoch (or runs a whole new one).
    pub fn train_epoch(&mut self) -> Result<EpochMetrics> {
        loop {
            if let Some(m) = self.step_batch()?.epoch_end {
                return Ok(m);
            }
        }
    }

    /// Predictions and forward traces for a slice of samples.
    pub fn traces(&self, samples: &[Sample]) -> Result<Vec<(ForwardTrace, usize)>> {
        samples
            .iter()
            .map(|s| {
                let t = self.model.forward(&self.params, &feature(s))?;
                let p = argmax(&t.class_scores);
                Ok((t, p))
            })
            .collect()
    }
}
