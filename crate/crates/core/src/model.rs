//! The data re-uploading classifier.
//!
//! A model with `N` layers computes `U(theta, x) = L(N) ... L(2) L(1)` on
//! `|0...0>`. Each layer applies one general rotation per qubit, either as
//! an encoding rotation `R(x)` followed by a trainable rotation `R(theta_k)`
//! (the *separate* variant) or as a single rotation whose angles are
//! `theta_k * x + b_k` elementwise (the *compact* variant). On two qubits an
//! entangling gate sits between consecutive layers, but not after the last.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qstate::{
    apply_cx_in_place, apply_cz_in_place, apply_matrix_in_place, mat_mul, mat_scale,
    rotation_derivatives, rotation_unchecked, Matrix2, StateVector, Unitary2,
};

/// Largest supported depth.
pub const MAX_LAYERS: usize = 64;

/// Degenerate-marginal guard for basis-state readout.
const MARGINAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `L(k) = R(theta_k) R(x)`
    Separate,
    /// `L(k) = R(theta_k * x + b_k)`
    Compact,
}

impl Variant {
    /// Number of trainable reals per qubit per layer.
    pub fn params_per_gate(self) -> usize {
        match self {
            Variant::Separate => 3,
            Variant::Compact => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    Cz,
    Cnot,
    None,
}

/// How class scores are read off the final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Fidelity with one target state per class (single qubit).
    TargetFidelity,
    /// Renormalized computational-basis probabilities (two qubits).
    BasisProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub variant: Variant,
    pub entangler: Entangler,
    pub n_classes: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            n_qubits: 1,
            n_layers: 4,
            variant: Variant::Compact,
            entangler: Entangler::None,
            n_classes: 2,
        }
    }
}

impl ModelConfig {
    /// Every violated constraint as `(field, message)`; empty when valid.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(1..=2).contains(&self.n_qubits) {
            out.push(("n_qubits", format!("must be 1 or 2, got {}", self.n_qubits)));
        }
        if !(1..=MAX_LAYERS).contains(&self.n_layers) {
            out.push((
                "n_layers",
                format!("must be in 1..={MAX_LAYERS}, got {}", self.n_layers),
            ));
        }
        if !(2..=4).contains(&self.n_classes) {
            out.push(("n_classes", format!("must be in 2..=4, got {}", self.n_classes)));
        }
        if self.n_qubits == 1 && self.entangler != Entangler::None {
            out.push(("entangler", "a single-qubit model cannot have an entangler".into()));
        }
        if self.n_qubits == 2 && self.n_classes > 1 << self.n_qubits {
            out.push(("n_classes", "more classes than basis states".into()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            let msg = v
                .iter()
                .map(|(field, m)| format!("{field}: {m}"))
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::Config(msg))
        }
    }

    pub fn n_params(&self) -> usize {
        self.variant.params_per_gate() * self.n_layers * self.n_qubits
    }

    pub fn readout(&self) -> Readout {
        if self.n_qubits == 1 {
            Readout::TargetFidelity
        } else {
            Readout::BasisProbability
        }
    }
}

/// Classifier input; 2D points are padded as `(x, y, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; 3]);

impl FeatureVector {
    pub fn from_point(x: f64, y: f64) -> Self {
        FeatureVector([x, y, 0.0])
    }
}

/// Flat trainable parameters, grouped by layer then qubit.
///
/// Each `(layer, qubit)` block holds three rotation angles for the separate
/// variant, or three weights followed by three biases for the compact one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub variant: Variant,
    pub n_layers: usize,
    pub n_qubits: usize,
    pub values: Vec<f64>,
}

impl ParameterSet {
    pub fn zeros(config: &ModelConfig) -> Self {
        ParameterSet {
            variant: config.variant,
            n_layers: config.n_layers,
            n_qubits: config.n_qubits,
            values: vec![0.0; config.n_params()],
        }
    }

    /// Uniform draws on `[-pi, pi)` from a ChaCha8 stream seeded with `seed`.
    pub fn random(config: &ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..config.n_params())
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        ParameterSet {
            values,
            ..Self::zeros(config)
        }
    }

    pub fn from_values(config: &ModelConfig, values: Vec<f64>) -> Result<Self> {
        let p = ParameterSet {
            values,
            ..Self::zeros(config)
        };
        p.check_shape(config)?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self, layer: usize, qubit: usize) -> usize {
        (layer * self.n_qubits + qubit) * self.variant.params_per_gate()
    }

    pub fn gate(&self, layer: usize, qubit: usize) -> &[f64] {
        let start = self.offset(layer, qubit);
        &self.values[start..start + self.variant.params_per_gate()]
    }

    pub fn check_shape(&self, config: &ModelConfig) -> Result<()> {
        if self.variant != config.variant
            || self.n_layers != config.n_layers
            || self.n_qubits != config.n_qubits
            || self.values.len() != config.n_params()
        {
            return Err(Error::domain(format!(
                "parameter set ({:?}, {} layers, {} qubits, {} values) does not fit model \
                 ({:?}, {} layers, {} qubits, {} values)",
                self.variant,
                self.n_layers,
                self.n_qubits,
                self.values.len(),
                config.variant,
                config.n_layers,
                config.n_qubits,
                config.n_params()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("parameter set contains non-finite values"));
        }
        Ok(())
    }
}

/// One reference state per class.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStateSet(Vec<StateVector>);

impl TargetStateSet {
    pub fn states(&self) -> &[StateVector] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, class: usize) -> Option<&StateVector> {
        self.0.get(class)
    }

    /// Reorders classes; `order[i]` is the old index of the new class `i`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        TargetStateSet(order.iter().map(|&i| self.0[i].clone()).collect())
    }
}

/// Single-qubit state with the given Bloch vector (assumed unit length).
pub fn state_from_bloch(x: f64, y: f64, z: f64) -> StateVector {
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    let (s, c) = (theta / 2.0).sin_cos();
    StateVector::from_raw(
        1,
        vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
    )
}

/// Bloch vectors of the single-qubit targets for 2, 3 and 4 classes.
pub fn single_qubit_target_vectors(n_classes: usize) -> Vec<[f64; 3]> {
    match n_classes {
        2 => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        3 => (0..3)
            .map(|k| {
                let a = k as f64 * 2.0 * PI / 3.0;
                [a.sin(), 0.0, a.cos()]
            })
            .collect(),
        4 => {
            let s = 1.0 / 3f64.sqrt();
            vec![
                [s, s, s],
                [s, -s, -s],
                [-s, s, -s],
                [-s, -s, s],
            ]
        }
        _ => Vec::new(),
    }
}

/// Target states: poles, a 120-degree fan in the x-z plane, or a
/// tetrahedron for one qubit; basis states `|c>` for two qubits.
pub fn target_states(n_classes: usize, n_qubits: usize) -> Result<TargetStateSet> {
    if !(2..=4).contains(&n_classes) {
        return Err(Error::config(format!(
            "n_classes must be in 2..=4, got {n_classes}"
        )));
    }
    match n_qubits {
        1 => Ok(TargetStateSet(
            single_qubit_target_vectors(n_classes)
                .into_iter()
                .map(|[x, y, z]| state_from_bloch(x, y, z))
                .collect(),
        )),
        2 => Ok(TargetStateSet(
            (0..n_classes)
                .map(|c| StateVector::basis(2, c))
                .collect::<Result<_>>()?,
        )),
        n => Err(Error::config(format!("n_qubits must be 1 or 2, got {n}"))),
    }
}

/// The unitary one layer applies to one qubit.
pub fn layer_unitary(gate_params: &[f64], x: &FeatureVector, variant: Variant) -> Unitary2 {
    let [x0, x1, x2] = x.0;
    match variant {
        Variant::Separate => {
            let encode = rotation_unchecked(x0, x1, x2);
            let train = rotation_unchecked(gate_params[0], gate_params[1], gate_params[2]);
            train.then_after(&encode)
        }
        Variant::Compact => {
            let (w, b) = gate_params.split_at(3);
            rotation_unchecked(w[0] * x0 + b[0], w[1] * x1 + b[1], w[2] * x2 + b[2])
        }
    }
}

/// One step of the unrolled circuit for a single sample.
#[derive(Debug, Clone)]
pub(crate) enum CircuitOp {
    Gate {
        qubit: usize,
        matrix: Matrix2,
        /// `(parameter index, d matrix / d parameter)`
        derivatives: Vec<(usize, Matrix2)>,
    },
    Entangle(Entangler),
    LayerEnd,
}

pub(crate) fn apply_op(amps: &mut [Complex64], n_qubits: usize, op: &CircuitOp) {
    match op {
        CircuitOp::Gate { qubit, matrix, .. } => {
            apply_matrix_in_place(amps, n_qubits, matrix, *qubit)
        }
        CircuitOp::Entangle(Entangler::Cz) => apply_cz_in_place(amps, n_qubits, 0, 1),
        CircuitOp::Entangle(Entangler::Cnot) => apply_cx_in_place(amps, n_qubits, 0, 1),
        CircuitOp::Entangle(Entangler::None) | CircuitOp::LayerEnd => {}
    }
}

/// Everything a forward pass records for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// State after each full layer (entangler included), in circuit order.
    pub per_layer_states: Vec<StateVector>,
    pub class_scores: Vec<f64>,
}

impl ForwardTrace {
    pub fn final_state(&self) -> &StateVector {
        self.per_layer_states
            .last()
            .expect("a forward trace has at least one layer")
    }

    pub fn n_layers(&self) -> usize {
        self.per_layer_states.len()
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    config: ModelConfig,
    targets: TargetStateSet,
}

/// Validates `config` and returns the model with seeded initial parameters.
pub fn build_model(config: ModelConfig, seed: u64) -> Result<(Model, ParameterSet)> {
    let model = Model::new(config)?;
    let params = ParameterSet::random(&config, seed);
    Ok((model, params))
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let targets = target_states(config.n_classes, config.n_qubits)?;
        Ok(Model { config, targets })
    }

    /// Replaces the target states, e.g. to relabel classes.
    pub fn with_targets(mut self, targets: TargetStateSet) -> Result<Self> {
        if targets.len() != self.config.n_classes
            || targets.states().iter().any(|t| t.n_qubits() != self.config.n_qubits)
        {
            return Err(Error::domain("target set does not match the model"));
        }
        self.targets = targets;
        Ok(self)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn targets(&self) -> &TargetStateSet {
        &self.targets
    }

    pub fn n_classes(&self) -> usize {
        self.config.n_classes
    }

    /// Unrolls the circuit for one input. Derivative matrices are only
    /// built when `with_derivatives` is set.
    pub(crate) fn circuit(
        &self,
        params: &ParameterSet,
        x: &FeatureVector,
        with_derivatives: bool,
    ) -> Vec<CircuitOp> {
        let cfg = &self.config;
        let mut ops = Vec::with_capacity(cfg.n_layers * (cfg.n_qubits + 2));
        for layer in 0..cfg.n_layers {
            for qubit in 0..cfg.n_qubits {
                let base = params.offset(layer, qubit);
                let g = params.gate(layer, qubit);
                let matrix = *layer_unitary(g, x, cfg.variant).matrix();
                let derivatives = if with_derivatives {
                    gate_derivatives(g, x, cfg.variant, base)
                } else {
                    Vec::new()
                };
                ops.push(CircuitOp::Gate {
                    qubit,
                    matrix,
                    derivatives,
                });
            }
            if cfg.n_qubits == 2 && layer + 1 < cfg.n_layers && cfg.entangler != Entangler::None {
                ops.push(CircuitOp::Entangle(cfg.entangler));
            }
            ops.push(CircuitOp::LayerEnd);
        }
        ops
    }

    /// Class scores for a final state: target fidelities (one qubit) or
    /// the first `n_classes` basis probabilities renormalized (two qubits).
    pub fn class_scores(&self, state: &StateVector) -> Vec<f64> {
        match self.config.readout() {
            Readout::TargetFidelity => self
                .targets
                .states()
                .iter()
                .map(|t| t.fidelity(state).expect("targets share the model width"))
                .collect(),
            Readout::BasisProbability => {
                let probs = state.probabilities();
                let kept = &probs.as_slice()[..self.config.n_classes];
                let total: f64 = kept.iter().sum();
                if total < MARGINAL_FLOOR {
                    vec![1.0 / kept.len() as f64; kept.len()]
                } else {
                    kept.iter().map(|p| p / total).collect()
                }
            }
        }
    }

    /// Runs the circuit from `|0...0>` and records the state after every layer.
    pub fn forward(&self, params: &ParameterSet, x: &FeatureVector) -> Result<ForwardTrace> {
        params.check_shape(&self.config)?;
        if x.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite feature"));
        }
        let n = self.config.n_qubits;
        let mut amps = StateVector::zero(n)?.amplitudes().to_vec();
        let mut per_layer_states = Vec::with_capacity(self.config.n_layers);
        for op in self.circuit(params, x, false) {
            apply_op(&mut amps, n, &op);
            if let CircuitOp::LayerEnd = op {
                per_layer_states.push(StateVector::from_raw(n, amps.clone()));
            }
        }
        let class_scores = self.class_scores(per_layer_states.last().expect("n_layers >= 1"));
        Ok(ForwardTrace {
            per_layer_states,
            class_scores,
        })
    }

    /// Predicted class (argmax, lowest index on ties) and the class scores.
    pub fn predict(&self, params: &ParameterSet, x: &FeatureVector) -> Result<(usize, Vec<f64>)> {
        let trace = self.forward(params, x)?;
        Ok((argmax(&trace.class_scores), trace.class_scores))
    }
}

fn gate_derivatives(
    g: &[f64],
    x: &FeatureVector,
    variant: Variant,
    base: usize,
) -> Vec<(usize, Matrix2)> {
    let [x0, x1, x2] = x.0;
    match variant {
        Variant::Separate => {
            let encode = rotation_unchecked(x0, x1, x2);
            rotation_derivatives(g[0], g[1], g[2])
                .iter()
                .enumerate()
                .map(|(i, d)| (base + i, mat_mul(d, encode.matrix())))
                .collect()
        }
        Variant::Compact => {
            let (w, b) = g.split_at(3);
            let angles = [w[0] * x0 + b[0], w[1] * x1 + b[1], w[2] * x2 + b[2]];
            let d = rotation_derivatives(angles[0], angles[1], angles[2]);
            let mut out = Vec::with_capacity(6);
            for (i, (di, xi)) in d.iter().zip(x.0).enumerate() {
                out.push((base + i, mat_scale(di, Complex64::new(xi, 0.0))));
            }
            for (i, di) in d.iter().enumerate() {
                out.push((base + 3 + i, *di));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::rotation_gate;

    fn cfg(n_qubits: usize, n_layers: usize, variant: Variant, entangler: Entangler) -> ModelConfig {
        ModelConfig {
            n_qubits,
            n_layers,
            variant,
            entangler,
            n_classes: 2,
        }
    }

    fn mat_close(a: &Unitary2, b: &Unitary2, tol: f64) -> bool {
        a.matrix()
            .iter()
            .flatten()
            .zip(b.matrix().iter().flatten())
            .all(|(p, q)| (p - q).norm() < tol)
    }

    #[test]
    fn parameter_counts() {
        let (_, p) = build_model(cfg(1, 3, Variant::Compact, Entangler::None), 1).unwrap();
        assert_eq!(p.len(), 18);
        let (_, p) = build_model(cfg(2, 4, Variant::Separate, Entangler::Cz), 1).unwrap();
        assert_eq!(p.len(), 24);
    }

    #[test]
    fn seeded_init_is_deterministic() {
        let c = cfg(2, 3, Variant::Compact, Entangler::Cz);
        let (_, a) = build_model(c, 99).unwrap();
        let (_, b) = build_model(c, 99).unwrap();
        assert_eq!(a, b);
        let (_, other) = build_model(c, 100).unwrap();
        assert_ne!(a, other);
        assert!(a.values.iter().all(|v| (-PI..PI).contains(v)));
    }

    #[test]
    fn invalid_configs() {
        let bad = cfg(1, 2, Variant::Compact, Entangler::Cz);
        assert!(matches!(build_model(bad, 0), Err(Error::Config(_))));
        assert_eq!(bad.violations()[0].0, "entangler");
        assert!(Model::new(cfg(3, 2, Variant::Compact, Entangler::None)).is_err());
        assert!(Model::new(cfg(1, 0, Variant::Compact, Entangler::None)).is_err());
        let mut five = cfg(1, 2, Variant::Compact, Entangler::None);
        five.n_classes = 5;
        assert!(Model::new(five).is_err());
    }

    #[test]
    fn two_class_single_qubit_targets_are_poles() {
        let t = target_states(2, 1).unwrap();
        assert_eq!(t.states()[0], StateVector::basis(1, 0).unwrap());
        assert!((t.states()[1].fidelity(&StateVector::basis(1, 1).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(t.states()[0].fidelity(&t.states()[1]).unwrap() < 1e-30);
    }

    #[test]
    fn two_qubit_targets_are_basis_states() {
        let t = target_states(4, 2).unwrap();
        for c in 0..4 {
            assert_eq!(t.states()[c], StateVector::basis(2, c).unwrap());
        }
        assert!(target_states(1, 1).is_err());
        assert!(target_states(5, 2).is_err());
    }

    #[test]
    fn three_class_targets_pairwise_quarter() {
        // 120 degrees apart on the sphere: F = (1 + cos 120) / 2 = 0.25
        let t = target_states(3, 1).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let f = t.states()[i].fidelity(&t.states()[j]).unwrap();
                assert!((f - 0.25).abs() < 1e-12, "F({i},{j}) = {f}");
            }
        }
    }

    #[test]
    fn tetrahedron_targets_pairwise_third() {
        let t = target_states(4, 1).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let f = t.states()[i].fidelity(&t.states()[j]).unwrap();
                assert!((f - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compact_zero_is_identity() {
        let x = FeatureVector([0.3, -1.2, 0.7]);
        let u = layer_unitary(&[0.0; 6], &x, Variant::Compact);
        assert!(mat_close(&u, &Unitary2::identity(), 1e-15));
    }

    #[test]
    fn compact_unit_weight_matches_rotation() {
        let x = FeatureVector([0.0, PI, 0.0]);
        let u = layer_unitary(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], &x, Variant::Compact);
        assert!(mat_close(&u, &rotation_gate(0.0, PI, 0.0).unwrap(), 1e-15));
        let s = StateVector::zero(1).unwrap().apply_gate(&u, 0).unwrap();
        assert!((s.probabilities()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separate_zero_theta_is_encoding() {
        let x = FeatureVector([0.4, 0.9, -0.3]);
        let u = layer_unitary(&[0.0; 3], &x, Variant::Separate);
        assert!(mat_close(&u, &rotation_gate(0.4, 0.9, -0.3).unwrap(), 1e-15));
    }

    #[test]
    fn identity_circuit_stays_at_zero() {
        for n in 1..=2 {
            let c = cfg(n, 1, Variant::Compact, if n == 2 { Entangler::Cz } else { Entangler::None });
            let model = Model::new(c).unwrap();
            let p = ParameterSet::zeros(&c);
            let trace = model.forward(&p, &FeatureVector([0.5, -0.5, 0.0])).unwrap();
            assert_eq!(trace.n_layers(), 1);
            assert_eq!(trace.final_state(), &StateVector::zero(n).unwrap());
        }
    }

    #[test]
    fn separate_encoding_flip_scores_class_one() {
        let c = cfg(1, 1, Variant::Separate, Entangler::None);
        let model = Model::new(c).unwrap();
        let p = ParameterSet::zeros(&c);
        let trace = model.forward(&p, &FeatureVector([0.0, PI, 0.0])).unwrap();
        assert!((trace.final_state().probabilities()[1] - 1.0).abs() < 1e-15);
        assert!((trace.class_scores[1] - 1.0).abs() < 1e-15);
        assert_eq!(model.predict(&p, &FeatureVector([0.0, PI, 0.0])).unwrap().0, 1);
    }

    #[test]
    fn two_qubit_trace_shape() {
        let c = cfg(2, 2, Variant::Separate, Entangler::Cz);
        let (model, p) = build_model(c, 5).unwrap();
        let trace = model.forward(&p, &FeatureVector::from_point(0.2, 0.1)).unwrap();
        assert_eq!(trace.per_layer_states.len(), 2);
        for s in &trace.per_layer_states {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.9, 0.1]), 0);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.3, 0.3]), 1);
    }

    #[test]
    fn basis_state_predicts_its_class() {
        let mut c = cfg(2, 1, Variant::Compact, Entangler::Cz);
        c.n_classes = 4;
        let model = Model::new(c).unwrap();
        let scores = model.class_scores(&StateVector::basis(2, 2).unwrap());
        assert_eq!(argmax(&scores), 2);
    }

    #[test]
    fn degenerate_marginal_is_uniform() {
        let c = cfg(2, 1, Variant::Compact, Entangler::Cz);
        let model = Model::new(c).unwrap();
        // two classes keep |00> and |01>, which |11> has no weight on
        let scores = model.class_scores(&StateVector::basis(2, 3).unwrap());
        assert_eq!(scores, vec![0.5, 0.5]);
    }

    #[test]
    fn shape_mismatch_is_domain_error() {
        let c = cfg(1, 2, Variant::Compact, Entangler::None);
        let model = Model::new(c).unwrap();
        let wrong = ParameterSet::zeros(&cfg(1, 3, Variant::Compact, Entangler::None));
        assert!(matches!(
            model.forward(&wrong, &FeatureVector::from_point(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }
}
