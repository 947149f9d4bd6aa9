//! Render-ready geometry for quantum states: Bloch-sphere points for one
//! qubit, Q-simplex (tetrahedron) points for two, and decision grids.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::datasets::grid_cell_center;
use crate::error::{Error, Result};
use crate::model::{argmax, FeatureVector, ForwardTrace, Model, ParameterSet};
use crate::qstate::StateVector;

/// Largest point cloud emitted per layer.
pub const DISPLAY_LIMIT: usize = 200;
pub const DEFAULT_GRID_RESOLUTION: usize = 40;
pub const MIN_GRID_RESOLUTION: usize = 8;
pub const MAX_GRID_RESOLUTION: usize = 200;

/// Amplitudes below this magnitude are treated as zero when fixing phase.
const PHASE_FLOOR: f64 = 1e-12;

/// `(2 Re(conj(a) b), 2 Im(conj(a) b), |a|^2 - |b|^2)` for `a|0> + b|1>`.
pub fn bloch_coordinates(state: &StateVector) -> Result<[f64; 3]> {
    if state.n_qubits() != 1 {
        return Err(Error::Domain(format!(
            "Bloch coordinates need 1 qubit, got {}",
            state.n_qubits()
        )));
    }
    let [a, b] = [state.amplitudes()[0], state.amplitudes()[1]];
    let ab = a.conj() * b;
    Ok([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
}

/// Embedding of the probability 3-simplex; vertex `k` is basis state `|k>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    vertices: [[f64; 3]; 4],
}

impl Tetrahedron {
    /// Regular tetrahedron inscribed in the unit sphere:
    /// `(1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)` over `sqrt(3)` for
    /// `|00>, |01>, |10>, |11>`.
    pub fn regular() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Tetrahedron {
            vertices: [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
        }
    }

    pub fn new(vertices: [[f64; 3]; 4]) -> Result<Self> {
        let [v0, v1, v2, v3] = vertices;
        let e = |v: [f64; 3]| [v[0] - v0[0], v[1] - v0[1], v[2] - v0[2]];
        let (a, b, c) = (e(v1), e(v2), e(v3));
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        let scale = [a, b, c]
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        if !det.is_finite() || det.abs() <= 1e-9 * scale.powi(3).max(f64::MIN_POSITIVE) {
            return Err(Error::Config("tetrahedron vertices are affinely dependent".into()));
        }
        Ok(Tetrahedron { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 3]; 4] {
        &self.vertices
    }

    /// Point with barycentric weights `w`.
    pub fn point(&self, w: &[f64; 4]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (wk, v) in w.iter().zip(&self.vertices) {
            for d in 0..3 {
                p[d] += wk * v[d];
            }
        }
        p
    }

    /// Midpoint of the edge between basis states `i` and `j`.
    pub fn edge_midpoint(&self, i: usize, j: usize) -> [f64; 3] {
        let mut w = [0.0; 4];
        w[i] += 0.5;
        w[j] += 0.5;
        self.point(&w)
    }
}

impl Default for Tetrahedron {
    fn default() -> Self {
        Self::regular()
    }
}

/// Phase of the largest-magnitude amplitude once the global phase is fixed
/// so that the first nonzero amplitude is real and positive; in `[0, 2 pi)`.
/// Ties go to the last index, so Bell states sharing an edge get distinct hues.
pub fn phase_hue(state: &StateVector) -> f64 {
    let amps = state.amplitudes();
    let Some(reference) = amps.iter().find(|z| z.norm() > PHASE_FLOOR) else {
        return 0.0;
    };
    let fix = reference.conj() / reference.norm();
    let mut best = 0;
    for (k, z) in amps.iter().enumerate() {
        if z.norm() + PHASE_FLOOR >= amps[best].norm() {
            best = k;
        }
    }
    let z: Complex64 = amps[best] * fix;
    if z.norm() <= PHASE_FLOOR {
        return 0.0;
    }
    let a = z.arg().rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Position and attributes of a two-qubit state inside the Q-simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexCoords {
    pub xyz: [f64; 3],
    /// Measurement probabilities, used as barycentric weights.
    pub weights: [f64; 4],
    pub concurrence: f64,
    pub phase_hue: f64,
}

pub fn simplex_coordinates(state: &StateVector, tetrahedron: &Tetrahedron) -> Result<SimplexCoords> {
    if state.n_qubits() != 2 {
        return Err(Error::Domain(format!(
            "Q-simplex coordinates need 2 qubits, got {}",
            state.n_qubits()
        )));
    }
    let p = state.probabilities();
    let weights = [p[0], p[1], p[2], p[3]];
    Ok(SimplexCoords {
        xyz: tetrahedron.point(&weights),
        weights,
        concurrence: state.concurrence()?,
        phase_hue: phase_hue(state),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub xyz: [f64; 3],
    pub class_label: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub coords: SimplexCoords,
    pub class_label: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CloudPoint {
    Bloch(BlochPoint),
    Simplex(SimplexPoint),
}

impl CloudPoint {
    pub fn xyz(&self) -> [f64; 3] {
        match self {
            CloudPoint::Bloch(p) => p.xyz,
            CloudPoint::Simplex(p) => p.coords.xyz,
        }
    }

    pub fn class_label(&self) -> usize {
        match self {
            CloudPoint::Bloch(p) => p.class_label,
            CloudPoint::Simplex(p) => p.class_label,
        }
    }

    pub fn correct(&self) -> bool {
        match self {
            CloudPoint::Bloch(p) => p.correct,
            CloudPoint::Simplex(p) => p.correct,
        }
    }
}

/// Maps any state of the model's width to its display point.
pub fn cloud_point(
    state: &StateVector,
    class_label: usize,
    correct: bool,
    tetrahedron: &Tetrahedron,
) -> Result<CloudPoint> {
    match state.n_qubits() {
        1 => Ok(CloudPoint::Bloch(BlochPoint {
            xyz: bloch_coordinates(state)?,
            class_label,
            correct,
        })),
        2 => Ok(CloudPoint::Simplex(SimplexPoint {
            coords: simplex_coordinates(state, tetrahedron)?,
            class_label,
            correct,
        })),
        n => Err(Error::Domain(format!("no display geometry for {n} qubits"))),
    }
}

/// Sorted indices of at most `limit` items out of `n`, chosen with `seed`.
pub fn subsample_indices(n: usize, limit: usize, seed: u64) -> Vec<usize> {
    if n <= limit {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, limit).into_vec();
    idx.sort_unstable();
    idx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCloud {
    pub points: Vec<CloudPoint>,
}

/// One point cloud per layer, with the same (sub)sample in every layer.
pub fn layer_point_clouds(
    traces: &[ForwardTrace],
    labels: &[usize],
    predictions: &[usize],
    limit: usize,
    seed: u64,
) -> Result<Vec<LayerCloud>> {
    if traces.len() != labels.len() || traces.len() != predictions.len() {
        return Err(Error::Domain(format!(
            "{} traces, {} labels, {} predictions",
            traces.len(),
            labels.len(),
            predictions.len()
        )));
    }
    let Some(first) = traces.first() else {
        return Ok(Vec::new());
    };
    let depth = first.n_layers();
    let width = first.final_state().n_qubits();
    if traces
        .iter()
        .any(|t| t.n_layers() != depth || t.per_layer_states.iter().any(|s| s.n_qubits() != width))
    {
        return Err(Error::Domain("traces differ in depth or width".into()));
    }
    let tetrahedron = Tetrahedron::regular();
    let keep = subsample_indices(traces.len(), limit, seed);
    (0..depth)
        .map(|layer| {
            let points = keep
                .iter()
                .map(|&i| {
                    cloud_point(
                        &traces[i].per_layer_states[layer],
                        labels[i],
                        labels[i] == predictions[i],
                        &tetrahedron,
                    )
                })
                .collect::<Result<_>>()?;
            Ok(LayerCloud { points })
        })
        .collect()
}

/// Predicted label and winning score per lattice cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    pub resolution: usize,
    /// Row-major, row 0 at the bottom (`y = -1.2` side).
    pub labels: Vec<usize>,
    pub scores: Vec<f64>,
}

pub fn decision_grid(model: &Model, params: &ParameterSet, resolution: usize) -> Result<DecisionGrid> {
    if !(MIN_GRID_RESOLUTION..=MAX_GRID_RESOLUTION).contains(&resolution) {
        return Err(Error::Config(format!(
            "grid resolution must be in {MIN_GRID_RESOLUTION}..={MAX_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    params.check_shape(model.config())?;
    let cells: Vec<(usize, f64)> = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid_cell_center(k % resolution, k / resolution, resolution);
            let scores = model
                .forward(params, &FeatureVector::from_point(x, y))
                .map(|t| t.class_scores)?;
            let label = argmax(&scores);
            Ok((label, scores[label].clamp(0.0, 1.0)))
        })
        .collect::<Result<_>>()?;
    let (labels, scores) = cells.into_iter().unzip();
    Ok(DecisionGrid {
        resolution,
        labels,
        scores,
    })
}
