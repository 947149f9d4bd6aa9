//! Seeded 2D toy datasets on `[-1, 1]^2`.
//!
//! Every kind has a closed-form labelling rule ([`DatasetKind::label`]).
//! Generation draws candidate points near the structure of the requested
//! class and keeps only those the rule assigns to that class, so stored
//! labels always agree with the rule (before optional label noise) and
//! classes are balanced to within one sample.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Half-width of the square the ground-truth and decision grids cover.
pub const GRID_BOUND: f64 = 1.2;

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_TEST_FRACTION: f64 = 0.25;

const CIRCLE_RADIUS_SQ: f64 = 0.5;
const MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Circle,
    Annulus,
    Xor,
    Moons,
    Spiral,
    ThreeBlobs,
    FourBlobs,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 7] = [
        DatasetKind::Circle,
        DatasetKind::Annulus,
        DatasetKind::Xor,
        DatasetKind::Moons,
        DatasetKind::Spiral,
        DatasetKind::ThreeBlobs,
        DatasetKind::FourBlobs,
    ];

    pub fn allowed_classes(self) -> &'static [usize] {
        match self {
            DatasetKind::Circle | DatasetKind::Xor | DatasetKind::Moons | DatasetKind::Spiral => {
                &[2]
            }
            DatasetKind::Annulus => &[2, 3],
            DatasetKind::ThreeBlobs => &[3],
            DatasetKind::FourBlobs => &[4],
        }
    }

    pub fn default_classes(self) -> usize {
        self.allowed_classes()[0]
    }

    pub fn check_classes(self, n_classes: usize) -> Result<()> {
        if self.allowed_classes().contains(&n_classes) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{self:?} supports {:?} classes, got {n_classes}",
                self.allowed_classes()
            )))
        }
    }

    /// Ground-truth class of the point `(x, y)`.
    pub fn label(self, n_classes: usize, x: f64, y: f64) -> usize {
        match self {
            DatasetKind::Circle => usize::from(x * x + y * y < CIRCLE_RADIUS_SQ),
            DatasetKind::Xor => usize::from(x * y > 0.0),
            DatasetKind::Annulus => {
                let r = x.hypot(y);
                if n_classes == 3 {
                    if r < 0.35 {
                        0
                    } else if r < 0.7 {
                        1
                    } else {
                        2
                    }
                } else {
                    usize::from((0.35..0.75).contains(&r))
                }
            }
            DatasetKind::Moons => moons_label(x, y),
            DatasetKind::Spiral => spiral_label(x, y),
            DatasetKind::ThreeBlobs => nearest(&three_blob_centers(), x, y),
            DatasetKind::FourBlobs => nearest(&FOUR_BLOB_CENTERS, x, y),
        }
    }
}

// Moons live in native coordinates u in [-1, 2], v in [-0.5, 1] and are
// mapped to the unit square by (u - 0.5) / 1.6, (v - 0.25) / 1.6.
const MOON_SCALE: f64 = 1.6;
const MOON_SHIFT: (f64, f64) = (0.5, 0.25);

fn moon_arc_distance(u: f64, v: f64, class: usize) -> f64 {
    let (cx, cy, upper) = if class == 0 {
        (0.0, 0.0, true)
    } else {
        (1.0, 0.5, false)
    };
    let (dx, dy) = (u - cx, v - cy);
    let on_side = if upper { dy >= 0.0 } else { dy <= 0.0 };
    if on_side {
        (dx.hypot(dy) - 1.0).abs()
    } else {
        (dx - 1.0).hypot(dy).min((dx + 1.0).hypot(dy))
    }
}

fn moons_label(x: f64, y: f64) -> usize {
    let u = x * MOON_SCALE + MOON_SHIFT.0;
    let v = y * MOON_SCALE + MOON_SHIFT.1;
    usize::from(moon_arc_distance(u, v, 1) < moon_arc_distance(u, v, 0))
}

fn moon_point(class: usize, t: f64) -> (f64, f64) {
    let (u, v) = if class == 0 {
        (t.cos(), t.sin())
    } else {
        (1.0 - t.cos(), 0.5 - t.sin())
    };
    ((u - MOON_SHIFT.0) / MOON_SCALE, (v - MOON_SHIFT.1) / MOON_SCALE)
}

// Two arms, 1.5 turns each, radius growing linearly to 0.95.
const SPIRAL_TURN_RATE: f64 = 3.0 * PI;
const SPIRAL_RADIUS: f64 = 0.95;

fn spiral_point(arm: usize, t: f64) -> (f64, f64) {
    let a = SPIRAL_TURN_RATE * t + arm as f64 * PI;
    (SPIRAL_RADIUS * t * a.cos(), SPIRAL_RADIUS * t * a.sin())
}

/// Distance from `(x, y)` to an arm, over the arm points sharing the
/// point's polar angle plus both ends of the arm.
fn spiral_arm_distance(x: f64, y: f64, arm: usize) -> f64 {
    let angle = y.atan2(x);
    let dist = |t: f64| {
        let (px, py) = spiral_point(arm, t);
        (x - px).hypot(y - py)
    };
    let mut best = dist(0.0).min(dist(1.0));
    for m in -2..=3 {
        let t = (angle - arm as f64 * PI + 2.0 * PI * m as f64) / SPIRAL_TURN_RATE;
        if (0.0..=1.0).contains(&t) {
            best = best.min(dist(t));
        }
    }
    best
}

fn spiral_label(x: f64, y: f64) -> usize {
    usize::from(spiral_arm_distance(x, y, 1) < spiral_arm_distance(x, y, 0))
}

fn three_blob_centers() -> [(f64, f64); 3] {
    let at = |deg: f64| {
        let a = deg.to_radians();
        (0.55 * a.cos(), 0.55 * a.sin())
    };
    [at(90.0), at(210.0), at(330.0)]
}

const FOUR_BLOB_CENTERS: [(f64, f64); 4] = [(-0.5, 0.5), (0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)];

fn nearest(centers: &[(f64, f64)], x: f64, y: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let d = (x - cx).powi(2) + (y - cy).powi(2);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub n_classes: usize,
    pub seed: u64,
    /// Label-flip probability applied after generation.
    pub noise: f64,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for s in &self.samples {
            counts[s.label] += 1;
        }
        counts
    }
}

/// Noise-free dataset of `n` points.
pub fn generate(kind: DatasetKind, n: usize, seed: u64, n_classes: usize) -> Result<Dataset> {
    generate_with_noise(kind, n, seed, n_classes, 0.0)
}

/// Like [`generate`], then flips each label to a uniformly chosen other
/// class with probability `noise`.
pub fn generate_with_noise(
    kind: DatasetKind,
    n: usize,
    seed: u64,
    n_classes: usize,
    noise: f64,
) -> Result<Dataset> {
    kind.check_classes(n_classes)?;
    if n < 8 {
        return Err(Error::Config(format!("need at least 8 samples, got {n}")));
    }
    if !(0.0..=0.5).contains(&noise) {
        return Err(Error::Config(format!("noise must be in [0, 0.5], got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..n).map(|i| i % n_classes).collect();
    slots.shuffle(&mut rng);

    let mut samples = Vec::with_capacity(n);
    for class in slots {
        let (x, y) = draw_point(kind, n_classes, class, &mut rng)?;
        samples.push(Sample { x, y, label: class });
    }
    if noise > 0.0 {
        for s in &mut samples {
            if rng.random::<f64>() < noise {
                let shift = rng.random_range(1..n_classes);
                s.label = (s.label + shift) % n_classes;
            }
        }
    }
    Ok(Dataset {
        kind,
        n_classes,
        seed,
        noise,
        samples,
    })
}

fn draw_point(
    kind: DatasetKind,
    n_classes: usize,
    class: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let jitter = |sd: f64| Normal::new(0.0, sd).expect("positive standard deviation");
    for _ in 0..MAX_ATTEMPTS {
        let (x, y) = match kind {
            DatasetKind::Circle | DatasetKind::Xor | DatasetKind::Annulus => {
                (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
            }
            DatasetKind::Moons => {
                let (px, py) = moon_point(class, rng.random_range(0.0..=PI));
                let j = jitter(0.12 / MOON_SCALE);
                (px + j.sample(rng), py + j.sample(rng))
            }
            DatasetKind::Spiral => {
                let (px, py) = spiral_point(class, rng.random_range(0.08..=1.0));
                let j = jitter(0.05);
                (px + j.sample(rng), py + j.sample(rng))
            }
            DatasetKind::ThreeBlobs => {
                let (cx, cy) = three_blob_centers()[class];
                let j = jitter(0.2);
                (cx + j.sample(rng), cy + j.sample(rng))
            }
            DatasetKind::FourBlobs => {
                let (cx, cy) = FOUR_BLOB_CENTERS[class];
                let j = jitter(0.2);
                (cx + j.sample(rng), cy + j.sample(rng))
            }
        };
        if (-1.0..=1.0).contains(&x) && (-1.0..=1.0).contains(&y) && kind.label(n_classes, x, y) == class {
            return Ok((x, y));
        }
    }
    Err(Error::Domain(format!(
        "could not place a class-{class} point for {kind:?}"
    )))
}

/// Center of cell `(col, row)` in a `resolution x resolution` lattice over
/// `[-GRID_BOUND, GRID_BOUND]^2`; row 0 is the bottom edge.
pub fn grid_cell_center(col: usize, row: usize, resolution: usize) -> (f64, f64) {
    let width = 2.0 * GRID_BOUND / resolution as f64;
    (
        -GRID_BOUND + (col as f64 + 0.5) * width,
        -GRID_BOUND + (row as f64 + 0.5) * width,
    )
}

/// Rule labels on the lattice, row-major with index `row * resolution + col`.
pub fn ground_truth_grid(kind: DatasetKind, n_classes: usize, resolution: usize) -> Result<Vec<usize>> {
    kind.check_classes(n_classes)?;
    if resolution < 2 {
        return Err(Error::Config(format!("grid resolution must be >= 2, got {resolution}")));
    }
    let mut labels = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let (x, y) = grid_cell_center(col, row, resolution);
            labels.push(kind.label(n_classes, x, y));
        }
    }
    Ok(labels)
}

/// Stratified seeded split into `(train, test)`.
///
/// Each class sends `round(count * test_fraction)` samples to the test
/// slice; both slices are guaranteed nonempty.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    if dataset.samples.len() < 2 {
        return Err(Error::Config("need at least 2 samples to split".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); dataset.n_classes];
    for (i, s) in dataset.samples.iter().enumerate() {
        by_class[s.label].push(i);
    }
    let mut test_idx = Vec::new();
    let mut train_idx = Vec::new();
    for members in &mut by_class {
        members.shuffle(&mut rng);
        let k = (members.len() as f64 * test_fraction).round() as usize;
        test_idx.extend_from_slice(&members[..k]);
        train_idx.extend_from_slice(&members[k..]);
    }
    if test_idx.is_empty() {
        test_idx.push(train_idx.pop().expect("at least two samples"));
    } else if train_idx.is_empty() {
        train_idx.push(test_idx.pop().expect("at least two samples"));
    }
    test_idx.sort_unstable();
    train_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| dataset.samples[i]).collect::<Vec<_>>();
    Ok((pick(&train_idx), pick(&test_idx)))
}

/// Writes `x,y,label` rows; coordinates use the shortest exact round-trip form.
pub fn write_csv<W: Write>(samples: &[Sample], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["x", "y", "label"]).map_err(io)?;
    for s in samples {
        w.write_record([
            s.x.to_string(),
            s.y.to_string(),
            s.label.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers().map_err(|e| Error::Io(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "label"] {
        return Err(Error::Io(format!("expected header x,y,label, got {headers:?}")));
    }
    let mut out = Vec::new();
    for row in r.deserialize::<Sample>() {
        let s = row.map_err(|e| Error::Io(e.to_string()))?;
        if !(s.x.is_finite() && s.y.is_finite()) {
            return Err(Error::Io("non-finite coordinate".into()));
        }
        out.push(s);
    }
    Ok(out)
}
