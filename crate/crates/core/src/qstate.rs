//! Minimal dense state-vector simulator for up to [`MAX_QUBITS`] qubits.
//!
//! Basis index `k` is the binary label `|q0 q1 ... q(n-1)>`, with qubit 0 as
//! the most significant bit. For two qubits this gives the familiar
//! `a|00> + b|01> + c|10> + d|11>` ordering, so `CX(0, 1)` maps
//! `(a, b, c, d)` to `(a, b, d, c)`.
//!
//! Rotations follow `R_Y(t) = exp(-i t Y / 2)` and `R_Z(t) = exp(-i t Z / 2)`;
//! the general rotation is `R(phi, theta, omega) = R_Z(omega) R_Y(theta) R_Z(phi)`.

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 4;

/// Tolerance for the normalization invariant of states and probabilities.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// States are renormalized after a gate only when `| ||psi||^2 - 1 |` exceeds this.
const RENORMALIZE_DRIFT: f64 = 1e-8;

const UNITARY_TOLERANCE: f64 = 1e-10;

/// Raw 2x2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn mat_adjoint(m: &Matrix2) -> Matrix2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub(crate) fn mat_scale(m: &Matrix2, s: Complex64) -> Matrix2 {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

fn rz_matrix(angle: f64) -> Matrix2 {
    let half = angle / 2.0;
    [
        [Complex64::from_polar(1.0, -half), ZERO],
        [ZERO, Complex64::from_polar(1.0, half)],
    ]
}

fn ry_matrix(angle: f64) -> Matrix2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `-i/2 * Z`
fn half_generator_z() -> Matrix2 {
    [
        [Complex64::new(0.0, -0.5), ZERO],
        [ZERO, Complex64::new(0.0, 0.5)],
    ]
}

/// `-i/2 * Y`
fn half_generator_y() -> Matrix2 {
    [
        [ZERO, Complex64::new(-0.5, 0.0)],
        [Complex64::new(0.5, 0.0), ZERO],
    ]
}

/// A single-qubit unitary gate.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: Matrix2,
}

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.m.iter()).finish()
    }
}

impl Unitary2 {
    /// Wraps a matrix after checking `U U^dagger = I` elementwise within 1e-10.
    pub fn from_matrix(m: Matrix2) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("gate matrix has non-finite entries"));
        }
        let u = Unitary2 { m };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::domain(format!(
                "matrix is not unitary (max |U U^dagger - I| = {dev:e})"
            )));
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        Unitary2 {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn pauli_x() -> Self {
        Unitary2 {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Unitary2 {
            m: [[ZERO, -i], [i, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        Unitary2 {
            m: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Unitary2 {
            m: [[h, h], [h, -h]],
        }
    }

    pub fn ry(angle: f64) -> Result<Self> {
        check_angles(&[angle])?;
        Ok(Unitary2 {
            m: ry_matrix(angle),
        })
    }

    pub fn rz(angle: f64) -> Result<Self> {
        check_angles(&[angle])?;
        Ok(Unitary2 {
            m: rz_matrix(angle),
        })
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.m
    }

    /// Matrix product `self * rhs`, i.e. `rhs` acts first.
    pub fn then_after(&self, rhs: &Unitary2) -> Unitary2 {
        Unitary2 {
            m: mat_mul(&self.m, &rhs.m),
        }
    }

    pub fn adjoint(&self) -> Unitary2 {
        Unitary2 {
            m: mat_adjoint(&self.m),
        }
    }

    /// Largest elementwise deviation of `U U^dagger` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = mat_mul(&self.m, &mat_adjoint(&self.m));
        let mut dev: f64 = 0.0;
        for (i, row) in p.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let expected = if i == j { ONE } else { ZERO };
                dev = dev.max((z - expected).norm());
            }
        }
        dev
    }

    /// Applies the gate to a bare single-qubit amplitude pair.
    pub fn apply_to_pair(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (
            self.m[0][0] * a + self.m[0][1] * b,
            self.m[1][0] * a + self.m[1][1] * b,
        )
    }
}

fn check_angles(angles: &[f64]) -> Result<()> {
    if angles.iter().all(|a| a.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain(format!("non-finite rotation angle in {angles:?}")))
    }
}

/// `R(phi, theta, omega) = R_Z(omega) R_Y(theta) R_Z(phi)`.
pub fn rotation_gate(phi: f64, theta: f64, omega: f64) -> Result<Unitary2> {
    check_angles(&[phi, theta, omega])?;
    Ok(rotation_unchecked(phi, theta, omega))
}

pub(crate) fn rotation_unchecked(phi: f64, theta: f64, omega: f64) -> Unitary2 {
    let m = mat_mul(
        &rz_matrix(omega),
        &mat_mul(&ry_matrix(theta), &rz_matrix(phi)),
    );
    Unitary2 { m }
}

/// Partial derivatives of `R(phi, theta, omega)` with respect to each of
/// its three angles, in argument order.
pub(crate) fn rotation_derivatives(phi: f64, theta: f64, omega: f64) -> [Matrix2; 3] {
    let rz_phi = rz_matrix(phi);
    let ry_theta = ry_matrix(theta);
    let rz_omega = rz_matrix(omega);
    let gz = half_generator_z();
    let gy = half_generator_y();
    let d_phi = mat_mul(&rz_omega, &mat_mul(&ry_theta, &mat_mul(&rz_phi, &gz)));
    let d_theta = mat_mul(&rz_omega, &mat_mul(&ry_theta, &mat_mul(&gy, &rz_phi)));
    let d_omega = mat_mul(&gz, &mat_mul(&rz_omega, &mat_mul(&ry_theta, &rz_phi)));
    [d_phi, d_theta, d_omega]
}

/// Measurement distribution over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )))
    }
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Builds a state from explicit amplitudes, which must be finite and
    /// normalized within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::domain(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("non-finite amplitude"));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("state is not normalized (norm^2 = {norm})")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Like [`StateVector::from_amplitudes`] but rescales any nonzero input
    /// to unit norm first.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_target(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Index {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    fn check_pair(&self, control: usize, target: usize) -> Result<()> {
        self.check_target(control)?;
        self.check_target(target)?;
        if control == target {
            return Err(Error::config(format!(
                "control and target must differ (both {control})"
            )));
        }
        Ok(())
    }

    fn renormalize_if_drifted(&mut self) {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > RENORMALIZE_DRIFT {
            let s = norm.sqrt();
            for z in &mut self.amps {
                *z /= s;
            }
        }
    }

    /// Returns `(I x ... x U x ... x I)|psi>` with `U` on `target`.
    pub fn apply_gate(&self, gate: &Unitary2, target: usize) -> Result<Self> {
        self.check_target(target)?;
        let mut out = self.clone();
        apply_matrix_in_place(&mut out.amps, self.n_qubits, gate.matrix(), target);
        out.renormalize_if_drifted();
        Ok(out)
    }

    /// Controlled-NOT: flips `target` where `control` is `|1>`.
    pub fn apply_cx(&self, control: usize, target: usize) -> Result<Self> {
        self.check_pair(control, target)?;
        let mut out = self.clone();
        apply_cx_in_place(&mut out.amps, self.n_qubits, control, target);
        Ok(out)
    }

    /// Controlled-Z: negates amplitudes where both qubits are `|1>`.
    pub fn apply_cz(&self, control: usize, target: usize) -> Result<Self> {
        self.check_pair(control, target)?;
        let mut out = self.clone();
        apply_cz_in_place(&mut out.amps, self.n_qubits, control, target);
        Ok(out)
    }

    pub fn probabilities(&self) -> ProbabilityVector {
        ProbabilityVector(self.amps.iter().map(|z| z.norm_sqr()).collect())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::domain(format!(
                "dimension mismatch: {} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`, clamped into `[0, 1]`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// `C = 2 |ad - bc|` for a two-qubit state `a|00> + b|01> + c|10> + d|11>`.
    pub fn concurrence(&self) -> Result<f64> {
        if self.n_qubits != 2 {
            return Err(Error::domain(format!(
                "concurrence needs exactly 2 qubits, got {}",
                self.n_qubits
            )));
        }
        let [a, b, c, d] = [self.amps[0], self.amps[1], self.amps[2], self.amps[3]];
        Ok((2.0 * (a * d - b * c).norm()).min(1.0))
    }

    /// Multiplies every amplitude by `e^{i gamma}`.
    pub fn with_global_phase(&self, gamma: f64) -> Self {
        let phase = Complex64::from_polar(1.0, gamma);
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|z| z * phase).collect(),
        }
    }

    /// Tensor product `self (x) other`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        check_qubit_count(self.n_qubits + other.n_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }
}

/// Stride of qubit `q` in the amplitude array (qubit 0 is the MSB).
#[inline]
fn stride(n_qubits: usize, q: usize) -> usize {
    1 << (n_qubits - 1 - q)
}

pub(crate) fn apply_matrix_in_place(
    amps: &mut [Complex64],
    n_qubits: usize,
    m: &Matrix2,
    target: usize,
) {
    let s = stride(n_qubits, target);
    for i0 in (0..amps.len()).filter(|i| i & s == 0) {
        let i1 = i0 | s;
        let (a, b) = (amps[i0], amps[i1]);
        amps[i0] = m[0][0] * a + m[0][1] * b;
        amps[i1] = m[1][0] * a + m[1][1] * b;
    }
}

pub(crate) fn apply_cx_in_place(
    amps: &mut [Complex64],
    n_qubits: usize,
    control: usize,
    target: usize,
) {
    let sc = stride(n_qubits, control);
    let st = stride(n_qubits, target);
    for i in 0..amps.len() {
        if i & sc != 0 && i & st == 0 {
            amps.swap(i, i | st);
        }
    }
}

pub(crate) fn apply_cz_in_place(
    amps: &mut [Complex64],
    n_qubits: usize,
    control: usize,
    target: usize,
) {
    let mask = stride(n_qubits, control) | stride(n_qubits, target);
    for (i, z) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *z = -*z;
        }
    }
}

/// Fixed-angle circuit preparing `(|001> + |010> + |100>) / sqrt(3)` from
/// `|000>` using only `R_Y`, `X` and `CX`.
///
/// `R_Y` on qubit 0 puts weight 2/3 on `|1>`, a controlled-`R_Y(pi/2)`
/// (two `CX` with half-angle `R_Y` on the target) splits that branch over
/// qubit 1, then `CX(1,2)`, `CX(0,1)` and `X(0)` move the three terms onto
/// the single-excitation states.
pub fn w_state_circuit() -> Result<StateVector> {
    let first = 2.0 * (2.0f64 / 3.0).sqrt().asin();
    let quarter = std::f64::consts::FRAC_PI_4;
    StateVector::zero(3)?
        .apply_gate(&Unitary2::ry(first)?, 0)?
        .apply_gate(&Unitary2::ry(quarter)?, 1)?
        .apply_cx(0, 1)?
        .apply_gate(&Unitary2::ry(-quarter)?, 1)?
        .apply_cx(0, 1)?
        .apply_cx(1, 2)?
        .apply_cx(0, 1)?
        .apply_gate(&Unitary2::pauli_x(), 0)
}
