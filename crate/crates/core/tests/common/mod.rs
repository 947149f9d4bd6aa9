//! Dense-matrix oracle shared by the integration tests. Everything here is
//! built from explicit Kronecker products and matrix products, without the
//! indexed kernels under test.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn from2(m: &[[Complex64; 2]; 2]) -> Dense {
    m.iter().map(|r| r.to_vec()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `I x ... x U x ... x I` with `U` at position `target` (qubit 0 leftmost).
pub fn embed_single(u: &Dense, target: usize, n_qubits: usize) -> Dense {
    let mut out = identity(1);
    for q in 0..n_qubits {
        let factor = if q == target { u.clone() } else { identity(2) };
        out = kron(&out, &factor);
    }
    out
}

/// `|0><0| x I + |1><1| x U` on (control, target), built from projectors.
pub fn embed_controlled(u: &Dense, control: usize, target: usize, n_qubits: usize) -> Dense {
    let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
    let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let mut a = identity(1);
    let mut b = identity(1);
    for q in 0..n_qubits {
        let (fa, fb) = if q == control {
            (p0.clone(), p1.clone())
        } else if q == target {
            (identity(2), u.clone())
        } else {
            (identity(2), identity(2))
        };
        a = kron(&a, &fa);
        b = kron(&b, &fb);
    }
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn pauli_x() -> Dense {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Dense {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// `R_Z(omega) R_Y(theta) R_Z(phi)` written out in closed form.
pub fn rotation_closed_form(phi: f64, theta: f64, omega: f64) -> Dense {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = |a: f64| Complex64::from_polar(1.0, a);
    vec![
        vec![e(-(phi + omega) / 2.0) * co, -e((phi - omega) / 2.0) * s],
        vec![e(-(phi - omega) / 2.0) * s, e((phi + omega) / 2.0) * co],
    ]
}

pub fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
