mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qplay_core::qstate::{rotation_gate, w_state_circuit, StateVector, Unitary2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_state(n_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1 << n_qubits)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

#[test]
fn rotation_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (p, t, o) = (rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
        let got = from2(rotation_gate(p, t, o).unwrap().matrix());
        let want = rotation_closed_form(p, t, o);
        for (rg, rw) in got.iter().zip(&want) {
            assert!(max_dev(rg, rw) < 1e-12);
        }
    }
}

#[test]
fn kernels_match_kronecker_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.random_range(1..=3usize);
        let mut state = random_state(n, &mut rng);
        let mut dense = state.amplitudes().to_vec();
        for _ in 0..rng.random_range(1..=12) {
            let kind = if n == 1 { 0 } else { rng.random_range(0..3) };
            match kind {
                0 => {
                    let q = rng.random_range(0..n);
                    let g = rotation_gate(rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI)).unwrap();
                    state = state.apply_gate(&g, q).unwrap();
                    dense = matvec(&embed_single(&from2(g.matrix()), q, n), &dense);
                }
                _ => {
                    let ctl = rng.random_range(0..n);
                    let tgt = (ctl + rng.random_range(1..n)) % n;
                    if kind == 1 {
                        state = state.apply_cx(ctl, tgt).unwrap();
                        dense = matvec(&embed_controlled(&pauli_x(), ctl, tgt, n), &dense);
                    } else {
                        state = state.apply_cz(ctl, tgt).unwrap();
                        dense = matvec(&embed_controlled(&pauli_z(), ctl, tgt, n), &dense);
                    }
                }
            }
        }
        assert!(max_dev(state.amplitudes(), &dense) < 1e-10);
    }
}

#[test]
fn cnot_matrix_from_oracle_is_the_textbook_one() {
    let m = embed_controlled(&pauli_x(), 0, 1, 2);
    let expected = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(m[i][j], c(expected[i][j] as f64, 0.0));
        }
    }
}

#[test]
fn cz_is_symmetric_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let s = random_state(2, &mut rng);
        assert_eq!(s.apply_cz(0, 1).unwrap(), s.apply_cz(1, 0).unwrap());
    }
}

#[test]
fn w_state_has_three_equal_terms() {
    let p = w_state_circuit().unwrap().probabilities();
    for k in 0..8 {
        let want = if matches!(k, 1 | 2 | 4) { 1.0 / 3.0 } else { 0.0 };
        assert!((p[k] - want).abs() < 1e-10);
    }
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

#[derive(Debug, Clone)]
enum Op {
    Rot(usize, f64, f64, f64),
    Cx(usize, usize),
    Cz(usize, usize),
}

fn ops(n: usize) -> impl Strategy<Value = Vec<Op>> {
    let single = (0..n, angle(), angle(), angle()).prop_map(|(q, a, b, c)| Op::Rot(q, a, b, c));
    let pair = (0..n, 1..n.max(2), any::<bool>()).prop_map(move |(c, d, cz)| {
        let t = (c + d) % n;
        if cz { Op::Cz(c, t) } else { Op::Cx(c, t) }
    });
    if n == 1 {
        prop::collection::vec(single.boxed(), 1..30).boxed()
    } else {
        prop::collection::vec(prop_oneof![single, pair], 1..30).boxed()
    }
}

fn run(n: usize, ops: &[Op]) -> StateVector {
    let mut s = StateVector::zero(n).unwrap();
    for op in ops {
        s = match *op {
            Op::Rot(q, a, b, c) => s.apply_gate(&rotation_gate(a, b, c).unwrap(), q).unwrap(),
            Op::Cx(c, t) => s.apply_cx(c, t).unwrap(),
            Op::Cz(c, t) => s.apply_cz(c, t).unwrap(),
        };
    }
    s
}

proptest! {
    #[test]
    fn norm_is_preserved((n, ops) in (1..=4usize).prop_flat_map(|n| (Just(n), ops(n)))) {
        let s = run(n, &ops);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((s.probabilities().sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotations_are_unitary(a in angle(), b in angle(), c in angle()) {
        prop_assert!(rotation_gate(a, b, c).unwrap().unitarity_deviation() < 1e-10);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(
        ops_a in ops(2), ops_b in ops(2)
    ) {
        let a = run(2, &ops_a);
        let b = run(2, &ops_b);
        let fab = a.fidelity(&b).unwrap();
        prop_assert!((fab - b.fidelity(&a).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&fab));
        prop_assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_changes_nothing_observable(ops in ops(2), gamma in -PI..PI) {
        let s = run(2, &ops);
        let t = s.with_global_phase(gamma);
        for (p, q) in s.probabilities().as_slice().iter().zip(t.probabilities().as_slice()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
        prop_assert!((s.concurrence().unwrap() - t.concurrence().unwrap()).abs() < 1e-12);
        let r = StateVector::basis(2, 1).unwrap();
        prop_assert!((s.fidelity(&r).unwrap() - t.fidelity(&r).unwrap()).abs() < 1e-12);
        prop_assert!((s.fidelity(&t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_in_unit_interval(ops in ops(2)) {
        let cc = run(2, &ops).concurrence().unwrap();
        prop_assert!((0.0..=1.0 + 1e-10).contains(&cc));
    }
}

#[test]
fn product_states_have_zero_concurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = random_state(1, &mut rng);
        let b = random_state(1, &mut rng);
        assert!(a.tensor(&b).unwrap().concurrence().unwrap() < 1e-9);
    }
}

#[test]
fn hadamard_and_rotation_agree_up_to_phase() {
    // H = i R_Z(pi) R_Y(pi/2) up to global phase: check action on |0>
    let h = StateVector::zero(1).unwrap().apply_gate(&Unitary2::hadamard(), 0).unwrap();
    let r = StateVector::zero(1).unwrap().apply_gate(&rotation_gate(0.0, PI / 2.0, 0.0).unwrap(), 0).unwrap();
    assert!((h.fidelity(&r).unwrap() - 1.0).abs() < 1e-12);
    let _: Complex64 = h.inner(&r).unwrap();
}
