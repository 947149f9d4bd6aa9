use num_complex::Complex64;
use proptest::prelude::*;
use qplay_core::geometry::{
    bloch_coordinates, layer_point_clouds, phase_hue, simplex_coordinates, Tetrahedron,
};
use qplay_core::model::{FeatureVector, Model, ModelConfig, ParameterSet};
use qplay_core::qstate::{rotation_gate, StateVector};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn state(parts: &[(f64, f64)]) -> StateVector {
    StateVector::normalized(parts.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap()
}

fn amp() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

fn nonzero(parts: &[(f64, f64)]) -> bool {
    parts.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-6
}

proptest! {
    #[test]
    fn bloch_points_lie_on_the_sphere(a in amp(), b in amp()) {
        prop_assume!(nonzero(&[a, b]));
        let [x, y, z] = bloch_coordinates(&state(&[a, b])).unwrap();
        prop_assert!(((x * x + y * y + z * z).sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simplex_weights_are_barycentric(a in amp(), b in amp(), c in amp(), d in amp()) {
        prop_assume!(nonzero(&[a, b, c, d]));
        let s = simplex_coordinates(&state(&[a, b, c, d]), &Tetrahedron::regular()).unwrap();
        prop_assert!(s.weights.iter().all(|&w| w >= -1e-12));
        prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((0.0..2.0 * PI).contains(&s.phase_hue));
        // inside the circumscribed sphere of the tetrahedron
        let r = s.xyz.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(r <= 1.0 + 1e-9);
    }

    #[test]
    fn geometry_ignores_global_phase(a in amp(), b in amp(), c in amp(), d in amp(), g in -PI..PI) {
        prop_assume!(nonzero(&[a, b, c, d]));
        let s = state(&[a, b, c, d]);
        let t = s.with_global_phase(g);
        let tet = Tetrahedron::regular();
        let (ps, pt) = (simplex_coordinates(&s, &tet).unwrap(), simplex_coordinates(&t, &tet).unwrap());
        for k in 0..3 {
            prop_assert!((ps.xyz[k] - pt.xyz[k]).abs() < 1e-12);
        }
        prop_assert!((ps.concurrence - pt.concurrence).abs() < 1e-12);
        let one = state(&[a, b]);
        let (u, v) = (bloch_coordinates(&one).unwrap(), bloch_coordinates(&one.with_global_phase(g)).unwrap());
        for k in 0..3 {
            prop_assert!((u[k] - v[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn ry_moves_the_bloch_vector_in_the_xz_plane() {
    for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
        let s = StateVector::zero(1).unwrap().apply_gate(&rotation_gate(0.0, theta, 0.0).unwrap(), 0).unwrap();
        let [x, y, z] = bloch_coordinates(&s).unwrap();
        assert!((x - theta.sin()).abs() < 1e-9 && y.abs() < 1e-9 && (z - theta.cos()).abs() < 1e-9);
    }
}

#[test]
fn bell_states_sit_on_edge_midpoints() {
    let tet = Tetrahedron::regular();
    let h = FRAC_1_SQRT_2;
    let bells = [
        ([(h, 0.0), (0.0, 0.0), (0.0, 0.0), (h, 0.0)], (0, 3)),
        ([(h, 0.0), (0.0, 0.0), (0.0, 0.0), (-h, 0.0)], (0, 3)),
        ([(0.0, 0.0), (h, 0.0), (h, 0.0), (0.0, 0.0)], (1, 2)),
        ([(0.0, 0.0), (h, 0.0), (-h, 0.0), (0.0, 0.0)], (1, 2)),
    ];
    for (amps, (i, j)) in bells {
        let s = simplex_coordinates(&state(&amps), &tet).unwrap();
        let mid = tet.edge_midpoint(i, j);
        assert!((0..3).all(|k| (s.xyz[k] - mid[k]).abs() < 1e-10));
        assert!((s.concurrence - 1.0).abs() < 1e-10);
    }
    // the two members of each edge differ only in hue
    let plus = state(&bells[0].0);
    let minus = state(&bells[1].0);
    assert!((phase_hue(&plus) - phase_hue(&minus)).abs() > 1.0);
}

#[test]
fn clouds_follow_model_depth_and_collapse_at_zero_parameters() {
    for n_qubits in 1..=2 {
        let config = ModelConfig { n_qubits, n_layers: 3, ..ModelConfig::default() };
        let model = Model::new(config).unwrap();
        let params = ParameterSet::zeros(&config);
        let traces: Vec<_> = (0..10)
            .map(|i| model.forward(&params, &FeatureVector::from_point(0.1 * i as f64, -0.05 * i as f64)).unwrap())
            .collect();
        let labels = vec![0; 10];
        let preds = vec![0; 10];
        let clouds = layer_point_clouds(&traces, &labels, &preds, 200, 1).unwrap();
        assert_eq!(clouds.len(), 3);
        let pole = if n_qubits == 1 { [0.0, 0.0, 1.0] } else { Tetrahedron::regular().vertices()[0] };
        for cloud in &clouds {
            assert_eq!(cloud.points.len(), 10);
            for p in &cloud.points {
                assert!((0..3).all(|k| (p.xyz()[k] - pole[k]).abs() < 1e-12));
                assert!(p.correct());
            }
        }
    }
}

#[test]
fn heterogeneous_traces_are_rejected() {
    let a = ModelConfig { n_layers: 2, ..ModelConfig::default() };
    let b = ModelConfig { n_layers: 3, ..ModelConfig::default() };
    let x = FeatureVector::from_point(0.0, 0.0);
    let ta = Model::new(a).unwrap().forward(&ParameterSet::zeros(&a), &x).unwrap();
    let tb = Model::new(b).unwrap().forward(&ParameterSet::zeros(&b), &x).unwrap();
    assert!(layer_point_clouds(&[ta, tb], &[0, 0], &[0, 0], 200, 0).is_err());
}

#[test]
fn clouds_are_capped_with_a_shared_subsample() {
    let config = ModelConfig { n_layers: 2, ..ModelConfig::default() };
    let model = Model::new(config).unwrap();
    let params = ParameterSet::random(&config, 3);
    let traces: Vec<_> = (0..500)
        .map(|i| model.forward(&params, &FeatureVector::from_point((i as f64 / 250.0) - 1.0, 0.2)).unwrap())
        .collect();
    let labels: Vec<usize> = (0..500).map(|i| i % 2).collect();
    let clouds = layer_point_clouds(&traces, &labels, &labels, 200, 9).unwrap();
    assert!(clouds.iter().all(|c| c.points.len() == 200));
    let again = layer_point_clouds(&traces, &labels, &labels, 200, 9).unwrap();
    assert_eq!(clouds, again);
}
