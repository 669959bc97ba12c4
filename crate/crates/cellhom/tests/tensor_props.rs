//! Property tests for the Mandel algebra: round trips, the conjugation
//! group action, and invariants under orthogonal maps.

use cellhom::tensor::{Dim, ElasticityTensor, SymTensor2, UnimodularMap};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn symmetric_matrix(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-10.0..10.0f64, dim * dim).prop_map(move |v| {
        let a = DMatrix::from_vec(dim, dim, v);
        (&a + a.transpose()) * 0.5
    })
}

/// Random unimodular map: a well-conditioned random matrix rescaled to
/// |det| = 1 (the sign of the determinant is preserved).
fn unimodular(dim: usize) -> impl Strategy<Value = UnimodularMap> {
    prop::collection::vec(-1.0..1.0f64, dim * dim)
        .prop_filter_map("determinant too small", move |v| {
            let a = DMatrix::from_vec(dim, dim, v);
            let det = a.determinant();
            if det.abs() < 0.2 {
                return None;
            }
            let scale = det.abs().powf(1.0 / dim as f64);
            UnimodularMap::new(a / scale).ok()
        })
}

fn spd_tensor(dim: Dim) -> impl Strategy<Value = ElasticityTensor> {
    let m = dim.mandel_len();
    prop::collection::vec(-1.0..1.0f64, m * m).prop_map(move |v| {
        let a = DMatrix::from_vec(m, m, v);
        let spd = &a * a.transpose() + DMatrix::<f64>::identity(m, m) * 0.5;
        ElasticityTensor::from_mandel_matrix(dim, spd).unwrap()
    })
}

fn rotation3() -> impl Strategy<Value = UnimodularMap> {
    (prop::collection::vec(-1.0..1.0f64, 3), 0.0..std::f64::consts::TAU).prop_filter_map(
        "axis too short",
        |(axis, phi)| {
            let a = DVector::from_vec(axis);
            let n = a.norm();
            if n < 0.1 {
                return None;
            }
            UnimodularMap::rotation_about_axis(&(a / n), phi).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mandel_round_trip_is_exact(full in symmetric_matrix(3)) {
        let t = SymTensor2::from_matrix(&full).unwrap();
        let back = t.to_matrix();
        prop_assert!((back - &full).norm() <= 1e-15 * full.norm().max(1.0));
        prop_assert!((t.norm() - full.norm()).abs() <= 1e-13 * full.norm().max(1.0));
    }

    #[test]
    fn conjugation_is_a_group_action(
        c in spd_tensor(Dim::D3),
        h1 in unimodular(3),
        h2 in unimodular(3),
    ) {
        let lhs = c.conjugate(&h1).unwrap().conjugate(&h2).unwrap();
        let rhs = c.conjugate(&h2.compose(&h1).unwrap()).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs.mandel_matrix() - rhs.mandel_matrix()).norm() <= 1e-12 * scale);
    }

    #[test]
    fn orthogonal_conjugation_preserves_norm(c in spd_tensor(Dim::D3), q in rotation3()) {
        let conj = c.conjugate(&q).unwrap();
        prop_assert!((conj.norm() - c.norm()).abs() <= 1e-12 * c.norm());
    }

    #[test]
    fn orthogonal_conjugation_preserves_coercivity(c in spd_tensor(Dim::D3), q in rotation3()) {
        let a = c.coercivity_margin();
        let b = c.conjugate(&q).unwrap().coercivity_margin();
        prop_assert!((a - b).abs() <= 1e-12 * c.norm().max(1.0));
    }

    #[test]
    fn apply_is_symmetric_bilinear(
        c in spd_tensor(Dim::D3),
        d in symmetric_matrix(3),
        e in symmetric_matrix(3),
    ) {
        // D·ℂE = E·ℂD.
        let d = SymTensor2::from_matrix(&d).unwrap();
        let e = SymTensor2::from_matrix(&e).unwrap();
        let lhs = c.apply(&e).unwrap().dot(&d);
        let rhs = c.apply(&d).unwrap().dot(&e);
        let scale = c.norm() * d.norm() * e.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn group_action_2d(c in spd_tensor(Dim::D2), h1 in unimodular(2), h2 in unimodular(2)) {
        let lhs = c.conjugate(&h1).unwrap().conjugate(&h2).unwrap();
        let rhs = c.conjugate(&h2.compose(&h1).unwrap()).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs.mandel_matrix() - rhs.mandel_matrix()).norm() <= 1e-12 * scale);
    }
}

#[test]
fn constructor_families_pass_their_defining_generators() {
    let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);

    let iso = ElasticityTensor::isotropic(1.7, 0.9, Dim::D3);
    for phi in [0.3, 1.2, 2.9] {
        let axis = DVector::from_column_slice(&[1.0, -2.0, 0.5]).normalize();
        let r = UnimodularMap::rotation_about_axis(&axis, phi).unwrap();
        assert!(iso.sym_residual(&r).unwrap() <= 1e-14);
    }

    let cubic = ElasticityTensor::cubic(3.0, 1.0, 0.9);
    for axis in 0..3 {
        assert!(cubic.sym_residual(&UnimodularMap::quarter_turn(axis)).unwrap() <= 1e-14);
        assert!(cubic
            .sym_residual(&UnimodularMap::axis_reflection(Dim::D3, axis))
            .unwrap()
            <= 1e-14);
    }
    assert!(cubic.sym_residual(&UnimodularMap::cube_diagonal_turn()).unwrap() <= 1e-14);

    let ti = ElasticityTensor::transverse_isotropic(4.0, 6.0, 1.5, 1.1, 1.3, &e3).unwrap();
    for phi in [0.1, 0.7, 2.2] {
        let r = UnimodularMap::rotation_about_axis(&e3, phi).unwrap();
        assert!(ti.sym_residual(&r).unwrap() <= 1e-14);
    }
}

#[test]
fn transverse_isotropic_about_tilted_axis() {
    let axis = DVector::from_column_slice(&[1.0, 1.0, 1.0]).normalize();
    let c = ElasticityTensor::transverse_isotropic(4.0, 6.0, 1.5, 1.1, 1.3, &axis).unwrap();
    for phi in [0.4, 1.9] {
        let r = UnimodularMap::rotation_about_axis(&axis, phi).unwrap();
        assert!(c.sym_residual(&r).unwrap() <= 1e-12);
    }
    // Rotations about e₃ are no longer symmetries.
    let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
    let r = UnimodularMap::rotation_about_axis(&e3, 0.9).unwrap();
    assert!(c.sym_residual(&r).unwrap() > 1e-3);
}
