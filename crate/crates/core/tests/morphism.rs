mod common;

use num_complex::Complex;

use twistor_core::checkers::{harmonicity_residual, hwc_residual};
use twistor_core::jet::SmoothMap;
use twistor_core::morphism::registry::{
    build, cp3_example_1, cp3_harmonic_morphism, euclid_r6, euclid_r6_admissible, euclid_r6_closed_form,
    euclid_r6_implicit_residual, to_complex3, Example, Params, EUCLID_R6,
};
use twistor_core::morphism::{
    cp3_constraints_residual, cp3_linear_system_residual, evaluate_morphism, verify_chart_holomorphy,
    verify_horizontality, MorphismMap, NewtonOptions,
};

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

#[test]
fn round_trip_and_fibre_invariance() {
    let mut rng = common::rng(41);
    let opts = NewtonOptions::default();
    for f in [vec![c(0.0), c(1.0)], vec![c(0.1), c(1.0), c(0.3)]] {
        let data = euclid_r6(&f).unwrap();
        let mut converged = 0;
        for _ in 0..10 {
            let z = common::point(&mut rng, 2, 0.5);
            for _ in 0..10 {
                let xi = common::point(&mut rng, 4, 0.5);
                let pt = [z.clone(), xi].concat();
                let q = data.h.value_at(&pt).unwrap();
                let Ok(out) = evaluate_morphism(&data, &q, &opts) else { continue };
                converged += 1;
                assert!((out[0] - Complex::new(z[0], z[1])).norm() < 1e-10);
                let r = euclid_r6_implicit_residual(&f, &to_complex3(&q), out[0]);
                assert!(r < 1e-12, "f = {f:?}: implicit residual {r:e}");
            }
        }
        assert!(converged >= 90, "only {converged} of 100 solves converged");
    }
}

#[test]
fn closed_form_and_morphism_checks() {
    let mut rng = common::rng(43);
    let data = euclid_r6(&[c(0.0), c(1.0)]).unwrap();
    let phi = MorphismMap::new(data.clone());
    let mut n = 0;
    while n < 30 {
        let q = common::point(&mut rng, 6, 0.6);
        let qc = to_complex3(&q);
        if !euclid_r6_admissible(&qc) {
            continue;
        }
        n += 1;
        let z = phi.value_at(&q).unwrap();
        assert!((Complex::new(z[0], z[1]) - euclid_r6_closed_form(&qc)).norm() < 1e-10);
        assert!(harmonicity_residual(&phi, &q).unwrap() < 1e-9);
        assert!(hwc_residual(&phi, &q).unwrap().1 < 1e-9);
    }
    let samples: Vec<Vec<f64>> = (0..10).map(|_| common::point(&mut rng, 6, 1.0)).collect();
    assert_eq!(verify_horizontality(&data, &samples).unwrap(), 0.0);
    assert!(verify_chart_holomorphy(&data, &samples).unwrap() < 1e-14);
}

#[test]
fn cp3_constraints_vanish_exactly() {
    let mut rng = common::rng(47);
    let hm = cp3_harmonic_morphism(&[c(0.0), c(1.0), c(-0.5)], &[c(0.2), c(1.0)], &[c(0.0), c(1.0), c(0.7)]);
    for data in [cp3_example_1::<f64>(), hm] {
        for _ in 0..20 {
            let pt = common::point(&mut rng, 6, 1.0);
            assert_eq!(cp3_constraints_residual(&data, &pt).unwrap(), 0.0);
            assert!(cp3_linear_system_residual(&data, &pt).unwrap() < 1e-13);
        }
    }
}

#[test]
fn registry_overrides() {
    let mut params = Params::new();
    params.insert("f".into(), vec![0.0, 2.0]);
    let Example::Euclid(d) = build::<f64>(EUCLID_R6, &params).unwrap() else { panic!("wrong kind") };
    let pt = [0.2, 0.1, 0.0, 0.0, 0.0, 0.0];
    let q = d.h.value_at(&pt).unwrap();
    // ξ = 0: q = (0, 0, f(z))
    assert!((q[4] - 0.4).abs() < 1e-15 && (q[5] - 0.2).abs() < 1e-15);
    params.insert("g".into(), vec![1.0]);
    assert!(build::<f64>(EUCLID_R6, &params).is_err());
}
