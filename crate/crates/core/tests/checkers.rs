mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

use twistor_core::checkers::{
    conformality_residual, fibre_mean_curvature, fibre_mean_curvature_traced, gram_scale, harmonic_morphism_residual,
    hwc_from_jacobian, holomorphy_residual, pluriconformality_residual, pullback_harmonic_oracle,
};
use twistor_core::jet::{ComplexMap, RealMap, SmoothMap};
use twistor_core::morphism::registry::{euclid_r6, euclid_r6_admissible, to_complex3};
use twistor_core::morphism::MorphismMap;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn euclid_morphism() -> MorphismMap<f64> {
    MorphismMap::new(euclid_r6(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap())
}

/// Explicit route: orthonormal basis `H` of the row space from the SVD, then
/// the Gram fit of `(A H)ᵀ(A H)`.
fn hwc_via_horizontal_space(a: &DMatrix<f64>) -> f64 {
    let svd = a.clone().svd(true, true);
    let v_t = svd.v_t.unwrap();
    let n = a.nrows();
    let h = v_t.rows(0, n).transpose();
    let b = a * h;
    let g = b.transpose() * &b;
    let lambda = g.trace() / n as f64;
    (g - DMatrix::identity(n, n) * lambda).norm()
}

#[test]
fn hwc_gram_matches_horizontal_space() {
    let mut rng = common::rng(21);
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let m = n + trial % 4;
        let a = if trial % 2 == 0 {
            common::matrix(&mut rng, n, m)
        } else {
            // horizontally conformal: scaled orthonormal rows
            let q = common::rotation(&mut rng, m);
            q.rows(0, n).into_owned() * common::uniform(&mut rng, 0.1, 3.0)
        };
        let (_, gram) = hwc_from_jacobian(&a);
        let explicit = hwc_via_horizontal_space(&a);
        assert!((gram - explicit).abs() < 1e-9, "trial {trial}: {gram} vs {explicit}");
        if trial % 2 == 1 {
            assert!(gram < 1e-12);
        }
    }
}

type Named = (&'static str, Arc<dyn SmoothMap<f64>>, f64);

fn morphism_corpus() -> Vec<Named> {
    vec![
        ("z1^2 on R4", Arc::new(ComplexMap::new(2, 1, |a| Ok(vec![a.z[0].powi(2)]))), 1.0),
        ("z1 z2 on R4", Arc::new(ComplexMap::new(2, 1, |a| Ok(vec![&a.z[0] * &a.z[1]]))), 1.0),
        ("exp z", Arc::new(ComplexMap::new(1, 1, |a| Ok(vec![a.z[0].exp()]))), 1.0),
        ("x1 + i x2 on R3", Arc::new(RealMap::new(3, 2, |x| Ok(vec![x[0].clone(), x[1].clone()]))), 1.0),
        ("euclid-r6", Arc::new(euclid_morphism()), 0.3),
    ]
}

fn non_morphism_corpus() -> Vec<Named> {
    vec![
        ("|z|^2", Arc::new(ComplexMap::new(1, 1, |a| Ok(vec![&a.z[0] * &a.zbar[0]]))), 1.0),
        ("z + 2 zbar", Arc::new(ComplexMap::new(1, 1, |a| Ok(vec![&a.z[0] + &a.zbar[0].scale(c(2.0, 0.0))]))), 1.0),
        ("x1 + 2i x2", Arc::new(RealMap::new(2, 2, |x| Ok(vec![x[0].clone(), x[1].scale(2.0)]))), 1.0),
        ("(x1 x2, x3)", Arc::new(RealMap::new(3, 2, |x| Ok(vec![&x[0] * &x[1], x[2].clone()]))), 1.0),
        ("z1 + |z2|^2", Arc::new(ComplexMap::new(2, 1, |a| Ok(vec![&a.z[0] + &(&a.z[1] * &a.zbar[1])]))), 1.0),
    ]
}

#[test]
fn pullback_oracle_agrees_with_harmonic_morphism_residual() {
    let mut rng = common::rng(4);
    let tol = 1e-8;
    // Re(w^d) and Im(w^d) = Re(−i w^d), d ≤ 3
    let mut basis = Vec::new();
    for d in 1..=3 {
        for unit in [c(1.0, 0.0), c(0.0, -1.0)] {
            let mut g = vec![c(0.0, 0.0); d + 1];
            g[d] = unit;
            basis.push(g);
        }
    }
    for (expect, corpus) in [(true, morphism_corpus()), (false, non_morphism_corpus())] {
        for (name, phi, r) in corpus {
            let mut checked = 0;
            while checked < 20 {
                let pt = common::point(&mut rng, phi.domain_dim(), r);
                if phi.domain_dim() == 6 && !euclid_r6_admissible(&to_complex3(&pt)) {
                    continue;
                }
                checked += 1;
                let scale = gram_scale(&phi.jet_at(&pt, 1).unwrap().jacobian().unwrap());
                let (harm, hwc) = harmonic_morphism_residual(phi.as_ref(), &pt).unwrap();
                let hm_pass = harm <= tol * scale && hwc <= tol * scale;
                let oracle_pass = basis
                    .iter()
                    .all(|g| pullback_harmonic_oracle(phi.as_ref(), g, &pt).unwrap() <= tol * scale);
                assert_eq!(hm_pass, oracle_pass, "{name} at {pt:?}: harm {harm:e}, hwc {hwc:e}");
                assert_eq!(hm_pass, expect, "{name} at {pt:?}");
            }
        }
    }
}

#[test]
fn fibres_of_the_morphism_are_minimal() {
    let phi = euclid_morphism();
    let mut rng = common::rng(9);
    let mut checked = 0;
    while checked < 3 {
        let pt = common::point(&mut rng, 6, 0.3);
        if !euclid_r6_admissible(&to_complex3(&pt)) {
            continue;
        }
        checked += 1;
        let traced = fibre_mean_curvature_traced(&phi, &pt, 1e-2, 8).unwrap();
        assert!(traced.norm() <= 1e-5, "traced mean curvature {:e}", traced.norm());
        assert!(fibre_mean_curvature(&phi, &pt).unwrap().norm() <= 1e-9);
    }
    // a non-minimal control: fibres of |x|² are spheres
    let sq = RealMap::<f64>::new(3, 1, |x| Ok(vec![&(&x[0] * &x[0] + &x[1] * &x[1]) + &(&x[2] * &x[2])]));
    let h = fibre_mean_curvature_traced(&sq, &[1.0, 0.0, 0.0], 1e-2, 8).unwrap();
    // unit sphere, inward mean curvature vector of norm 2
    assert!((h.norm() - 2.0).abs() < 1e-3, "{}", h.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn holomorphy_residual_transports_under_rotations(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let phi = common::poly(&mut rng, 4, 4, 2);
        let jd = common::positive_structure(&mut rng, 2);
        let jt = common::positive_structure(&mut rng, 2);
        let s = common::rotation(&mut rng, 4);
        let s2 = s.clone();
        let phi2 = phi.clone();
        let rotated = RealMap::new(4, 4, move |x| {
            let v = phi2.eval(x)?;
            Ok((0..4)
                .map(|i| {
                    let mut acc = v[0].lift(0.0);
                    for (j, vj) in v.iter().enumerate() {
                        acc += &vj.scale(s2[(i, j)]);
                    }
                    acc
                })
                .collect())
        });
        let pt = common::point(&mut rng, 4, 1.0);
        let r0 = holomorphy_residual(&phi, &jd, &jt, &pt).unwrap();
        let r1 = holomorphy_residual(&rotated, &jd, &jt.so_action(&s).unwrap(), &pt).unwrap();
        prop_assert!(r0 >= 0.0 && r1 >= 0.0);
        prop_assert!((r0 - r1).abs() <= 1e-10 * r0.max(1.0));
    }

    #[test]
    fn conformal_implies_pluriconformal(seed in any::<u64>(), kind in 0u8..4) {
        let mut rng = common::rng(seed);
        let p = match kind {
            0 => common::surface_poly(&mut rng, 2, 3, true, false),
            1 => common::surface_poly(&mut rng, 2, 3, false, true),
            _ => common::surface_poly(&mut rng, 2, 3, true, true),
        };
        let pt = common::point(&mut rng, 2, 1.0);
        let tol = 1e-10 * gram_scale(&p.jet_at(&pt, 1).unwrap().jacobian().unwrap());
        let conf = conformality_residual(&p, &pt).unwrap();
        let pluri = pluriconformality_residual(&p, &pt).unwrap();
        prop_assert!(conf >= 0.0 && pluri >= 0.0);
        if conf <= tol {
            prop_assert!(pluri <= tol);
        }
    }
}
