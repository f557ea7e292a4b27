mod common;

use nalgebra::DMatrix;

use twistor_core::expm::expm;
use twistor_core::flat_connection::{
    flatness_residual, integrate_path, observed_order, path_independence_defect, GroupPath, LieValuedForm,
};
use twistor_core::jet::MatrixJet;

/// `g(x) = exp(x₁A) exp(x₂B)` directly, and its Maurer–Cartan form.
fn maurer_cartan(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (impl Fn(&[f64]) -> DMatrix<f64>, LieValuedForm<f64>) {
    let (a2, b2) = (a.clone(), b.clone());
    let (a3, b3) = (a.clone(), b.clone());
    let g = move |x: &[f64]| expm(&(&a2 * x[0])) * expm(&(&b2 * x[1]));
    let form = LieValuedForm::maurer_cartan(2, a.nrows(), move |x| {
        Ok(MatrixJet::exp_along(&a3, &x[0]).mul(&MatrixJet::exp_along(&b3, &x[1])))
    });
    (g, form)
}

fn random_pair(seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = common::rng(seed);
    (common::matrix(&mut rng, 3, 3), common::matrix(&mut rng, 3, 3))
}

#[test]
fn maurer_cartan_pullbacks_are_flat() {
    let mut rng = common::rng(61);
    for seed in 0..5 {
        let (a, b) = random_pair(seed);
        assert!((&a * &b - &b * &a).norm() > 0.1);
        let (_, form) = maurer_cartan(&a, &b);
        for _ in 0..20 {
            let pt = common::point(&mut rng, 2, 1.0);
            assert!(flatness_residual(&form, &pt).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn integration_recovers_the_group_element() {
    let (a, b) = random_pair(1);
    let (g, form) = maurer_cartan(&a, &b);
    let (p0, p1) = (vec![0.2, -0.3], vec![0.9, 0.4]);
    let f = integrate_path(&form, &[p0.clone(), p1.clone()], 1000).unwrap();
    let exact = g(&p0).try_inverse().unwrap() * g(&p1);
    assert!((f - exact).norm() < 1e-6);
}

#[test]
fn constant_form_exponential() {
    let a = random_pair(2).0;
    let form = LieValuedForm::constant(vec![a.clone(), DMatrix::zeros(3, 3)]).unwrap();
    let l = 1.7;
    let f = integrate_path(&form, &[vec![0.0, 0.0], vec![l, 0.0]], 1000).unwrap();
    assert!((f - expm(&(a * l))).norm() < 1e-10);
}

#[test]
fn flat_form_is_path_independent() {
    let (a, b) = random_pair(3);
    let (_, form) = maurer_cartan(&a, &b);
    let pa = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    let pb = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    assert!(path_independence_defect(&form, &pa, &pb, 2000).unwrap() <= 1e-5);
    let zero = LieValuedForm::<f64>::zero(2, 3);
    assert_eq!(path_independence_defect(&zero, &pa, &pb, 10).unwrap(), 0.0);
}

#[test]
fn holonomy_of_small_square_matches_curvature() {
    // α₁ = x₂ A, α₂ = x₁ B: curvature at the origin ∂₁α₂ − ∂₂α₁ = B − A
    let (a, b) = random_pair(4);
    let (a2, b2) = (a.clone(), b.clone());
    let form = LieValuedForm::new(2, 3, move |x| {
        let o = x[0].order();
        Ok(vec![
            MatrixJet::constant(&a2, 2, o).scale_jet(&x[1]),
            MatrixJet::constant(&b2, 2, o).scale_jet(&x[0]),
        ])
    });
    let s = 0.05;
    let pa = vec![vec![0.0, 0.0], vec![s, 0.0], vec![s, s]];
    let pb = vec![vec![0.0, 0.0], vec![0.0, s], vec![s, s]];
    let d = path_independence_defect(&form, &pa, &pb, 400).unwrap();
    let expect = s * s * (&b - &a).norm();
    assert!((d - expect).abs() <= 0.1 * expect, "{d} vs {expect}");
}

#[test]
fn skew_forms_stay_orthogonal() {
    let mut rng = common::rng(67);
    let skew = |m: DMatrix<f64>| &m - m.transpose();
    let (a, b, c) = (skew(common::matrix(&mut rng, 4, 4)), skew(common::matrix(&mut rng, 4, 4)), skew(common::matrix(&mut rng, 4, 4)));
    let form = LieValuedForm::new(2, 4, move |x| {
        let o = x[0].order();
        let c1 = MatrixJet::constant(&c, 2, o);
        Ok(vec![
            MatrixJet::constant(&a, 2, o).add(&c1.scale_jet(&(&x[1] * &x[1]))),
            MatrixJet::constant(&b, 2, o).scale_jet(&x[0].sin()),
        ])
    });
    let mut path = GroupPath::new(vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-0.5, 1.0]]).unwrap();
    let f = path.integrate(&form, 1000).unwrap().clone();
    assert!((f.transpose() * &f - DMatrix::identity(4, 4)).norm() <= 1e-6);
    assert!((path.min_abs_det.unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn midpoint_rule_is_second_order() {
    let (a, b) = random_pair(5);
    let (g, form) = maurer_cartan(&a, &b);
    let (p0, p1) = (vec![0.0, 0.0], vec![1.0, 1.0]);
    let exact = g(&p0).try_inverse().unwrap() * g(&p1);
    for steps in [16, 32, 64] {
        let order = observed_order(&form, &[p0.clone(), p1.clone()], &exact, steps).unwrap();
        assert!((order - 2.0).abs() <= 0.2, "steps {steps}: order {order}");
    }
    // halving the step against a 4× reference
    let reference = integrate_path(&form, &[p0.clone(), p1.clone()], 256).unwrap();
    let e = |n| (integrate_path(&form, &[p0.clone(), p1.clone()], n).unwrap() - &reference).norm();
    let ratio = e(32) / e(64);
    assert!((3.0..5.5).contains(&ratio), "ratio {ratio}");
}
