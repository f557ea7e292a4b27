mod common;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use twistor_core::checkers::{harmonicity_residual, real_isotropy_residual, IsotropyMode};
use twistor_core::jet::{ComplexMap, MatrixJet, RealMap, SmoothMap};
use twistor_core::lifts::{
    compatible_lift_r4, j_vertical_residual, strictly_compatible_lift_r4, t10_stability_residual, Direction,
    FieldFn, Orientation, TwistorLift,
};
use twistor_core::twistor::HermitianStructure;
use twistor_core::TwistorError;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Minimal, conformal and not complex for any constant structure: the real
/// part of the null curve with `F' = (1 − z², i(1 + z²), 2z cosh s, 2iz sinh s)`.
fn skew_enneper() -> Arc<dyn SmoothMap<f64>> {
    let s = 0.5f64;
    Arc::new(RealMap::new(2, 4, move |x| {
        let z = &x[0].to_complex() + &x[1].to_complex().scale(c(0.0, 1.0));
        let z2 = &z * &z;
        let z3 = &z2 * &z;
        let f = [
            &z - &z3.scale(c(1.0 / 3.0, 0.0)),
            (&z + &z3.scale(c(1.0 / 3.0, 0.0))).scale(c(0.0, 1.0)),
            z2.scale(c(s.cosh(), 0.0)),
            z2.scale(c(0.0, s.sinh())),
        ];
        Ok(f.iter().map(|w| w.re()).collect())
    }))
}

/// `(z, z²)` moved off the origin and inverted in the unit sphere: conformal, not harmonic.
fn inverted_curve() -> Arc<dyn SmoothMap<f64>> {
    Arc::new(RealMap::new(2, 4, |x| {
        let a = twistor_core::jet::ComplexArgs::from_real(x);
        let w1 = &a.z[0] + &a.constant(c(2.0, 0.0));
        let w2 = &a.z[0].powi(2) + &a.constant(c(0.0, 1.0));
        let v = [w1.re(), w1.im(), w2.re(), w2.im()];
        let r2 = v.iter().fold(x[0].lift(0.0), |acc, vi| &acc + &(vi * vi));
        let inv = r2.recip()?;
        Ok(v.iter().map(|vi| vi * &inv).collect())
    }))
}

fn curves() -> Vec<(&'static str, Arc<dyn SmoothMap<f64>>)> {
    vec![
        ("(z, z^2)", Arc::new(ComplexMap::new(1, 2, |a| Ok(vec![a.z[0].clone(), a.z[0].powi(2)])))),
        ("(z, e^z)", Arc::new(ComplexMap::new(1, 2, |a| Ok(vec![a.z[0].clone(), a.z[0].exp()])))),
        ("(z, zbar^2)", Arc::new(ComplexMap::new(1, 2, |a| Ok(vec![a.z[0].clone(), a.zbar[0].powi(2)])))),
        ("skew enneper", skew_enneper()),
        ("inverted", inverted_curve()),
    ]
}

/// `R(x) J₀ R(x)ᵀ` with `R = exp(x₁A) exp(x₂B)`, `A`, `B` skew.
fn rotated_field(rng: &mut rand_chacha::ChaCha8Rng) -> FieldFn<f64> {
    let skew = |m: DMatrix<f64>| &m - m.transpose();
    let (a, b) = (skew(common::matrix(rng, 4, 4)), skew(common::matrix(rng, 4, 4)));
    let j0 = HermitianStructure::<f64>::canonical(2).into_matrix();
    FieldFn::new(2, 4, move |x| {
        let r = MatrixJet::exp_along(&a, &x[0]).mul(&MatrixJet::exp_along(&b, &x[1]));
        Ok(r.mul(&MatrixJet::constant(&j0, x[0].nvars(), x[0].order())).mul(&r.transpose()))
    })
}

/// Lifts of the corpus curves at `pt`: strict lifts (where they exist) and
/// both compatible lifts.
fn lifts_at(pt: &[f64]) -> Vec<(String, TwistorLift<f64>)> {
    let mut out = Vec::new();
    for (name, phi) in curves() {
        match strictly_compatible_lift_r4(phi.clone(), pt) {
            Ok(o) => out.extend(o.lifts().into_iter().map(|l| (format!("{name} strict"), l.clone()))),
            Err(TwistorError::Degenerate(_)) | Err(TwistorError::BranchPoint) => {}
            Err(e) => panic!("{name}: {e}"),
        }
        for o in [Orientation::Positive, Orientation::Negative] {
            if let Ok(l) = compatible_lift_r4(phi.clone(), pt, o) {
                out.push((format!("{name} {o:?}"), l));
            }
        }
    }
    out
}

#[test]
fn vertical_and_t10_conditions_agree() {
    let mut rng = common::rng(17);
    let tol = 1e-9;
    let (mut passes, mut fails) = (0, 0);
    for _ in 0..10 {
        let pt = common::point(&mut rng, 2, 0.8);
        let mut corpus = lifts_at(&pt);
        let base = curves()[0].1.clone();
        let field: Arc<dyn twistor_core::lifts::StructureField<f64>> = Arc::new(rotated_field(&mut rng));
        corpus.push(("rotated field".into(), TwistorLift::new(base, field, &pt).unwrap()));
        for (name, lift) in &corpus {
            for (a, dir) in [(1, Direction::Z), (2, Direction::Zbar)] {
                let v = j_vertical_residual(lift, &pt, a).unwrap() <= tol;
                let t = t10_stability_residual(lift, &pt, dir).unwrap() <= tol;
                assert_eq!(v, t, "{name}, a = {a}");
                if v {
                    passes += 1;
                } else {
                    fails += 1;
                }
            }
        }
    }
    assert!(passes > 0 && fails > 0);
}

#[test]
fn projection_theorems_on_the_corpus() {
    let mut rng = common::rng(23);
    let tol = 1e-9;
    let mut harmonic_seen = 0;
    for _ in 0..10 {
        let pt = common::point(&mut rng, 2, 0.8);
        for (name, lift) in lifts_at(&pt) {
            let holo = lift.holomorphy_residual(&pt).unwrap() <= tol;
            if holo && j_vertical_residual(&lift, &pt, 2).unwrap() <= tol {
                harmonic_seen += 1;
                let h = harmonicity_residual(lift.base.as_ref(), &pt).unwrap();
                assert!(h <= 10.0 * tol, "{name}: harmonicity {h:e}");
            }
            if holo
                && j_vertical_residual(&lift, &pt, 1).unwrap() <= tol
                && t10_stability_residual(&lift, &pt, Direction::Z).unwrap() <= tol
            {
                let iso = real_isotropy_residual(lift.base.as_ref(), &pt, 4, IsotropyMode::Full).unwrap();
                assert!(iso <= 10.0 * tol, "{name}: isotropy {iso:e}");
            }
        }
    }
    assert!(harmonic_seen > 0);
}

#[test]
fn harmonic_skew_enneper_lift_is_vertical() {
    // conformal harmonic: the strict lift satisfies the a = 2 condition but is not constant
    let mut rng = common::rng(29);
    for _ in 0..10 {
        let pt = common::point(&mut rng, 2, 0.8);
        let out = strictly_compatible_lift_r4(skew_enneper(), &pt).unwrap();
        for lift in out.lifts() {
            assert!(lift.holomorphy_residual(&pt).unwrap() < 1e-10);
            assert!(j_vertical_residual(lift, &pt, 2).unwrap() < 1e-9);
            assert!(j_vertical_residual(lift, &pt, 1).unwrap() > 1e-3);
        }
    }
}

fn quat_mul(p: &[f64; 4], q: &[f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

/// Matrix of `x ↦ q x` (`left`) or `x ↦ x q` on `ℍ = ℝ⁴` with basis `1, i, j, k`.
fn quat_structure(q: &[f64; 4], left: bool) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    for c in 0..4 {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        let col = if left { quat_mul(q, &e) } else { quat_mul(&e, q) };
        for r in 0..4 {
            m[(r, c)] = col[r];
        }
    }
    m
}

/// Fibonacci points on the unit sphere of imaginary quaternions.
fn sphere_samples(n: usize) -> Vec<[f64; 4]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let t = golden * i as f64;
            [0.0, r * t.cos(), y, r * t.sin()]
        })
        .collect()
}

#[test]
fn strict_lift_matches_brute_force_compatible_structures() {
    let samples = sphere_samples(64);
    let mut rng = common::rng(31);
    for (name, phi) in curves() {
        for _ in 0..3 {
            let pt = common::point(&mut rng, 2, 0.8);
            let outcome = match strictly_compatible_lift_r4(phi.clone(), &pt) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let d = phi.jet_at(&pt, 1).unwrap().jacobian().unwrap();
            let (a, b): (DVector<f64>, DVector<f64>) = (d.column(0).into(), d.column(1).into());
            for lift in outcome.lifts() {
                let j = lift.structure_at(&pt).unwrap().into_matrix();
                // positive structures are left multiplications, negative ones right
                let left = lift.orientation == Orientation::Positive;
                let residual = |q: &[f64; 4]| (quat_structure(q, left) * &a - &b).norm();
                // the unique member of the family with J a = b
                let qa = [a[0], -a[1], -a[2], -a[3]];
                let bq = [b[0], b[1], b[2], b[3]];
                let mut q = if left { quat_mul(&bq, &qa) } else { quat_mul(&qa, &bq) };
                let n2 = a.norm_squared();
                q.iter_mut().for_each(|x| *x /= n2);
                assert!(q[0].abs() < 1e-10, "{name}: not imaginary");
                assert!((quat_structure(&q, left) - &j).norm() < 1e-9, "{name}: lift differs from the formula");
                // brute force over the sphere: the best sample is the nearest one to q
                let best = samples
                    .iter()
                    .min_by(|x, y| residual(x).partial_cmp(&residual(y)).unwrap())
                    .unwrap();
                let nearest = samples
                    .iter()
                    .min_by(|x, y| {
                        let dx: f64 = (0..4).map(|i| (x[i] - q[i]).powi(2)).sum();
                        let dy: f64 = (0..4).map(|i| (y[i] - q[i]).powi(2)).sum();
                        dx.partial_cmp(&dy).unwrap()
                    })
                    .unwrap();
                assert_eq!(best, nearest, "{name}");
                assert!(samples.iter().all(|s| residual(s) > 0.0));
            }
        }
    }
}

#[test]
fn strict_lift_field_jets_are_consistent() {
    // the field's first-order jet equals a central difference of its values
    let phi = skew_enneper();
    let pt = [0.3, -0.4];
    let lift = strictly_compatible_lift_r4(phi, &pt).unwrap();
    let lift = lift.lifts()[0].clone();
    let jet = lift.field.field_at(&pt, 1).unwrap();
    let h = 1e-5;
    for var in 0..2 {
        let mut p = pt;
        p[var] += h;
        let plus = lift.field.field_at(&p, 0).unwrap().value();
        p[var] -= 2.0 * h;
        let minus = lift.field.field_at(&p, 0).unwrap().value();
        let fd = (plus - minus) / (2.0 * h);
        assert!((fd - jet.d1(var)).norm() < 1e-7);
    }
}
