//! Named example data with polynomial coefficient overrides.
//!
//! * `euclid-r6-f=z`: `n = 1`, `p = 2` on `ℝ⁶`, `μ(z) = (z, 0, 0)`,
//!   `h = ((ξ₁ + zξ̄₂)/(1+|z|²), (ξ₂ − zξ̄₁)/(1+|z|²), f(z) + ξ₁ + ξ₂)`; the
//!   morphism solves `f(z) + q¹ + q² + z(q̄¹ − q̄²) − q³ = 0`. Override `f`.
//! * `cp3-example-1`: `α = ξ+z₁, β = ξ+z₂, w = 2ξ, γ = ξ²+z₁, δ = ξ²+z₂`.
//! * `cp3-harmonic-morphism`: `w = P(z), α = Q(ξ₁), β = iR(ξ₂), γ = wα, δ = wβ`.
//!   Override `P`, `Q`, `R`.
//!
//! Coefficient lists are real, lowest degree first.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::{Cp3Data, EuclideanTwistorData};
use crate::error::{Result, TwistorError};
use crate::jet::ComplexMap;
use crate::scalar::{cabs, Real};
use crate::twistor::mu_len;

pub const EUCLID_R6: &str = "euclid-r6-f=z";
pub const CP3_EXAMPLE_1: &str = "cp3-example-1";
pub const CP3_HARMONIC_MORPHISM: &str = "cp3-harmonic-morphism";

pub type Params = BTreeMap<String, Vec<f64>>;

pub fn names() -> [&'static str; 3] {
    [CP3_EXAMPLE_1, CP3_HARMONIC_MORPHISM, EUCLID_R6]
}

#[derive(Debug, Clone)]
pub enum Example<S: Real> {
    Euclid(EuclideanTwistorData<S>),
    Cp3(Cp3Data<S>),
}

fn coeffs<S: Real>(c: &[f64]) -> Vec<Complex<S>> {
    c.iter().map(|&x| Complex::new(S::lit(x), S::zero())).collect()
}

fn param<'a>(params: &'a Params, key: &str, default: &'a [f64], allowed: &[&str]) -> Result<&'a [f64]> {
    if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(TwistorError::InvalidArgument(format!(
            "unknown parameter {bad:?} (expected one of {allowed:?})"
        )));
    }
    Ok(params.get(key).map_or(default, |v| v.as_slice()))
}

/// Builds a registry example.
pub fn build<S: Real>(name: &str, params: &Params) -> Result<Example<S>> {
    match name {
        EUCLID_R6 => {
            let f = param(params, "f", &[0.0, 1.0], &["f"])?;
            Ok(Example::Euclid(euclid_r6(&coeffs(f))?))
        }
        CP3_EXAMPLE_1 => {
            param(params, "", &[], &[])?;
            Ok(Example::Cp3(cp3_example_1()))
        }
        CP3_HARMONIC_MORPHISM => {
            let allowed = ["P", "Q", "R"];
            let p = param(params, "P", &[0.0, 1.0], &allowed)?;
            let q = param(params, "Q", &[0.0, 1.0], &allowed)?;
            let r = param(params, "R", &[0.0, 1.0], &allowed)?;
            Ok(Example::Cp3(cp3_harmonic_morphism(&coeffs(p), &coeffs(q), &coeffs(r))))
        }
        _ => Err(TwistorError::InvalidArgument(format!("unknown example {name:?}"))),
    }
}

fn mu_z<S: Real>() -> ComplexMap<S> {
    ComplexMap::new(3, mu_len(3), |a| {
        let zero = a.constant(Complex::new(S::zero(), S::zero()));
        Ok(vec![a.z[0].clone(), zero.clone(), zero])
    })
}

fn euclid_h<S: Real>(f: &[Complex<S>], sign: S) -> ComplexMap<S> {
    let f = f.to_vec();
    ComplexMap::new(3, 3, move |a| {
        let (z, x1, x2) = (&a.z[0], &a.z[1], &a.z[2]);
        let den = (&(z * &a.zbar[0]) + &a.constant(Complex::new(S::one(), S::zero()))).recip()?;
        let q1 = &(x1 + &(z * &a.zbar[2])) * &den;
        let q2 = &(x2 - &(z * &a.zbar[1])) * &den;
        let s = Complex::new(sign, S::zero());
        let q3 = &z.polynomial(&f) + &(x1 + x2).scale(s);
        Ok(vec![q1, q2, q3])
    })
}

/// The `euclid-r6-f=z` data for a holomorphic polynomial `f`.
pub fn euclid_r6<S: Real>(f: &[Complex<S>]) -> Result<EuclideanTwistorData<S>> {
    EuclideanTwistorData::new(1, 2, euclid_h(f, S::one()), mu_z())
}

/// Variant with third component `f(z) − ξ₁ − ξ₂`; its chart image is
/// `w = (ξ₁, ξ₂, f(z) − ξ₁ − ξ₂)`.
pub fn euclid_r6_displayed<S: Real>(f: &[Complex<S>]) -> Result<EuclideanTwistorData<S>> {
    EuclideanTwistorData::new(1, 2, euclid_h(f, -S::one()), mu_z())
}

/// `(q³ − q¹ − q²)/(1 + q̄¹ − q̄²)`, the morphism for `f(z) = z`.
pub fn euclid_r6_closed_form<S: Real>(q: &[Complex<S>; 3]) -> Complex<S> {
    (q[2] - q[0] - q[1]) / (Complex::new(S::one(), S::zero()) + q[0].conj() - q[1].conj())
}

/// `|f(z) + q¹ + q² + z(q̄¹ − q̄²) − q³|`.
pub fn euclid_r6_implicit_residual<S: Real>(f: &[Complex<S>], q: &[Complex<S>; 3], z: Complex<S>) -> S {
    let fz = f.iter().rev().fold(Complex::new(S::zero(), S::zero()), |acc, &c| acc * z + c);
    cabs(fz + q[0] + q[1] + z * (q[0].conj() - q[1].conj()) - q[2])
}

/// Pole guard for the `f(z) = z` closed form: `|1 + q̄¹ − q̄²| > 0.2`.
pub fn euclid_r6_admissible<S: Real>(q: &[Complex<S>; 3]) -> bool {
    cabs(Complex::new(S::one(), S::zero()) + q[0].conj() - q[1].conj()) > S::lit(0.2)
}

/// Complex coordinates from interleaved real ones.
pub fn to_complex3<S: Real>(x: &[S]) -> [Complex<S>; 3] {
    [
        Complex::new(x[0], x[1]),
        Complex::new(x[2], x[3]),
        Complex::new(x[4], x[5]),
    ]
}

pub fn cp3_example_1<S: Real>() -> Cp3Data<S> {
    let two = Complex::new(S::lit(2.0), S::zero());
    Cp3Data::new(
        2,
        |a| &a.z[2] + &a.z[0],
        |a| &a.z[2] + &a.z[1],
        |a| &a.z[2].powi(2) + &a.z[0],
        |a| &a.z[2].powi(2) + &a.z[1],
        move |a| a.z[2].scale(two),
    )
    .expect("n_z = 2 is valid")
}

pub fn cp3_harmonic_morphism<S: Real>(p: &[Complex<S>], q: &[Complex<S>], r: &[Complex<S>]) -> Cp3Data<S> {
    let (p, q, r) = (p.to_vec(), q.to_vec(), r.to_vec());
    let i = Complex::new(S::zero(), S::one());
    let (p2, p3, q2, r2) = (p.clone(), p.clone(), q.clone(), r.clone());
    Cp3Data::new(
        1,
        move |a| a.z[1].polynomial(&q),
        move |a| a.z[2].polynomial(&r).scale(i),
        move |a| &a.z[0].polynomial(&p2) * &a.z[1].polynomial(&q2),
        move |a| &a.z[0].polynomial(&p3) * &a.z[2].polynomial(&r2).scale(i),
        move |a| a.z[0].polynomial(&p),
    )
    .expect("n_z = 1 is valid")
}

/// The displayed real derivative of `(x₁, x₂, x₄)` at the origin for the
/// harmonic-morphism data with `P'(0) = p`, `Q'(0) = q`, `R'(0) = r`.
pub fn displayed_hm_jacobian<S: Real>(p: S, q: S, r: S) -> DMatrix<S> {
    let o = S::zero();
    DMatrix::from_row_slice(
        6,
        6,
        &[
            o, -q, o, o, o, o, //
            o, o, o, o, o, r, //
            p, o, o, o, o, o, //
            o, o, o, o, q, o, //
            o, o, r, o, o, o, //
            o, o, o, p, o, o,
        ],
    )
}

/// Newton seed convention used by the registry: the origin.
pub fn origin<S: Real>() -> Vec<S> {
    vec![S::zero(); 6]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{
        cp3_constraints_residual, cp3_local_diffeo_check, cp3_point, cp3_tilde_jacobian, evaluate_morphism,
        invert_h, verify_chart_holomorphy, verify_horizontality, NewtonOptions,
    };
    use crate::jet::SmoothMap;

    fn z() -> Vec<Complex<f64>> {
        coeffs(&[0.0, 1.0])
    }

    #[test]
    fn euclid_chart_image_is_as_printed() {
        let pt = [0.3, -0.2, 0.5, 0.1, -0.4, 0.7];
        let d = euclid_r6_displayed::<f64>(&z()).unwrap();
        let w = d.chart_jets(&pt, 0).unwrap();
        let [zc, x1, x2] = to_complex3(&pt);
        assert!((w[0].value() - x1).norm() < 1e-15);
        assert!((w[1].value() - x2).norm() < 1e-15);
        assert!((w[2].value() - (zc - x1 - x2)).norm() < 1e-15);
        let d = euclid_r6::<f64>(&z()).unwrap();
        let w = d.chart_jets(&pt, 0).unwrap();
        assert!((w[2].value() - (zc + x1 + x2)).norm() < 1e-15);
    }

    #[test]
    fn euclid_conditions() {
        let d = euclid_r6::<f64>(&z()).unwrap();
        let pts = vec![vec![0.3, -0.2, 0.5, 0.1, -0.4, 0.7], vec![-1.0, 0.5, 0.2, 0.2, 0.9, -0.3]];
        assert_eq!(verify_horizontality(&d, &pts).unwrap(), 0.0);
        assert!(verify_chart_holomorphy(&d, &pts).unwrap() < 1e-14);
    }

    #[test]
    fn euclid_round_trip_and_closed_form() {
        let d = euclid_r6::<f64>(&z()).unwrap();
        let opts = NewtonOptions::default();
        let x0 = [0.4, -0.3, 0.2, 0.6, -0.5, 0.1];
        let q = d.h.value_at(&x0).unwrap();
        let rep = invert_h(d.h.as_ref(), &q, &origin(), &opts).unwrap();
        for (a, b) in rep.point.iter().zip(&x0) {
            assert!((a - b).abs() < 1e-12);
        }
        let zc = evaluate_morphism(&d, &q, &opts).unwrap()[0];
        let qc = to_complex3(&q);
        assert!((zc - euclid_r6_closed_form(&qc)).norm() < 1e-12);
        assert!(euclid_r6_implicit_residual(&z(), &qc, zc) < 1e-12);
    }

    #[test]
    fn cp3_examples_satisfy_constraints() {
        let pts = [[0.1, -0.2, 0.3, 0.05, -0.1, 0.2], [0.0; 6]];
        let hm = build::<f64>(CP3_HARMONIC_MORPHISM, &Params::new()).unwrap();
        let e1 = build::<f64>(CP3_EXAMPLE_1, &Params::new()).unwrap();
        for ex in [hm, e1] {
            let Example::Cp3(d) = ex else { panic!() };
            for pt in pts {
                assert_eq!(cp3_constraints_residual(&d, &pt).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn hm_simplified_point() {
        let d = cp3_harmonic_morphism::<f64>(&coeffs(&[0.0, 1.0, 0.5]), &coeffs(&[0.0, 2.0]), &coeffs(&[0.0, -1.0, 1.0]));
        let pt = [0.2, 0.1, 0.3, -0.4, 0.0, 0.0];
        let x = cp3_point(&d, &pt).unwrap();
        let zc = Complex::new(0.2, 0.1);
        let w = zc + zc * zc * 0.5;
        let alpha = Complex::new(0.3, -0.4) * 2.0;
        assert!((x[0] + alpha.conj() * (1.0 + w.norm_sqr())).norm() < 1e-14);
        assert!(x[1].norm() < 1e-15);
        assert!((x[2] - 1.0).norm() < 1e-14);
        assert!((x[3] - w).norm() < 1e-14);
    }

    #[test]
    fn hm_jacobian_pattern() {
        for (p, q, r) in [(1.0, 1.0, 1.0), (2.0, -3.0, 0.5)] {
            let d = cp3_harmonic_morphism::<f64>(&coeffs(&[0.0, p]), &coeffs(&[0.0, q]), &coeffs(&[0.0, r]));
            let jac = cp3_tilde_jacobian(&d, &[0.0; 6]).unwrap();
            assert!((&jac - displayed_hm_jacobian(p, q, r)).amax() < 1e-15);
            let det: f64 = jac.determinant();
            assert!((det.abs() - (p * q * r).powi(2)).abs() < 1e-12);
            assert!(cp3_local_diffeo_check(&d, &[0.0; 6]).unwrap() > 0.1);
        }
        let d = cp3_harmonic_morphism::<f64>(&coeffs(&[0.0, 0.0]), &coeffs(&[0.0, 1.0]), &coeffs(&[0.0, 1.0]));
        assert!(cp3_local_diffeo_check(&d, &[0.0; 6]).unwrap() < 1e-15);
    }

    #[test]
    fn registry_rejects_unknown() {
        assert!(build::<f64>("nope", &Params::new()).is_err());
        let mut p = Params::new();
        p.insert("g".into(), vec![1.0]);
        assert!(build::<f64>(EUCLID_R6, &p).is_err());
        assert_eq!(names().len(), 3);
    }
}
