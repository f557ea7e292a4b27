use std::sync::Arc;

use twistor_core::checkers::CheckReport;
use twistor_core::first_order::{first_order_residual, jacobi_operator_flat, tension_first_order, FirstOrderKind, MapFamily};
use twistor_core::jet::{ComplexArgs, ComplexMap, PolyMap, RealMap, SmoothMap};
use twistor_core::TwistorError;

use super::{eval, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

type Map = Arc<dyn SmoothMap<f64>>;

fn poly(rng: &mut CheckRng, domain: usize, codomain: usize) -> PolyMap<f64> {
    let n = PolyMap::<f64>::coeff_count(domain, 3);
    let coeffs = (0..codomain).map(|_| (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect();
    PolyMap::new(domain, 3, coeffs).expect("coefficient count matches")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn t_slot(base: &Map, v: Map, pt: &[f64]) -> Result<Vec<f64>, TwistorError> {
    Ok(tension_first_order(&MapFamily::affine(base.clone(), v)?, pt)?.1)
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let (n, r) = (ctx.points(), ctx.radius(1.0));
    let mut out = Vec::new();

    // ∂_t τ(φ₀ + t v) = −J(v) for random polynomial pairs ℝᵐ → ℝⁿ
    let name = "jacobi-relation";
    let mut rng = ctx.rng(name);
    let mut res = Vec::new();
    for _ in 0..n {
        let (m, k) = (1 + rng.below(3), 1 + rng.below(2));
        let base: Map = Arc::new(poly(&mut rng, m, k));
        let v = poly(&mut rng, m, k);
        let pt = rng.point(m, r);
        let dtau = eval(name, t_slot(&base, Arc::new(v.clone()), &pt))?;
        let jv = eval(name, jacobi_operator_flat(&v, &pt))?;
        res.push(dtau.iter().zip(&jv).fold(0.0f64, |acc, (a, b)| acc.max(rel(-a, *b))));
    }
    out.push(ctx.report(name, res, tol::JACOBI));

    let name = "linearity";
    let mut rng = ctx.rng(name);
    let mut res = Vec::new();
    for _ in 0..n {
        let base: Map = Arc::new(poly(&mut rng, 3, 2));
        let (v1, v2) = (poly(&mut rng, 3, 2), poly(&mut rng, 3, 2));
        let sum = {
            let (a, b) = (v1.clone(), v2.clone());
            RealMap::new(3, 2, move |x| Ok(a.eval(x)?.iter().zip(b.eval(x)?).map(|(p, q)| p + &q).collect()))
        };
        let pt = rng.point(3, r);
        let s1 = eval(name, t_slot(&base, Arc::new(v1), &pt))?;
        let s2 = eval(name, t_slot(&base, Arc::new(v2), &pt))?;
        let s12 = eval(name, t_slot(&base, Arc::new(sum), &pt))?;
        res.push((0..2).fold(0.0f64, |acc, k| acc.max(rel(s1[k] + s2[k], s12[k]))));
    }
    out.push(ctx.report(name, res, tol::JACOBI));

    // holomorphic φ₀ and v: every member of the family is harmonic
    let name = "harmonic-variation";
    let mut rng = ctx.rng(name);
    let mut res = Vec::new();
    for _ in 0..n {
        let (c0, c1): (Vec<_>, Vec<_>) = ((0..4).map(|_| rng.complex(1.0)).collect(), (0..4).map(|_| rng.complex(1.0)).collect());
        let base: Map = Arc::new(ComplexMap::new(1, 1, move |a| Ok(vec![a.z[0].polynomial(&c0)])));
        let v: Map = Arc::new(ComplexMap::new(1, 1, move |a| Ok(vec![a.z[0].polynomial(&c1)])));
        let pt = rng.point(2, r);
        let fam = eval(name, MapFamily::affine(base, v))?;
        let (tau, dtau) = eval(name, tension_first_order(&fam, &pt))?;
        res.push(tau.iter().chain(&dtau).fold(0.0f64, |acc, x| acc.max(x.abs())));
    }
    out.push(ctx.report(name, res, tol::JACOBI));

    // ⟨∂_zφ_t, ∂_zφ_t⟩ = t for φ_t = z + t z̄
    let name = "conformal-cross-term";
    let fam = MapFamily::<f64>::new(2, 2, |t, x| {
        let a = ComplexArgs::from_real(x);
        let w = &a.z[0] + &(&t.to_complex() * &a.zbar[0]);
        Ok(vec![w.re(), w.im()])
    });
    let mut rng = ctx.rng(name);
    let res = (0..n)
        .map(|_| {
            let (b, d) = eval(name, first_order_residual(&fam, &rng.point(2, r), &FirstOrderKind::Conformal))?;
            Ok(b + (d - 1.0).abs())
        })
        .collect::<Result<_, CliError>>()?;
    out.push(ctx.report(name, res, tol::JACOBI));
    Ok(out)
}
