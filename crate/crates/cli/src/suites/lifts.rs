use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use twistor_core::checkers::{harmonicity_residual, CheckReport};
use twistor_core::jet::{ComplexMap, MatrixJet, RealMap, SmoothMap};
use twistor_core::lifts::{
    j_vertical_residual, strictly_compatible_lift_r4, t10_stability_residual, Direction, FieldFn, Orientation,
    StructureField, TwistorLift,
};
use twistor_core::twistor::HermitianStructure;
use twistor_core::TwistorError;

use super::{eval, indicator, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

type Map = Arc<dyn SmoothMap<f64>>;

fn curve() -> Map {
    Arc::new(ComplexMap::new(1, 2, |a| Ok(vec![a.z[0].clone(), a.z[0].powi(2)])))
}

/// Real part of the null curve `F' = (1 − z², i(1 + z²), 2z cosh s, 2iz sinh s)`,
/// `s = ½`: conformal and harmonic, complex for no constant structure.
fn skew_enneper() -> Map {
    let s = 0.5f64;
    let c = |re: f64, im: f64| Complex::new(re, im);
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

/// `R J₀ Rᵀ` with `R = exp(x₁A) exp(x₂B)` for random skew `A`, `B`.
fn rotated_field(rng: &mut CheckRng) -> FieldFn<f64> {
    let skew = |m: DMatrix<f64>| &m - m.transpose();
    let (a, b) = (skew(rng.matrix(4, 4)), skew(rng.matrix(4, 4)));
    let j0 = HermitianStructure::<f64>::canonical(2).into_matrix();
    FieldFn::new(2, 4, move |x| {
        let r = MatrixJet::exp_along(&a, &x[0]).mul(&MatrixJet::exp_along(&b, &x[1]));
        Ok(r.mul(&MatrixJet::constant(&j0, x[0].nvars(), x[0].order())).mul(&r.transpose()))
    })
}

fn strict_lift(name: &str, phi: &Map, pt: &[f64]) -> Result<TwistorLift<f64>, CliError> {
    let outcome = eval(name, strictly_compatible_lift_r4(phi.clone(), pt))?;
    let lift = outcome.lifts()[0].clone();
    Ok(lift)
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let (n, r) = (ctx.points(), ctx.radius(0.8));
    let mut out = Vec::new();

    for (label, phi) in [("zz2", curve()), ("enneper", skew_enneper())] {
        let mut rng = ctx.rng(&format!("{label}-lift"));
        let (mut holo, mut vert, mut t10, mut harm, mut sign) = (vec![], vec![], vec![], vec![], vec![]);
        for _ in 0..n {
            let pt = rng.point(2, r);
            let lift = strict_lift(label, &phi, &pt)?;
            let ctx_err = |e: TwistorError| CliError::Evaluation { context: label.into(), source: e };
            holo.push(lift.holomorphy_residual(&pt).map_err(ctx_err)?);
            vert.push(j_vertical_residual(&lift, &pt, 2).map_err(ctx_err)?);
            t10.push(t10_stability_residual(&lift, &pt, Direction::Zbar).map_err(ctx_err)?);
            harm.push(harmonicity_residual(phi.as_ref(), &pt).map_err(ctx_err)?);
            sign.push(indicator(lift.orientation == Orientation::Positive));
        }
        out.push(ctx.report(&format!("{label}-holomorphy"), holo, tol::LIFT_HOLOMORPHY));
        out.push(ctx.report(&format!("{label}-j-vertical-a2"), vert, tol::LIFT_VERTICAL));
        out.push(ctx.report(&format!("{label}-t10-zbar"), t10, tol::LIFT_T10));
        out.push(ctx.report(&format!("{label}-projection-harmonic"), harm, tol::PROJECTION));
        if label == "zz2" {
            out.push(ctx.report("zz2-orientation", sign, 0.0));
        }
    }

    // (z, z²) is real isotropic: its lift is also stable in the z direction
    let name = "zz2-t10-z";
    let mut rng = ctx.rng(name);
    let phi = curve();
    let res = (0..n)
        .map(|_| {
            let pt = rng.point(2, r);
            let lift = strict_lift(name, &phi, &pt)?;
            eval(name, t10_stability_residual(&lift, &pt, Direction::Z))
        })
        .collect::<Result<_, _>>()?;
    out.push(ctx.report(name, res, tol::LIFT_T10));

    // pass/fail of the vertical and the T¹⁰ forms agree, including on lifts that fail both
    let name = "vertical-t10-agreement";
    let mut rng = ctx.rng(name);
    let (mut res, mut passes, mut fails) = (Vec::new(), 0, 0);
    for i in 0..n {
        let pt = rng.point(2, r);
        let lift = match i % 3 {
            0 => strict_lift(name, &curve(), &pt)?,
            1 => strict_lift(name, &skew_enneper(), &pt)?,
            _ => {
                let field: Arc<dyn StructureField<f64>> = Arc::new(rotated_field(&mut rng));
                eval(name, TwistorLift::new(curve(), field, &pt))?
            }
        };
        for (a, dir) in [(1, Direction::Z), (2, Direction::Zbar)] {
            let v = eval(name, j_vertical_residual(&lift, &pt, a))? <= tol::LIFT_VERTICAL;
            let t = eval(name, t10_stability_residual(&lift, &pt, dir))? <= tol::LIFT_T10;
            res.push(indicator(v == t));
            if v {
                passes += 1;
            } else {
                fails += 1;
            }
        }
    }
    out.push(
        ctx.report(name, res, 0.0)
            .with_aux("passes", passes as f64)
            .with_aux("fails", fails as f64),
    );
    Ok(out)
}
