use num_complex::Complex;
use twistor_core::checkers::{
    fibre_mean_curvature_traced, gram_scale, harmonicity_residual, hwc_residual, pullback_harmonic_oracle, CheckReport,
};
use twistor_core::jet::SmoothMap;
use twistor_core::morphism::registry::{
    build, euclid_r6_admissible, euclid_r6_closed_form, euclid_r6_implicit_residual, to_complex3, Example, EUCLID_R6,
};
use twistor_core::morphism::{
    evaluate_morphism, verify_chart_holomorphy, verify_horizontality, EuclideanTwistorData, MorphismMap, NewtonOptions,
};
use twistor_core::TwistorError;

use super::{eval, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

const DEFAULT_F: [f64; 2] = [0.0, 1.0];

/// Samples in the box away from the pole of the closed form.
fn admissible(rng: &mut CheckRng, n: usize, r: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let q = rng.point(6, r);
        if euclid_r6_admissible(&to_complex3(&q)) {
            out.push(q);
        }
    }
    out
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let data = match build::<f64>(EUCLID_R6, ctx.params()) {
        Ok(Example::Euclid(d)) => d,
        Ok(_) => unreachable!("{EUCLID_R6} is Euclidean"),
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let f_real = ctx.params().get("f").cloned().unwrap_or(DEFAULT_F.to_vec());
    let f: Vec<Complex<f64>> = f_real.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let phi = MorphismMap::new(data.clone());
    let (n, r) = (ctx.points(), ctx.radius(1.0));
    let mut out = Vec::new();

    let mut rng = ctx.rng("harmonicity");
    let res = admissible(&mut rng, n, r)
        .iter()
        .map(|q| eval("harmonicity", harmonicity_residual(&phi, q)))
        .collect::<Result<_, _>>()?;
    out.push(ctx.report("harmonicity", res, tol::HARMONICITY));

    let mut rng = ctx.rng("hwc");
    let res = admissible(&mut rng, n, r)
        .iter()
        .map(|q| {
            let scale = gram_scale(&phi.jet_at(q, 1)?.jacobian()?);
            Ok(hwc_residual(&phi, q)?.1 / scale)
        })
        .collect::<Result<_, TwistorError>>();
    out.push(ctx.report("hwc", eval("hwc", res)?, tol::HWC));

    let opts = NewtonOptions::default();
    if f_real == DEFAULT_F {
        let mut rng = ctx.rng("closed-form");
        let res = admissible(&mut rng, n, r)
            .iter()
            .map(|q| {
                let z = evaluate_morphism(&data, q, &opts)?[0];
                Ok((z - euclid_r6_closed_form(&to_complex3(q))).norm())
            })
            .collect::<Result<_, TwistorError>>();
        out.push(ctx.report("closed-form", eval("closed-form", res)?, tol::CLOSED_FORM));
    }

    let mut rng = ctx.rng("implicit-equation");
    let res = admissible(&mut rng, n, r)
        .iter()
        .map(|q| Ok(euclid_r6_implicit_residual(&f, &to_complex3(q), evaluate_morphism(&data, q, &opts)?[0])))
        .collect::<Result<_, TwistorError>>();
    out.push(ctx.report("implicit-equation", eval("implicit-equation", res)?, tol::IMPLICIT));

    out.push(round_trip(ctx, &data, &opts)?);
    out.push(pullback(ctx, &phi)?);

    // horizontality and chart holomorphy are conditions on h itself, sampled in (z, ξ)
    for (name, check) in [
        ("horizontality", verify_horizontality as fn(&EuclideanTwistorData<f64>, &[Vec<f64>]) -> _),
        ("chart-holomorphy", verify_chart_holomorphy),
    ] {
        let mut rng = ctx.rng(name);
        let res = (0..n)
            .map(|_| eval(name, check(&data, &[rng.point(6, r)])))
            .collect::<Result<_, _>>()?;
        out.push(ctx.report(name, res, tol::CHART));
    }

    // traced geometry is expensive; a few points suffice
    let mut rng = ctx.rng("fibre-minimality");
    let res = admissible(&mut rng, n.min(3), r.min(0.3))
        .iter()
        .map(|q| Ok(fibre_mean_curvature_traced(&phi, q, 1e-2, 8)?.norm()))
        .collect::<Result<_, TwistorError>>();
    out.push(ctx.report("fibre-minimality", eval("fibre-minimality", res)?, tol::FIBRE_TRACED));
    Ok(out)
}

/// `π₁(h⁻¹(h(z, ξ))) = z`; non-convergent solves are reported as degenerate.
fn round_trip(ctx: &Ctx, data: &EuclideanTwistorData<f64>, opts: &NewtonOptions<f64>) -> Result<CheckReport, CliError> {
    let name = "round-trip";
    let mut rng = ctx.rng(name);
    let r = ctx.radius(1.0) / 2.0;
    let (mut res, mut degenerate) = (Vec::new(), 0);
    for _ in 0..ctx.points() {
        let x = rng.point(6, r);
        let q = eval(name, data.h.value_at(&x))?;
        match evaluate_morphism(data, &q, opts) {
            Ok(z) => res.push((z[0] - Complex::new(x[0], x[1])).norm()),
            Err(TwistorError::MaxIterations { .. }) | Err(TwistorError::SingularJacobian(_)) => degenerate += 1,
            Err(e) => return eval(name, Err(e)),
        }
    }
    Ok(ctx.report(name, res, tol::ROUND_TRIP).with_degenerate(degenerate))
}

/// `Δ(Re g∘φ)` for `g = w^d` and `g = −i w^d`, `d ≤ 3`, at up to 20 points.
fn pullback(ctx: &Ctx, phi: &MorphismMap<f64>) -> Result<CheckReport, CliError> {
    let name = "pullback-oracle";
    let mut basis = Vec::new();
    for d in 1..=3 {
        for unit in [Complex::new(1.0, 0.0), Complex::new(0.0, -1.0)] {
            let mut g = vec![Complex::new(0.0, 0.0); d + 1];
            g[d] = unit;
            basis.push(g);
        }
    }
    let mut rng = ctx.rng(name);
    let res = admissible(&mut rng, ctx.points().min(20), ctx.radius(1.0))
        .iter()
        .map(|q| basis.iter().try_fold(0.0f64, |m, g| Ok(m.max(pullback_harmonic_oracle(phi, g, q)?))))
        .collect::<Result<_, TwistorError>>();
    Ok(ctx.report(name, eval(name, res)?, tol::PULLBACK))
}
