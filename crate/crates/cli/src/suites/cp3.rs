use twistor_core::checkers::CheckReport;
use twistor_core::morphism::registry::{build, displayed_hm_jacobian, origin, Example, Params, CP3_EXAMPLE_1, CP3_HARMONIC_MORPHISM};
use twistor_core::morphism::{
    cp3_constraints_residual, cp3_linear_system_residual, cp3_local_diffeo_check, cp3_tilde_jacobian, Cp3Data,
};

use super::{eval, indicator, Ctx};
use crate::tolerances as tol;
use crate::CliError;

const MIN_SINGULAR_VALUE: f64 = 1e-8;

fn data(name: &str, params: &Params) -> Result<Cp3Data<f64>, CliError> {
    match build::<f64>(name, params) {
        Ok(Example::Cp3(d)) => Ok(d),
        Ok(_) => unreachable!("{name} is a CP3 example"),
        Err(e) => Err(CliError::Config(e.to_string())),
    }
}

/// Linear coefficient of a polynomial parameter (default `z`).
fn slope(params: &Params, key: &str) -> f64 {
    params.get(key).and_then(|c| c.get(1).copied()).unwrap_or(if params.contains_key(key) { 0.0 } else { 1.0 })
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let examples = [
        ("example-1", data(CP3_EXAMPLE_1, &Params::new())?),
        ("harmonic-morphism", data(CP3_HARMONIC_MORPHISM, ctx.params())?),
    ];
    let (n, r) = (ctx.points(), ctx.radius(1.0));
    let mut out = Vec::new();
    for (label, d) in &examples {
        // the data equations hold identically: exact zero expected
        let name = format!("constraints-{label}");
        let mut rng = ctx.rng(&name);
        let res = (0..n)
            .map(|_| eval(&name, cp3_constraints_residual(d, &rng.point(6, r))))
            .collect::<Result<_, _>>()?;
        out.push(ctx.report(&name, res, 0.0));

        let name = format!("linear-system-{label}");
        let mut rng = ctx.rng(&name);
        let res = (0..n)
            .map(|_| eval(&name, cp3_linear_system_residual(d, &rng.point(6, r))))
            .collect::<Result<_, _>>()?;
        out.push(ctx.report(&name, res, tol::CP3_LINEAR));

        let name = format!("local-diffeo-{label}");
        let sv = eval(&name, cp3_local_diffeo_check(d, &origin()))?;
        out.push(ctx.report(&name, vec![indicator(sv > MIN_SINGULAR_VALUE)], 0.0).with_aux("min_singular_value", sv));
    }

    let hm = &examples[1].1;
    let (p, q, rr) = (slope(ctx.params(), "P"), slope(ctx.params(), "Q"), slope(ctx.params(), "R"));
    let name = "hm-jacobian-pattern";
    let jac = eval(name, cp3_tilde_jacobian(hm, &origin()))?;
    let displayed = displayed_hm_jacobian(p, q, rr);
    out.push(ctx.report(name, vec![(&jac - &displayed).amax()], tol::CP3_JACOBIAN));

    let name = "hm-jacobian-det";
    let det = jac.determinant();
    let expect = (p * q * rr).powi(2);
    out.push(
        ctx.report(name, vec![(det.abs() - expect).abs() / expect.max(1.0)], tol::CP3_JACOBIAN)
            .with_aux("det", det)
            .with_aux("displayed_det", displayed.determinant()),
    );
    Ok(out)
}
