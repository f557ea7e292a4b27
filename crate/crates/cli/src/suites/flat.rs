use nalgebra::DMatrix;
use twistor_core::checkers::CheckReport;
use twistor_core::expm::expm;
use twistor_core::flat_connection::{
    flatness_residual, integrate_path, observed_order, path_independence_defect, GroupPath, LieValuedForm,
};
use twistor_core::jet::MatrixJet;
use twistor_core::TwistorError;

use super::{eval, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

const PAIRS: usize = 5;

/// Maurer–Cartan form of `g(x) = exp(x₁A) exp(x₂B)`.
fn maurer_cartan(a: &DMatrix<f64>, b: &DMatrix<f64>) -> LieValuedForm<f64> {
    let (a, b) = (a.clone(), b.clone());
    LieValuedForm::maurer_cartan(2, a.nrows(), move |x| {
        Ok(MatrixJet::exp_along(&a, &x[0]).mul(&MatrixJet::exp_along(&b, &x[1])))
    })
}

fn group(a: &DMatrix<f64>, b: &DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    expm(&(a * x[0])) * expm(&(b * x[1]))
}

fn pair(rng: &mut CheckRng) -> (DMatrix<f64>, DMatrix<f64>) {
    (rng.matrix(3, 3), rng.matrix(3, 3))
}

fn invert(name: &str, m: DMatrix<f64>) -> Result<DMatrix<f64>, CliError> {
    m.try_inverse().ok_or_else(|| CliError::Evaluation {
        context: name.into(),
        source: TwistorError::NonInvertible(0),
    })
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let (n, r) = (ctx.points(), ctx.radius(1.0));
    let mut out = Vec::new();

    let name = "maurer-cartan-flatness";
    let mut rng = ctx.rng(name);
    let forms: Vec<_> = (0..PAIRS).map(|_| pair(&mut rng)).map(|(a, b)| maurer_cartan(&a, &b)).collect();
    let res = (0..n)
        .map(|i| eval(name, flatness_residual(&forms[i % PAIRS], &rng.point(2, r))))
        .collect::<Result<_, _>>()?;
    out.push(ctx.report(name, res, tol::MC_FLATNESS));

    // g(p₀)⁻¹ g(p₁) from integrating along the segment
    let name = "group-recovery";
    let mut rng = ctx.rng(name);
    let (a, b) = pair(&mut rng);
    let (p0, p1) = (rng.point(2, r), rng.point(2, r));
    let f = eval(name, integrate_path(&maurer_cartan(&a, &b), &[p0.clone(), p1.clone()], 1000))?;
    let exact = invert(name, group(&a, &b, &p0))? * group(&a, &b, &p1);
    out.push(ctx.report(name, vec![(f - exact).norm()], tol::GROUP_RECOVERY));

    // a constant form along a straight path of length L integrates to exp(L A_v)
    let name = "exp-path";
    let mut rng = ctx.rng(name);
    let (a, b) = pair(&mut rng);
    let form = eval(name, LieValuedForm::constant(vec![a.clone(), b.clone()]))?;
    let end = rng.point(2, 1.0).iter().map(|x| 2.0 * x).collect::<Vec<_>>();
    let f = eval(name, integrate_path(&form, &[vec![0.0, 0.0], end.clone()], 1000))?;
    out.push(ctx.report(name, vec![(f - expm(&(a * end[0] + b * end[1]))).norm()], tol::EXP_PATH));

    let name = "path-independence";
    let mut rng = ctx.rng(name);
    let (a, b) = pair(&mut rng);
    let pa = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    let pb = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let d = eval(name, path_independence_defect(&maurer_cartan(&a, &b), &pa, &pb, 2000))?;
    out.push(ctx.report(name, vec![d], tol::PATH_INDEPENDENCE));

    // |log₂(e(n)/e(2n)) − 2| for the midpoint product rule
    let name = "convergence-order";
    let mut rng = ctx.rng(name);
    let (a, b) = pair(&mut rng);
    let form = maurer_cartan(&a, &b);
    let (p0, p1) = (vec![0.0, 0.0], vec![1.0, 1.0]);
    let exact = invert(name, group(&a, &b, &p0))? * group(&a, &b, &p1);
    let mut res = Vec::new();
    let mut orders = Vec::new();
    for steps in [16, 32, 64] {
        let o = eval(name, observed_order(&form, &[p0.clone(), p1.clone()], &exact, steps))?;
        orders.push(o);
        res.push((o - 2.0).abs());
    }
    let mut report = ctx.report(name, res, tol::ORDER);
    for (steps, o) in [16, 32, 64].iter().zip(orders) {
        report = report.with_aux(format!("order_{steps}"), o);
    }
    out.push(report);

    // a non-flat form: holonomy of a small square ≈ area · ‖B − A‖
    let name = "holonomy-curvature";
    let mut rng = ctx.rng(name);
    let (a, b) = pair(&mut rng);
    let expect_scale = (&b - &a).norm();
    let form = LieValuedForm::new(2, 3, move |x| {
        let o = x[0].order();
        Ok(vec![
            MatrixJet::constant(&a, 2, o).scale_jet(&x[1]),
            MatrixJet::constant(&b, 2, o).scale_jet(&x[0]),
        ])
    });
    let s = 0.05;
    let pa = vec![vec![0.0, 0.0], vec![s, 0.0], vec![s, s]];
    let pb = vec![vec![0.0, 0.0], vec![0.0, s], vec![s, s]];
    let d = eval(name, path_independence_defect(&form, &pa, &pb, 400))?;
    let expect = s * s * expect_scale;
    out.push(ctx.report(name, vec![(d - expect).abs() / expect], tol::HOLONOMY));

    // so(4)-valued forms keep the transported frame orthogonal
    let name = "skew-preservation";
    let mut rng = ctx.rng(name);
    let skew = |m: DMatrix<f64>| &m - m.transpose();
    let (a, b, c) = (skew(rng.matrix(4, 4)), skew(rng.matrix(4, 4)), skew(rng.matrix(4, 4)));
    let form = LieValuedForm::new(2, 4, move |x| {
        let o = x[0].order();
        let c1 = MatrixJet::constant(&c, 2, o);
        Ok(vec![
            MatrixJet::constant(&a, 2, o).add(&c1.scale_jet(&(&x[1] * &x[1]))),
            MatrixJet::constant(&b, 2, o).scale_jet(&x[0].sin()),
        ])
    });
    let mut path = eval(name, GroupPath::new(vec![vec![0.0, 0.0], rng.point(2, 2.0), rng.point(2, 2.0)]))?;
    let f = eval(name, path.integrate(&form, 1000))?.clone();
    out.push(ctx.report(name, vec![(f.transpose() * &f - DMatrix::identity(4, 4)).norm()], tol::SKEW));
    Ok(out)
}
