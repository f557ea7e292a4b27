use nalgebra::DMatrix;
use num_complex::Complex;
use twistor_core::checkers::CheckReport;
use twistor_core::linalg::{null_space, ComplexMatrix};
use twistor_core::twistor::{
    j_from_mu, mu_from_j, mu_len, special_orthogonal_from, HermitianStructure, IsotropicSubspace, MuParameter,
};
use twistor_core::TwistorError;

use super::{eval, indicator, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

type Res = Result<f64, TwistorError>;

fn rotation(rng: &mut CheckRng, n: usize) -> Result<DMatrix<f64>, TwistorError> {
    special_orthogonal_from(rng.matrix(n, n))
}

fn structure(rng: &mut CheckRng, k: usize) -> Result<HermitianStructure<f64>, TwistorError> {
    HermitianStructure::canonical(k).so_action(&rotation(rng, 2 * k)?)
}

/// Runs `f` once per sample with `k` cycling through 1, 2, 3.
fn per_sample(ctx: &Ctx, name: &str, n: usize, mut f: impl FnMut(&mut CheckRng, usize) -> Res) -> Result<Vec<f64>, CliError> {
    let mut rng = ctx.rng(name);
    (0..n).map(|i| eval(name, f(&mut rng, 1 + i % 3))).collect()
}

/// Distance of the rows of `b` from the span of the rows of `a`, relative to `‖b‖`.
fn span_distance(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
    let q = a.transpose().qr().q();
    let bt = b.transpose();
    let proj = &q * (q.adjoint() * &bt);
    (bt - proj).norm() / b.norm()
}

/// `dim {λ : λ + λᵀ = 0, λJ + Jλ = 0}` from the null space of the stacked
/// constraints on `vec(λ)`.
fn mj_dimension(j: &DMatrix<f64>) -> usize {
    let n = j.nrows();
    let mut m = DMatrix::zeros(2 * n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let (r1, r2) = (2 * (a * n + b), 2 * (a * n + b) + 1);
            m[(r1, a * n + b)] += 1.0;
            m[(r1, b * n + a)] += 1.0;
            for c in 0..n {
                m[(r2, a * n + c)] += j[(c, b)];
                m[(r2, c * n + b)] += j[(a, c)];
            }
        }
    }
    null_space(&m, 1e-10).ncols()
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let n = ctx.points();
    let mut out = Vec::new();

    let name = "isotropic-round-trip";
    let res = per_sample(ctx, name, n, |rng, k| {
        let j = structure(rng, k)?;
        let back = HermitianStructure::from_isotropic(&j.to_isotropic())?;
        Ok((back.matrix() - j.matrix()).norm())
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));

    // another basis of the same (1,0)-space gives the same structure
    let name = "isotropic-basis-change";
    let res = per_sample(ctx, name, n, |rng, k| {
        let j = structure(rng, k)?;
        let f = j.to_isotropic();
        let g = DMatrix::from_fn(k, k, |r, c| {
            rng.complex(1.0) + if r == c { Complex::new(2.0, 0.0) } else { Complex::new(0.0, 0.0) }
        });
        let f2 = IsotropicSubspace::new(ComplexMatrix::new(g * f.basis().inner()))?;
        let j2 = HermitianStructure::from_isotropic(&f2)?;
        let f3 = j2.to_isotropic();
        Ok((j2.matrix() - j.matrix()).norm() + span_distance(f.basis().inner(), f3.basis().inner()))
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));

    // S·J stays positive for S ∈ SO(2k); a reflection makes it negative
    let name = "so-positivity";
    let res = per_sample(ctx, name, n, |rng, k| {
        let j = structure(rng, k)?;
        let s = rotation(rng, 2 * k)?;
        let mut r = s.clone();
        r.row_mut(0).neg_mut();
        let flipped = HermitianStructure::new(&r * j.matrix() * r.transpose())?;
        Ok(indicator(j.so_action(&s)?.is_positive() && !flipped.is_positive()))
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));

    let name = "so-action-composition";
    let res = per_sample(ctx, name, n, |rng, k| {
        let j = structure(rng, k)?;
        let (s1, s2) = (rotation(rng, 2 * k)?, rotation(rng, 2 * k)?);
        let lhs = j.so_action(&(&s1 * &s2))?;
        let rhs = j.so_action(&s2)?.so_action(&s1)?;
        Ok((lhs.matrix() - rhs.matrix()).norm())
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));

    // |dim − k(k−1)| from an independent null space, and for the library basis
    let name = "mj-dimension";
    let mut rng = ctx.rng(name);
    let mut res = Vec::new();
    for k in 1..=3 {
        let j = eval(name, structure(&mut rng, k))?;
        let expect = k * (k - 1);
        res.push(mj_dimension(j.matrix()).abs_diff(expect) as f64 + j.mj_basis().len().abs_diff(expect) as f64);
    }
    out.push(ctx.report(name, res, tol::ALGEBRA));

    let name = "mj-membership";
    let res = per_sample(ctx, name, n, |rng, k| {
        let j = structure(rng, k)?;
        let basis = j.mj_basis();
        // a random combination of the basis
        let lambda = basis.iter().fold(DMatrix::zeros(2 * k, 2 * k), |acc, b| acc + b * rng.uniform(-1.0, 1.0));
        j.mj_residual(&lambda)
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));

    let name = "mu-chart-round-trip";
    let res = per_sample(ctx, name, n, |rng, k| {
        let k = k + 1;
        let mu = MuParameter::new((0..mu_len(k)).map(|_| rng.complex(0.5)).collect());
        let j = j_from_mu(&mu, k)?;
        let back = mu_from_j(&j)?;
        let diff = mu.mu.iter().zip(&back.mu).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        Ok(diff + indicator(j.is_positive()))
    })?;
    out.push(ctx.report(name, res, tol::ALGEBRA));
    Ok(out)
}
