use twistor_core::checkers::{real_isotropy_residual, CheckReport, IsotropyMode};
use twistor_core::jet::SurfacePoly;

use super::{eval, indicator, Ctx};
use crate::rng::CheckRng;
use crate::tolerances as tol;
use crate::CliError;

const DEGREE: u32 = 3;

/// Random `ℂ → ℂ²` polynomial of degree `≤ 3` in `z` only, `z̄` only, or both.
fn surface_poly(rng: &mut CheckRng, z: bool, zbar: bool) -> SurfacePoly<f64> {
    let terms = (0..2)
        .map(|_| {
            let mut t = Vec::new();
            for a in 0..=DEGREE {
                for b in 0..=DEGREE - a {
                    if (a > 0 && !z) || (b > 0 && !zbar) {
                        continue;
                    }
                    t.push(((a, b), rng.complex(1.0)));
                }
            }
            t
        })
        .collect();
    SurfacePoly::new(terms)
}

pub fn run(ctx: &Ctx) -> Result<Vec<CheckReport>, CliError> {
    let (order, r) = (ctx.order(), ctx.radius(1.0));
    let name = "full-vs-diagonal";
    let t = ctx.tol(name, tol::ISOTROPY);
    let mut rng = ctx.rng(name);
    let (mut res, mut holo) = (Vec::new(), Vec::new());
    let (mut full_pass, mut diag_pass) = (0, 0);
    for i in 0..ctx.points() {
        // holomorphic and antiholomorphic maps are isotropic, mixed ones generally not
        let (z, zbar) = [(true, false), (false, true), (true, true)][i % 3];
        let phi = surface_poly(&mut rng, z, zbar);
        let pt = rng.point(2, r);
        let full = eval(name, real_isotropy_residual(&phi, &pt, order, IsotropyMode::Full))?;
        let diag = eval(name, real_isotropy_residual(&phi, &pt, order, IsotropyMode::Diagonal))?;
        full_pass += (full <= t) as usize;
        diag_pass += (diag <= t) as usize;
        res.push(indicator((full <= t) == (diag <= t)));
        if z != zbar {
            holo.push(full);
        }
    }
    Ok(vec![
        CheckReport::new(name, res, 0.0)
            .with_aux("full_pass", full_pass as f64)
            .with_aux("diagonal_pass", diag_pass as f64)
            .with_aux("tolerance", t),
        ctx.report("holomorphic-isotropic", holo, tol::ISOTROPY),
    ])
}
