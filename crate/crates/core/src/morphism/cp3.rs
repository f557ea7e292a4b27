//! Holomorphic data `f = (α β; γ δ)`, `s = (u v w)` on `ℂ³ = ℂ^{n_z} × ℂ^{3−n_z}`
//! for maps into the flag twistor space of `ℂP³`, and the induced point
//! `h = f^⊥ ∩ s = [x₁ : x₂ : x₃ : x₄]`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Result, TwistorError};
use crate::jet::{ComplexArgs, DiffOp, Jet, SmoothMap};
use crate::linalg::min_singular_value;
use crate::scalar::{cabs, Real};

pub type HoloJetFn<S> = dyn Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync;

/// Holomorphic functions of `(z, ξ)`; `u = γ − αw` and `v = δ − βw` are derived.
#[derive(Clone)]
pub struct Cp3Data<S: Real> {
    /// Number of `z` coordinates (the first ones); the rest are `ξ`.
    pub nz: usize,
    pub alpha: Arc<HoloJetFn<S>>,
    pub beta: Arc<HoloJetFn<S>>,
    pub gamma: Arc<HoloJetFn<S>>,
    pub delta: Arc<HoloJetFn<S>>,
    pub w: Arc<HoloJetFn<S>>,
}

impl<S: Real> fmt::Debug for Cp3Data<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cp3Data(n_z = {})", self.nz)
    }
}

struct Values<S: Real> {
    alpha: Jet<Complex<S>>,
    beta: Jet<Complex<S>>,
    gamma: Jet<Complex<S>>,
    delta: Jet<Complex<S>>,
    w: Jet<Complex<S>>,
    u: Jet<Complex<S>>,
    v: Jet<Complex<S>>,
}

impl<S: Real> Cp3Data<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nz: usize,
        alpha: impl Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync + 'static,
        beta: impl Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync + 'static,
        gamma: impl Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync + 'static,
        delta: impl Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync + 'static,
        w: impl Fn(&ComplexArgs<S>) -> Jet<Complex<S>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if nz == 0 || nz >= 3 {
            return Err(TwistorError::InvalidArgument(format!("n_z must be 1 or 2, got {nz}")));
        }
        Ok(Cp3Data {
            nz,
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            gamma: Arc::new(gamma),
            delta: Arc::new(delta),
            w: Arc::new(w),
        })
    }

    fn values(&self, x: &[Jet<S>]) -> Result<Values<S>> {
        if x.len() != 6 {
            return Err(TwistorError::DimensionMismatch(format!("{} real inputs, expected 6", x.len())));
        }
        let a = ComplexArgs::from_real(x);
        let (alpha, beta, gamma, delta, w) = ((self.alpha)(&a), (self.beta)(&a), (self.gamma)(&a), (self.delta)(&a), (self.w)(&a));
        let u = &gamma - &(&alpha * &w);
        let v = &delta - &(&beta * &w);
        Ok(Values {
            alpha,
            beta,
            gamma,
            delta,
            w,
            u,
            v,
        })
    }

    /// `[x₁, x₂, x₃, x₄]` as jets, by the closed formulas.
    pub fn x_jets(&self, x: &[Jet<S>]) -> Result<[Jet<Complex<S>>; 4]> {
        let Values {
            alpha,
            beta,
            gamma,
            delta,
            w,
            ..
        } = self.values(x)?;
        let (ab, bb, gb, db) = (alpha.conj(), beta.conj(), gamma.conj(), delta.conj());
        let one = alpha.lift(Complex::new(S::one(), S::zero()));
        let abs2 = |f: &Jet<Complex<S>>, fb: &Jet<Complex<S>>| f * fb;
        let x1 = &(&gb * &(&(&(&bb * &delta) - &(&abs2(&beta, &bb) * &w)) - &w))
            + &(&ab * &(&(&(&(&db * &beta) * &w) - &abs2(&delta, &db)) - &one));
        let x2 = &(&db * &(&(&(&ab * &gamma) - &(&abs2(&alpha, &ab) * &w)) - &w))
            + &(&bb * &(&(&(&(&gb * &alpha) * &w) - &abs2(&gamma, &gb)) - &one));
        let x3 = &(&(&one + &abs2(&gamma, &gb)) + &abs2(&delta, &db)) - &(&w * &(&(&gb * &alpha) + &(&db * &beta)));
        let x4 = &(&w * &(&(&one + &abs2(&alpha, &ab)) + &abs2(&beta, &bb))) - &(&(&ab * &gamma) + &(&bb * &delta));
        Ok([x1, x2, x3, x4])
    }
}

/// Residuals of `u + αw − γ`, `v + βw − δ`, `w∂_ξα − ∂_ξγ`, `w∂_ξβ − ∂_ξδ`
/// (the last two for every `ξ`), maximized. `u` and `v` are defined by the
/// first two, so those vanish identically.
pub fn cp3_constraints_residual<S: Real>(data: &Cp3Data<S>, pt: &[S]) -> Result<S> {
    let x = Jet::variables(pt, 1);
    let val = data.values(&x)?;
    let line1 = (&val.u - &(&val.gamma - &(&val.alpha * &val.w))).value();
    let line2 = (&val.v - &(&val.delta - &(&val.beta * &val.w))).value();
    let mut worst = cabs(line1).max(cabs(line2));
    let w = val.w.value();
    for j in data.nz..3 {
        let d = DiffOp::dz_coord(6, j);
        let l3 = w * d.apply(&val.alpha)? - d.apply(&val.gamma)?;
        let l4 = w * d.apply(&val.beta)? - d.apply(&val.delta)?;
        worst = worst.max(cabs(l3)).max(cabs(l4));
    }
    Ok(worst)
}

/// `[x₁ : x₂ : x₃ : x₄]` at `pt`.
pub fn cp3_point<S: Real>(data: &Cp3Data<S>, pt: &[S]) -> Result<[Complex<S>; 4]> {
    let xs = data.x_jets(&Jet::variables(pt, 0))?;
    let out = [xs[0].value(), xs[1].value(), xs[2].value(), xs[3].value()];
    if out.iter().all(|&c| cabs(c) < S::lit(1e-14)) {
        return Err(TwistorError::Degenerate("all homogeneous coordinates vanish".into()));
    }
    Ok(out)
}

/// Residuals of the defining system `x₁u + x₂v + x₃w − x₄ = 0`,
/// `x₁ + x₃ᾱ + x₄γ̄ = 0`, `x₂ + x₃β̄ + x₄δ̄ = 0`, relative to `max |xᵢ|`.
pub fn cp3_linear_system_residual<S: Real>(data: &Cp3Data<S>, pt: &[S]) -> Result<S> {
    let x = Jet::variables(pt, 0);
    let v = data.values(&x)?;
    let p = cp3_point(data, pt)?;
    let scale = p.iter().fold(S::zero(), |a, &c| a.max(cabs(c)));
    let (al, be, ga, de, w, u, vv) = (
        v.alpha.value(),
        v.beta.value(),
        v.gamma.value(),
        v.delta.value(),
        v.w.value(),
        v.u.value(),
        v.v.value(),
    );
    let r1 = p[0] * u + p[1] * vv + p[2] * w - p[3];
    let r2 = p[0] + p[2] * al.conj() + p[3] * ga.conj();
    let r3 = p[1] + p[2] * be.conj() + p[3] * de.conj();
    Ok(cabs(r1).max(cabs(r2)).max(cabs(r3)) / scale)
}

/// The affine chart `(x₁/x₃, x₂/x₃, x₄/x₃)` of `h`, as a map `ℝ⁶ → ℝ⁶`.
#[derive(Debug, Clone)]
pub struct Cp3Chart<S: Real>(pub Cp3Data<S>);

impl<S: Real> SmoothMap<S> for Cp3Chart<S> {
    fn domain_dim(&self) -> usize {
        6
    }
    fn codomain_dim(&self) -> usize {
        6
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        let [x1, x2, x3, x4] = self.0.x_jets(x)?;
        if cabs(x3.value()) < S::lit(1e-14) {
            return Err(TwistorError::Degenerate("x₃ vanishes: affine chart invalid".into()));
        }
        let inv = x3.recip()?;
        Ok([x1, x2, x4]
            .iter()
            .flat_map(|c| {
                let q = c * &inv;
                [q.re(), q.im()]
            })
            .collect())
    }
}

/// Smallest singular value of the real Jacobian of the affine chart of `h`.
pub fn cp3_local_diffeo_check<S: Real>(data: &Cp3Data<S>, pt: &[S]) -> Result<S> {
    let jac = Cp3Chart(data.clone()).jet_at(pt, 1)?.jacobian()?;
    Ok(min_singular_value(&jac))
}

/// Real Jacobian of `(x₁, x₂, x₄)` with inputs ordered
/// `(Re z…, Re ξ…, Im z…, Im ξ…)` and outputs `(Re x₁, Re x₂, Re x₄, Im x₁, Im x₂, Im x₄)`.
pub fn cp3_tilde_jacobian<S: Real>(data: &Cp3Data<S>, pt: &[S]) -> Result<DMatrix<S>> {
    let [x1, x2, _, x4] = data.x_jets(&Jet::variables(pt, 1))?;
    let outs = [&x1, &x2, &x4];
    Ok(DMatrix::from_fn(6, 6, |r, c| {
        let f = outs[r % 3];
        let var = 2 * (c % 3) + c / 3;
        let d = f.d1(var);
        if r < 3 {
            d.re
        } else {
            d.im
        }
    }))
}
