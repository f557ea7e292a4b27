//! Pointwise residuals for the map properties of harmonic-map theory, for
//! maps between flat spaces.
//!
//! Every function evaluates the jets it needs at the given point. Residuals
//! are raw (unscaled) Frobenius/Euclidean norms; [`gram_scale`] gives the
//! dimensionless scale used when comparing Gram-type residuals against a
//! tolerance.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Result, TwistorError};
use crate::jet::{Jet, MapJet, SmoothMap};
use crate::linalg::{bilinear_slice, frobenius, singular_values, singular_values_c};
use crate::scalar::{cabs, Real};
use crate::twistor::HermitianStructure;

/// Jet order used when a checker does not need more.
pub const DEFAULT_ORDER: usize = 4;

/// Threshold on `σ_min / σ_max` of `dφ` below which a point is not regular.
pub const REGULARITY_RATIO: f64 = 1e-6;

fn norm_c<S: Real>(v: &[Complex<S>]) -> S {
    v.iter().fold(S::zero(), |a, c| a + c.norm_sqr()).sqrt()
}

fn require_surface<S: Real>(phi: &dyn SmoothMap<S>) -> Result<()> {
    if phi.domain_dim() != 2 {
        return Err(TwistorError::InvalidArgument(format!(
            "needs a surface domain (real dimension 2), got {}",
            phi.domain_dim()
        )));
    }
    Ok(())
}

/// `max(1, ‖dφ‖²_F)`.
pub fn gram_scale<S: Real>(dphi: &DMatrix<S>) -> S {
    let f = frobenius(dphi);
    S::one().max(f * f)
}

/// `|⟨∂_zφ, ∂_zφ⟩|` for a map from a surface.
pub fn conformality_residual<S: Real>(phi: &dyn SmoothMap<S>, z0: &[S]) -> Result<S> {
    require_surface(phi)?;
    let v = phi.jet_at(z0, 1)?.dz_power(1, 0)?;
    Ok(cabs(bilinear_slice(&v, &v)))
}

/// Best-fit conformality factor `Λ = tr(dφᵀdφ)/2m` and `‖dφᵀdφ − ΛI‖`.
pub fn weak_conformality<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<(S, S)> {
    let d = phi.jet_at(x0, 1)?.jacobian()?;
    Ok(gram_fit(&(d.transpose() * &d)))
}

fn gram_fit<S: Real>(g: &DMatrix<S>) -> (S, S) {
    let n = g.nrows();
    let lambda = g.trace() / S::lit(n as f64);
    let res = frobenius(&(g - DMatrix::identity(n, n) * lambda));
    (lambda, res)
}

/// `max_{i≤j} |⟨∂_{z_i}φ, ∂_{z_j}φ⟩|` for the standard structure on the domain.
pub fn pluriconformality_residual<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<S> {
    if phi.domain_dim() % 2 != 0 {
        return Err(TwistorError::InvalidArgument("domain dimension must be even".into()));
    }
    let jet = phi.jet_at(x0, 1)?;
    let m = phi.domain_dim() / 2;
    let cols: Vec<Vec<Complex<S>>> = (0..m).map(|i| jet.dz_power(1, i)).collect::<Result<_>>()?;
    let mut worst = S::zero();
    for i in 0..m {
        for j in i..m {
            worst = worst.max(cabs(bilinear_slice(&cols[i], &cols[j])));
        }
    }
    Ok(worst)
}

/// `‖Δφ‖`, the norm of the tension field for flat domain and target.
pub fn harmonicity_residual<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<S> {
    let lap = phi.jet_at(x0, 2)?.laplacian()?;
    Ok(lap.iter().fold(S::zero(), |a, &x| a + x * x).sqrt())
}

/// Which index pairs `(r, s)` a real-isotropy check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IsotropyMode {
    /// All `1 ≤ r ≤ s ≤ R`.
    Full,
    /// Only `r = s`, which suffices by the isotropy-reduction lemma.
    Diagonal,
}

/// `max |⟨∂_z^rφ, ∂_z^sφ⟩|` over the index set of `mode`, `1 ≤ r ≤ s ≤ order`.
pub fn real_isotropy_residual<S: Real>(
    phi: &dyn SmoothMap<S>,
    z0: &[S],
    order: usize,
    mode: IsotropyMode,
) -> Result<S> {
    require_surface(phi)?;
    let jet = phi.jet_at(z0, order)?;
    real_isotropy_from_jet(&jet, order, mode)
}

/// As [`real_isotropy_residual`], from a precomputed jet.
pub fn real_isotropy_from_jet<S: Real>(
    jet: &MapJet<S>,
    order: usize,
    mode: IsotropyMode,
) -> Result<S> {
    let derivs: Vec<Vec<Complex<S>>> = (1..=order).map(|r| jet.dz_power(r, 0)).collect::<Result<_>>()?;
    let mut worst = S::zero();
    for r in 0..order {
        for s in r..order {
            if mode == IsotropyMode::Diagonal && r != s {
                continue;
            }
            worst = worst.max(cabs(bilinear_slice(&derivs[r], &derivs[s])));
        }
    }
    Ok(worst)
}

/// Outcome of an umbilicity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Umbilic<S> {
    /// `σ_min / σ_max` of the matrix with rows `∂_zφ`, `∂_z²φ`.
    pub residual: S,
    /// Both rows vanish; the residual is 0 by convention.
    pub degenerate: bool,
}

/// Linear dependence of `∂_zφ` and `∂_z²φ` in the ℂ-identified view
/// (components `φ_{2k} + iφ_{2k+1}`).
pub fn umbilic_residual<S: Real>(phi: &dyn SmoothMap<S>, z0: &[S]) -> Result<Umbilic<S>> {
    require_surface(phi)?;
    let jet = phi.jet_at(z0, 2)?;
    Ok(dependence(&jet.dz_power_identified(1, 0)?, &jet.dz_power_identified(2, 0)?))
}

/// Linear dependence of `∂_zφ` and `∂_z²φ` as vectors in `ℂ ⊗ ℝ^{2n}`.
pub fn umbilic_residual_real<S: Real>(phi: &dyn SmoothMap<S>, z0: &[S]) -> Result<Umbilic<S>> {
    require_surface(phi)?;
    let jet = phi.jet_at(z0, 2)?;
    Ok(dependence(&jet.dz_power(1, 0)?, &jet.dz_power(2, 0)?))
}

pub(crate) fn dependence<S: Real>(a: &[Complex<S>], b: &[Complex<S>]) -> Umbilic<S> {
    let n = a.len();
    let m = DMatrix::from_fn(2, n, |i, j| if i == 0 { a[j] } else { b[j] });
    let sv = singular_values_c(&m);
    let top = sv.first().copied().unwrap_or_else(S::zero);
    if top == S::zero() {
        return Umbilic {
            residual: S::zero(),
            degenerate: true,
        };
    }
    let residual = if sv.len() < 2 { S::zero() } else { sv[1] / top };
    Umbilic {
        residual,
        degenerate: false,
    }
}

/// Horizontal weak conformality via `dφ dφᵀ = Λ I`: returns `(Λ, ‖dφdφᵀ − ΛI‖)`.
pub fn hwc_residual<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<(S, S)> {
    let d = phi.jet_at(x0, 1)?.jacobian()?;
    if d.nrows() > d.ncols() {
        return Err(TwistorError::InvalidArgument(format!(
            "horizontal conformality needs dim domain ≥ dim target, got {} < {}",
            d.ncols(),
            d.nrows()
        )));
    }
    Ok(hwc_from_jacobian(&d))
}

pub fn hwc_from_jacobian<S: Real>(d: &DMatrix<S>) -> (S, S) {
    gram_fit(&(d * d.transpose()))
}

/// `(harmonicity residual, HWC residual)`.
pub fn harmonic_morphism_residual<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<(S, S)> {
    let jet = phi.jet_at(x0, 2)?;
    let lap = jet.laplacian()?;
    let harm = lap.iter().fold(S::zero(), |a, &x| a + x * x).sqrt();
    let d = jet.jacobian()?;
    Ok((harm, hwc_from_jacobian(&d).1))
}

/// `|Δ(Re g∘φ)|` for a map into `ℂ` and a polynomial `g(w) = Σ g_k w^k`.
pub fn pullback_harmonic_oracle<S: Real>(
    phi: &dyn SmoothMap<S>,
    g: &[Complex<S>],
    x0: &[S],
) -> Result<S> {
    if phi.codomain_dim() != 2 {
        return Err(TwistorError::InvalidArgument("pullback oracle needs a map into ℂ".into()));
    }
    let jet = phi.jet_at(x0, 2)?;
    let w: Jet<Complex<S>> =
        &jet.comps[0].to_complex() + &jet.comps[1].to_complex().scale(Complex::new(S::zero(), S::one()));
    let f = w.polynomial(g).re();
    let pulled = MapJet {
        point: x0.to_vec(),
        comps: vec![f],
    };
    Ok(pulled.laplacian()?[0].abs())
}

/// `max_{i,j} ‖∂²φ/∂z_i∂z̄_j‖`.
pub fn one_one_geodesic_residual<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<S> {
    if phi.domain_dim() % 2 != 0 {
        return Err(TwistorError::InvalidArgument("domain dimension must be even".into()));
    }
    let jet = phi.jet_at(x0, 2)?;
    let m = phi.domain_dim() / 2;
    let mut worst = S::zero();
    for i in 0..m {
        for j in 0..m {
            worst = worst.max(norm_c(&jet.mixed(i, j)?));
        }
    }
    Ok(worst)
}

/// `‖dφ J_dom − J_tgt dφ‖`.
pub fn holomorphy_residual<S: Real>(
    phi: &dyn SmoothMap<S>,
    j_dom: &HermitianStructure<S>,
    j_tgt: &HermitianStructure<S>,
    x0: &[S],
) -> Result<S> {
    let d = phi.jet_at(x0, 1)?.jacobian()?;
    HermitianStructure::intertwining_residual(&d, j_dom, j_tgt)
}

/// Whether `dφ` restricted to the horizontal space is well conditioned.
pub fn is_regular<S: Real>(dphi: &DMatrix<S>) -> bool {
    let sv = singular_values(dphi);
    let rank = dphi.nrows().min(dphi.ncols());
    match (sv.first(), sv.get(rank.saturating_sub(1))) {
        (Some(&top), Some(&bottom)) => top > S::zero() && bottom > S::lit(REGULARITY_RATIO) * top,
        _ => false,
    }
}

/// Mean-curvature vector (sum of `II(e_i, e_i)` over an orthonormal basis of
/// `ker dφ`) of the fibre through `x0`, from the jets of `φ`: along a fibre
/// curve `dφ γ'' + ∇dφ(γ', γ') = 0`, so the normal part of `γ''` is
/// `−(dφ|_H)⁻¹ ∇dφ(v, v)`.
pub fn fibre_mean_curvature<S: Real>(phi: &dyn SmoothMap<S>, x0: &[S]) -> Result<DVector<S>> {
    let jet = phi.jet_at(x0, 2)?;
    let d = jet.jacobian()?;
    if !is_regular(&d) {
        return Err(TwistorError::Degenerate("point is not regular".into()));
    }
    let dim = d.ncols();
    let kernel = crate::linalg::null_space(&d, S::lit(1e-10));
    let pinv = d
        .clone()
        .pseudo_inverse(S::lit(1e-14))
        .map_err(|e| TwistorError::Degenerate(e.to_string()))?;
    let mut h = DVector::zeros(dim);
    for c in 0..kernel.ncols() {
        let v = kernel.column(c);
        let hess_vv = DVector::from_fn(d.nrows(), |k, _| {
            let mut acc = S::zero();
            for a in 0..dim {
                for b in 0..dim {
                    acc += hessian_entry(&jet.comps[k], a, b) * v[a] * v[b];
                }
            }
            acc
        });
        h -= &pinv * hess_vv;
    }
    Ok(h)
}

/// `∂²f/∂x_a∂x_b` at the base point.
pub(crate) fn hessian_entry<S: Real>(f: &Jet<S>, a: usize, b: usize) -> S {
    let mut m = vec![0u8; f.nvars()];
    m[a] += 1;
    m[b] += 1;
    f.partial(&m).unwrap_or_else(|_| S::zero())
}

/// Mean curvature of the fibre through `x0` estimated geometrically: for each
/// vector `e_i` of an orthonormal basis of `ker dφ(x0)`, trace the fibre curve
/// `x' = P_{ker dφ(x)} e_i` with RK4 for `±h` and take the horizontal part of
/// the second difference. Independent of second derivatives of `φ`.
pub fn fibre_mean_curvature_traced<S: Real>(
    phi: &dyn SmoothMap<S>,
    x0: &[S],
    h: S,
    substeps: usize,
) -> Result<DVector<S>> {
    let jac = |x: &DVector<S>| -> Result<DMatrix<S>> { phi.jet_at(x.as_slice(), 1)?.jacobian() };
    let d0 = jac(&DVector::from_column_slice(x0))?;
    if !is_regular(&d0) {
        return Err(TwistorError::Degenerate("point is not regular".into()));
    }
    let dim = d0.ncols();
    let kernel = crate::linalg::null_space(&d0, S::lit(1e-10));
    // horizontal projector at x0
    let pinv0 = d0
        .clone()
        .pseudo_inverse(S::lit(1e-14))
        .map_err(|e| TwistorError::Degenerate(e.to_string()))?;
    let horiz = &pinv0 * &d0;
    let field = |x: &DVector<S>, e: &DVector<S>| -> Result<DVector<S>> {
        let d = jac(x)?;
        let p = d
            .clone()
            .pseudo_inverse(S::lit(1e-14))
            .map_err(|err| TwistorError::Degenerate(err.to_string()))?;
        Ok(e - &p * (&d * e))
    };
    let trace = |e: &DVector<S>, length: S| -> Result<DVector<S>> {
        let mut x = DVector::from_column_slice(x0);
        let dt = length / S::lit(substeps as f64);
        let half = S::lit(0.5);
        let sixth = S::lit(1.0 / 6.0);
        for _ in 0..substeps {
            let k1 = field(&x, e)?;
            let k2 = field(&(&x + &k1 * (dt * half)), e)?;
            let k3 = field(&(&x + &k2 * (dt * half)), e)?;
            let k4 = field(&(&x + &k3 * dt), e)?;
            x += (k1 + k2 * S::lit(2.0) + k3 * S::lit(2.0) + k4) * (dt * sixth);
        }
        Ok(x)
    };
    let x = DVector::from_column_slice(x0);
    let mut total = DVector::zeros(dim);
    for c in 0..kernel.ncols() {
        let e = kernel.column(c).into_owned();
        let fwd = trace(&e, h)?;
        let bwd = trace(&e, -h)?;
        let second = (fwd + bwd - &x * S::lit(2.0)) / (h * h);
        total += &horiz * second;
    }
    Ok(total)
}

/// Residuals of one property over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub points: usize,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Points reported as degenerate rather than pass/fail.
    #[serde(skip_serializing_if = "is_zero")]
    pub degenerate: usize,
    /// Auxiliary scalars (conformality factor, dilation, counts).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, f64>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl CheckReport {
    /// `pass` is `max_residual ≤ tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, residuals: Vec<f64>, tolerance: f64) -> Self {
        let max_residual = residuals.iter().fold(0.0f64, |a, &b| if b.is_nan() || b > a { b } else { a });
        let pass = max_residual <= tolerance;
        CheckReport {
            name: name.into(),
            points: residuals.len(),
            residuals,
            max_residual,
            tolerance,
            pass,
            degenerate: 0,
            aux: BTreeMap::new(),
        }
    }

    pub fn with_aux(mut self, key: impl Into<String>, value: f64) -> Self {
        self.aux.insert(key.into(), value);
        self
    }

    pub fn with_degenerate(mut self, count: usize) -> Self {
        self.degenerate = count;
        self
    }
}
