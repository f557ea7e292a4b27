//! Twistor lifts of maps into `ℝ^{2n}` and their vertical holomorphy residuals.
//!
//! A lift pairs a base map with a structure field: a Hermitian structure on
//! the target at every domain point, evaluable as a matrix jet. The target
//! is flat, so the vertical part of the lift along `X` is the plain
//! derivative `X(J)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::checkers::{conformality_residual, gram_scale, umbilic_residual_real};
use crate::error::{Result, TwistorError};
use crate::jet::{Jet, MatrixJet, SmoothMap};
use crate::linalg::frobenius_c;
use crate::scalar::Real;
use crate::twistor::HermitianStructure;

/// Below this `σ_min/σ_max` ratio of `{∂_zφ, ∂_z²φ}` a point is treated as umbilic.
pub const UMBILIC_THRESHOLD: f64 = 1e-6;

/// A field of Hermitian structures on `ℝ^target_dim` over a domain.
pub trait StructureField<S: Real>: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn target_dim(&self) -> usize;

    /// The matrix field pushed through domain-coordinate jets (any common
    /// layout, as for [`SmoothMap::eval`]).
    fn eval(&self, x: &[Jet<S>]) -> Result<MatrixJet<S>>;

    /// Jet of the field at `point` in the domain coordinates.
    fn field_at(&self, point: &[S], order: usize) -> Result<MatrixJet<S>> {
        if point.len() != self.domain_dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "point has {} coordinates, field domain has {}",
                point.len(),
                self.domain_dim()
            )));
        }
        self.eval(&Jet::variables(point, order))
    }

    /// The structure at `point`, validated.
    fn structure_at(&self, point: &[S]) -> Result<HermitianStructure<S>> {
        HermitianStructure::new(self.field_at(point, 0)?.value())
    }
}

pub type FieldFnBox<S> = dyn Fn(&[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync;

/// A structure field given by a closure.
#[derive(Clone)]
pub struct FieldFn<S: Real> {
    domain: usize,
    target: usize,
    f: Arc<FieldFnBox<S>>,
}

impl<S: Real> FieldFn<S> {
    pub fn new(
        domain: usize,
        target: usize,
        f: impl Fn(&[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync + 'static,
    ) -> Self {
        FieldFn {
            domain,
            target,
            f: Arc::new(f),
        }
    }

    pub fn constant(domain: usize, j: &HermitianStructure<S>) -> Self {
        let m = j.matrix().clone();
        FieldFn::new(domain, m.nrows(), move |x| {
            Ok(MatrixJet::constant(&m, x[0].nvars(), x[0].order()))
        })
    }
}

impl<S: Real> fmt::Debug for FieldFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldFn(ℝ^{} → End ℝ^{})", self.domain, self.target)
    }
}

impl<S: Real> StructureField<S> for FieldFn<S> {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn target_dim(&self) -> usize {
        self.target
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<MatrixJet<S>> {
        if x.len() != self.domain {
            return Err(TwistorError::DimensionMismatch(format!(
                "{} inputs for a field on ℝ^{}",
                x.len(),
                self.domain
            )));
        }
        let out = (self.f)(x)?;
        if out.dim() != self.target {
            return Err(TwistorError::DimensionMismatch(format!(
                "field returned a {}×{} matrix, expected {}",
                out.dim(),
                out.dim(),
                self.target
            )));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn of(j: &HermitianStructure<impl Real>) -> Self {
        if j.is_positive() {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// A map together with a structure field along it.
#[derive(Clone)]
pub struct TwistorLift<S: Real> {
    pub base: Arc<dyn SmoothMap<S>>,
    pub field: Arc<dyn StructureField<S>>,
    pub orientation: Orientation,
}

impl<S: Real> fmt::Debug for TwistorLift<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistorLift")
            .field("domain", &self.base.domain_dim())
            .field("target", &self.base.codomain_dim())
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl<S: Real> TwistorLift<S> {
    /// Pairs `base` with `field`; the orientation is read off at `point`.
    pub fn new(
        base: Arc<dyn SmoothMap<S>>,
        field: Arc<dyn StructureField<S>>,
        point: &[S],
    ) -> Result<Self> {
        if base.domain_dim() != field.domain_dim() || base.codomain_dim() != field.target_dim() {
            return Err(TwistorError::DimensionMismatch(
                "base map and structure field have different dimensions".into(),
            ));
        }
        let orientation = Orientation::of(&field.structure_at(point)?);
        Ok(TwistorLift {
            base,
            field,
            orientation,
        })
    }

    pub fn structure_at(&self, point: &[S]) -> Result<HermitianStructure<S>> {
        self.field.structure_at(point)
    }

    /// `‖dφ J₀ − J_ψ dφ‖` at `x0`, with `J₀` the standard structure on the domain.
    pub fn holomorphy_residual(&self, x0: &[S]) -> Result<S> {
        let d = self.base.jet_at(x0, 1)?.jacobian()?;
        let dom = HermitianStructure::canonical(self.base.domain_dim() / 2);
        HermitianStructure::intertwining_residual(&d, &dom, &self.structure_at(x0)?)
    }
}

/// Result of [`strictly_compatible_lift_r4`].
#[derive(Debug, Clone)]
pub enum LiftOutcome<S: Real> {
    Unique(TwistorLift<S>),
    /// `∂_z²φ ∈ span ∂_zφ`: both orientations give a compatible lift.
    Umbilic {
        positive: TwistorLift<S>,
        negative: TwistorLift<S>,
    },
}

impl<S: Real> LiftOutcome<S> {
    pub fn lifts(&self) -> Vec<&TwistorLift<S>> {
        match self {
            LiftOutcome::Unique(l) => vec![l],
            LiftOutcome::Umbilic { positive, negative } => vec![positive, negative],
        }
    }

    pub fn is_umbilic(&self) -> bool {
        matches!(self, LiftOutcome::Umbilic { .. })
    }

    /// The lift of the given orientation, if available.
    pub fn with_orientation(&self, o: Orientation) -> Option<&TwistorLift<S>> {
        self.lifts().into_iter().find(|l| l.orientation == o)
    }
}

/// The compatible structure along a conformal map `ℝ² → ℝ⁴` of a fixed
/// orientation, built from the orthonormal frame `f₁ ∝ ∂ₓφ`, `f₂ ∝ ∂ᵧφ`,
/// `f₃ ∝ (Re ∂_z²φ)^⊥` (or a fixed coordinate axis at umbilic points),
/// `f₄ = sign · f₁×f₂×f₃`, as `J = f₂f₁ᵀ − f₁f₂ᵀ + f₄f₃ᵀ − f₃f₄ᵀ`.
pub struct R4FrameField<S: Real> {
    phi: Arc<dyn SmoothMap<S>>,
    sign: S,
    axis: Option<usize>,
}

impl<S: Real> R4FrameField<S> {
    fn frame(&self, p: &[S], order: usize) -> Result<[Vec<Jet<S>>; 4]> {
        let jet = self.phi.jet_at(p, order + 2)?;
        let d = |c: &Jet<S>, m: [u8; 2]| -> Result<Jet<S>> { Ok(c.derivative_multi(&m)?.truncate(order)) };
        let a: Vec<Jet<S>> = jet.comps.iter().map(|c| d(c, [1, 0])).collect::<Result<_>>()?;
        let b: Vec<Jet<S>> = jet.comps.iter().map(|c| d(c, [0, 1])).collect::<Result<_>>()?;
        let f1 = normalize(&a)?;
        let f2 = normalize(&reject(&b, &[&f1]))?;
        let seed: Vec<Jet<S>> = match self.axis {
            Some(k) => (0..4)
                .map(|i| Jet::constant(if i == k { S::one() } else { S::zero() }, 2, order))
                .collect(),
            None => jet
                .comps
                .iter()
                .map(|c| Ok((&d(c, [2, 0])? - &d(c, [0, 2])?).scale(S::lit(0.25))))
                .collect::<Result<_>>()?,
        };
        let f3 = normalize(&reject(&seed, &[&f1, &f2]))?;
        let f4: Vec<Jet<S>> = cross3(&f1, &f2, &f3).iter().map(|c| c.scale(self.sign)).collect();
        Ok([f1, f2, f3, f4])
    }
}

impl<S: Real> StructureField<S> for R4FrameField<S> {
    fn domain_dim(&self) -> usize {
        2
    }
    fn target_dim(&self) -> usize {
        4
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<MatrixJet<S>> {
        if x.len() != 2 {
            return Err(TwistorError::DimensionMismatch("the frame field lives on ℝ²".into()));
        }
        let p = [x[0].value(), x[1].value()];
        let [f1, f2, f3, f4] = self.frame(&p, x[0].order())?;
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                let e = &(&(&f2[i] * &f1[j]) - &(&f1[i] * &f2[j])) + &(&(&f4[i] * &f3[j]) - &(&f3[i] * &f4[j]));
                entries.push(e.compose(x));
            }
        }
        Ok(MatrixJet::from_entries(4, entries))
    }
}

fn dot<S: Real>(a: &[Jet<S>], b: &[Jet<S>]) -> Jet<S> {
    let mut acc = a[0].lift(S::zero());
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}

fn normalize<S: Real>(a: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
    let inv = dot(a, a)
        .sqrt()
        .and_then(|n| n.recip())
        .map_err(|_| TwistorError::Degenerate("frame vector vanishes".into()))?;
    Ok(a.iter().map(|c| c * &inv).collect())
}

/// `a` minus its projections on the orthonormal vectors `basis`.
fn reject<S: Real>(a: &[Jet<S>], basis: &[&Vec<Jet<S>>]) -> Vec<Jet<S>> {
    let mut out = a.to_vec();
    for e in basis {
        let c = dot(&out, e);
        for (o, ei) in out.iter_mut().zip(e.iter()) {
            *o = &*o - &(&c * ei);
        }
    }
    out
}

/// The vector `w` with `det[a, b, c, v] = ⟨w, v⟩` in `ℝ⁴`.
fn cross3<S: Real>(a: &[Jet<S>], b: &[Jet<S>], c: &[Jet<S>]) -> Vec<Jet<S>> {
    let mut w: Vec<Jet<S>> = (0..4).map(|_| a[0].lift(S::zero())).collect();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                let l = 6 - i - j - k;
                let sign = S::lit(perm_sign([i, j, k, l]));
                w[l] += &(&(&a[i] * &b[j]) * &c[k]).scale(sign);
            }
        }
    }
    w
}

fn perm_sign(p: [usize; 4]) -> f64 {
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_conformal_r4<S: Real>(phi: &Arc<dyn SmoothMap<S>>, z0: &[S]) -> Result<crate::jet::MapJet<S>> {
    if phi.domain_dim() != 2 || phi.codomain_dim() != 4 {
        return Err(TwistorError::InvalidArgument(format!(
            "needs a map ℝ² → ℝ⁴, got ℝ^{} → ℝ^{}",
            phi.domain_dim(),
            phi.codomain_dim()
        )));
    }
    let jet = phi.jet_at(z0, 2)?;
    let scale = gram_scale(&jet.jacobian()?);
    if frobenius_c(&DMatrix::from_vec(4, 1, jet.dz_power(1, 0)?)) <= S::lit(1e-12) * scale.sqrt() {
        return Err(TwistorError::BranchPoint);
    }
    let conf = conformality_residual(phi.as_ref(), z0)?;
    if conf > S::lit(1e-8) * scale {
        return Err(TwistorError::InvalidArgument(format!(
            "map is not conformal at the base point (residual {conf})"
        )));
    }
    Ok(jet)
}

fn frame_lift<S: Real>(
    phi: &Arc<dyn SmoothMap<S>>,
    z0: &[S],
    sign: S,
    axis: Option<usize>,
) -> Result<TwistorLift<S>> {
    let field: Arc<dyn StructureField<S>> = Arc::new(R4FrameField {
        phi: phi.clone(),
        sign,
        axis,
    });
    TwistorLift::new(phi.clone(), field, z0)
}

/// Coordinate axis with the largest component orthogonal to `dφ(z0)`.
fn normal_axis<S: Real>(d: &DMatrix<S>) -> usize {
    let (a, b) = (d.column(0).normalize(), d.column(1).normalize());
    let b = (&b - &a * a.dot(&b)).normalize();
    (0..4)
        .map(|k| {
            let mut e = nalgebra::DVector::<S>::zeros(4);
            e[k] = S::one();
            let r = &e - &a * a.dot(&e) - &b * b.dot(&e);
            (k, r.norm())
        })
        .fold((0, S::zero()), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// The strictly compatible lift of a weakly conformal `φ: ℝ² → ℝ⁴` near `z0`:
/// `J∂ₓφ = ∂ᵧφ` and, off umbilic points, `J u = −v` on the normal parts of
/// `∂_z²φ = u + iv`. The orientation is that of `{∂ₓφ, ∂ᵧφ, u^⊥, −v^⊥}` at
/// `z0`. At umbilic points both orientations are returned.
pub fn strictly_compatible_lift_r4<S: Real>(
    phi: Arc<dyn SmoothMap<S>>,
    z0: &[S],
) -> Result<LiftOutcome<S>> {
    let jet = check_conformal_r4(&phi, z0)?;
    let d = jet.jacobian()?;
    let umb = umbilic_residual_real(phi.as_ref(), z0)?;
    if umb.degenerate || umb.residual < S::lit(UMBILIC_THRESHOLD) {
        let axis = normal_axis(&d);
        let l1 = frame_lift(&phi, z0, S::one(), Some(axis))?;
        let l2 = frame_lift(&phi, z0, -S::one(), Some(axis))?;
        let (positive, negative) = if l1.orientation == Orientation::Positive { (l1, l2) } else { (l2, l1) };
        return Ok(LiftOutcome::Umbilic { positive, negative });
    }
    let (a, b) = (d.column(0).into_owned(), d.column(1).into_owned());
    let zz = jet.dz_power(2, 0)?;
    let u = nalgebra::DVector::from_fn(4, |i, _| zz[i].re);
    let v = nalgebra::DVector::from_fn(4, |i, _| zz[i].im);
    let q = DMatrix::from_columns(&[a.clone(), b.clone()]).qr().q();
    let perp = |w: &nalgebra::DVector<S>| w - &q * (q.transpose() * w);
    let det = DMatrix::from_columns(&[a, b, perp(&u), -perp(&v)]).determinant();
    if det == S::zero() {
        return Err(TwistorError::Degenerate("normal parts of ∂_z²φ are dependent".into()));
    }
    // f₄ = ±f₁×f₂×f₃ makes the frame orientation equal to the sign
    let sign = if det > S::zero() { S::one() } else { -S::one() };
    Ok(LiftOutcome::Unique(frame_lift(&phi, z0, sign, None)?))
}

/// The compatible structure field of the given orientation along a conformal
/// `φ: ℝ² → ℝ⁴` (no condition on `∂_z²φ`). Its normal frame follows
/// `Re ∂_z²φ`, or a fixed axis when that is tangent at `z0`.
pub fn compatible_lift_r4<S: Real>(
    phi: Arc<dyn SmoothMap<S>>,
    z0: &[S],
    orientation: Orientation,
) -> Result<TwistorLift<S>> {
    let jet = check_conformal_r4(&phi, z0)?;
    let d = jet.jacobian()?;
    let zz = jet.dz_power(2, 0)?;
    let u = nalgebra::DVector::from_fn(4, |i, _| zz[i].re);
    let q = d.clone().qr().q();
    let axis = if (&u - &q * (q.transpose() * &u)).norm() < S::lit(UMBILIC_THRESHOLD) * S::one().max(u.norm()) {
        Some(normal_axis(&d))
    } else {
        None
    };
    let lift = frame_lift(&phi, z0, S::one(), axis)?;
    if lift.orientation == orientation {
        Ok(lift)
    } else {
        frame_lift(&phi, z0, -S::one(), axis)
    }
}

/// `X(J_ψ)` at `x0`.
pub fn vertical_part<S: Real>(lift: &TwistorLift<S>, x0: &[S], direction: &[S]) -> Result<DMatrix<S>> {
    if direction.len() != lift.field.domain_dim() {
        return Err(TwistorError::DimensionMismatch("direction has the wrong dimension".into()));
    }
    let jet = lift.field.field_at(x0, 1)?;
    let n = lift.field.target_dim();
    let mut out = DMatrix::zeros(n, n);
    for (i, &c) in direction.iter().enumerate() {
        out += jet.d1(i) * c;
    }
    Ok(out)
}

/// `max_X ‖∇_{J₀X}J − (−1)^{a+1} J ∇_X J‖` over the coordinate directions,
/// where `J₀∂_{x_{2j}} = ∂_{x_{2j+1}}`.
pub fn j_vertical_residual<S: Real>(lift: &TwistorLift<S>, x0: &[S], a: u8) -> Result<S> {
    let sign = match a {
        1 => S::one(),
        2 => -S::one(),
        _ => return Err(TwistorError::InvalidArgument(format!("a must be 1 or 2, got {a}"))),
    };
    let jet = lift.field.field_at(x0, 1)?;
    let j = jet.value();
    let mut worst = S::zero();
    for p in 0..lift.field.domain_dim() / 2 {
        let (dx, dy) = (jet.d1(2 * p), jet.d1(2 * p + 1));
        let r1 = crate::linalg::frobenius(&(&dy - &j * &dx * sign));
        let r2 = crate::linalg::frobenius(&(-&dx - &j * &dy * sign));
        worst = worst.max(r1).max(r2);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Z,
    Zbar,
}

/// `‖P⁰¹ ∂(I − iJ)‖`: the part of the derivative of the `T¹⁰` frame along
/// `∂_z` (or `∂_z̄`) that leaves `T¹⁰`, maximized over complex coordinates.
pub fn t10_stability_residual<S: Real>(lift: &TwistorLift<S>, x0: &[S], direction: Direction) -> Result<S> {
    let jet = lift.field.field_at(x0, 1)?;
    let n = lift.field.target_dim();
    let c = |m: &DMatrix<S>| m.map(|x| Complex::new(x, S::zero()));
    let i = Complex::new(S::zero(), S::one());
    let half = Complex::new(S::lit(0.5), S::zero());
    let j = c(&jet.value());
    let p01 = (DMatrix::identity(n, n) + &j * i) * half;
    let mut worst = S::zero();
    for p in 0..lift.field.domain_dim() / 2 {
        let (dx, dy) = (c(&jet.d1(2 * p)), c(&jet.d1(2 * p + 1)));
        let dj = match direction {
            Direction::Z => (dx - dy * i) * half,
            Direction::Zbar => (dx + dy * i) * half,
        };
        // ∂(I − iJ) = −i ∂J
        let dy_frame = dj * (-i);
        worst = worst.max(frobenius_c(&(&p01 * dy_frame)));
    }
    Ok(worst)
}
