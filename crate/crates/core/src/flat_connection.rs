//! Lie-algebra-valued 1-forms `α = Σ αᵢ dxᵢ` with matrix values: flatness,
//! product integration of `f⁻¹df = α`, and the (0,2)-curvature residual.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Result, TwistorError};
use crate::expm::expm;
use crate::jet::{DiffOp, Jet, MatrixJet};
use crate::scalar::{cabs, Real};

pub type FormFn<S> = dyn Fn(&[Jet<S>]) -> Result<Vec<MatrixJet<S>>> + Send + Sync;
pub type GroupFn<S> = dyn Fn(&[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync;
pub type ComplexFormFn<S> = dyn Fn(&[Jet<S>]) -> Result<Vec<MatrixJet<Complex<S>>>> + Send + Sync;

#[derive(Clone)]
enum Components<S: Real> {
    Direct(Arc<FormFn<S>>),
    /// `αᵢ = g⁻¹ ∂ᵢg`
    MaurerCartan(Arc<GroupFn<S>>),
}

/// A `k × k`-matrix valued 1-form on `ℝ^d`.
#[derive(Clone)]
pub struct LieValuedForm<S: Real> {
    dim: usize,
    k: usize,
    comps: Components<S>,
}

impl<S: Real> fmt::Debug for LieValuedForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.comps {
            Components::Direct(_) => "direct",
            Components::MaurerCartan(_) => "maurer-cartan",
        };
        write!(f, "LieValuedForm(ℝ^{}, {}×{}, {kind})", self.dim, self.k, self.k)
    }
}

impl<S: Real> LieValuedForm<S> {
    /// Components `(α₁, …, α_d)` from a closure over the coordinate jets.
    pub fn new(
        dim: usize,
        k: usize,
        f: impl Fn(&[Jet<S>]) -> Result<Vec<MatrixJet<S>>> + Send + Sync + 'static,
    ) -> Self {
        LieValuedForm {
            dim,
            k,
            comps: Components::Direct(Arc::new(f)),
        }
    }

    pub fn constant(mats: Vec<DMatrix<S>>) -> Result<Self> {
        let k = mats.first().map_or(0, |m| m.nrows());
        if mats.iter().any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(TwistorError::DimensionMismatch("components must be square of one size".into()));
        }
        let dim = mats.len();
        Ok(LieValuedForm::new(dim, k, move |x| {
            Ok(mats.iter().map(|m| MatrixJet::constant(m, x[0].nvars(), x[0].order())).collect())
        }))
    }

    pub fn zero(dim: usize, k: usize) -> Self {
        LieValuedForm::new(dim, k, move |x| {
            Ok(vec![MatrixJet::zeros(k, x[0].nvars(), x[0].order()); dim])
        })
    }

    /// The pullback `g⁻¹dg` of the Maurer–Cartan form.
    pub fn maurer_cartan(
        dim: usize,
        k: usize,
        g: impl Fn(&[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync + 'static,
    ) -> Self {
        LieValuedForm {
            dim,
            k,
            comps: Components::MaurerCartan(Arc::new(g)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Jets of `(α₁, …, α_d)` at `pt`.
    pub fn jets(&self, pt: &[S], order: usize) -> Result<Vec<MatrixJet<S>>> {
        if pt.len() != self.dim {
            return Err(TwistorError::DimensionMismatch(format!(
                "point in ℝ^{} for a form on ℝ^{}",
                pt.len(),
                self.dim
            )));
        }
        let out = match &self.comps {
            Components::Direct(f) => f(&Jet::variables(pt, order))?,
            Components::MaurerCartan(g) => {
                let gj = g(&Jet::variables(pt, order + 1))?;
                let ginv = gj.truncate(order).inverse()?;
                (0..self.dim).map(|i| ginv.mul(&gj.derivative(i))).collect()
            }
        };
        if out.len() != self.dim || out.iter().any(|m| m.dim() != self.k) {
            return Err(TwistorError::DimensionMismatch("form returned components of the wrong shape".into()));
        }
        Ok(out)
    }

    /// `Σ αᵢ(pt) vᵢ`.
    pub fn contract(&self, pt: &[S], v: &[S]) -> Result<DMatrix<S>> {
        let vals = self.jets(pt, 0)?;
        let mut acc = DMatrix::zeros(self.k, self.k);
        for (a, &vi) in vals.iter().zip(v) {
            acc += a.value() * vi;
        }
        Ok(acc)
    }
}

/// `max_{i<j} ‖∂ᵢαⱼ − ∂ⱼαᵢ + αᵢαⱼ − αⱼαᵢ‖_F` at `pt`.
pub fn flatness_residual<S: Real>(alpha: &LieValuedForm<S>, pt: &[S]) -> Result<S> {
    let a = alpha.jets(pt, 1)?;
    let vals: Vec<DMatrix<S>> = a.iter().map(|m| m.value()).collect();
    let mut worst = S::zero();
    for i in 0..alpha.dim {
        for j in i + 1..alpha.dim {
            let f = a[j].d1(i) - a[i].d1(j) + &vals[i] * &vals[j] - &vals[j] * &vals[i];
            worst = worst.max(f.norm());
        }
    }
    Ok(worst)
}

/// A piecewise-linear path and, after [`GroupPath::integrate`], the group
/// element `f(end)` of the solution of `f⁻¹df = α` with `f(start) = I`.
#[derive(Debug, Clone)]
pub struct GroupPath<S: Real> {
    pub vertices: Vec<Vec<S>>,
    pub steps: usize,
    pub element: Option<DMatrix<S>>,
    /// Smallest `|det f|` seen along the way.
    pub min_abs_det: Option<S>,
}

impl<S: Real> GroupPath<S> {
    pub fn new(vertices: Vec<Vec<S>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(TwistorError::InvalidArgument("a path needs at least two vertices".into()));
        }
        let d = vertices[0].len();
        if vertices.iter().any(|v| v.len() != d) {
            return Err(TwistorError::DimensionMismatch("path vertices differ in dimension".into()));
        }
        Ok(GroupPath {
            vertices,
            steps: 0,
            element: None,
            min_abs_det: None,
        })
    }

    pub fn segment(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        GroupPath::new(vec![a, b])
    }

    pub fn start(&self) -> &[S] {
        &self.vertices[0]
    }

    pub fn end(&self) -> &[S] {
        self.vertices.last().expect("nonempty")
    }

    fn lengths(&self) -> Vec<S> {
        self.vertices
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).fold(S::zero(), |acc, (&a, &b)| acc + (b - a) * (b - a)).sqrt())
            .collect()
    }

    /// Steps per segment: proportional to length, at least one each.
    fn split(&self, steps: usize) -> Vec<usize> {
        let lens = self.lengths();
        let total = lens.iter().fold(S::zero(), |a, &b| a + b);
        if total == S::zero() {
            return vec![1; lens.len()];
        }
        lens.iter()
            .map(|&l| ((l / total * S::from_count(steps)).to_f64_lossy().round() as usize).max(1))
            .collect()
    }

    /// Midpoint product integration `f ← f · exp(Σ αᵢ(x_mid) Δxᵢ)`.
    pub fn integrate(&mut self, alpha: &LieValuedForm<S>, steps: usize) -> Result<&DMatrix<S>> {
        if self.start().len() != alpha.dim {
            return Err(TwistorError::DimensionMismatch("path and form live in different spaces".into()));
        }
        if steps == 0 {
            return Err(TwistorError::InvalidArgument("steps must be positive".into()));
        }
        let mut f = DMatrix::<S>::identity(alpha.k, alpha.k);
        let mut min_det = S::one();
        let mut count = 0usize;
        for (w, n) in self.vertices.windows(2).zip(self.split(steps)) {
            let (a, b) = (&w[0], &w[1]);
            let dx: Vec<S> = a.iter().zip(b).map(|(&ai, &bi)| (bi - ai) / S::from_count(n)).collect();
            for s in 0..n {
                let tmid = (S::from_count(s) + S::lit(0.5)) / S::from_count(n);
                let mid: Vec<S> = a.iter().zip(b).map(|(&ai, &bi)| ai + (bi - ai) * tmid).collect();
                f = &f * expm(&alpha.contract(&mid, &dx)?);
                count += 1;
                let det = f.determinant().abs();
                if !det.is_finite() || det <= S::lit(1e-300) {
                    return Err(TwistorError::NonInvertible(count));
                }
                min_det = min_det.min(det);
            }
        }
        self.steps = count;
        self.min_abs_det = Some(min_det);
        log::debug!("integrated {count} steps, min |det| {}", min_det.to_f64_lossy());
        Ok(self.element.insert(f))
    }
}

/// `f(end)` for the solution of `f⁻¹df = α` along the polyline, `f(start) = I`.
pub fn integrate_path<S: Real>(alpha: &LieValuedForm<S>, vertices: &[Vec<S>], steps: usize) -> Result<DMatrix<S>> {
    let mut path = GroupPath::new(vertices.to_vec())?;
    Ok(path.integrate(alpha, steps)?.clone())
}

/// `‖f_A − f_B‖_F` for two paths with common endpoints.
pub fn path_independence_defect<S: Real>(
    alpha: &LieValuedForm<S>,
    path_a: &[Vec<S>],
    path_b: &[Vec<S>],
    steps: usize,
) -> Result<S> {
    let same = |p: &[S], q: &[S]| p.len() == q.len() && p.iter().zip(q).all(|(a, b)| (*a - *b).abs() <= S::lit(1e-12));
    let (a, b) = (GroupPath::new(path_a.to_vec())?, GroupPath::new(path_b.to_vec())?);
    if !same(a.start(), b.start()) || !same(a.end(), b.end()) {
        return Err(TwistorError::InvalidArgument("paths do not share endpoints".into()));
    }
    let fa = integrate_path(alpha, path_a, steps)?;
    let fb = integrate_path(alpha, path_b, steps)?;
    Ok((fa - fb).norm())
}

/// `log₂(e(n) / e(2n))` with `e(n) = ‖f_n − exact‖` for `n = steps`.
pub fn observed_order<S: Real>(
    alpha: &LieValuedForm<S>,
    vertices: &[Vec<S>],
    exact: &DMatrix<S>,
    steps: usize,
) -> Result<S> {
    let coarse = (integrate_path(alpha, vertices, steps)? - exact).norm();
    let fine = (integrate_path(alpha, vertices, 2 * steps)? - exact).norm();
    if fine == S::zero() {
        return Err(TwistorError::Degenerate("integration is exact at this resolution".into()));
    }
    Ok((coarse / fine).ln() / S::lit(2.0).ln())
}

/// `max_{i<j} ‖∂_{z̄ᵢ}Γⱼ − ∂_{z̄ⱼ}Γᵢ + ΓⱼΓᵢ − ΓᵢΓⱼ‖_F` at `pt ∈ ℂᵐ`
/// (real coordinates `xᵢ + i yᵢ` interleaved).
pub fn curvature_02_residual<S: Real>(
    m: usize,
    gamma: &ComplexFormFn<S>,
    pt: &[S],
) -> Result<S> {
    if m == 0 || pt.len() != 2 * m {
        return Err(TwistorError::DimensionMismatch(format!("need a point of ℂ^{m}")));
    }
    let g = gamma(&Jet::variables(pt, 1))?;
    if g.len() != m {
        return Err(TwistorError::DimensionMismatch("one matrix per complex coordinate".into()));
    }
    let k = g[0].dim();
    let nv = 2 * m;
    let dzbar = |i: usize, mat: &MatrixJet<Complex<S>>| -> Result<DMatrix<Complex<S>>> {
        let op = DiffOp::<S>::dzbar_coord(nv, i);
        let mut out = DMatrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                out[(r, c)] = op.apply(mat.get(r, c))?;
            }
        }
        Ok(out)
    };
    let vals: Vec<DMatrix<Complex<S>>> = g.iter().map(|x| x.value()).collect();
    let mut worst = S::zero();
    for i in 0..m {
        for j in i + 1..m {
            let f = dzbar(i, &g[j])? - dzbar(j, &g[i])? + &vals[j] * &vals[i] - &vals[i] * &vals[j];
            let norm = f.iter().fold(S::zero(), |acc, z| acc + cabs(*z) * cabs(*z)).sqrt();
            worst = worst.max(norm);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn e12() -> DMatrix<f64> {
        dmatrix![0.0, 1.0; 0.0, 0.0]
    }

    #[test]
    fn flatness_examples() {
        let c = LieValuedForm::constant(vec![DMatrix::identity(2, 2) * 2.0, DMatrix::identity(2, 2)]).unwrap();
        assert_eq!(flatness_residual(&c, &[0.3, 0.1]).unwrap(), 0.0);
        let bad = LieValuedForm::new(2, 2, |x| {
            Ok(vec![
                MatrixJet::constant(&e12(), 2, x[0].order()).scale_jet(&x[1]),
                MatrixJet::zeros(2, 2, x[0].order()),
            ])
        });
        assert!((flatness_residual(&bad, &[0.3, 0.1]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maurer_cartan_of_commuting_exponentials() {
        let a = dmatrix![0.1, 0.2; -0.3, 0.4];
        let b = a.clone() * 2.0 + DMatrix::identity(2, 2);
        let (a2, b2) = (a.clone(), b.clone());
        let mc = LieValuedForm::maurer_cartan(2, 2, move |x| {
            Ok(MatrixJet::exp_along(&a2, &x[0]).mul(&MatrixJet::exp_along(&b2, &x[1])))
        });
        // commuting: α = A dx₁ + B dx₂
        let vals = mc.jets(&[0.4, -0.2], 0).unwrap();
        assert!((vals[0].value() - &a).norm() < 1e-13);
        assert!((vals[1].value() - &b).norm() < 1e-13);
        assert!(flatness_residual(&mc, &[0.4, -0.2]).unwrap() < 1e-13);
    }

    #[test]
    fn constant_form_integrates_to_exponential() {
        let a = dmatrix![0.0, -1.0; 1.0, 0.0];
        let form = LieValuedForm::constant(vec![a.clone(), DMatrix::zeros(2, 2)]).unwrap();
        let f = integrate_path(&form, &[vec![0.0, 0.0], vec![1.5, 0.0]], 10).unwrap();
        assert!((f - expm(&(a * 1.5))).norm() < 1e-13);
        let zero = LieValuedForm::<f64>::zero(2, 3);
        let f = integrate_path(&zero, &[vec![0.0, 0.0], vec![1.0, 2.0], vec![3.0, 0.0]], 7).unwrap();
        assert_eq!(f, DMatrix::identity(3, 3));
    }

    #[test]
    fn holonomy_of_nonflat_form() {
        let form = LieValuedForm::new(2, 2, |x| {
            Ok(vec![
                MatrixJet::constant(&e12(), 2, x[0].order()).scale_jet(&x[1]),
                MatrixJet::zeros(2, 2, x[0].order()),
            ])
        });
        let pa = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let pb = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let d = path_independence_defect(&form, &pa, &pb, 100).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let pc = vec![vec![0.0, 0.0], vec![1.0, 2.0]];
        assert!(path_independence_defect(&form, &pa, &pc, 10).is_err());
    }

    #[test]
    fn singular_accumulation_is_reported() {
        // exp never produces a singular matrix, so force overflow
        let form = LieValuedForm::constant(vec![DMatrix::identity(2, 2) * 1e6]).unwrap();
        assert!(matches!(
            integrate_path(&form, &[vec![0.0], vec![1.0]], 2),
            Err(TwistorError::NonInvertible(_))
        ));
    }

    #[test]
    fn curvature_02_examples() {
        let z = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let e12c = DMatrix::from_row_slice(2, 2, &[z, one, z, z]);
        // m = 1: nothing to antisymmetrize
        let any = move |x: &[Jet<f64>]| -> Result<Vec<MatrixJet<Complex<f64>>>> {
            let c = x[0].to_complex();
            Ok(vec![MatrixJet::constant(&e12c, 2, c.order()).scale_jet(&(&c * &c))])
        };
        assert_eq!(curvature_02_residual(1, &any, &[0.3, 0.4]).unwrap(), 0.0);
        let e = DMatrix::from_row_slice(2, 2, &[z, one, z, z]);
        // Γ₁ = z̄₂ E₁₂, Γ₂ = 0
        let g = move |x: &[Jet<f64>]| -> Result<Vec<MatrixJet<Complex<f64>>>> {
            let zbar2 = &x[2].to_complex() - &x[3].to_complex().scale(Complex::new(0.0, 1.0));
            Ok(vec![
                MatrixJet::constant(&e, 4, 1).scale_jet(&zbar2),
                MatrixJet::zeros(2, 4, 1),
            ])
        };
        assert!((curvature_02_residual(2, &g, &[0.1, 0.2, 0.3, 0.4]).unwrap() - 1.0).abs() < 1e-15);
    }
}
