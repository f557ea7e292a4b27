//! First-order residuals of one-parameter families `φ_t` with flat target.
//!
//! The family parameter `t` is one extra jet variable placed after the
//! domain coordinates, so a statement "`F(φ_t) = o(t)`" becomes the exact
//! check that the constant and `t`-linear coefficients of `F` vanish.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::checkers::IsotropyMode;
use crate::error::{Result, TwistorError};
use crate::jet::{DiffOp, Jet, JetLayout, MapJet, MatrixJet, SmoothMap};
use crate::scalar::{cabs, Real};

pub type FamilyFn<S> = dyn Fn(&Jet<S>, &[Jet<S>]) -> Result<Vec<Jet<S>>> + Send + Sync;
pub type StructureFamilyFn<S> = dyn Fn(&Jet<S>, &[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync;

/// `φ(t, x)` given by a closure over the jets of `t` and `x`.
#[derive(Clone)]
pub struct MapFamily<S: Real> {
    domain: usize,
    codomain: usize,
    f: Arc<FamilyFn<S>>,
}

impl<S: Real> fmt::Debug for MapFamily<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MapFamily(ℝ × ℝ^{} → ℝ^{})", self.domain, self.codomain)
    }
}

impl<S: Real> MapFamily<S> {
    pub fn new(
        domain: usize,
        codomain: usize,
        f: impl Fn(&Jet<S>, &[Jet<S>]) -> Result<Vec<Jet<S>>> + Send + Sync + 'static,
    ) -> Self {
        MapFamily {
            domain,
            codomain,
            f: Arc::new(f),
        }
    }

    /// `φ₀ + t·v`.
    pub fn affine(base: Arc<dyn SmoothMap<S>>, variation: Arc<dyn SmoothMap<S>>) -> Result<Self> {
        if base.domain_dim() != variation.domain_dim() || base.codomain_dim() != variation.codomain_dim() {
            return Err(TwistorError::DimensionMismatch("base and variation differ in shape".into()));
        }
        let (m, n) = (base.domain_dim(), base.codomain_dim());
        Ok(MapFamily::new(m, n, move |t, x| {
            let b = base.eval(x)?;
            let v = variation.eval(x)?;
            Ok(b.iter().zip(&v).map(|(bi, vi)| bi + &(t * vi)).collect())
        }))
    }

    pub fn domain_dim(&self) -> usize {
        self.domain
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain
    }

    fn eval(&self, t: &Jet<S>, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if x.len() != self.domain {
            return Err(TwistorError::DimensionMismatch(format!(
                "{} inputs for a family on ℝ^{}",
                x.len(),
                self.domain
            )));
        }
        let out = (self.f)(t, x)?;
        if out.len() != self.codomain {
            return Err(TwistorError::DimensionMismatch(format!(
                "family returned {} components, expected {}",
                out.len(),
                self.codomain
            )));
        }
        Ok(out)
    }

    /// Joint jets in `(x, t)` at `(x0, 0)`; `t` is variable `domain_dim()`.
    pub fn joint_jet(&self, x0: &[S], order: usize) -> Result<Vec<Jet<S>>> {
        let (x, t) = joint_variables(x0, order);
        self.eval(&t, &x)
    }

    /// The map `φ₀`.
    pub fn base(&self) -> FamilySlice<S> {
        FamilySlice {
            family: self.clone(),
            variation: false,
        }
    }

    /// The variation field `v = ∂_t φ|_{t=0}`.
    pub fn variation(&self) -> FamilySlice<S> {
        FamilySlice {
            family: self.clone(),
            variation: true,
        }
    }
}

fn joint_variables<S: Real>(x0: &[S], order: usize) -> (Vec<Jet<S>>, Jet<S>) {
    let mut p = x0.to_vec();
    p.push(S::zero());
    let mut vars = Jet::variables(&p, order);
    let t = vars.pop().expect("t variable");
    (vars, t)
}

/// `φ₀` or `∂_tφ|₀` of a family, as a smooth map.
#[derive(Debug, Clone)]
pub struct FamilySlice<S: Real> {
    family: MapFamily<S>,
    variation: bool,
}

/// The jet in the first `nvars - 1` variables obtained by setting the last to 0.
fn restrict_last<S: Real>(f: &Jet<S>) -> Jet<S> {
    let n = f.nvars() - 1;
    let target = JetLayout::shared(n, f.order());
    let mut multi = vec![0u8; n + 1];
    let coeffs = (0..target.len())
        .map(|i| {
            multi[..n].copy_from_slice(target.monomial(i));
            f.coeff(&multi)
        })
        .collect();
    Jet::from_coeffs(target, coeffs)
}

/// Appends a variable that `f` does not depend on.
fn extend<S: Real>(f: &Jet<S>) -> Jet<S> {
    let n = f.nvars();
    let target = JetLayout::shared(n + 1, f.order());
    let coeffs = (0..target.len())
        .map(|i| {
            let m = target.monomial(i);
            if m[n] == 0 {
                f.coeff(&m[..n])
            } else {
                S::zero()
            }
        })
        .collect();
    Jet::from_coeffs(target, coeffs)
}

impl<S: Real> SmoothMap<S> for FamilySlice<S> {
    fn domain_dim(&self) -> usize {
        self.family.domain
    }
    fn codomain_dim(&self) -> usize {
        self.family.codomain
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if !self.variation {
            return self.family.eval(&x[0].lift(S::zero()), x);
        }
        // evaluate with t as a fresh variable one order higher, then read ∂_t at t = 0
        let order = x[0].order() + 1;
        let raised: Vec<Jet<S>> = x
            .iter()
            .map(|xi| {
                let mut layout_coeffs = vec![S::zero(); JetLayout::shared(xi.nvars(), order).len()];
                layout_coeffs[..xi.coeffs().len()].copy_from_slice(xi.coeffs());
                extend(&Jet::from_coeffs(JetLayout::shared(xi.nvars(), order), layout_coeffs))
            })
            .collect();
        let n = x[0].nvars();
        let t = Jet::variable(S::zero(), n, n + 1, order);
        let out = self.family.eval(&t, &raised)?;
        Ok(out
            .iter()
            .map(|c| restrict_last(&c.derivative(n)).truncate(x[0].order()))
            .collect())
    }
}

/// `J_φ(v) = −Σ ∂²v/∂x_i²` at `x0` (flat target: no curvature term).
pub fn jacobi_operator_flat<S: Real>(v: &dyn SmoothMap<S>, x0: &[S]) -> Result<Vec<S>> {
    Ok(v.jet_at(x0, 2)?.laplacian()?.into_iter().map(|c| -c).collect())
}

/// `(τ(φ₀)(x0), ∂_t|₀ τ(φ_t)(x0))` with `τ = Σ ∂²/∂x_i²`.
pub fn tension_first_order<S: Real>(fam: &MapFamily<S>, x0: &[S]) -> Result<(Vec<S>, Vec<S>)> {
    let m = fam.domain;
    let jets = fam.joint_jet(x0, 3)?;
    let mut base = vec![S::zero(); jets.len()];
    let mut dt = vec![S::zero(); jets.len()];
    let mut multi = vec![0u8; m + 1];
    for (k, f) in jets.iter().enumerate() {
        for i in 0..m {
            multi.iter_mut().for_each(|e| *e = 0);
            multi[i] = 2;
            base[k] += f.partial(&multi)?;
            multi[m] = 1;
            dt[k] += f.partial(&multi)?;
        }
    }
    Ok((base, dt))
}

/// A family of structure fields `J(t, x)` along a map family.
#[derive(Clone)]
pub struct LiftFamily<S: Real> {
    pub map: MapFamily<S>,
    structure: Arc<StructureFamilyFn<S>>,
}

impl<S: Real> fmt::Debug for LiftFamily<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftFamily({:?})", self.map)
    }
}

impl<S: Real> LiftFamily<S> {
    pub fn new(
        map: MapFamily<S>,
        structure: impl Fn(&Jet<S>, &[Jet<S>]) -> Result<MatrixJet<S>> + Send + Sync + 'static,
    ) -> Self {
        LiftFamily {
            map,
            structure: Arc::new(structure),
        }
    }

    fn structure_jet(&self, x0: &[S], order: usize) -> Result<MatrixJet<S>> {
        let (x, t) = joint_variables(x0, order);
        let j = (self.structure)(&t, &x)?;
        if j.dim() != self.map.codomain {
            return Err(TwistorError::DimensionMismatch("structure has the wrong size".into()));
        }
        Ok(j)
    }
}

#[derive(Clone, Debug)]
pub enum FirstOrderKind<S: Real> {
    /// `⟨∂_zφ_t, ∂_zφ_t⟩` on a surface domain.
    Conformal,
    /// `⟨∂_z^rφ_t, ∂_z^sφ_t⟩` for `1 ≤ r ≤ s ≤ order`.
    Isotropy { order: usize, mode: IsotropyMode },
    /// Horizontal `dφ_t(J₀X) − J_t dφ_t(X)` and vertical
    /// `∇_{J₀X}J_t − (−1)^{a+1} J_t ∇_X J_t` parts.
    PsiHolomorphy { lift: Box<LiftFamily<S>>, a: u8 },
}

/// `(value at t = 0, |∂_t at t = 0|)` of the residual of `kind`, maximized
/// over its components.
pub fn first_order_residual<S: Real>(fam: &MapFamily<S>, x0: &[S], kind: &FirstOrderKind<S>) -> Result<(S, S)> {
    match kind {
        FirstOrderKind::Conformal => isotropy_pairs(fam, x0, 1, IsotropyMode::Full),
        FirstOrderKind::Isotropy { order, mode } => isotropy_pairs(fam, x0, *order, *mode),
        FirstOrderKind::PsiHolomorphy { lift, a } => psi_holomorphy(lift, x0, *a),
    }
}

fn isotropy_pairs<S: Real>(fam: &MapFamily<S>, x0: &[S], order: usize, mode: IsotropyMode) -> Result<(S, S)> {
    if fam.domain != 2 {
        return Err(TwistorError::InvalidArgument("needs a surface domain".into()));
    }
    if order == 0 {
        return Err(TwistorError::InvalidArgument("isotropy order must be at least 1".into()));
    }
    let nv = 3;
    let jets = fam.joint_jet(x0, order + 1)?;
    let dz = DiffOp::<S>::dz(nv, 0, 1);
    // ∂_z^r φ_t as jets of order ≥ 1 so the t-coefficient survives
    let derivs: Vec<Vec<Jet<Complex<S>>>> = (1..=order)
        .map(|r| {
            let op = dz.pow(r);
            jets.iter().map(|c| op.apply_jet(c)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let (mut base, mut dt) = (S::zero(), S::zero());
    for r in 0..order {
        for s in r..order {
            if mode == IsotropyMode::Diagonal && r != s {
                continue;
            }
            let mut acc = derivs[r][0].truncate(1).lift(Complex::new(S::zero(), S::zero()));
            for (a, b) in derivs[r].iter().zip(&derivs[s]) {
                acc += &(&a.truncate(1) * &b.truncate(1));
            }
            base = base.max(cabs(acc.value()));
            dt = dt.max(cabs(acc.d1(2)));
        }
    }
    Ok((base, dt))
}

fn psi_holomorphy<S: Real>(lift: &LiftFamily<S>, x0: &[S], a: u8) -> Result<(S, S)> {
    let sign = match a {
        1 => S::one(),
        2 => -S::one(),
        _ => return Err(TwistorError::InvalidArgument(format!("a must be 1 or 2, got {a}"))),
    };
    let m = lift.map.domain;
    if !m.is_multiple_of(2) {
        return Err(TwistorError::InvalidArgument("domain dimension must be even".into()));
    }
    let t_var = m;
    let comps = lift.map.joint_jet(x0, 2)?;
    let j = lift.structure_jet(x0, 2)?;
    let j1 = j.truncate(1);
    let n = j.dim();
    let (mut base, mut dt) = (S::zero(), S::zero());
    let mut record = |v: &[Jet<S>]| {
        let b: S = v.iter().fold(S::zero(), |acc, e| acc + e.value() * e.value()).sqrt();
        let d: S = v.iter().fold(S::zero(), |acc, e| acc + e.d1(t_var) * e.d1(t_var)).sqrt();
        base = base.max(b);
        dt = dt.max(d);
    };
    for p in 0..m / 2 {
        let (ex, ey) = (2 * p, 2 * p + 1);
        // X = ∂_x: J₀X = ∂_y;  X = ∂_y: J₀X = −∂_x
        for (x_var, jx_var, jx_sign) in [(ex, ey, S::one()), (ey, ex, -S::one())] {
            let dphi_x: Vec<Jet<S>> = comps.iter().map(|c| c.derivative(x_var)).collect();
            let dphi_jx: Vec<Jet<S>> = comps.iter().map(|c| c.derivative(jx_var).scale(jx_sign)).collect();
            let horizontal: Vec<Jet<S>> = (0..n)
                .map(|r| {
                    let mut acc = dphi_jx[r].clone();
                    for c in 0..n {
                        acc = &acc - &(j1.get(r, c) * &dphi_x[c]);
                    }
                    acc
                })
                .collect();
            record(&horizontal);
            let nx = j.derivative(x_var);
            let njx = j.derivative(jx_var).scale(jx_sign);
            let vertical = njx.sub(&j1.mul(&nx).scale(sign));
            let entries: Vec<Jet<S>> = (0..n * n).map(|k| vertical.get(k / n, k % n).clone()).collect();
            record(&entries);
        }
    }
    Ok((base, dt))
}

/// Jets of the base map as a [`MapJet`], for use with the pointwise checkers.
pub fn base_jet<S: Real>(fam: &MapFamily<S>, x0: &[S], order: usize) -> Result<MapJet<S>> {
    fam.base().jet_at(x0, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{ComplexArgs, ComplexMap, RealMap};
    use crate::twistor::HermitianStructure;

    fn holo_family(
        f: impl Fn(&Jet<Complex<f64>>, &Jet<Complex<f64>>, &Jet<Complex<f64>>) -> Jet<Complex<f64>> + Send + Sync + 'static,
    ) -> MapFamily<f64> {
        // f(t, z, z̄)
        MapFamily::new(2, 2, move |t, x| {
            let a = ComplexArgs::from_real(x);
            let w = f(&t.to_complex(), &a.z[0], &a.zbar[0]);
            Ok(vec![w.re(), w.im()])
        })
    }

    #[test]
    fn jacobi_examples() {
        let xsq = RealMap::<f64>::new(2, 1, |x| Ok(vec![&x[0] * &x[0]]));
        assert_eq!(jacobi_operator_flat(&xsq, &[0.3, 0.1]).unwrap(), vec![-2.0]);
        let re_z3 = RealMap::<f64>::new(2, 2, |x| {
            let a = ComplexArgs::from_real(x);
            Ok(vec![a.z[0].powi(3).re(), x[0].lift(0.0)])
        });
        let j = jacobi_operator_flat(&re_z3, &[0.7, -0.2]).unwrap();
        assert!(j.iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn tension_examples() {
        let base: Arc<dyn SmoothMap<f64>> = Arc::new(ComplexMap::new(1, 1, |a| Ok(vec![a.z[0].powi(2)])));
        let v: Arc<dyn SmoothMap<f64>> = Arc::new(RealMap::new(2, 2, |x| Ok(vec![&x[0] * &x[0], x[0].lift(0.0)])));
        let fam = MapFamily::affine(base, v).unwrap();
        let (tau, dtau) = tension_first_order(&fam, &[0.4, -0.6]).unwrap();
        assert!(tau.iter().all(|c| c.abs() < 1e-14));
        assert!((dtau[0] - 2.0).abs() < 1e-14 && dtau[1].abs() < 1e-14);
    }

    #[test]
    fn base_and_variation_slices() {
        let fam = holo_family(|t, z, _| z.powi(2) + t * &z.powi(3));
        let x0 = [0.5, 0.25];
        let b = fam.base().value_at(&x0).unwrap();
        let z = Complex::new(0.5, 0.25);
        assert!((Complex::new(b[0], b[1]) - z * z).norm() < 1e-15);
        let vj = fam.variation().jet_at(&x0, 2).unwrap();
        let v = vj.value();
        assert!((Complex::new(v[0], v[1]) - z * z * z).norm() < 1e-15);
        // ∂ₓ(z³) = 3z²
        let dv = Complex::new(vj.comps[0].d1(0), vj.comps[1].d1(0));
        assert!((dv - 3.0 * z * z).norm() < 1e-14);
    }

    #[test]
    fn holomorphic_family_is_first_order_everything() {
        let fam = holo_family(|t, z, _| z.powi(2) + t * &z.powi(3));
        let x0 = [0.3, 0.8];
        assert!(first_order_residual(&fam, &x0, &FirstOrderKind::Conformal).unwrap().1 < 1e-13);
        let (b, d) = first_order_residual(
            &fam,
            &x0,
            &FirstOrderKind::Isotropy {
                order: 3,
                mode: IsotropyMode::Full,
            },
        )
        .unwrap();
        assert!(b < 1e-13 && d < 1e-13);
        let j0 = HermitianStructure::<f64>::canonical(1).into_matrix();
        let lift = LiftFamily::new(fam.clone(), move |t, _| Ok(MatrixJet::constant(&j0, t.nvars(), t.order())));
        for a in [1, 2] {
            let kind = FirstOrderKind::PsiHolomorphy {
                lift: Box::new(lift.clone()),
                a,
            };
            let (b, d) = first_order_residual(&fam, &x0, &kind).unwrap();
            assert!(b < 1e-13 && d < 1e-13);
        }
    }

    #[test]
    fn conformal_cross_term() {
        // φ_t = z + t z̄ = ((1+t)x, (1−t)y); ⟨∂_zφ_t, ∂_zφ_t⟩ = ((1+t)² − (1−t)²)/4 = t
        let fam = holo_family(|t, z, zb| z + &(t * zb));
        let (b, d) = first_order_residual(&fam, &[0.2, 0.9], &FirstOrderKind::Conformal).unwrap();
        assert!(b < 1e-15);
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psi_holomorphy_sees_time_dependence() {
        // J_t = rotation of J₀ in ℝ² is still ±J₀; use base z + t z̄ with constant J₀
        let fam = holo_family(|t, z, zb| z + &(t * zb));
        let j0 = HermitianStructure::<f64>::canonical(1).into_matrix();
        let lift = LiftFamily::new(fam.clone(), move |t, _| Ok(MatrixJet::constant(&j0, t.nvars(), t.order())));
        let kind = FirstOrderKind::PsiHolomorphy {
            lift: Box::new(lift),
            a: 2,
        };
        let (b, d) = first_order_residual(&fam, &[0.1, 0.1], &kind).unwrap();
        assert!(b < 1e-15);
        // dφ_t(J₀∂x) − J₀dφ_t(∂x) = (0, 1−t) − (0, 1+t) = (0, −2t)
        assert!((d - 2.0).abs() < 1e-14);
    }

    #[test]
    fn isotropy_order_errors() {
        let fam = holo_family(|_, z, _| z.clone());
        let kind = FirstOrderKind::Isotropy {
            order: 0,
            mode: IsotropyMode::Diagonal,
        };
        assert!(first_order_residual(&fam, &[0.0, 0.0], &kind).is_err());
    }
}
