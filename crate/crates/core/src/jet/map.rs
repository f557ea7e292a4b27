//! Smooth maps between flat spaces, evaluated as jets.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::{DiffOp, Jet};
use crate::error::{Result, TwistorError};
use crate::scalar::Real;

/// A map `ℝ^domain_dim → ℝ^codomain_dim` that can be pushed through jets.
///
/// `eval` receives one jet per domain coordinate (all with a common layout,
/// not necessarily the domain's own coordinates) and returns one jet per
/// real output component. Implementations must be deterministic.
pub trait SmoothMap<S: Real>: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>>;

    /// Jet of the map at `point` in the domain coordinates.
    fn jet_at(&self, point: &[S], order: usize) -> Result<MapJet<S>> {
        if point.len() != self.domain_dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "point has {} coordinates, map domain has {}",
                point.len(),
                self.domain_dim()
            )));
        }
        let vars = Jet::variables(point, order);
        let comps = self.eval(&vars)?;
        if comps.len() != self.codomain_dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "map returned {} components, expected {}",
                comps.len(),
                self.codomain_dim()
            )));
        }
        Ok(MapJet {
            point: point.to_vec(),
            comps,
        })
    }

    /// Plain evaluation at a point.
    fn value_at(&self, point: &[S]) -> Result<Vec<S>> {
        Ok(self.jet_at(point, 0)?.value())
    }
}

pub type RealFn<S> = dyn Fn(&[Jet<S>]) -> Result<Vec<Jet<S>>> + Send + Sync;

/// A smooth map given by a closure over real coordinate jets.
#[derive(Clone)]
pub struct RealMap<S: Real> {
    domain: usize,
    codomain: usize,
    f: Arc<RealFn<S>>,
}

impl<S: Real> RealMap<S> {
    pub fn new(
        domain: usize,
        codomain: usize,
        f: impl Fn(&[Jet<S>]) -> Result<Vec<Jet<S>>> + Send + Sync + 'static,
    ) -> Self {
        RealMap {
            domain,
            codomain,
            f: Arc::new(f),
        }
    }

    /// An affine map `x ↦ A x + b`.
    pub fn affine(a: DMatrix<S>, b: DVector<S>) -> Self {
        assert_eq!(a.nrows(), b.len());
        let (rows, cols) = a.shape();
        RealMap::new(cols, rows, move |x| {
            Ok((0..rows)
                .map(|i| {
                    let mut acc = x[0].lift(b[i]);
                    for (j, xj) in x.iter().enumerate() {
                        if a[(i, j)] != S::zero() {
                            acc += &xj.scale(a[(i, j)]);
                        }
                    }
                    acc
                })
                .collect())
        })
    }
}

impl<S: Real> fmt::Debug for RealMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealMap(ℝ^{} → ℝ^{})", self.domain, self.codomain)
    }
}

impl<S: Real> SmoothMap<S> for RealMap<S> {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn codomain_dim(&self) -> usize {
        self.codomain
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if x.len() != self.domain {
            return Err(TwistorError::DimensionMismatch(format!(
                "{} inputs for a map with domain dimension {}",
                x.len(),
                self.domain
            )));
        }
        (self.f)(x)
    }
}

/// Complex coordinates `z_j` and their conjugates as complex-valued jets.
pub struct ComplexArgs<S: Real> {
    pub z: Vec<Jet<Complex<S>>>,
    pub zbar: Vec<Jet<Complex<S>>>,
}

impl<S: Real> ComplexArgs<S> {
    /// Builds `z_j = x_{2j} + i x_{2j+1}` from real coordinate jets.
    pub fn from_real(x: &[Jet<S>]) -> Self {
        assert!(x.len().is_multiple_of(2), "odd number of real coordinates");
        let i = Complex::new(S::zero(), S::one());
        let z: Vec<_> = x
            .chunks(2)
            .map(|p| &p[0].to_complex() + &p[1].to_complex().scale(i))
            .collect();
        let zbar = z.iter().map(|w| w.conj()).collect();
        ComplexArgs { z, zbar }
    }

    pub fn constant(&self, c: Complex<S>) -> Jet<Complex<S>> {
        self.z[0].lift(c)
    }
}

pub type ComplexFn<S> = dyn Fn(&ComplexArgs<S>) -> Result<Vec<Jet<Complex<S>>>> + Send + Sync;

/// A map `ℂ^m → ℂ^n` given by a closure over `z` and `z̄`; its real
/// components are interleaved as `(Re w_1, Im w_1, …)`.
#[derive(Clone)]
pub struct ComplexMap<S: Real> {
    m: usize,
    n: usize,
    f: Arc<ComplexFn<S>>,
}

impl<S: Real> ComplexMap<S> {
    pub fn new(
        m: usize,
        n: usize,
        f: impl Fn(&ComplexArgs<S>) -> Result<Vec<Jet<Complex<S>>>> + Send + Sync + 'static,
    ) -> Self {
        ComplexMap { m, n, f: Arc::new(f) }
    }

    /// Evaluates in complex form.
    pub fn eval_complex(&self, x: &[Jet<S>]) -> Result<Vec<Jet<Complex<S>>>> {
        if x.len() != 2 * self.m {
            return Err(TwistorError::DimensionMismatch(format!(
                "{} real inputs for a map from ℂ^{}",
                x.len(),
                self.m
            )));
        }
        let out = (self.f)(&ComplexArgs::from_real(x))?;
        if out.len() != self.n {
            return Err(TwistorError::DimensionMismatch(format!(
                "map returned {} components, expected {}",
                out.len(),
                self.n
            )));
        }
        Ok(out)
    }
}

impl<S: Real> fmt::Debug for ComplexMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMap(ℂ^{} → ℂ^{})", self.m, self.n)
    }
}

impl<S: Real> SmoothMap<S> for ComplexMap<S> {
    fn domain_dim(&self) -> usize {
        2 * self.m
    }
    fn codomain_dim(&self) -> usize {
        2 * self.n
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        Ok(self
            .eval_complex(x)?
            .iter()
            .flat_map(|w| [w.re(), w.im()])
            .collect())
    }
}

impl<S: Real, M: SmoothMap<S> + ?Sized> SmoothMap<S> for Arc<M> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        (**self).eval(x)
    }
}

/// `g ∘ f`.
pub struct Composed<S: Real> {
    pub inner: Arc<dyn SmoothMap<S>>,
    pub outer: Arc<dyn SmoothMap<S>>,
}

impl<S: Real> Composed<S> {
    pub fn new(inner: Arc<dyn SmoothMap<S>>, outer: Arc<dyn SmoothMap<S>>) -> Result<Self> {
        if inner.codomain_dim() != outer.domain_dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "cannot compose ℝ^{} → ℝ^{} with ℝ^{} → ℝ^{}",
                inner.domain_dim(),
                inner.codomain_dim(),
                outer.domain_dim(),
                outer.codomain_dim()
            )));
        }
        Ok(Composed { inner, outer })
    }
}

impl<S: Real> SmoothMap<S> for Composed<S> {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        self.outer.codomain_dim()
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        self.outer.eval(&self.inner.eval(x)?)
    }
}

/// The jets of all real output components of a map at one point.
#[derive(Debug, Clone)]
pub struct MapJet<S: Real> {
    pub point: Vec<S>,
    pub comps: Vec<Jet<S>>,
}

impl<S: Real> MapJet<S> {
    pub fn domain_dim(&self) -> usize {
        self.point.len()
    }

    pub fn codomain_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps.first().map(|c| c.order()).unwrap_or(0)
    }

    pub fn value(&self) -> Vec<S> {
        self.comps.iter().map(|c| c.value()).collect()
    }

    fn require(&self, order: usize) -> Result<()> {
        if self.order() < order {
            return Err(TwistorError::JetOrder {
                required: order,
                available: self.order(),
            });
        }
        Ok(())
    }

    /// The real Jacobian `dφ` (codomain × domain).
    pub fn jacobian(&self) -> Result<DMatrix<S>> {
        self.require(1)?;
        Ok(DMatrix::from_fn(self.codomain_dim(), self.domain_dim(), |i, j| {
            self.comps[i].d1(j)
        }))
    }

    /// `op` applied componentwise: a complex vector of length `codomain_dim`.
    pub fn apply(&self, op: &DiffOp<S>) -> Result<Vec<Complex<S>>> {
        self.comps.iter().map(|c| op.apply(c)).collect()
    }

    /// `∂_{z_dir}^r φ` as a complex vector in `ℂ ⊗ ℝ^{2n}` (the real view).
    pub fn dz_power(&self, r: usize, dir: usize) -> Result<Vec<Complex<S>>> {
        self.require(r)?;
        self.apply(&DiffOp::dz_coord(self.domain_dim(), dir).pow(r))
    }

    /// `∂_{z̄_dir}^r φ` in the real view.
    pub fn dzbar_power(&self, r: usize, dir: usize) -> Result<Vec<Complex<S>>> {
        self.require(r)?;
        self.apply(&DiffOp::dzbar_coord(self.domain_dim(), dir).pow(r))
    }

    /// `∂^2 φ / ∂z_i ∂z̄_j` in the real view.
    pub fn mixed(&self, i: usize, j: usize) -> Result<Vec<Complex<S>>> {
        self.require(2)?;
        let d = self.domain_dim();
        self.apply(&DiffOp::dz_coord(d, i).then(&DiffOp::dzbar_coord(d, j)))
    }

    /// `∂_{z_dir}^r` of the ℂ-identified components `φ_{2k} + i φ_{2k+1}`.
    pub fn dz_power_identified(&self, r: usize, dir: usize) -> Result<Vec<Complex<S>>> {
        Ok(identify(&self.dz_power(r, dir)?))
    }

    /// `Σ_i ∂²φ/∂x_i²` for every component.
    pub fn laplacian(&self) -> Result<Vec<S>> {
        self.require(2)?;
        let d = self.domain_dim();
        let two = S::lit(2.0);
        Ok(self
            .comps
            .iter()
            .map(|c| {
                (0..d).fold(S::zero(), |acc, i| {
                    let mut m = vec![0u8; d];
                    m[i] = 2;
                    acc + c.coeff(&m) * two
                })
            })
            .collect())
    }
}

/// Pairs up interleaved real components: `v_{2k} + i v_{2k+1}`.
pub fn identify<S: Real>(v: &[Complex<S>]) -> Vec<Complex<S>> {
    let i = Complex::new(S::zero(), S::one());
    v.chunks(2).map(|p| p[0] + p[1] * i).collect()
}
