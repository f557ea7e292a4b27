//! Polynomial maps with explicit coefficients.

use num_complex::Complex;

use super::{ComplexArgs, Jet, JetLayout, SmoothMap};
use crate::error::{Result, TwistorError};
use crate::jet::monomial_count;
use crate::scalar::Real;

/// `ℝ^m → ℝⁿ`, component `k` is `Σ_α c[k][α] x^α` over the graded monomials
/// of degree `≤ degree` (ordering of [`JetLayout`]).
#[derive(Debug, Clone)]
pub struct PolyMap<S: Real> {
    domain: usize,
    degree: usize,
    coeffs: Vec<Vec<S>>,
}

impl<S: Real> PolyMap<S> {
    pub fn new(domain: usize, degree: usize, coeffs: Vec<Vec<S>>) -> Result<Self> {
        let len = monomial_count(domain, degree);
        if coeffs.iter().any(|c| c.len() != len) {
            return Err(TwistorError::DimensionMismatch(format!(
                "{len} coefficients per component expected"
            )));
        }
        Ok(PolyMap { domain, degree, coeffs })
    }

    /// Number of coefficients per component.
    pub fn coeff_count(domain: usize, degree: usize) -> usize {
        monomial_count(domain, degree)
    }

    pub fn coeffs(&self) -> &[Vec<S>] {
        &self.coeffs
    }
}

fn powers<T: crate::JetScalar>(x: &Jet<T>, degree: usize) -> Vec<Jet<T>> {
    let mut out = vec![x.lift(T::one())];
    for k in 1..=degree {
        let next = &out[k - 1] * x;
        out.push(next);
    }
    out
}

impl<S: Real> SmoothMap<S> for PolyMap<S> {
    fn domain_dim(&self) -> usize {
        self.domain
    }
    fn codomain_dim(&self) -> usize {
        self.coeffs.len()
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if x.len() != self.domain {
            return Err(TwistorError::DimensionMismatch("wrong number of inputs".into()));
        }
        let layout = JetLayout::shared(self.domain, self.degree);
        let pw: Vec<Vec<Jet<S>>> = x.iter().map(|xi| powers(xi, self.degree)).collect();
        let monos: Vec<Jet<S>> = (0..layout.len())
            .map(|i| {
                let m = layout.monomial(i);
                let mut acc = x[0].lift(S::one());
                for (v, &e) in m.iter().enumerate() {
                    if e > 0 {
                        acc = &acc * &pw[v][e as usize];
                    }
                }
                acc
            })
            .collect();
        Ok(self
            .coeffs
            .iter()
            .map(|c| {
                let mut acc = x[0].lift(S::zero());
                for (m, &ci) in monos.iter().zip(c) {
                    if ci != S::zero() {
                        acc += &m.scale(ci);
                    }
                }
                acc
            })
            .collect())
    }
}

/// `((a, b), c)` stands for `c z^a z̄^b`.
pub type Term<S> = ((u32, u32), Complex<S>);

/// `ℂ → ℂⁿ` (real view `ℝ² → ℝ²ⁿ`), component `k` is `Σ c z^a z̄^b` over
/// the listed terms `((a, b), c)`.
#[derive(Debug, Clone)]
pub struct SurfacePoly<S: Real> {
    terms: Vec<Vec<Term<S>>>,
}

impl<S: Real> SurfacePoly<S> {
    pub fn new(terms: Vec<Vec<Term<S>>>) -> Self {
        SurfacePoly { terms }
    }

    /// Largest total degree.
    pub fn degree(&self) -> u32 {
        self.terms.iter().flatten().map(|((a, b), _)| a + b).max().unwrap_or(0)
    }
}

impl<S: Real> SmoothMap<S> for SurfacePoly<S> {
    fn domain_dim(&self) -> usize {
        2
    }
    fn codomain_dim(&self) -> usize {
        2 * self.terms.len()
    }
    fn eval(&self, x: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
        if x.len() != 2 {
            return Err(TwistorError::DimensionMismatch("a surface map takes two inputs".into()));
        }
        let a = ComplexArgs::from_real(x);
        let d = self.degree() as usize;
        let (zp, zbp) = (powers(&a.z[0], d), powers(&a.zbar[0], d));
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for comp in &self.terms {
            let mut acc = a.constant(Complex::new(S::zero(), S::zero()));
            for &((p, q), c) in comp {
                acc += &(&zp[p as usize] * &zbp[q as usize]).scale(c);
            }
            out.push(acc.re());
            out.push(acc.im());
        }
        Ok(out)
    }
}
