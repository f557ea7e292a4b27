//! Constant-coefficient differential operators acting on jets.
//!
//! Wirtinger derivatives use the identification `z_j = x_{2j} + i x_{2j+1}`
//! (zero-based real indices), so `∂_{z_j} = (∂_x - i ∂_y) / 2` and
//! `∂_{z̄_j} = (∂_x + i ∂_y) / 2`.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use super::Jet;
use crate::error::Result;
use crate::scalar::{JetScalar, Real};

/// A linear combination `Σ c_a ∂^a` of real partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp<S: Real> {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, Complex<S>>,
}

impl<S: Real> DiffOp<S> {
    /// The identity operator.
    pub fn identity(nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0u8; nvars], Complex::new(S::one(), S::zero()));
        DiffOp { nvars, terms }
    }

    /// `∂/∂x_var`.
    pub fn partial(nvars: usize, var: usize) -> Self {
        let mut m = vec![0u8; nvars];
        m[var] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, Complex::new(S::one(), S::zero()));
        DiffOp { nvars, terms }
    }

    /// `∂/∂z` for the complex coordinate with real part `x` and imaginary part `y`.
    pub fn dz(nvars: usize, x: usize, y: usize) -> Self {
        Self::wirtinger(nvars, x, y, -S::one())
    }

    /// `∂/∂z̄` for the complex coordinate with real part `x` and imaginary part `y`.
    pub fn dzbar(nvars: usize, x: usize, y: usize) -> Self {
        Self::wirtinger(nvars, x, y, S::one())
    }

    /// `∂/∂z_j` with the standard interleaved identification.
    pub fn dz_coord(nvars: usize, j: usize) -> Self {
        Self::dz(nvars, 2 * j, 2 * j + 1)
    }

    pub fn dzbar_coord(nvars: usize, j: usize) -> Self {
        Self::dzbar(nvars, 2 * j, 2 * j + 1)
    }

    fn wirtinger(nvars: usize, x: usize, y: usize, sign: S) -> Self {
        let half = S::lit(0.5);
        let mut mx = vec![0u8; nvars];
        mx[x] = 1;
        let mut my = vec![0u8; nvars];
        my[y] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(mx, Complex::new(half, S::zero()));
        terms.insert(my, Complex::new(S::zero(), sign * half));
        DiffOp { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Highest derivative order appearing in the operator.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Operator composition (operators commute).
    pub fn then(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u8>, Complex<S>> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m: Vec<u8> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                let entry = terms.entry(m).or_insert_with(Complex::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        DiffOp {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::identity(self.nvars);
        for _ in 0..n {
            out = out.then(self);
        }
        out
    }

    pub fn scaled(&self, c: Complex<S>) -> Self {
        DiffOp {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Value of the operator applied to `f` at the base point.
    pub fn apply<T>(&self, f: &Jet<T>) -> Result<Complex<S>>
    where
        T: JetScalar<Real = S>,
    {
        assert_eq!(f.nvars(), self.nvars, "operator and jet disagree on variable count");
        let mut acc = Complex::zero();
        for (m, &c) in &self.terms {
            acc += c * f.partial(m)?.to_complex();
        }
        Ok(acc)
    }

    /// The operator applied to `f` as a complex jet of order `order(f) - degree`.
    pub fn apply_jet<T>(&self, f: &Jet<T>) -> Result<Jet<Complex<S>>>
    where
        T: JetScalar<Real = S>,
    {
        let degree = self.degree();
        let target = f.order().checked_sub(degree).ok_or(crate::TwistorError::JetOrder {
            required: degree,
            available: f.order(),
        })?;
        let mut acc: Jet<Complex<S>> = Jet::zero(f.nvars(), target);
        for (m, &c) in &self.terms {
            let d = f.derivative_multi(m)?.truncate(target);
            acc += &d.map(|v| v.to_complex() * c);
        }
        Ok(acc)
    }
}
