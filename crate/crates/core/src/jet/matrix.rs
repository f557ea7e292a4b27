//! Square matrices whose entries are jets.

use nalgebra::DMatrix;
use num_traits::Zero;

use super::Jet;
use crate::error::{Result, TwistorError};
use crate::scalar::JetScalar;

/// Row-major square matrix of jets sharing one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixJet<T: JetScalar> {
    dim: usize,
    entries: Vec<Jet<T>>,
}

impl<T: JetScalar> MatrixJet<T> {
    pub fn from_entries(dim: usize, entries: Vec<Jet<T>>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        MatrixJet { dim, entries }
    }

    /// Constant matrix embedded with the given layout.
    pub fn constant(m: &DMatrix<T>, nvars: usize, order: usize) -> Self
    where
        T: nalgebra::Scalar,
    {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let entries = (0..dim * dim)
            .map(|k| Jet::constant(m[(k / dim, k % dim)], nvars, order))
            .collect();
        MatrixJet { dim, entries }
    }

    pub fn zeros(dim: usize, nvars: usize, order: usize) -> Self {
        MatrixJet {
            dim,
            entries: vec![Jet::zero(nvars, order); dim * dim],
        }
    }

    pub fn identity(dim: usize, nvars: usize, order: usize) -> Self {
        let mut m = Self::zeros(dim, nvars, order);
        for i in 0..dim {
            m.entries[i * dim + i] = Jet::constant(T::one(), nvars, order);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.entries[0].nvars()
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet<T>) {
        self.entries[i * self.dim + j] = v;
    }

    /// Matrix of constant terms.
    pub fn value(&self) -> DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).value())
    }

    /// Matrix of first partials in `var`.
    pub fn d1(&self, var: usize) -> DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).d1(var))
    }

    pub fn map_entries<U: JetScalar>(&self, f: impl Fn(&Jet<T>) -> Jet<U>) -> MatrixJet<U> {
        MatrixJet {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        self.map_entries(|e| e.derivative(var))
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map_entries(|e| e.truncate(order))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        MatrixJet {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        MatrixJet {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map_entries(|e| e.scale(c))
    }

    /// Multiplies every entry by a scalar jet.
    pub fn scale_jet(&self, c: &Jet<T>) -> Self {
        self.map_entries(|e| e * c)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let (nvars, order) = (self.nvars(), self.order());
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Jet::zero(nvars, order);
                for k in 0..n {
                    acc += &(self.get(i, k) * rhs.get(k, j));
                }
                entries.push(acc);
            }
        }
        MatrixJet { dim: n, entries }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        MatrixJet { dim: n, entries }
    }

    /// Inverse via the Neumann series around the constant term.
    pub fn inverse(&self) -> Result<Self>
    where
        T: nalgebra::ComplexField,
    {
        let n = self.dim;
        let (nvars, order) = (self.nvars(), self.order());
        let inv0 = self
            .value()
            .try_inverse()
            .ok_or(TwistorError::SingularJacobian(0.0))?;
        let inv0_jet = MatrixJet::constant(&inv0, nvars, order);
        // self = A0 + N; inverse = Σ_k (-A0^{-1} N)^k A0^{-1}
        let nil = self.sub(&MatrixJet::constant(&self.value(), nvars, order));
        let step = inv0_jet.mul(&nil).scale(-T::one());
        let mut term = MatrixJet::identity(n, nvars, order);
        let mut sum = term.clone();
        for _ in 0..order {
            term = step.mul(&term);
            sum = sum.add(&term);
        }
        Ok(sum.mul(&inv0_jet))
    }

    /// Largest coefficient modulus over all entries.
    pub fn max_abs(&self) -> T::Real {
        self.entries
            .iter()
            .map(|e| e.max_abs())
            .fold(T::Real::zero(), |a, b| if b > a { b } else { a })
    }

    /// `exp(s A)` for a constant matrix `A` and scalar jet `s`.
    pub fn exp_along(a: &DMatrix<T>, s: &Jet<T>) -> Self
    where
        T: nalgebra::ComplexField,
    {
        let n = a.nrows();
        let (nvars, order) = (s.nvars(), s.order());
        let base = crate::expm::expm(&(a * s.value()));
        let mut h = s.clone();
        h = &h - &h.lift(s.value());
        // exp((s0 + h) A) = exp(s0 A) Σ_k h^k A^k / k!
        let mut series = MatrixJet::zeros(n, nvars, order);
        let mut a_pow = DMatrix::<T>::identity(n, n);
        let mut h_pow = h.lift(T::one());
        let mut fact = T::one();
        for k in 0..=order {
            if k > 0 {
                a_pow = &a_pow * a;
                h_pow = &h_pow * &h;
                fact *= T::from_count(k);
            }
            let coef = MatrixJet::constant(&(&a_pow / fact), nvars, order).scale_jet(&h_pow);
            series = series.add(&coef);
        }
        MatrixJet::constant(&base, nvars, order).mul(&series)
    }
}
