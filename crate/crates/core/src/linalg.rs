//! Dense complex vectors and matrices with the complex-bilinear pairing.
//!
//! The pairing `⟨u, v⟩ = Σ u_a v_a` carries no conjugation: it is the
//! complex-bilinear extension of the Euclidean inner product. The Hermitian
//! product is `⟨u, v̄⟩`.

use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Result, TwistorError};
use crate::scalar::{cabs, Real};

/// A complex vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<S: Real>(DVector<Complex<S>>);

impl<S: Real> ComplexVector<S> {
    pub fn new(entries: Vec<Complex<S>>) -> Self {
        ComplexVector(DVector::from_vec(entries))
    }

    pub fn from_real(entries: &[S]) -> Self {
        Self::new(entries.iter().map(|&x| Complex::new(x, S::zero())).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexVector(DVector::zeros(dim))
    }

    /// The standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Complex::new(S::one(), S::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex<S>] {
        self.0.as_slice()
    }

    pub fn inner(&self) -> &DVector<Complex<S>> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<Complex<S>> {
        self.0
    }

    pub fn conj(&self) -> Self {
        ComplexVector(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, c: Complex<S>) -> Self {
        ComplexVector(self.0.map(|x| x * c))
    }

    /// Euclidean norm `sqrt(⟨u, ū⟩)`.
    pub fn norm(&self) -> S {
        self.0
            .iter()
            .fold(S::zero(), |acc, c| acc + c.norm_sqr())
            .sqrt()
    }

    pub fn real_part(&self) -> DVector<S> {
        self.0.map(|c| c.re)
    }

    pub fn imag_part(&self) -> DVector<S> {
        self.0.map(|c| c.im)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "vectors of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(ComplexVector(&self.0 + &other.0))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(ComplexVector(&self.0 - &other.0))
    }
}

impl<S: Real> From<DVector<Complex<S>>> for ComplexVector<S> {
    fn from(v: DVector<Complex<S>>) -> Self {
        ComplexVector(v)
    }
}

impl<S: Real> From<Vec<Complex<S>>> for ComplexVector<S> {
    fn from(v: Vec<Complex<S>>) -> Self {
        Self::new(v)
    }
}

/// Panicking sugar for same-dimension vectors; use `checked_*` for untrusted input.
impl<S: Real> Add for &ComplexVector<S> {
    type Output = ComplexVector<S>;
    fn add(self, rhs: Self) -> ComplexVector<S> {
        self.checked_add(rhs).expect("vector dimensions differ")
    }
}

impl<S: Real> Sub for &ComplexVector<S> {
    type Output = ComplexVector<S>;
    fn sub(self, rhs: Self) -> ComplexVector<S> {
        self.checked_sub(rhs).expect("vector dimensions differ")
    }
}

/// A dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<S: Real>(DMatrix<Complex<S>>);

impl<S: Real> ComplexMatrix<S> {
    pub fn new(m: DMatrix<Complex<S>>) -> Self {
        ComplexMatrix(m)
    }

    pub fn from_real(m: &DMatrix<S>) -> Self {
        ComplexMatrix(m.map(|x| Complex::new(x, S::zero())))
    }

    /// Stacks vectors as rows.
    pub fn from_rows(rows: &[ComplexVector<S>]) -> Result<Self> {
        let first = rows.first().ok_or(TwistorError::Empty("no rows"))?;
        let cols = first.dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(TwistorError::DimensionMismatch(format!(
                "row of dimension {} among rows of dimension {}",
                bad.dim(),
                cols
            )));
        }
        Ok(ComplexMatrix(DMatrix::from_fn(rows.len(), cols, |i, j| {
            rows[i].0[j]
        })))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn inner(&self) -> &DMatrix<Complex<S>> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex<S>> {
        self.0
    }

    pub fn row(&self, i: usize) -> ComplexVector<S> {
        ComplexVector(self.0.row(i).transpose())
    }

    pub fn rows(&self) -> Vec<ComplexVector<S>> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix(self.0.map(|c| c.conj()))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.ncols() != rhs.nrows() {
            return Err(TwistorError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        Ok(ComplexMatrix(&self.0 * &rhs.0))
    }

    pub fn mul_vec(&self, v: &ComplexVector<S>) -> Result<ComplexVector<S>> {
        if self.ncols() != v.dim() {
            return Err(TwistorError::DimensionMismatch(format!(
                "{}x{} matrix times vector of dimension {}",
                self.nrows(),
                self.ncols(),
                v.dim()
            )));
        }
        Ok(ComplexVector(&self.0 * &v.0))
    }

    /// Numerical rank: singular values above `tol` times the largest.
    pub fn rank(&self, tol: S) -> usize {
        let sv = singular_values_c(&self.0);
        let top = sv.first().copied().unwrap_or_else(S::zero);
        if top == S::zero() {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * top).count()
    }
}

/// `⟨u, v⟩ = Σ u_a v_a` (no conjugation).
pub fn bilinear_dot<S: Real>(u: &ComplexVector<S>, v: &ComplexVector<S>) -> Result<Complex<S>> {
    u.check(v)?;
    Ok(bilinear_slice(u.as_slice(), v.as_slice()))
}

/// `⟨u, v̄⟩`.
pub fn hermitian_dot<S: Real>(u: &ComplexVector<S>, v: &ComplexVector<S>) -> Result<Complex<S>> {
    u.check(v)?;
    Ok(u.as_slice()
        .iter()
        .zip(v.as_slice())
        .fold(Complex::zero(), |acc, (a, b)| acc + a * b.conj()))
}

/// Bilinear pairing of equal-length slices.
pub fn bilinear_slice<S: Real>(u: &[Complex<S>], v: &[Complex<S>]) -> Complex<S> {
    assert_eq!(u.len(), v.len());
    u.iter().zip(v).fold(Complex::zero(), |acc, (a, b)| acc + a * b)
}

/// Whether all pairwise bilinear products of `basis` vanish to `tol`; also
/// returns the largest modulus found.
pub fn is_isotropic_span<S: Real>(basis: &[ComplexVector<S>], tol: S) -> Result<(bool, S)> {
    if basis.is_empty() {
        return Err(TwistorError::Empty("isotropy test needs at least one vector"));
    }
    let mut worst = S::zero();
    for (i, u) in basis.iter().enumerate() {
        for v in &basis[i..] {
            let d = cabs(bilinear_dot(u, v)?);
            if d > worst {
                worst = d;
            }
        }
    }
    Ok((worst <= tol, worst))
}

/// Frobenius norm of a real matrix.
pub fn frobenius<S: Real>(m: &DMatrix<S>) -> S {
    m.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Frobenius norm of a complex matrix.
pub fn frobenius_c<S: Real>(m: &DMatrix<Complex<S>>) -> S {
    m.iter().fold(S::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Singular values in decreasing order.
pub fn singular_values<S: Real>(m: &DMatrix<S>) -> Vec<S> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<S> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Singular values of a complex matrix in decreasing order.
pub fn singular_values_c<S: Real>(m: &DMatrix<Complex<S>>) -> Vec<S> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<S> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Smallest singular value of a square (or any) real matrix, counting
/// `min(rows, cols)` values.
pub fn min_singular_value<S: Real>(m: &DMatrix<S>) -> S {
    singular_values(m).last().copied().unwrap_or_else(S::zero)
}

/// Orthonormal basis (as columns) of the null space of `m`: right singular
/// directions whose singular value is at most `tol` times the largest (or
/// `tol` itself when the largest is below one).
pub fn null_space<S: Real>(m: &DMatrix<S>, tol: S) -> DMatrix<S> {
    let (rows, d) = m.shape();
    // pad wide matrices so the SVD returns a complete right basis
    let a = if rows < d {
        let mut p = DMatrix::zeros(d, d);
        p.view_mut((0, 0), (rows, d)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = svd
        .singular_values
        .iter()
        .fold(S::zero(), |a, &b| if b > a { b } else { a });
    let cutoff = tol * if top > S::one() { top } else { S::one() };
    let cols: Vec<DVector<S>> = (0..d)
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
