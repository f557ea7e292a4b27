use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use super::layout::JetLayout;
use crate::error::{Result, TwistorError};
use crate::scalar::{JetScalar, Real};

/// Truncated multivariate Taylor expansion of a scalar function.
///
/// Coefficient `c_a` multiplies `h^a / 1` (no factorials), so the partial
/// derivative `∂^a f` at the base point equals `a! c_a`. Arithmetic is exact
/// modulo truncation: products are coefficient convolutions restricted to
/// total degree `<= order`.
#[derive(Clone)]
pub struct Jet<T> {
    layout: Arc<JetLayout>,
    coeffs: Vec<T>,
}

impl<T: JetScalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.nvars())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: JetScalar> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl<T: JetScalar> Jet<T> {
    pub fn zero(nvars: usize, order: usize) -> Self {
        let layout = JetLayout::shared(nvars, order);
        let coeffs = vec![T::zero(); layout.len()];
        Jet { layout, coeffs }
    }

    pub fn constant(value: T, nvars: usize, order: usize) -> Self {
        let mut jet = Self::zero(nvars, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `x_var` expanded at `x_var = value`.
    pub fn variable(value: T, var: usize, nvars: usize, order: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range for {nvars} variables");
        let mut jet = Self::constant(value, nvars, order);
        if let Some(pos) = jet.layout.linear(var) {
            jet.coeffs[pos] = T::one();
        }
        jet
    }

    /// All coordinate jets of a base point.
    pub fn variables(point: &[T], order: usize) -> Vec<Self> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(v, i, n, order))
            .collect()
    }

    pub fn from_coeffs(layout: Arc<JetLayout>, coeffs: Vec<T>) -> Self {
        assert_eq!(layout.len(), coeffs.len(), "coefficient count does not match layout");
        Jet { layout, coeffs }
    }

    /// A constant with the same layout as `self`.
    pub fn lift(&self, value: T) -> Self {
        Self::constant(value, self.nvars(), self.order())
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars()
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Value at the base point.
    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Raw Taylor coefficient of the monomial `multi` (zero beyond the order).
    pub fn coeff(&self, multi: &[u8]) -> T {
        assert_eq!(multi.len(), self.nvars());
        self.layout
            .position(multi)
            .map(|p| self.coeffs[p])
            .unwrap_or_else(T::zero)
    }

    /// Partial derivative `∂^multi f` at the base point.
    pub fn partial(&self, multi: &[u8]) -> Result<T> {
        let degree: usize = multi.iter().map(|&e| e as usize).sum();
        if degree > self.order() {
            return Err(TwistorError::JetOrder {
                required: degree,
                available: self.order(),
            });
        }
        let factorial: usize = multi.iter().map(|&e| factorial(e as usize)).product();
        Ok(self.coeff(multi) * T::from_count(factorial))
    }

    /// First partial in `var` at the base point.
    pub fn d1(&self, var: usize) -> T {
        self.layout
            .linear(var)
            .map(|p| self.coeffs[p])
            .unwrap_or_else(T::zero)
    }

    /// The jet of `∂f/∂x_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Self {
        let nvars = self.nvars();
        assert!(var < nvars);
        let order = self.order().saturating_sub(1);
        let target = JetLayout::shared(nvars, order);
        if self.order() == 0 {
            return Jet {
                coeffs: vec![T::zero(); target.len()],
                layout: target,
            };
        }
        let mut shifted = vec![0u8; nvars];
        let coeffs = (0..target.len())
            .map(|i| {
                shifted.copy_from_slice(target.monomial(i));
                shifted[var] += 1;
                let c = self.coeffs[self.layout.position(&shifted).expect("degree within order")];
                c * T::from_count(shifted[var] as usize)
            })
            .collect();
        Jet {
            layout: target,
            coeffs,
        }
    }

    /// Iterated derivative `∂^multi f` as a jet of order `order - |multi|`.
    pub fn derivative_multi(&self, multi: &[u8]) -> Result<Self> {
        let degree: usize = multi.iter().map(|&e| e as usize).sum();
        if degree > self.order() {
            return Err(TwistorError::JetOrder {
                required: degree,
                available: self.order(),
            });
        }
        let mut out = self.clone();
        for (var, &e) in multi.iter().enumerate() {
            for _ in 0..e {
                out = out.derivative(var);
            }
        }
        Ok(out)
    }

    /// Drops all terms of degree above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let target = JetLayout::shared(self.nvars(), order);
        let coeffs = self.coeffs[..target.len()].to_vec();
        Jet {
            layout: target,
            coeffs,
        }
    }

    pub fn map<U: JetScalar>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Coefficient-wise conjugate; the conjugate function when the variables are real.
    pub fn conj(&self) -> Self {
        self.map(JetScalar::conj)
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|c| c * factor)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T::Real {
        self.coeffs
            .iter()
            .map(|c| c.modulus())
            .fold(T::Real::zero(), |a, b| if b > a { b } else { a })
    }

    /// `f(self)` for an analytic `f` given its Taylor coefficients
    /// `series[k] = f^(k)(c0) / k!` at the constant term `c0`.
    pub fn compose_series(&self, series: &[T]) -> Self {
        let order = self.order();
        assert!(series.len() > order, "series too short for jet order");
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        let mut out = self.lift(series[order]);
        for k in (0..order).rev() {
            out = &out * &h;
            out.coeffs[0] = out.coeffs[0] + series[k];
        }
        out
    }

    pub fn recip(&self) -> Result<Self> {
        let c0 = self.value();
        if c0.is_zero() {
            return Err(TwistorError::ZeroDivisor);
        }
        let inv = T::one() / c0;
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = inv;
        for _ in 0..=self.order() {
            series.push(term);
            term = -term * inv;
        }
        Ok(self.compose_series(&series))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = self.lift(T::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Polynomial `Σ coeffs[k] self^k` by Horner's rule.
    pub fn polynomial(&self, coeffs: &[T]) -> Self {
        let mut out = self.lift(T::zero());
        for &c in coeffs.iter().rev() {
            out = &out * self;
            out.coeffs[0] = out.coeffs[0] + c;
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().jet_exp();
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = e;
        for k in 0..=self.order() {
            if k > 0 {
                term = term / T::from_count(k);
            }
            series.push(term);
        }
        self.compose_series(&series)
    }

    /// Substitutes `inputs` for the variables: the result is `f(inputs)` where
    /// `f` is the polynomial carried by `self` in the displacements
    /// `inputs[i] - inputs[i].value()`. The constant terms of `inputs` are
    /// assumed to be the base point of `self`.
    pub fn compose(&self, inputs: &[Jet<T>]) -> Jet<T> {
        assert_eq!(inputs.len(), self.nvars(), "compose: wrong number of inputs");
        assert!(!inputs.is_empty());
        let proto = &inputs[0];
        let order = proto.order();
        let shifts: Vec<Jet<T>> = inputs
            .iter()
            .map(|x| {
                let mut h = x.clone();
                h.coeffs[0] = T::zero();
                h
            })
            .collect();
        // powers[i][e] = shifts[i]^e, up to the smaller of the two orders
        let top = self.order().min(order);
        let powers: Vec<Vec<Jet<T>>> = shifts
            .iter()
            .map(|h| {
                let mut row = vec![proto.lift(T::one())];
                for e in 1..=top {
                    let next = &row[e - 1] * h;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = proto.lift(T::zero());
        for (pos, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || self.layout.degree(pos) > top {
                continue;
            }
            let mut term = proto.lift(c);
            for (i, &e) in self.layout.monomial(pos).iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            out += &term;
        }
        out
    }

    fn check_layout(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.layout, &other.layout)
                || (self.nvars() == other.nvars() && self.order() == other.order()),
            "jet layout mismatch: ({}, {}) vs ({}, {})",
            self.nvars(),
            self.order(),
            other.nvars(),
            other.order()
        );
    }
}

/// Real-coefficient functions.
impl<S: Real> Jet<S> {
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = self.value();
        if c0 <= S::zero() {
            return Err(TwistorError::InvalidArgument(
                "square root of a jet with non-positive constant term".into(),
            ));
        }
        // binom(1/2, k) c0^(1/2 - k)
        let half = S::lit(0.5);
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = c0.sqrt();
        for k in 0..=self.order() {
            if k > 0 {
                let kk = S::lit(k as f64);
                term = term * (half - (kk - S::one())) / kk / c0;
            }
            series.push(term);
        }
        Ok(self.compose_series(&series))
    }

    pub fn ln(&self) -> Result<Self> {
        let c0 = self.value();
        if c0 <= S::zero() {
            return Err(TwistorError::InvalidArgument(
                "logarithm of a jet with non-positive constant term".into(),
            ));
        }
        let mut series = vec![c0.ln()];
        let mut pow = S::one();
        for k in 1..=self.order() {
            pow *= c0;
            let sign = if k % 2 == 1 { S::one() } else { -S::one() };
            series.push(sign / (S::lit(k as f64) * pow));
        }
        Ok(self.compose_series(&series))
    }

    pub fn sin(&self) -> Self {
        self.trig(false)
    }

    pub fn cos(&self) -> Self {
        self.trig(true)
    }

    fn trig(&self, cosine: bool) -> Self {
        let c0 = self.value();
        let (s, c) = (c0.sin(), c0.cos());
        // derivatives of sin: sin, cos, -sin, -cos, ...
        let cycle = if cosine { [c, -s, -c, s] } else { [s, c, -s, -c] };
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut fact = S::one();
        for k in 0..=self.order() {
            if k > 0 {
                fact *= S::lit(k as f64);
            }
            series.push(cycle[k % 4] / fact);
        }
        self.compose_series(&series)
    }

    /// Embeds a real jet into complex coefficients.
    pub fn to_complex(&self) -> Jet<Complex<S>> {
        self.map(|c| Complex::new(c, S::zero()))
    }
}

impl<S: Real> Jet<Complex<S>> {
    pub fn re(&self) -> Jet<S> {
        self.map(|c| c.re)
    }

    pub fn im(&self) -> Jet<S> {
        self.map(|c| c.im)
    }

    /// `|f|^2 = f * conj(f)` as a real jet (variables assumed real).
    pub fn norm_sqr(&self) -> Jet<S> {
        (self * &self.conj()).re()
    }
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

// ---- arithmetic ----

impl<'a, T: JetScalar> Add<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.check_layout(rhs);
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<'a, T: JetScalar> Sub<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.check_layout(rhs);
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<'a, T: JetScalar> Mul<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.check_layout(rhs);
        let mut coeffs = vec![T::zero(); self.coeffs.len()];
        for &(i, j, k) in self.layout.products() {
            let a = self.coeffs[i as usize];
            let b = rhs.coeffs[j as usize];
            coeffs[k as usize] = coeffs[k as usize] + a * b;
        }
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }
}

impl<T: JetScalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map(|c| -c)
    }
}

impl<T: JetScalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: JetScalar> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, T: JetScalar> $tr<&'a Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &'a Jet<T>) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
        impl<'a, T: JetScalar> $tr<Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                self.$m(&rhs)
            }
        }
        impl<T: JetScalar> $tr<T> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: T) -> Jet<T> {
                self.$m(&self.lift(rhs))
            }
        }
        impl<T: JetScalar> $tr<T> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: T) -> Jet<T> {
                (&self).$m(&self.lift(rhs))
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: JetScalar> AddAssign<&Jet<T>> for Jet<T> {
    fn add_assign(&mut self, rhs: &Jet<T>) {
        self.check_layout(rhs);
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a + b;
        }
    }
}
