//! Scalar abstractions shared by every module.
//!
//! All numerics are generic over [`Real`] (a real floating point type) and
//! over [`JetScalar`], the coefficient type of a [`crate::jet::Jet`], which is
//! either a real or a complex number over a `Real`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A real floating point type usable throughout the crate (`f32` or `f64`).
pub trait Real:
    RealField
    + JetScalar<Real = Self>
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Tolerance used when validating Hermitian-structure invariants.
    const STRUCTURE_TOL: f64;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const STRUCTURE_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const STRUCTURE_TOL: f64 = 1e-4;
}

/// Coefficient type of a jet: a real number or a complex number.
pub trait JetScalar: Copy + Num + Neg<Output = Self> + Debug + Send + Sync + 'static {
    type Real: Real;

    fn from_real(r: Self::Real) -> Self;
    fn to_complex(self) -> Complex<Self::Real>;
    fn conj(self) -> Self;
    /// Absolute value (modulus for complex numbers).
    fn modulus(self) -> Self::Real;
    fn jet_exp(self) -> Self;

    /// `n` as a scalar.
    fn from_count(n: usize) -> Self {
        Self::from_real(Self::Real::lit(n as f64))
    }
}

macro_rules! impl_real_jet_scalar {
    ($t:ty) => {
        impl JetScalar for $t {
            type Real = $t;
            fn from_real(r: $t) -> Self {
                r
            }
            fn to_complex(self) -> Complex<$t> {
                Complex::new(self, 0.0)
            }
            fn conj(self) -> Self {
                self
            }
            fn modulus(self) -> $t {
                self.abs()
            }
            fn jet_exp(self) -> Self {
                <$t>::exp(self)
            }
        }
    };
}

impl_real_jet_scalar!(f64);
impl_real_jet_scalar!(f32);

impl<S: Real> JetScalar for Complex<S> {
    type Real = S;
    fn from_real(r: S) -> Self {
        Complex::new(r, S::zero())
    }
    fn to_complex(self) -> Complex<S> {
        self
    }
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    fn modulus(self) -> S {
        cabs(self)
    }
    fn jet_exp(self) -> Self {
        let r = nalgebra::ComplexField::exp(self.re);
        Complex::new(r * self.im.cos(), r * self.im.sin())
    }
}

/// Shorthand for a complex number over `S`.
pub type C<S> = Complex<S>;

pub(crate) fn cabs<S: Real>(z: Complex<S>) -> S {
    z.re.hypot(z.im)
}
