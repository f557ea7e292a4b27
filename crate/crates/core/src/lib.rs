//! Numerical twistor theory of harmonic maps between flat spaces.
//!
//! The crate provides exact higher-order derivatives of smooth maps through
//! truncated Taylor jets, Hermitian-structure algebra on `ℝ^{2k}`, pointwise
//! residuals for conformality, harmonicity, isotropy and related properties,
//! twistor lifts of maps into `ℝ⁴`, a harmonic-morphism construction from
//! holomorphic twistor data, first-order (Jacobi) residuals of one-parameter
//! families, and path integration of flat matrix-valued connection forms.
//!
//! Everything is generic over the real scalar type ([`Real`], implemented for
//! `f32` and `f64`); `f64` aliases are exported at the crate root.
//!
//! Complex coordinates use `z_j = x_{2j} + i x_{2j+1}` (zero-based), so the
//! first complex coordinate is built from real coordinates 0 and 1.

pub mod checkers;
pub mod error;
pub mod expm;
pub mod first_order;
pub mod flat_connection;
pub mod jet;
pub mod lifts;
pub mod linalg;
pub mod morphism;
pub mod scalar;
pub mod twistor;

pub use error::{Result, TwistorError};
pub use scalar::{JetScalar, Real, C};

/// `f64` instantiations.
pub type Jet64 = jet::Jet<f64>;
pub type ComplexJet64 = jet::Jet<num_complex::Complex<f64>>;
pub type MapJet64 = jet::MapJet<f64>;
pub type RealMap64 = jet::RealMap<f64>;
pub type ComplexMap64 = jet::ComplexMap<f64>;
pub type ComplexVector64 = linalg::ComplexVector<f64>;
pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
