//! Truncated multivariate Taylor arithmetic.

mod diffop;
#[allow(clippy::module_inception)]
mod jet;
mod layout;
mod map;
mod matrix;
mod poly;

pub use diffop::DiffOp;
pub use jet::Jet;
pub use layout::{monomial_count, JetLayout};
pub use map::{
    identify, ComplexArgs, ComplexFn, ComplexMap, Composed, MapJet, RealFn, RealMap, SmoothMap,
};
pub use matrix::MatrixJet;
pub use poly::{PolyMap, SurfacePoly};


