//! Harmonic morphisms from holomorphic twistor data.
//!
//! Data `H(z, ξ) = (h(z, ξ), J(μ(z)))` that is horizontal in `ξ` and whose
//! chart image `w = h − M(μ) h̄` is holomorphic yields, wherever
//! `h: ℂ^{n+p} → ℂ^{n+p}` is a local diffeomorphism, the map
//! `φ = π₁ ∘ h⁻¹`; for `n = 1` it is a harmonic morphism.

mod cp3;
mod euclid;
mod newton;
pub mod registry;

pub use cp3::{
    cp3_constraints_residual, cp3_linear_system_residual, cp3_local_diffeo_check, cp3_point,
    cp3_tilde_jacobian, Cp3Chart, Cp3Data, HoloJetFn,
};
pub use euclid::{
    jacobian_min_sv, verify_chart_holomorphy, verify_horizontality, EuclideanTwistorData,
};
pub use newton::{evaluate_morphism, invert_h, MorphismMap, NewtonOptions, NewtonReport};
