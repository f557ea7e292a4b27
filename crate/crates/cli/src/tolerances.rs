//! Default tolerances of the built-in suites.

pub const HARMONICITY: f64 = 1e-9;
/// Divided by `max(1, ‖dφ‖²_F)` before comparison.
pub const HWC: f64 = 1e-9;
pub const PULLBACK: f64 = 1e-8;
pub const CLOSED_FORM: f64 = 1e-10;
pub const IMPLICIT: f64 = 1e-12;
pub const ROUND_TRIP: f64 = 1e-10;
pub const CHART: f64 = 1e-12;
pub const FIBRE_TRACED: f64 = 1e-5;

pub const ALGEBRA: f64 = 1e-10;
pub const CP3_LINEAR: f64 = 1e-12;
pub const CP3_JACOBIAN: f64 = 1e-12;

pub const LIFT_HOLOMORPHY: f64 = 1e-10;
pub const LIFT_VERTICAL: f64 = 1e-9;
pub const LIFT_T10: f64 = 1e-9;
/// Harmonicity of projections, `10 ·` the lift tolerance.
pub const PROJECTION: f64 = 1e-8;

pub const ISOTROPY: f64 = 1e-9;
pub const JACOBI: f64 = 1e-12;

pub const MC_FLATNESS: f64 = 1e-8;
pub const EXP_PATH: f64 = 1e-10;
pub const GROUP_RECOVERY: f64 = 1e-6;
pub const PATH_INDEPENDENCE: f64 = 1e-5;
/// Allowed deviation of the observed order from 2.
pub const ORDER: f64 = 0.2;
pub const SKEW: f64 = 1e-6;
/// Relative error of the small-loop holonomy against the curvature.
pub const HOLONOMY: f64 = 0.1;
