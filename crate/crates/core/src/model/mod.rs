//! Strip geometry and the symbolic function family evaluated by every other
//! module.
//!
//! Function values are extended reals in `[-inf, +inf)`. `-inf` is stored as
//! `f64::NEG_INFINITY` and follows the usual conventions:
//! `-inf + finite = -inf`, `max(-inf, v) = v`, `exp(-inf) = 0` and
//! `0 * (-inf) = 0` for the non-negative scale node. `+inf` never appears.

mod expr;
mod grid;
mod profile;
mod strip;

pub use expr::{horizontal_shift, ExpSum, ExpTerm, FunctionExpr, HoloPoly, HoloTerm};
pub use grid::{sample_grid, GridField};
pub use profile::CoefficientProfile;
pub use strip::{Rect, StripSpec, YRange};

pub type Complex = num_complex::Complex64;

/// Floor substituted for `-inf` samples inside quadratures.
pub const DEFAULT_CLIP_FLOOR: f64 = -1e6;

/// Replace `-inf` by `floor`, reporting whether a substitution happened.
#[inline]
pub fn clip_floor(v: f64, floor: f64) -> (f64, bool) {
    if v < floor {
        (floor, v == f64::NEG_INFINITY)
    } else {
        (v, false)
    }
}
