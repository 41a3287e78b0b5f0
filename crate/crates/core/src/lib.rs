//! Linear stability of rotating ideal-MHD flows with a vertical magnetic field.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64`.

pub mod dispersion;
pub mod error;
pub mod euler;
pub mod num;
pub mod operators;
pub mod linsim;
pub mod modes;
pub mod profiles;
pub mod thresholds;

pub use error::{Error, Result};
pub use num::Real;

/// `f64` profile.
pub type Profile = profiles::RadialProfile<f64>;
/// `f64` grid.
pub type Grid = operators::RadialGrid<f64>;
/// `f64` tridiagonal form.
pub type Form = operators::TridiagonalForm<f64>;
