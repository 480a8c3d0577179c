//! Special functions, sharp constants and extremal processes behind the
//! sharp weak-type inequalities for differentially subordinated
//! martingales, together with executable checks of their properties.
//!
//! * [`constants`] – the sharp constants (`K_p`, `C_p`, weak-type constants).
//! * [`ode_g`] – the monotone Riccati solution `G` and its inverse `h`.
//! * [`special_w`] – the special function for `0 < p < 1`.
//! * [`special_u_weak`] – the special function `U` and majorant `V` for `p > 2`.
//! * [`special_u_orth`] – the orthogonal-case function via a Poisson integral.
//! * [`extremal`] – exact atomic constructions of the extremal examples.
//! * [`mc_sim`] – seeded Monte Carlo harnesses.
//! * [`verify`] – named property suites producing JSON-serialisable reports.

pub mod bessel;
pub mod constants;
pub mod error;
pub mod extremal;
pub mod mc_sim;
pub mod ode_g;
pub mod quadrature;
pub mod report;
pub mod special_u_orth;
pub mod special_u_weak;
pub mod special_w;
pub mod verify;

pub use constants::{Exponent, Regime, SharpConstant};
pub use error::{Error, Result};
pub use special_w::HalfPlanePoint;
