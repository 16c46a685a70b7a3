//! Numerical laboratory for traveling fronts, entire solutions and
//! exponential stability of one-dimensional reaction–diffusion equations
//! `u_t = u_xx + f(u)` with bistable or monostable `f`.

pub mod entire;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod numerics;
pub mod front;
pub mod manifest;
pub mod reaction;
pub mod supersub;

pub use error::{Error, Result};
