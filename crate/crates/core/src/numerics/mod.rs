pub mod ode;
pub mod optimize;
pub mod quad;
pub mod tridiag;
