//! Scalar-generic numerical building blocks: adaptive Gauss-Kronrod
//! quadrature, bracketing root finding and compensated summation.

pub mod quadrature;
pub mod roots;
pub mod summation;

pub use quadrature::{integrate, QuadratureOptions, QuadratureResult};
pub use roots::{bisect, expand_bracket, Bisection};
pub use summation::{mean_and_std_error, CompensatedSum};
