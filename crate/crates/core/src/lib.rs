//! Quaternionic integral representations on H^n.
//!
//! Quaternion arithmetic and the matrix model ([`quat`]), exterior forms with
//! quaternion coefficients ([`forms`]), Bochner-Martinelli and Leray kernels
//! ([`kernels`]), quadrature and integral operators ([`integration`]), the
//! matrix-model dbar calculus and solvers ([`dbar`]), convexity and hulls
//! ([`geometry`]), Jacobi matrices ([`jacobi`]) and the experiment harness
//! ([`experiments`]).

pub mod dbar;
pub mod error;
pub mod experiments;
pub mod forms;
pub mod func;
pub mod geometry;
pub mod integration;
pub mod jacobi;
pub mod kernels;
pub mod quat;

pub use error::{Error, Result};
pub use quat::{HPoint, PureUnit, Quaternion};
