//! Adaptive quadrature over `S(q)` and the numerical verification suites.

pub mod checks;
pub mod quad;

pub use checks::*;
pub use quad::{
    integrate, integrate_many, integrate_support, integrate_support_many, integrate_sym_many, integrate_with, Quad,
    QuadConfig, QuadMany,
};
