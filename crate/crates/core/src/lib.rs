pub mod connect;
pub mod densities;
pub mod error;
pub mod exactpoly;
pub mod kernels;
pub mod polyfam;
pub mod qcore;
pub mod quadverify;
pub mod sampling;

pub use error::{Error, Result};
