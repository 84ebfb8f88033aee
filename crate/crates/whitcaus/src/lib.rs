//! Jacquet-Whittaker functions on GL(2) and GL(3), the caustic geometry of
//! the self-dual GL(3) phase, and the oscillatory quadrature behind them.

pub mod error;
pub mod realpoly;
pub mod sym3;
pub mod caustics;
pub mod gamma;
pub mod oscint;
pub mod whittaker;

pub use error::{Error, Result};
