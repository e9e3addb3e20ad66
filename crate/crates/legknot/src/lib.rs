//! Legendrian knot construction and electromagnetic field-line tooling.

pub mod config;
pub mod diagram;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod knot;
pub mod legendrify;
pub mod numeric;
pub mod piecewise;
pub mod tangency;
pub mod trigpoly;

pub use error::{Error, Result};
