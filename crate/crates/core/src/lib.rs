//! Spectral toolkit for the 2-D parabolic Anderson model on the torus.

pub mod besov;
pub mod calibration;
pub mod error;
pub mod noise;
pub mod paracalc;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
