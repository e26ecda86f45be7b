//! Reduced Trefftz-type finite elements for Kirchhoff plates, Airy membranes
//! and exact space frames.

pub mod error;
pub mod geometry;
pub mod plate_basis;
pub mod plate_elements;
pub mod frame_element;
pub mod membrane_element;
pub mod model;
pub mod solver;
pub mod meshgen;
pub mod bench;
pub mod output;

pub use error::{FemError, Result};
