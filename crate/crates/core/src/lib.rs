//! Robust dispersion estimation, concentration estimation and anomaly
//! detection for circular (angular) data.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circular;
pub mod data;
pub mod detect;
pub mod dispersion;
pub mod distributions;
pub mod error;
pub mod output;
pub mod robustness;
pub mod special;
pub mod violin;

pub use circular::{arc_distance, canonicalize, AngleSample};
pub use error::{Error, Result};
