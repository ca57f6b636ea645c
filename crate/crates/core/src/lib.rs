//! Detection of cyclostationary signals in Gaussian noise with known
//! spatio-temporal structure.

// Negated comparisons deliberately reject NaN; long literals are reference values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bench;
pub mod cli;
pub mod detectors;
pub mod error;
pub mod estimation;
pub mod iq;
pub mod matrix;
pub mod montecarlo;
pub mod presets;
pub mod signal;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
