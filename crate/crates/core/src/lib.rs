//! Prime-direction maximal averages: arithmetic, multiplier analysis,
//! direction sets, tube incidences and the discrete averaging operator.

pub mod arith;
pub mod bumps;
pub mod directions;
pub mod error;
pub mod incidence;
pub mod multiplier;
pub mod numeric;
pub mod operator;

pub use error::{Error, Result};
