//! Local-analytic invariants of families of isolated complete-intersection
//! singularities, and constancy-based equisingularity checks.

pub mod arc;
pub mod dsl;
pub mod equising;
pub mod error;
pub mod family;
pub mod invariants;
pub mod ring;
pub mod sb;

pub use error::{Error, Result};
