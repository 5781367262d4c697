//! Finite-scale constructions around sumsets `t + FS_k(B)` inside sets of
//! positive upper Banach density: exact certificates, the correspondence with
//! a shift system, Erdős progressions, empirical measures, uniformity norms and
//! multiple recurrence checks.

pub mod correspondence;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod pipeline;
pub mod progressions;
pub mod recurrence;
pub mod sets;
pub mod uniformity;

pub use error::{Error, Partial, Result};

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
