//! Multi-robot coverage planning over polygonal regions with exclusion
//! zones: buffered feasible space, sweep orientation, parallel swaths,
//! visibility-graph transitions, swath allocation across a fleet, route
//! assembly and plan metrics.

// `!(x > 0.0)` is how parameter checks reject NaN; symmetric matrices are
// filled by index
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod allocation;
pub mod error;
pub mod geom;
pub mod harness;
pub mod metrics;
pub mod orientation;
pub mod routing;
pub mod swathgen;
pub mod visgraph;
pub mod workspace;

pub use error::{Error, Result};
