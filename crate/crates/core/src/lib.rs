//! Birthday and repulsion inequalities for hard spheres on the torus, the
//! fixed-density hard-core model and matchings on regular graphs.
//!
//! - [`geometry`]: torus metrics, ball volumes, `r <-> p <-> alpha`.
//! - [`rgg`]: uniform configurations, the empty-graph event, covered volume.
//! - [`samplers`]: conditional sampling and estimates of `Pr[E_n]` and
//!   `E[V_k | E_k]`.
//! - [`graphs`]: exact counts and rational checks on small regular graphs.
//! - [`bounds`]: closed-form bounds, crossings and failure certificates.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod graphs;
pub mod rgg;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
