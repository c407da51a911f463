//! Polyhedral invariant sets for black-box switched linear systems.
//!
//! The crate computes invariant C-polytopes for `x(t+1) = A_σ(t) x(t)` from
//! sampled `(x, A_σ x)` pairs and attaches two probabilistic certificates:
//! an a-priori contraction rate and an a-posteriori almost-invariance level
//! derived from the number of supporting samples.
//!
//! Module map:
//! - [`numerics`]: dense linear algebra, simplex LP, cone-constrained min-norm,
//!   special functions and seeded sampling.
//! - [`geometry`]: origin-containing polytopes with vertex and facet views.
//! - [`system`]: switched linear systems, the sampling oracle and JSON files.
//! - [`invariance`]: model-based and data-driven set iterations.
//! - [`certify`]: contraction and scenario certificates plus ground-truth checks.
//! - [`experiments`]: benchmark rows and certificate-rate curves.

pub mod certify;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod invariance;
pub mod numerics;
pub mod system;

pub use error::{Error, Result};
pub use geometry::{ConeSpec, Polytope, VertexTag};
pub use invariance::{IterationConfig, IterationTrace, Termination};
pub use numerics::{DenseMatrix, RandomSource};
pub use system::{SamplePair, SampleSet, SwitchedLinearSystem};

