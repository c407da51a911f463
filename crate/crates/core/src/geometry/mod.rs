//! Origin-containing convex polytopes with synchronized vertex and facet views.

mod cone;
mod hull;
mod polytope;

pub use cone::{cap_measure, vertices_in_cone, ConeSpec};
pub use polytope::{inclusion_ratio, Polytope, VertexTag};

/// Smallest and largest supported ambient dimension.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;
