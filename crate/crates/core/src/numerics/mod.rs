//! Self-contained numerical kernel used by the geometry and certificate code.

mod cone;
mod linalg;
mod lp;
mod rng;
mod special;

pub use cone::{min_norm_on_facet_in_cone, ConeMinNorm, FacetPiece};
pub use linalg::{dot, norm, rank, solve_square, DenseMatrix};
pub use lp::{solve_lp, Constraint, LinearProgram, LpOutcome, Relation};
pub use rng::{child_seed, sample_unit_sphere, RandomSource};
pub use special::{ln_gamma, log_binomial, reg_inc_beta, reg_inc_beta_inv};
