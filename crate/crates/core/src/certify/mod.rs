//! Probabilistic certificates for sets computed from samples, and
//! Monte-Carlo checks against the true system.

mod bounds;
mod contraction;
mod report;
mod scenario;
mod validation;

pub use bounds::{
    confidence_bound, delta_theta, packing_bound, solve_epsilon_for_confidence, solve_samples_for_confidence,
};
pub use contraction::{
    cone_boundary_distance, contraction_certificate, gamma_lower, ContractionCertificate, ContractionStatus,
    GammaLower, VertexGamma,
};
pub use report::Real;
pub use scenario::{
    count_supporting_points, count_supporting_points_exhaustive, scenario_certificate, scenario_epsilon,
    ScenarioCertificate, SupportingPoints, SAME_SET_TOL,
};
pub use validation::{contraction_check, empirical_violation, ViolationEstimate, VIOLATION_SLACK};
