use std::f64::consts::FRAC_PI_2;

use super::Polytope;
use crate::error::{Error, Result};
use crate::numerics::{dot, min_norm_on_facet_in_cone, reg_inc_beta, ConeMinNorm};

/// Circular cone `{x : uᵀx >= ‖x‖‖u‖cos θ}` around `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    u: Vec<f64>,
    theta: f64,
}

impl ConeSpec {
    pub fn new(u: Vec<f64>, theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::arg(format!("cone angle {theta} outside [0, π/2]")));
        }
        if u.iter().any(|x| !x.is_finite()) || u.iter().all(|&x| x == 0.0) {
            return Err(Error::arg("cone direction must be finite and nonzero"));
        }
        Ok(Self { u, theta })
    }

    pub fn direction(&self) -> &[f64] {
        &self.u
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    /// `cos θ`, clamped so that `θ = π/2` gives exactly zero.
    pub fn cosine(&self) -> f64 {
        if self.theta >= FRAC_PI_2 {
            0.0
        } else {
            self.theta.cos()
        }
    }
}

/// Normalized surface measure of a spherical cap of half-angle `theta` on
/// `S^{n-1}`: `½·I(sin²θ; (n-1)/2, ½)`.
pub fn cap_measure(theta: f64, n: usize) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::arg(format!("cap angle {theta} outside [0, π/2]")));
    }
    if n < 2 {
        return Err(Error::arg("cap measure needs n >= 2"));
    }
    if theta >= FRAC_PI_2 {
        return Ok(0.5);
    }
    Ok(0.5 * reg_inc_beta(theta.sin().powi(2), (n as f64 - 1.0) / 2.0, 0.5)?)
}

/// Indices of the facets of `s` that meet the cone.
pub fn vertices_in_cone(s: &Polytope, cone: &ConeSpec) -> Result<Vec<usize>> {
    Error::check_dim(s.dim(), cone.direction().len())?;
    let u = cone.direction();
    let delta = cone.cosine();
    let mut hits = Vec::new();
    for f in 0..s.facets().len() {
        // A facet strictly on the far side of the plane uᵀx = 0 cannot meet
        // the cone; with δ = 0 the cone is the closed half-space itself.
        if s.incidence()[f].iter().all(|&v| dot(u, &s.vertices()[v]) < 0.0) {
            continue;
        }
        if let ConeMinNorm::Value(_) = min_norm_on_facet_in_cone(&s.facet_piece(f), u, delta)? {
            hits.push(f);
        }
    }
    Ok(hits)
}
