//! A-priori contraction certificate.
//!
//! For every vertex `u` the boundary of `S` is searched inside the cone of
//! half-angle `θ(ε)` around `u`; the closest such boundary point bounds how
//! far a violating cap can push the contraction rate.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::bounds::{confidence_bound, delta_theta};
use super::report::{real, reals, Real, Report};
use crate::error::{Error, Result};
use crate::geometry::{cap_measure, Polytope};
use crate::numerics::{min_norm_on_facet_in_cone, norm, ConeMinNorm};

/// Per-vertex term of the lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexGamma {
    pub vertex: Vec<f64>,
    /// Smallest norm of a boundary point inside the vertex cone.
    pub d_min: f64,
    /// `δ · d_min / ‖u‖`.
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaLower {
    pub value: f64,
    pub delta: f64,
    pub theta: f64,
    pub per_vertex: Vec<VertexGamma>,
}

impl GammaLower {
    /// Contraction rate `1 / γ̲`.
    pub fn rate(&self) -> f64 {
        1.0 / self.value
    }
}

/// Closest boundary point of `s` to the origin inside the cone of cosine
/// `delta` around `u`.
pub fn cone_boundary_distance(s: &Polytope, u: &[f64], delta: f64) -> Result<f64> {
    Error::check_dim(s.dim(), u.len())?;
    let mut order: Vec<(f64, usize)> = s.facets().iter().map(|h| 1.0 / norm(h)).zip(0..).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // `u` lies on the boundary inside its own cone, so `‖u‖` is feasible when
    // `u` is a vertex; otherwise start from the ray's exit point.
    let g = s.gauge(u);
    let mut best = if g > 0.0 { norm(u) / g } else { f64::INFINITY };
    for (plane_distance, f) in order {
        if plane_distance >= best {
            break;
        }
        if let ConeMinNorm::Value(d) = min_norm_on_facet_in_cone(&s.facet_piece(f), u, delta)? {
            best = best.min(d);
        }
    }
    if !best.is_finite() {
        return Err(Error::numerical("vertex cone meets no facet"));
    }
    Ok(best)
}

/// `γ̲(S, ε) = min_u δ(ε)·d_min(u)/‖u‖` over the vertices `u` of `S`.
pub fn gamma_lower(s: &Polytope, epsilon: f64) -> Result<GammaLower> {
    let (delta, theta) = delta_theta(epsilon, s.dim())?;
    let mut per_vertex = Vec::with_capacity(s.vertices().len());
    for u in s.vertices() {
        let d_min = cone_boundary_distance(s, u, delta)?;
        per_vertex.push(VertexGamma {
            vertex: u.clone(),
            d_min,
            gamma: delta * d_min / norm(u),
        });
    }
    let value = per_vertex.iter().map(|v| v.gamma).fold(f64::INFINITY, f64::min);
    Ok(GammaLower {
        value,
        delta,
        theta,
        per_vertex,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ContractionStatus {
    Certified,
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionCertificate {
    pub epsilon: f64,
    pub samples: u64,
    pub modes: usize,
    pub dim: usize,
    pub delta: f64,
    pub theta: f64,
    /// Failure probability bound `ℬ(ε; N)`; above 1 means vacuous.
    pub confidence_bound: f64,
    pub status: ContractionStatus,
    /// Measure of the doubled cap, `½·I(sin²(2θ); (n−1)/2, ½)`.
    pub effective_violation: Option<f64>,
    pub gamma: Option<GammaLower>,
}

impl ContractionCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == ContractionStatus::Certified
    }

    pub fn gamma_lower(&self) -> Option<f64> {
        self.gamma.as_ref().map(|g| g.value)
    }

    /// Certified contraction rate `λ = 1/γ̲`.
    pub fn lambda(&self) -> Option<f64> {
        self.gamma.as_ref().map(GammaLower::rate)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Inputs {
            epsilon: Real,
            #[serde(rename = "N")]
            samples: u64,
            #[serde(rename = "M")]
            modes: usize,
            n: usize,
        }
        #[derive(Serialize)]
        struct Out {
            status: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            reason: Option<String>,
            delta: Real,
            theta: Real,
            confidence_bound: Real,
            effective_violation: Option<Real>,
            effective_delta: Option<Real>,
            gamma_lower: Option<Real>,
            lambda: Option<Real>,
        }
        #[derive(Serialize)]
        struct PerVertex {
            vertex: Vec<Real>,
            d_min: Real,
            gamma: Real,
        }
        let (status, reason) = match &self.status {
            ContractionStatus::Certified => ("certified", None),
            ContractionStatus::Inconclusive(r) => ("inconclusive", Some(r.clone())),
        };
        let report = Report {
            kind: "contraction",
            inputs: Inputs {
                epsilon: real(self.epsilon),
                samples: self.samples,
                modes: self.modes,
                n: self.dim,
            },
            result: Out {
                status,
                reason,
                delta: real(self.delta),
                theta: real(self.theta),
                confidence_bound: real(self.confidence_bound),
                effective_violation: self.effective_violation.map(real),
                effective_delta: self.gamma.as_ref().map(|g| real(g.delta)),
                gamma_lower: self.gamma_lower().map(real),
                lambda: self.lambda().map(real),
            },
            per_vertex: self
                .gamma
                .iter()
                .flat_map(|g| &g.per_vertex)
                .map(|v| PerVertex {
                    vertex: reals(&v.vertex),
                    d_min: real(v.d_min),
                    gamma: real(v.gamma),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&report)?)
    }
}

/// Contraction rate that holds with probability at least `1 − ℬ(ε; N)` when
/// `s` was computed from `samples` uniform observations of `modes` modes.
///
/// The violating cap can be at most twice as wide as the sampling cap, so the
/// rate uses the level of the doubled cap. Past a right angle the cap formulas
/// no longer apply and the result is inconclusive.
pub fn contraction_certificate(
    s: &Polytope,
    epsilon: f64,
    samples: u64,
    modes: usize,
) -> Result<ContractionCertificate> {
    let n = s.dim();
    let (delta, theta) = delta_theta(epsilon, n)?;
    let mut cert = ContractionCertificate {
        epsilon,
        samples,
        modes,
        dim: n,
        delta,
        theta,
        confidence_bound: confidence_bound(epsilon, samples, modes, n)?,
        status: ContractionStatus::Certified,
        effective_violation: None,
        gamma: None,
    };
    if 2.0 * theta > FRAC_PI_2 {
        cert.status = ContractionStatus::Inconclusive(format!(
            "doubled cap angle {:.6} exceeds a right angle",
            2.0 * theta
        ));
        return Ok(cert);
    }
    let eff = cap_measure(2.0 * theta, n)?;
    cert.effective_violation = Some(eff);
    if eff >= 0.5 {
        cert.status = ContractionStatus::Inconclusive("effective violation level reaches 1/2".into());
        return Ok(cert);
    }
    cert.gamma = Some(gamma_lower(s, eff)?);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, RandomSource};
    use std::f64::consts::PI;

    fn square() -> Polytope {
        Polytope::unit_box(2).unwrap()
    }

    fn random_polytope(n: usize, rng: &mut RandomSource) -> Polytope {
        let k = 4 + rng.index(6);
        let extra: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| 1.6 * rng.gaussian()).collect())
            .collect();
        Polytope::unit_box(n).unwrap().convex_hull_add(&extra).unwrap()
    }

    /// Exact closest boundary point in a cone: maximise the gauge over the
    /// spherical cap, facet by facet.
    fn closed_form_distance(s: &Polytope, u: &[f64], theta: f64) -> f64 {
        s.facets()
            .iter()
            .map(|h| {
                let c = (dot(h, u) / (norm(h) * norm(u))).clamp(-1.0, 1.0);
                let gap = (c.acos() - theta).max(0.0);
                if gap >= PI / 2.0 {
                    f64::INFINITY
                } else {
                    1.0 / (norm(h) * gap.cos())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn square_closed_form() {
        let g = gamma_lower(&square(), 0.05).unwrap();
        let want = (0.05 * PI).cos() * (1.0 + (PI / 4.0 - 0.05 * PI).tan().powi(2)).sqrt() / 2f64.sqrt();
        assert!((want - 0.8632).abs() < 1e-4);
        assert_eq!(g.per_vertex.len(), 4);
        for v in &g.per_vertex {
            assert!((v.gamma - want).abs() <= 1e-6, "{}", v.gamma);
        }
        assert!((g.rate() - 1.1585).abs() < 1e-3);
    }

    #[test]
    fn small_level_tends_to_one() {
        let mut rng = RandomSource::new(2);
        let s = random_polytope(2, &mut rng);
        let mut prev = 0.0;
        for e in [0.2, 0.1, 0.01, 1e-4, 1e-6] {
            let g = gamma_lower(&s, e).unwrap().value;
            assert!(g >= prev - 1e-9);
            prev = g;
        }
        assert!((prev - 1.0).abs() < 1e-4);
    }

    #[test]
    fn per_facet_minimum_matches_closed_form() {
        let mut rng = RandomSource::new(7);
        for n in [2, 3] {
            for _ in 0..4 {
                let s = random_polytope(n, &mut rng);
                for e in [0.02, 0.1, 0.3] {
                    let (delta, theta) = delta_theta(e, n).unwrap();
                    for u in s.vertices() {
                        let got = cone_boundary_distance(&s, u, delta).unwrap();
                        let want = closed_form_distance(&s, u, theta);
                        assert!((got - want).abs() <= 1e-6, "n={n} e={e}: {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn planar_certificate_doubles_level() {
        let c = contraction_certificate(&square(), 0.05, 500, 2).unwrap();
        assert!(c.is_certified());
        assert!((c.effective_violation.unwrap() - 0.1).abs() <= 1e-9);
        let direct = gamma_lower(&square(), 0.1).unwrap().value;
        assert!((c.gamma_lower().unwrap() - direct).abs() <= 1e-9);
        let text = c.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["type"], "contraction");
        assert_eq!(v["per_vertex"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn wide_caps_are_inconclusive() {
        let c = contraction_certificate(&square(), 0.3, 500, 2).unwrap();
        assert!(!c.is_certified());
        assert!(c.lambda().is_none());
        let cube = Polytope::unit_box(4).unwrap();
        let c = contraction_certificate(&cube, 0.4, 500, 2).unwrap();
        assert!(matches!(c.status, ContractionStatus::Inconclusive(_)));
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["result"]["status"], "inconclusive");
        assert!(v["result"]["lambda"].is_null());
    }
}
