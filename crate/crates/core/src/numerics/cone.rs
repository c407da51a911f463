//! Minimum Euclidean norm over a polytope facet intersected with a circular
//! cone, via Kelley cutting planes on the lifted problem
//!
//! ```text
//! min t  s.t.  ‖x‖ <= t,  x ∈ facet,  uᵀx >= δ‖u‖ t
//! ```
//!
//! The norm cone is outer-approximated by tangent cuts `gᵀx <= t`, so every
//! LP value is a lower bound on the true optimum and an infeasible LP proves
//! the facet misses the cone.

use crate::error::{Error, Result};
use crate::numerics::linalg::norm;
use crate::numerics::lp::{solve_lp, LinearProgram, LpOutcome, Relation};

const MAX_CUTS: usize = 500;
const CUT_TOL: f64 = 1e-9;

/// A bounded piece of the hyperplane `normalᵀx = offset`, cut out by
/// `aᵀx <= b` for every `(a, b)` in `bounds`.
#[derive(Clone, Debug)]
pub struct FacetPiece {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub bounds: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeMinNorm {
    Value(f64),
    Infeasible,
}

impl ConeMinNorm {
    pub fn value(self) -> Option<f64> {
        match self {
            ConeMinNorm::Value(v) => Some(v),
            ConeMinNorm::Infeasible => None,
        }
    }
}

pub fn min_norm_on_facet_in_cone(facet: &FacetPiece, u: &[f64], delta: f64) -> Result<ConeMinNorm> {
    let n = u.len();
    Error::check_dim(n, facet.normal.len())?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::arg(format!("cone cosine {delta} outside [0, 1]")));
    }
    let u_norm = norm(u);
    if u_norm == 0.0 {
        return Err(Error::arg("cone direction must be nonzero"));
    }
    let h_norm = norm(&facet.normal);
    if h_norm == 0.0 {
        return Err(Error::arg("facet normal must be nonzero"));
    }

    // Variables: x_0..x_{n-1} (free), t >= 0.
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(objective).lower_bound(n, 0.0);
    let lift = |mut a: Vec<f64>, tcoef: f64| {
        a.push(tcoef);
        a
    };
    lp.push(lift(facet.normal.clone(), 0.0), Relation::Eq, facet.offset);
    for (a, b) in &facet.bounds {
        Error::check_dim(n, a.len())?;
        lp.push(lift(a.clone(), 0.0), Relation::Le, *b);
    }
    lp.push(lift(u.to_vec(), -delta * u_norm), Relation::Ge, 0.0);

    let add_cut = |lp: &mut LinearProgram, g: Vec<f64>| {
        lp.push(lift(g, -1.0), Relation::Le, 0.0);
    };
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            add_cut(&mut lp, e);
        }
    }
    let sign = facet.offset.signum();
    add_cut(&mut lp, facet.normal.iter().map(|v| sign * v / h_norm).collect());
    add_cut(&mut lp, u.iter().map(|v| v / u_norm).collect());

    for _ in 0..MAX_CUTS {
        match solve_lp(&lp)? {
            LpOutcome::Infeasible => return Ok(ConeMinNorm::Infeasible),
            LpOutcome::Unbounded => {
                return Err(Error::numerical("cone min-norm relaxation is unbounded"))
            }
            LpOutcome::Optimal { point, .. } => {
                let x = &point[..n];
                let t = point[n];
                let r = norm(x);
                if r - t <= CUT_TOL * r.max(1.0) {
                    return Ok(ConeMinNorm::Value(t.max(0.0)));
                }
                add_cut(&mut lp, x.iter().map(|v| v / r).collect());
            }
        }
    }
    Err(Error::numerical(format!(
        "cone min-norm cutting planes did not converge within {MAX_CUTS} cuts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cosine(x: &[f64], u: &[f64]) -> f64 {
        crate::numerics::linalg::dot(x, u) / (norm(x) * norm(u))
    }

    fn square_facet_right(lo: f64, hi: f64) -> FacetPiece {
        FacetPiece {
            normal: vec![1.0, 0.0],
            offset: 1.0,
            bounds: vec![(vec![0.0, 1.0], hi), (vec![0.0, -1.0], -lo)],
        }
    }

    #[test]
    fn square_facet_in_diagonal_cone() {
        let facet = square_facet_right(-1.0, 1.0);
        let delta = (0.05 * PI).cos();
        let got = min_norm_on_facet_in_cone(&facet, &[1.0, 1.0], delta).unwrap().value().unwrap();
        let exact = (1.0 + (PI / 4.0 - 0.05 * PI).tan().powi(2)).sqrt();
        assert!((got - exact).abs() < 1e-5, "{got} vs {exact}");
        // Dense grid oracle over the facet parameter.
        let grid = (0..=200_000)
            .map(|i| -1.0 + 2.0 * i as f64 / 200_000.0)
            .filter(|&s| cosine(&[1.0, s], &[1.0, 1.0]) >= delta)
            .map(|s| (1.0 + s * s).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(got <= grid + 1e-9 && grid - got < 1e-4);
    }

    #[test]
    fn perpendicular_foot_inside_cone() {
        let facet = square_facet_right(-0.1, 0.1);
        let got = min_norm_on_facet_in_cone(&facet, &[1.0, 0.0], 0.5).unwrap();
        assert!((got.value().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn opposite_half_space_is_infeasible() {
        let facet = FacetPiece { normal: vec![-1.0, 0.0], offset: 1.0, bounds: vec![] };
        let got = min_norm_on_facet_in_cone(&facet, &[1.0, 0.0], 0.9).unwrap();
        assert_eq!(got, ConeMinNorm::Infeasible);
    }

    #[test]
    fn never_below_hyperplane_distance() {
        let facet = FacetPiece {
            normal: vec![1.0, 1.0, 0.5],
            offset: 1.0,
            bounds: vec![
                (vec![1.0, 0.0, 0.0], 1.0),
                (vec![0.0, 1.0, 0.0], 1.0),
                (vec![0.0, 0.0, 1.0], 1.0),
                (vec![-1.0, 0.0, 0.0], 1.0),
                (vec![0.0, -1.0, 0.0], 1.0),
                (vec![0.0, 0.0, -1.0], 1.0),
            ],
        };
        let dist = 1.0 / norm(&facet.normal);
        for u in [[1.0, 0.0, 0.0], [0.3, 0.2, 1.0], [1.0, 1.0, 0.5], [0.0, -1.0, 1.0]] {
            if let ConeMinNorm::Value(v) = min_norm_on_facet_in_cone(&facet, &u, 0.8).unwrap() {
                assert!(v >= dist - 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let facet = square_facet_right(-1.0, 1.0);
        assert!(min_norm_on_facet_in_cone(&facet, &[0.0, 0.0], 0.5).is_err());
        assert!(min_norm_on_facet_in_cone(&facet, &[1.0, 0.0], 1.5).is_err());
        assert!(min_norm_on_facet_in_cone(&facet, &[1.0, 0.0, 0.0], 0.5).is_err());
    }
}
