//! Ground-truth checks. These are the only certify functions that read the
//! true mode matrices.

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::numerics::{sample_unit_sphere, RandomSource};
use crate::system::SwitchedLinearSystem;

/// Relative slack before a gauge increase counts as a violation. Matches the
/// default stopping tolerance of the sample-based iteration, whose output is
/// only invariant up to that factor.
pub const VIOLATION_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViolationEstimate {
    /// Fraction of probes that violate.
    pub estimate: f64,
    /// 95% Wilson score half-width.
    pub half_width: f64,
    pub probes: usize,
}

fn wilson_half_width(hits: usize, probes: usize) -> f64 {
    let z = 1.959963984540054;
    let n = probes as f64;
    let p = hits as f64 / n;
    z / (1.0 + z * z / n) * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()
}

fn check_inputs(s: &Polytope, sys: &SwitchedLinearSystem, probes: usize) -> Result<()> {
    Error::check_dim(s.dim(), sys.dim())?;
    if probes == 0 {
        return Err(Error::arg("probe count must be at least 1"));
    }
    Ok(())
}

/// Monte-Carlo measure of the unit-sphere directions where some mode
/// increases the gauge of `s`.
pub fn empirical_violation(
    s: &Polytope,
    sys: &SwitchedLinearSystem,
    probes: usize,
    rng: &mut RandomSource,
) -> Result<ViolationEstimate> {
    check_inputs(s, sys, probes)?;
    let mut hits = 0;
    for _ in 0..probes {
        let x = sample_unit_sphere(s.dim(), rng);
        let limit = s.gauge(&x) * (1.0 + VIOLATION_SLACK);
        if sys.matrices().iter().any(|a| s.gauge(&a.mul_vec(&x)) > limit) {
            hits += 1;
        }
    }
    Ok(ViolationEstimate {
        estimate: hits as f64 / probes as f64,
        half_width: wilson_half_width(hits, probes),
        probes,
    })
}

/// Fraction of boundary probes `x` (sphere directions scaled onto `∂s`) with
/// `max_A ‖Ax‖_s > lambda + 1e-9`.
pub fn contraction_check(
    s: &Polytope,
    sys: &SwitchedLinearSystem,
    lambda: f64,
    probes: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    check_inputs(s, sys, probes)?;
    let mut hits = 0;
    for _ in 0..probes {
        let d = sample_unit_sphere(s.dim(), rng);
        let g = s.gauge(&d);
        let x: Vec<f64> = d.iter().map(|v| v / g).collect();
        let worst = sys.matrices().iter().map(|a| s.gauge(&a.mul_vec(&x))).fold(0.0, f64::max);
        if worst > lambda + 1e-9 {
            hits += 1;
        }
    }
    Ok(hits as f64 / probes as f64)
}
