//! Cap-angle conversions and the a-priori sample-complexity bound.

use crate::error::{Error, Result};
use crate::numerics::{reg_inc_beta, reg_inc_beta_inv};

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::arg(format!("violation level {epsilon} outside (0, 1/2)")))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::arg("dimension must be at least 2"))
    }
}

fn shape(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// `(δ, θ)` of the cap whose normalized measure is `epsilon`:
/// `δ = √(1 − I⁻¹(2ε; (n−1)/2, ½))`, `θ = arccos δ`.
pub fn delta_theta(epsilon: f64, n: usize) -> Result<(f64, f64)> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    let s2 = reg_inc_beta_inv(2.0 * epsilon, shape(n), 0.5)?;
    let delta = (1.0 - s2).max(0.0).sqrt();
    Ok((delta, delta.acos()))
}

/// Upper bound `2 / I(sin²(θ/2); (n−1)/2, ½)` on the number of caps of
/// measure `epsilon` needed to cover the sphere.
pub fn packing_bound(epsilon: f64, n: usize) -> Result<f64> {
    let (_, theta) = delta_theta(epsilon, n)?;
    Ok(2.0 / reg_inc_beta((theta / 2.0).sin().powi(2), shape(n), 0.5)?)
}

fn ln_confidence(epsilon: f64, samples: u64, modes: usize, n: usize) -> Result<f64> {
    if modes == 0 {
        return Err(Error::arg("mode count must be at least 1"));
    }
    let m = modes as f64;
    Ok(m.ln() + samples as f64 * (-epsilon / m).ln_1p() + packing_bound(epsilon, n)?.ln())
}

/// `ℬ(ε; N) = M (1 − ε/M)^N · packing_bound(ε, n)`, evaluated in log space.
/// Values above 1 mean the bound is vacuous.
pub fn confidence_bound(epsilon: f64, samples: u64, modes: usize, n: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::arg("sample count must be at least 1"));
    }
    Ok(ln_confidence(epsilon, samples, modes, n)?.exp())
}

/// Smallest `N >= 1` with `ℬ(ε; N) <= beta`.
pub fn solve_samples_for_confidence(epsilon: f64, beta: f64, modes: usize, n: usize) -> Result<u64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::arg(format!("confidence {beta} outside (0, 1)")));
    }
    let base = ln_confidence(epsilon, 0, modes, n)?;
    let step = (-epsilon / modes as f64).ln_1p();
    let guess = ((beta.ln() - base) / step).ceil().max(1.0);
    if guess > 1e15 {
        return Err(Error::numerical("required sample count overflows"));
    }
    let mut samples = guess as u64;
    while confidence_bound(epsilon, samples, modes, n)? > beta {
        samples += 1;
    }
    while samples > 1 && confidence_bound(epsilon, samples - 1, modes, n)? <= beta {
        samples -= 1;
    }
    Ok(samples)
}

/// Smallest violation level with `ℬ(ε; N) <= beta`, or `None` if even
/// `ε → 1/2` is not enough.
pub fn solve_epsilon_for_confidence(samples: u64, beta: f64, modes: usize, n: usize) -> Result<Option<f64>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::arg(format!("confidence {beta} outside (0, 1)")));
    }
    let bound = |e: f64| confidence_bound(e, samples, modes, n);
    let mut hi = 0.5 - 1e-12;
    if bound(hi)? > beta {
        return Ok(None);
    }
    let mut lo = 1e-12;
    if bound(lo)? <= beta {
        return Ok(Some(lo));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound(mid)? <= beta {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 {
            break;
        }
    }
    Ok(Some(hi))
}
