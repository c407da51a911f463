//! A-posteriori certificate from the number of supporting samples.
//!
//! A sample is supporting when leaving it out changes the data-driven set.
//! Only pairs that ever produced a vertex, or were the lone violator at a
//! failed stopping check, can do that; every other pair is ruled out without
//! a rerun.

use serde::Serialize;

use super::contraction::{gamma_lower, GammaLower};
use super::report::{real, reals, Real, Report};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::invariance::{data_driven_run, data_driven_run_without, DataDrivenRun, IterationConfig};
use crate::numerics::log_binomial;
use crate::system::SampleSet;

/// Vertex-matching tolerance when comparing leave-one-out results.
pub const SAME_SET_TOL: f64 = 1e-9;

/// Violation level `ε(k)` that holds with confidence `1 − beta` given `k`
/// supporting samples out of `samples`.
pub fn scenario_epsilon(k: u64, samples: u64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::arg(format!("confidence {beta} outside (0, 1)")));
    }
    if samples == 0 || k > samples {
        return Err(Error::arg(format!("support count {k} not in 0..={samples}")));
    }
    if k == samples {
        return Ok(1.0);
    }
    let exponent = (beta.ln() - (samples as f64).ln() - log_binomial(samples, k)?) / (samples - k) as f64;
    Ok((-exponent.exp_m1()).clamp(0.0, 1.0))
}

#[derive(Clone, Debug)]
pub struct SupportingPoints {
    /// Sorted indices of supporting pairs.
    pub indices: Vec<usize>,
    /// Number of leave-one-out reruns performed.
    pub reruns: usize,
    pub run: DataDrivenRun,
}

impl SupportingPoints {
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

fn supporting_among(
    samples: &SampleSet,
    initial: &Polytope,
    cfg: &IterationConfig,
    run: DataDrivenRun,
    candidates: Vec<usize>,
) -> Result<SupportingPoints> {
    let quiet = IterationConfig {
        record_iterates: false,
        ..cfg.clone()
    };
    let mut indices = Vec::new();
    for &i in &candidates {
        let rerun = data_driven_run_without(samples, i, initial, &quiet)?;
        if !rerun.set.same_vertices(&run.set, SAME_SET_TOL) {
            indices.push(i);
        }
    }
    Ok(SupportingPoints {
        indices,
        reruns: candidates.len(),
        run,
    })
}

/// Supporting pairs, rerunning only the candidates the full run flagged.
pub fn count_supporting_points(
    samples: &SampleSet,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<SupportingPoints> {
    let run = data_driven_run(samples, initial, cfg)?;
    let candidates = run.candidates.iter().copied().collect();
    supporting_among(samples, initial, cfg, run, candidates)
}

/// Supporting pairs by rerunning without every single pair.
pub fn count_supporting_points_exhaustive(
    samples: &SampleSet,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<SupportingPoints> {
    let run = data_driven_run(samples, initial, cfg)?;
    supporting_among(samples, initial, cfg, run, (0..samples.len()).collect())
}

#[derive(Clone, Debug)]
pub struct ScenarioCertificate {
    pub beta: f64,
    pub samples: u64,
    pub modes: usize,
    pub dim: usize,
    pub support_indices: Vec<usize>,
    pub epsilon_of_s: f64,
    /// `min(1, M·ε(s))`.
    pub almost_invariance_level: f64,
    /// Level at or above 1/2: no contraction rate can be derived from it.
    pub vacuous: bool,
    /// `γ̲` at the almost-invariance level, when not vacuous.
    pub gamma: Option<GammaLower>,
    pub set: Polytope,
}

impl ScenarioCertificate {
    pub fn support_count(&self) -> usize {
        self.support_indices.len()
    }

    /// `λ_ε = 1/γ̲(set, M·ε(s))`.
    pub fn lambda_epsilon(&self) -> Option<f64> {
        self.gamma.as_ref().map(GammaLower::rate)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Inputs {
            beta: Real,
            #[serde(rename = "N")]
            samples: u64,
            #[serde(rename = "M")]
            modes: usize,
            n: usize,
        }
        #[derive(Serialize)]
        struct Out {
            status: &'static str,
            support_count: usize,
            support_indices: Vec<usize>,
            epsilon_of_s: Real,
            almost_invariance_level: Real,
            vacuous: bool,
            gamma_lower: Option<Real>,
            lambda_epsilon: Option<Real>,
        }
        #[derive(Serialize)]
        struct PerVertex {
            vertex: Vec<Real>,
            d_min: Real,
            gamma: Real,
        }
        let report = Report {
            kind: "scenario",
            inputs: Inputs {
                beta: real(self.beta),
                samples: self.samples,
                modes: self.modes,
                n: self.dim,
            },
            result: Out {
                status: if self.vacuous { "vacuous" } else { "certified" },
                support_count: self.support_count(),
                support_indices: self.support_indices.clone(),
                epsilon_of_s: real(self.epsilon_of_s),
                almost_invariance_level: real(self.almost_invariance_level),
                vacuous: self.vacuous,
                gamma_lower: self.gamma.as_ref().map(|g| real(g.value)),
                lambda_epsilon: self.lambda_epsilon().map(real),
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

/// Runs the data-driven iteration, counts supporting pairs and turns the
/// count into an almost-invariance level with confidence `1 − beta`.
pub fn scenario_certificate(
    samples: &SampleSet,
    initial: &Polytope,
    cfg: &IterationConfig,
    beta: f64,
) -> Result<ScenarioCertificate> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::arg(format!("confidence {beta} outside (0, 1)")));
    }
    let support = count_supporting_points(samples, initial, cfg)?;
    let n_samples = samples.len() as u64;
    let epsilon_of_s = scenario_epsilon(support.count() as u64, n_samples, beta)?;
    let raw_level = samples.mode_count() as f64 * epsilon_of_s;
    let level = raw_level.min(1.0);
    let vacuous = level >= 0.5;
    let gamma = if vacuous {
        None
    } else {
        Some(gamma_lower(&support.run.set, level)?)
    };
    Ok(ScenarioCertificate {
        beta,
        samples: n_samples,
        modes: samples.mode_count(),
        dim: samples.dim(),
        support_indices: support.indices,
        epsilon_of_s,
        almost_invariance_level: level,
        vacuous,
        gamma,
        set: support.run.set,
    })
}
